#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cdr/cd_rate.hpp"
#include "cdr/prob.hpp"

namespace cdr {

// Typicality tolerances: the base delta and the multipliers used by source
// screening (k0), codeword search (k1) and the two decoders (k2, k3).
struct TypicalityParams {
    double delta = 0.04;
    double k0 = 1.0;
    double k1 = 2.0;
    double k2 = 0.0;  // 0 = derive as 2 * k1 * |X|
    double k3 = 0.0;  // 0 = derive as 2 * k1 * |Y|

    TypicalityParams resolved(int x_size, int y_size) const;
    void validate(int x_size, int y_size) const;
};

struct CodebookConfig {
    int n = 12;
    double gamma = 0.15;
    double m1 = 1.0;
    double l1 = 1.0;
    double l2 = 1.0;
    std::uint64_t seed = 1;
    // Derived by derive_codebook_config.
    std::uint64_t codewords = 0;     // M_U
    std::uint64_t bin_width = 0;     // L_U
    std::uint64_t bins = 0;          // N_U
};

// Fills the derived fields from the three mutual informations of the
// optimized channel: M_U >= exp{n (I(XY;U) + m1 gamma)}, L_U <=
// exp{n (min(I(X;U), I(Y;U)) - max(l1,l2) gamma)}, N_U = M_U / L_U.
CodebookConfig derive_codebook_config(CodebookConfig cfg, double i_xy_u, double i_x_u,
                                      double i_y_u);

struct Codebook {
    int n = 0;
    int u_size = 0;
    std::uint64_t bin_width = 0;
    std::vector<std::vector<int>> words;  // words[i], i in [0, M_U)

    std::uint64_t bins() const { return words.size() / bin_width; }
    // Codeword index (0-based) -> bin index (0-based).
    std::uint64_t bin_of(std::uint64_t index) const { return index / bin_width; }
};

// True iff every letter tuple's empirical frequency deviates from the
// reference probability by at most tol. `seqs` holds one sequence per
// coordinate of `ref`.
bool is_typical(const std::vector<const std::vector<int>*>& seqs, const JointSource& ref,
                double tol);

// M_U i.i.d. length-n codewords from the U-marginal, contiguous bins.
Codebook build_codebook(const std::vector<double>& p_u, const CodebookConfig& cfg);

struct EncodeResult {
    bool failed = false;        // event E_1: no jointly typical codeword
    std::uint64_t bin = 0;      // 0-based; bin of u^n(1) on failure
    std::uint64_t codeword = 0; // 0-based index of the selected codeword
};

EncodeResult encode(const std::vector<int>& xs, const std::vector<int>& ys,
                    const Codebook& book, const JointSource& uxy, double tol);

struct DecodeResult {
    bool declared_error = false;  // zero or multiple typical codewords in bin
    std::uint64_t codeword = 0;   // first-in-bin on declared error
};

// Scans bin `bin` for a unique codeword jointly typical with the side
// sequence under the (U, side) marginal `u_side`.
DecodeResult decode(std::uint64_t bin, const std::vector<int>& side, const Codebook& book,
                    const JointSource& u_side, double tol);

std::vector<int> reconstruct(const std::vector<int>& u_hat, const std::vector<int>& side,
                             const DecoderRule& rule);

struct SimulationRecord {
    int n = 0;
    std::uint64_t codewords = 0;  // M_U
    std::uint64_t bin_width = 0;  // L_U
    std::uint64_t bins = 0;       // N_U
    double rate_nats = 0.0;       // (1/n) log N_U
    double p_source_atypical = 0.0;  // Pr{E_0^c}
    double p_encode_fail = 0.0;
    double p_decode1_fail = 0.0;
    double p_decode2_fail = 0.0;
    double dist_x = 0.0;  // average over all trials
    double dist_y = 0.0;
    int trials = 0;
    // Extra diagnostics: averages and worst case over fully successful trials.
    int success_trials = 0;
    double dist_x_success = 0.0;
    double dist_y_success = 0.0;
    double max_dist_x_success = 0.0;
    double max_dist_y_success = 0.0;
};

// One codebook per seed, fresh source pair per trial; per-trial RNG streams
// derive from (seed, trial index).
SimulationRecord run_trials(const JointSource& src, const AuxiliaryChannel& ch,
                            const std::pair<DecoderRule, DecoderRule>& decoders,
                            const std::pair<DistortionMeasure, DistortionMeasure>& dms,
                            const CodebookConfig& cfg, const TypicalityParams& params,
                            int trials);

}  // namespace cdr
