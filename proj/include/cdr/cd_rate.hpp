#pragma once

#include <utility>

#include "cdr/minimax.hpp"
#include "cdr/prob.hpp"

namespace cdr {

// Per-target nonnegative distortion budgets.
struct DistortionBudget {
    std::vector<double> values;
};

struct CDSolution {
    double rate = 0.0;  // nats
    AuxiliaryChannel channel;
    DecoderRule decoder_x;  // phi_1 : U x Y -> Xhat
    DecoderRule decoder_y;  // phi_2 : U x X -> Yhat
    std::pair<double, double> achieved_distortions{0.0, 0.0};
    std::pair<double, double> mi_terms{0.0, 0.0};  // I(X;U|Y), I(Y;U|X)
    bool feasible = false;
    int restarts_used = 0;
};

struct SaturationReport {
    int u_size_default = 0;
    int u_size_large = 0;
    double rate_default = 0.0;
    double rate_large = 0.0;
    double difference = 0.0;
};

// Minimax spec for the two-decoder problem; exposed so tests can probe the
// smoothed objective and its gradient directly.
minimax::Spec cd_spec(const JointSource& src,
                      const std::pair<DistortionMeasure, DistortionMeasure>& dms,
                      const DistortionBudget& budgets, int u_size);

int default_cd_u_size(const JointSource& src);

// Posterior-optimal decoders for a fixed channel; ties and zero-probability
// (u, side) pairs resolve to reconstruction index 0.
std::pair<DecoderRule, DecoderRule> optimal_decoders(
    const JointSource& src, const AuxiliaryChannel& ch,
    const std::pair<DistortionMeasure, DistortionMeasure>& dms);

// max{ I(X;U|Y), I(Y;U|X) } under P_UXY = P_{U|XY} P_XY, in nats.
double cd_objective(const JointSource& src, const AuxiliaryChannel& ch);

std::pair<double, double> achieved_distortions(
    const JointSource& src, const AuxiliaryChannel& ch,
    const std::pair<DecoderRule, DecoderRule>& decoders,
    const std::pair<DistortionMeasure, DistortionMeasure>& dms);

// Multi-start alternating minimization; the returned rate is an upper bound
// on the true minimum.
CDSolution optimize_cd_rate(const JointSource& src,
                            const std::pair<DistortionMeasure, DistortionMeasure>& dms,
                            const DistortionBudget& budgets,
                            const OptimizerOptions& opts = {});

// Exhaustive simplex-grid search over channels for |X| = |Y| = 2; returns
// +infinity when no grid point is feasible.
double brute_force_cd_rate(const JointSource& src,
                           const std::pair<DistortionMeasure, DistortionMeasure>& dms,
                           const DistortionBudget& budgets, int u_size, int grid_q);

// Optimizes at |X||Y|+2 and |X||Y|+6 letters with the same seeds and reports
// both rates.
SaturationReport cardinality_saturation_check(
    const JointSource& src, const std::pair<DistortionMeasure, DistortionMeasure>& dms,
    const DistortionBudget& budgets, const OptimizerOptions& opts = {});

}  // namespace cdr
