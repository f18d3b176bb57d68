#include "cdr/coding_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cdr {

namespace {

constexpr std::uint64_t kLetterBudget = 1ULL << 28;

double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

int sample_pmf(const std::vector<double>& cum, std::mt19937_64& gen) {
    const double r = uniform01(gen);
    const auto it = std::upper_bound(cum.begin(), cum.end(), r);
    return static_cast<int>(std::min<std::size_t>(it - cum.begin(), cum.size() - 1));
}

std::vector<double> cumulative(const std::vector<double>& pmf) {
    std::vector<double> cum(pmf.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        acc += pmf[i];
        cum[i] = acc;
    }
    cum.back() = std::max(cum.back(), 1.0);
    return cum;
}

JointSource uxy_joint(const JointSource& src, const AuxiliaryChannel& ch) {
    const int nx = src.sizes[0], ny = src.sizes[1];
    std::vector<double> pmf(static_cast<std::size_t>(ch.u_size) * nx * ny, 0.0);
    for (int x = 0; x < nx; ++x) {
        for (int y = 0; y < ny; ++y) {
            const std::size_t v = static_cast<std::size_t>(x) * ny + y;
            for (int u = 0; u < ch.u_size; ++u) {
                pmf[(static_cast<std::size_t>(u) * nx + x) * ny + y] =
                    src.pmf[v] * ch.rows[v][u];
            }
        }
    }
    return JointSource{{ch.u_size, nx, ny}, std::move(pmf)};
}

JointSource marginalize_coord(const JointSource& src, int drop) {
    std::vector<int> keep;
    for (int c = 0; c < src.coords(); ++c) {
        if (c != drop) keep.push_back(c);
    }
    std::vector<int> sizes;
    std::size_t cells = 1;
    for (int c : keep) {
        sizes.push_back(src.sizes[c]);
        cells *= static_cast<std::size_t>(src.sizes[c]);
    }
    std::vector<double> pmf(cells, 0.0);
    for (std::size_t cell = 0; cell < src.cells(); ++cell) {
        const auto letters = src.unravel(cell);
        std::size_t idx = 0;
        for (int c : keep) idx = idx * static_cast<std::size_t>(src.sizes[c]) + letters[c];
        pmf[idx] += src.pmf[cell];
    }
    return JointSource{std::move(sizes), std::move(pmf)};
}

std::uint64_t trial_stream(std::uint64_t seed, std::uint64_t trial) {
    // splitmix64 of (seed, trial) so concurrent trials stay reproducible.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

TypicalityParams TypicalityParams::resolved(int x_size, int y_size) const {
    TypicalityParams p = *this;
    if (p.k2 <= 0.0) p.k2 = 2.0 * p.k1 * x_size;
    if (p.k3 <= 0.0) p.k3 = 2.0 * p.k1 * y_size;
    p.validate(x_size, y_size);
    return p;
}

void TypicalityParams::validate(int x_size, int y_size) const {
    if (delta <= 0.0) throw ShapeMismatchError("delta must be > 0");
    // k0 < k1 is required so that typical source pairs admit a codeword
    // search at the wider tolerance; k2 (resp. k3) must absorb the
    // projection factor |X| (resp. |Y|) so the transmitted codeword always
    // passes the decoder's test.
    if (!(k0 < k1)) throw ShapeMismatchError("typicality multipliers must satisfy k0 < k1");
    if (!(k1 * x_size < k2))
        throw ShapeMismatchError("typicality multipliers must satisfy k1 |X| < k2");
    if (!(k1 * y_size < k3))
        throw ShapeMismatchError("typicality multipliers must satisfy k1 |Y| < k3");
}

CodebookConfig derive_codebook_config(CodebookConfig cfg, double i_xy_u, double i_x_u,
                                      double i_y_u) {
    const double n = static_cast<double>(cfg.n);
    const double m_bound = std::exp(n * (i_xy_u + cfg.m1 * cfg.gamma));
    const double l = std::max(cfg.l1, cfg.l2);
    const double l_bound = std::exp(n * (std::min(i_x_u, i_y_u) - l * cfg.gamma));
    const std::uint64_t m_base = static_cast<std::uint64_t>(std::ceil(m_bound));
    cfg.bin_width = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(l_bound)));
    cfg.bins = (m_base + cfg.bin_width - 1) / cfg.bin_width;
    cfg.codewords = cfg.bins * cfg.bin_width;
    return cfg;
}

bool is_typical(const std::vector<const std::vector<int>*>& seqs, const JointSource& ref,
                double tol) {
    if (seqs.size() != static_cast<std::size_t>(ref.coords()))
        throw LengthMismatchError("one sequence per coordinate is required");
    const std::size_t n = seqs[0]->size();
    for (const auto* s : seqs) {
        if (s->size() != n) throw LengthMismatchError("sequences must share one length");
    }
    std::vector<int> counts(ref.cells(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t idx = 0;
        for (int c = 0; c < ref.coords(); ++c) {
            idx = idx * static_cast<std::size_t>(ref.sizes[c]) +
                  static_cast<std::size_t>((*seqs[c])[k]);
        }
        ++counts[idx];
    }
    for (std::size_t cell = 0; cell < ref.cells(); ++cell) {
        if (std::abs(static_cast<double>(counts[cell]) / n - ref.pmf[cell]) > tol) return false;
    }
    return true;
}

Codebook build_codebook(const std::vector<double>& p_u, const CodebookConfig& cfg) {
    if (cfg.codewords == 0 || cfg.bin_width == 0)
        throw ShapeMismatchError("codebook config has no derived sizes");
    if (cfg.codewords * static_cast<std::uint64_t>(cfg.n) > kLetterBudget)
        throw TooLargeError("codebook exceeds the letter budget");
    Codebook book;
    book.n = cfg.n;
    book.u_size = static_cast<int>(p_u.size());
    book.bin_width = cfg.bin_width;
    book.words.assign(cfg.codewords, std::vector<int>(cfg.n, 0));
    const auto cum = cumulative(p_u);
    std::mt19937_64 gen(cfg.seed);
    for (auto& word : book.words) {
        for (int& letter : word) letter = sample_pmf(cum, gen);
    }
    return book;
}

EncodeResult encode(const std::vector<int>& xs, const std::vector<int>& ys,
                    const Codebook& book, const JointSource& uxy, double tol) {
    if (xs.size() != ys.size() || static_cast<int>(xs.size()) != book.n)
        throw LengthMismatchError("source sequences must have the codebook block length");
    for (std::uint64_t i = 0; i < book.words.size(); ++i) {
        if (is_typical({&book.words[i], &xs, &ys}, uxy, tol)) {
            return EncodeResult{false, book.bin_of(i), i};
        }
    }
    return EncodeResult{true, book.bin_of(0), 0};
}

DecodeResult decode(std::uint64_t bin, const std::vector<int>& side, const Codebook& book,
                    const JointSource& u_side, double tol) {
    const std::uint64_t first = bin * book.bin_width;
    std::uint64_t match = first;
    int matches = 0;
    for (std::uint64_t i = first; i < first + book.bin_width; ++i) {
        if (is_typical({&book.words[i], &side}, u_side, tol)) {
            match = i;
            if (++matches > 1) break;
        }
    }
    if (matches == 1) return DecodeResult{false, match};
    return DecodeResult{true, first};
}

std::vector<int> reconstruct(const std::vector<int>& u_hat, const std::vector<int>& side,
                             const DecoderRule& rule) {
    if (u_hat.size() != side.size()) throw LengthMismatchError("sequence lengths differ");
    std::vector<int> out(u_hat.size());
    for (std::size_t k = 0; k < u_hat.size(); ++k) out[k] = rule(u_hat[k], side[k]);
    return out;
}

SimulationRecord run_trials(const JointSource& src, const AuxiliaryChannel& ch,
                            const std::pair<DecoderRule, DecoderRule>& decoders,
                            const std::pair<DistortionMeasure, DistortionMeasure>& dms,
                            const CodebookConfig& cfg, const TypicalityParams& params,
                            int trials) {
    if (trials < 1) throw ShapeMismatchError("need at least one trial");
    const int nx = src.sizes[0], ny = src.sizes[1];
    const TypicalityParams tp = params.resolved(nx, ny);

    const JointSource uxy = uxy_joint(src, ch);
    const JointSource uy = marginalize_coord(uxy, 1);
    const JointSource ux = marginalize_coord(uxy, 2);
    std::vector<double> p_u(ch.u_size, 0.0);
    for (int u = 0; u < ch.u_size; ++u) {
        for (int x = 0; x < nx; ++x) {
            for (int y = 0; y < ny; ++y) {
                p_u[u] += uxy.pmf[(static_cast<std::size_t>(u) * nx + x) * ny + y];
            }
        }
    }

    const double i_xy_u = conditional_mutual_information(uxy, {1, 2}, {0}, {});
    const double i_x_u = conditional_mutual_information(uxy, {1}, {0}, {});
    const double i_y_u = conditional_mutual_information(uxy, {2}, {0}, {});
    const CodebookConfig derived = derive_codebook_config(cfg, i_xy_u, i_x_u, i_y_u);
    const Codebook book = build_codebook(p_u, derived);

    SimulationRecord rec;
    rec.n = cfg.n;
    rec.codewords = derived.codewords;
    rec.bin_width = derived.bin_width;
    rec.bins = derived.bins;
    rec.rate_nats = std::log(static_cast<double>(derived.bins)) / cfg.n;
    rec.trials = trials;

    const auto cum_xy = cumulative(src.pmf);
    std::vector<int> xs(cfg.n), ys(cfg.n);
    long atypical = 0, enc_fail = 0, dec1_fail = 0, dec2_fail = 0;
    double sum_dx = 0.0, sum_dy = 0.0, sum_dx_ok = 0.0, sum_dy_ok = 0.0;

    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 gen(trial_stream(cfg.seed, static_cast<std::uint64_t>(t)));
        for (int k = 0; k < cfg.n; ++k) {
            const int cell = sample_pmf(cum_xy, gen);
            xs[k] = cell / ny;
            ys[k] = cell % ny;
        }
        if (!is_typical({&xs, &ys}, src, tp.k0 * tp.delta)) ++atypical;

        const EncodeResult enc = encode(xs, ys, book, uxy, tp.k1 * tp.delta);
        if (enc.failed) ++enc_fail;
        const DecodeResult dec1 = decode(enc.bin, ys, book, uy, tp.k2 * tp.delta);
        if (dec1.declared_error) ++dec1_fail;
        const DecodeResult dec2 = decode(enc.bin, xs, book, ux, tp.k3 * tp.delta);
        if (dec2.declared_error) ++dec2_fail;

        const auto xhat = reconstruct(book.words[dec1.codeword], ys, decoders.first);
        const auto yhat = reconstruct(book.words[dec2.codeword], xs, decoders.second);
        double dx = 0.0, dy = 0.0;
        for (int k = 0; k < cfg.n; ++k) {
            dx += dms.first.matrix[xs[k]][xhat[k]];
            dy += dms.second.matrix[ys[k]][yhat[k]];
        }
        dx /= cfg.n;
        dy /= cfg.n;
        sum_dx += dx;
        sum_dy += dy;
        if (!enc.failed && !dec1.declared_error && !dec2.declared_error) {
            ++rec.success_trials;
            sum_dx_ok += dx;
            sum_dy_ok += dy;
            rec.max_dist_x_success = std::max(rec.max_dist_x_success, dx);
            rec.max_dist_y_success = std::max(rec.max_dist_y_success, dy);
        }
    }

    rec.p_source_atypical = static_cast<double>(atypical) / trials;
    rec.p_encode_fail = static_cast<double>(enc_fail) / trials;
    rec.p_decode1_fail = static_cast<double>(dec1_fail) / trials;
    rec.p_decode2_fail = static_cast<double>(dec2_fail) / trials;
    rec.dist_x = sum_dx / trials;
    rec.dist_y = sum_dy / trials;
    if (rec.success_trials > 0) {
        rec.dist_x_success = sum_dx_ok / rec.success_trials;
        rec.dist_y_success = sum_dy_ok / rec.success_trials;
    }
    return rec;
}

}  // namespace cdr
