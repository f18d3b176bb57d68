#include "cdr/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace cdr {

AuxiliaryChannel AuxiliaryChannel::one_hot(std::size_t n_rows, int u_size) {
    AuxiliaryChannel ch;
    ch.u_size = u_size;
    ch.rows.assign(n_rows, std::vector<double>(u_size, 0.0));
    for (std::size_t v = 0; v < n_rows; ++v) {
        ch.rows[v][std::min<std::size_t>(v, u_size - 1)] = 1.0;
    }
    return ch;
}

AuxiliaryChannel AuxiliaryChannel::constant(std::size_t n_rows, int u_size) {
    AuxiliaryChannel ch;
    ch.u_size = u_size;
    ch.rows.assign(n_rows, std::vector<double>(u_size, 0.0));
    for (auto& row : ch.rows) row[0] = 1.0;
    return ch;
}

namespace minimax {

namespace {

constexpr double kTiny = 1e-300;

// Marginal probability of each side class of a term/constraint.
std::vector<double> class_mass(const std::vector<double>& pmf, const std::vector<int>& cls,
                               int n_class) {
    std::vector<double> mass(n_class, 0.0);
    for (std::size_t v = 0; v < pmf.size(); ++v) mass[cls[v]] += pmf[v];
    return mass;
}

// W(u, s) = sum over cells of class s of p(v) Q(u|v).
std::vector<double> joint_class_mass(const Spec& spec, const AuxiliaryChannel& ch,
                                     const std::vector<int>& cls, int n_class) {
    std::vector<double> w(static_cast<std::size_t>(ch.u_size) * n_class, 0.0);
    for (std::size_t v = 0; v < spec.pmf.size(); ++v) {
        const double p = spec.pmf[v];
        if (p <= 0.0) continue;
        for (int u = 0; u < ch.u_size; ++u) {
            w[static_cast<std::size_t>(u) * n_class + cls[v]] += p * ch.rows[v][u];
        }
    }
    return w;
}

struct TermEval {
    double value = 0.0;
    // log( P(v|u,s) / P(v|s) ) per (v, u); the gradient of the term is
    // p(v) times this entry.
    std::vector<std::vector<double>> log_ratio;
};

TermEval eval_term(const Spec& spec, const AuxiliaryChannel& ch, const Term& term,
                   bool want_gradient) {
    TermEval out;
    const auto ps = class_mass(spec.pmf, term.side_class, term.n_class);
    const auto wus = joint_class_mass(spec, ch, term.side_class, term.n_class);
    if (want_gradient) {
        out.log_ratio.assign(spec.pmf.size(), std::vector<double>(ch.u_size, 0.0));
    }
    for (std::size_t v = 0; v < spec.pmf.size(); ++v) {
        const double p = spec.pmf[v];
        if (p <= 0.0) continue;
        const int s = term.side_class[v];
        const double p_v_given_s = p / ps[s];
        for (int u = 0; u < ch.u_size; ++u) {
            const double w = p * ch.rows[v][u];
            const double wu = wus[static_cast<std::size_t>(u) * term.n_class + s];
            const double ratio = std::log(std::max(w, kTiny)) - std::log(std::max(wu, kTiny)) -
                                 std::log(p_v_given_s);
            if (w > 0.0) out.value += w * ratio;
            if (want_gradient) out.log_ratio[v][u] = ratio;
        }
    }
    out.value = std::max(out.value, 0.0);
    return out;
}

std::vector<int> decoder_for(const Spec& spec, const AuxiliaryChannel& ch,
                             const Constraint& con) {
    std::vector<int> table(static_cast<std::size_t>(ch.u_size) * con.n_class, 0);
    // Accumulate posterior-weighted distortion per (u, s, r), then argmin over r.
    std::vector<double> acc(static_cast<std::size_t>(ch.u_size) * con.n_class * con.recon_size,
                            0.0);
    for (std::size_t v = 0; v < spec.pmf.size(); ++v) {
        const double p = spec.pmf[v];
        if (p <= 0.0) continue;
        const int s = con.side_class[v];
        for (int u = 0; u < ch.u_size; ++u) {
            const double w = p * ch.rows[v][u];
            if (w <= 0.0) continue;
            double* slot = &acc[(static_cast<std::size_t>(u) * con.n_class + s) * con.recon_size];
            const double* dv = &con.dist[v * con.recon_size];
            for (int r = 0; r < con.recon_size; ++r) slot[r] += w * dv[r];
        }
    }
    for (std::size_t us = 0; us < table.size(); ++us) {
        const double* slot = &acc[us * con.recon_size];
        int best = 0;
        for (int r = 1; r < con.recon_size; ++r) {
            if (slot[r] < slot[best]) best = r;
        }
        table[us] = best;
    }
    return table;
}

double distortion_for(const Spec& spec, const AuxiliaryChannel& ch, const Constraint& con,
                      const std::vector<int>& table) {
    double d = 0.0;
    for (std::size_t v = 0; v < spec.pmf.size(); ++v) {
        const double p = spec.pmf[v];
        if (p <= 0.0) continue;
        const int s = con.side_class[v];
        const double* dv = &con.dist[v * con.recon_size];
        for (int u = 0; u < ch.u_size; ++u) {
            d += p * ch.rows[v][u] * dv[table[static_cast<std::size_t>(u) * con.n_class + s]];
        }
    }
    return d;
}

struct Candidate {
    double rate = std::numeric_limits<double>::infinity();
    double violation = std::numeric_limits<double>::infinity();
    bool feasible = false;
    AuxiliaryChannel channel;
    std::vector<std::vector<int>> tables;
    std::vector<double> distortions;
    std::vector<double> terms;
    bool valid = false;
};

class Tracker {
  public:
    Tracker(const Spec& spec, double feas_tol) : spec_(spec), feas_tol_(feas_tol) {}

    void record(const AuxiliaryChannel& ch) {
        Candidate cand;
        cand.channel = ch;
        cand.tables = optimal_decoders(spec_, ch);
        cand.distortions = constraint_distortions(spec_, ch, cand.tables);
        cand.terms = term_values(spec_, ch);
        cand.rate = cand.terms.empty() ? 0.0
                                       : *std::max_element(cand.terms.begin(), cand.terms.end());
        cand.violation = 0.0;
        for (std::size_t c = 0; c < spec_.constraints.size(); ++c) {
            cand.violation =
                std::max(cand.violation, cand.distortions[c] - spec_.constraints[c].budget);
        }
        cand.feasible = cand.violation <= feas_tol_;
        cand.valid = true;
        if (better(cand, best_)) best_ = std::move(cand);
    }

    const Candidate& best() const { return best_; }

  private:
    static bool better(const Candidate& a, const Candidate& b) {
        if (!b.valid) return true;
        if (a.feasible != b.feasible) return a.feasible;
        if (a.feasible) return a.rate < b.rate;
        return a.violation < b.violation;
    }

    const Spec& spec_;
    double feas_tol_;
    Candidate best_;
};

double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

AuxiliaryChannel dirichlet_channel(std::size_t n_rows, int u_size, std::mt19937_64& gen) {
    AuxiliaryChannel ch;
    ch.u_size = u_size;
    ch.rows.assign(n_rows, std::vector<double>(u_size, 0.0));
    for (auto& row : ch.rows) {
        double sum = 0.0;
        for (double& q : row) {
            q = -std::log(std::max(uniform01(gen), 1e-300));
            sum += q;
        }
        for (double& q : row) q /= sum;
    }
    return ch;
}

void smooth_rows(AuxiliaryChannel& ch, double eps) {
    for (auto& row : ch.rows) {
        for (double& q : row) q = (1.0 - eps) * q + eps / ch.u_size;
    }
}

// Blahut-Arimoto test channel P(r | v) for one constraint at a fixed Lagrange
// slope, with the reconstruction prior shared per side class.
std::vector<std::vector<double>> ba_test_channel(const Spec& spec, const Constraint& con,
                                                 double slope) {
    const std::size_t nv = spec.pmf.size();
    const int nr = con.recon_size;
    std::vector<double> ps(con.n_class, 0.0);
    for (std::size_t v = 0; v < nv; ++v) ps[con.side_class[v]] += spec.pmf[v];
    std::vector<double> q(static_cast<std::size_t>(con.n_class) * nr, 1.0 / nr);
    std::vector<std::vector<double>> w(nv, std::vector<double>(nr, 1.0 / nr));
    for (int it = 0; it < 400; ++it) {
        for (std::size_t v = 0; v < nv; ++v) {
            if (spec.pmf[v] <= 0.0) continue;
            const int s = con.side_class[v];
            double z = 0.0;
            for (int r = 0; r < nr; ++r) {
                w[v][r] = std::max(q[static_cast<std::size_t>(s) * nr + r], kTiny) *
                          std::exp(-slope * con.dist[v * nr + r]);
                z += w[v][r];
            }
            for (int r = 0; r < nr; ++r) w[v][r] /= z;
        }
        std::fill(q.begin(), q.end(), 0.0);
        for (std::size_t v = 0; v < nv; ++v) {
            const int s = con.side_class[v];
            if (ps[s] <= 0.0) continue;
            const double pvs = spec.pmf[v] / ps[s];
            for (int r = 0; r < nr; ++r) q[static_cast<std::size_t>(s) * nr + r] += pvs * w[v][r];
        }
    }
    return w;
}

double ba_channel_distortion(const Spec& spec, const Constraint& con,
                             const std::vector<std::vector<double>>& w) {
    double d = 0.0;
    for (std::size_t v = 0; v < spec.pmf.size(); ++v) {
        for (int r = 0; r < con.recon_size; ++r) {
            d += spec.pmf[v] * w[v][r] * con.dist[v * con.recon_size + r];
        }
    }
    return d;
}

// Deterministic warm start: each constraint gets a conditional-RD test channel
// tuned to its budget, and U carries the product description. Skipped when the
// product of the reconstruction alphabets does not fit in U.
std::vector<AuxiliaryChannel> warm_starts(const Spec& spec) {
    if (spec.constraints.empty()) return {};
    std::size_t prod = 1;
    for (const auto& con : spec.constraints) {
        prod *= static_cast<std::size_t>(con.recon_size);
        if (prod > static_cast<std::size_t>(spec.u_size)) return {};
    }
    std::vector<AuxiliaryChannel> out;
    for (double scale : {1.0, 0.5}) {
        std::vector<std::vector<std::vector<double>>> per_con;
        for (const auto& con : spec.constraints) {
            const double budget = con.budget * scale;
            auto w = ba_test_channel(spec, con, 0.0);
            if (ba_channel_distortion(spec, con, w) > budget) {
                double lo = 0.0, hi = 1e4;
                for (int it = 0; it < 48; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    w = ba_test_channel(spec, con, mid);
                    if (ba_channel_distortion(spec, con, w) > budget) lo = mid;
                    else hi = mid;
                }
                w = ba_test_channel(spec, con, hi);
            }
            per_con.push_back(std::move(w));
        }
        AuxiliaryChannel ch;
        ch.u_size = spec.u_size;
        ch.rows.assign(spec.pmf.size(), std::vector<double>(spec.u_size, 0.0));
        for (std::size_t v = 0; v < spec.pmf.size(); ++v) {
            // Mixed-radix index over the constraints' reconstructions.
            std::vector<int> digits(spec.constraints.size(), 0);
            for (;;) {
                double prob = 1.0;
                std::size_t u = 0;
                for (std::size_t c = 0; c < spec.constraints.size(); ++c) {
                    prob *= per_con[c][v][digits[c]];
                    u = u * spec.constraints[c].recon_size + digits[c];
                }
                ch.rows[v][u] = prob;
                std::size_t c = spec.constraints.size();
                while (c > 0) {
                    --c;
                    if (++digits[c] < spec.constraints[c].recon_size) break;
                    digits[c] = 0;
                    if (c == 0) goto row_done;
                }
            }
        row_done:;
        }
        out.push_back(std::move(ch));
    }
    return out;
}

void clamp_and_renormalize(std::vector<double>& row) {
    double sum = 0.0;
    for (double& q : row) {
        q = std::max(q, 1e-15);
        sum += q;
    }
    for (double& q : row) q /= sum;
}

}  // namespace

std::vector<std::vector<int>> optimal_decoders(const Spec& spec, const AuxiliaryChannel& ch) {
    std::vector<std::vector<int>> tables;
    tables.reserve(spec.constraints.size());
    for (const auto& con : spec.constraints) tables.push_back(decoder_for(spec, ch, con));
    return tables;
}

std::vector<double> term_values(const Spec& spec, const AuxiliaryChannel& ch) {
    std::vector<double> vals;
    vals.reserve(spec.terms.size());
    for (const auto& term : spec.terms) vals.push_back(eval_term(spec, ch, term, false).value);
    return vals;
}

double exact_objective(const Spec& spec, const AuxiliaryChannel& ch) {
    const auto vals = term_values(spec, ch);
    return vals.empty() ? 0.0 : *std::max_element(vals.begin(), vals.end());
}

std::vector<double> constraint_distortions(const Spec& spec, const AuxiliaryChannel& ch,
                                           const std::vector<std::vector<int>>& tables) {
    std::vector<double> out;
    out.reserve(spec.constraints.size());
    for (std::size_t c = 0; c < spec.constraints.size(); ++c) {
        out.push_back(distortion_for(spec, ch, spec.constraints[c], tables[c]));
    }
    return out;
}

double penalized_value(const Spec& spec, const AuxiliaryChannel& ch,
                       const std::vector<std::vector<int>>& tables,
                       const std::vector<double>& lambdas, double mu, double temp) {
    const auto vals = term_values(spec, ch);
    double m = vals.empty() ? 0.0 : *std::max_element(vals.begin(), vals.end());
    double z = 0.0;
    for (double v : vals) z += std::exp((v - m) / temp);
    double value = vals.empty() ? 0.0 : m + temp * std::log(z);
    const auto dists = constraint_distortions(spec, ch, tables);
    for (std::size_t c = 0; c < spec.constraints.size(); ++c) {
        const double g = dists[c] - spec.constraints[c].budget;
        const double t = lambdas[c] + mu * g;
        if (t > 0.0) value += (t * t - lambdas[c] * lambdas[c]) / (2.0 * mu);
    }
    return value;
}

std::vector<std::vector<double>> penalized_gradient(const Spec& spec, const AuxiliaryChannel& ch,
                                                    const std::vector<std::vector<int>>& tables,
                                                    const std::vector<double>& lambdas, double mu,
                                                    double temp) {
    std::vector<std::vector<double>> grad(spec.pmf.size(),
                                          std::vector<double>(ch.u_size, 0.0));
    std::vector<TermEval> evals;
    evals.reserve(spec.terms.size());
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& term : spec.terms) {
        evals.push_back(eval_term(spec, ch, term, true));
        m = std::max(m, evals.back().value);
    }
    double z = 0.0;
    for (const auto& ev : evals) z += std::exp((ev.value - m) / temp);
    for (const auto& ev : evals) {
        const double w = std::exp((ev.value - m) / temp) / z;
        for (std::size_t v = 0; v < spec.pmf.size(); ++v) {
            const double p = spec.pmf[v];
            if (p <= 0.0) continue;
            for (int u = 0; u < ch.u_size; ++u) grad[v][u] += w * p * ev.log_ratio[v][u];
        }
    }
    const auto dists = constraint_distortions(spec, ch, tables);
    for (std::size_t c = 0; c < spec.constraints.size(); ++c) {
        const auto& con = spec.constraints[c];
        const double t = lambdas[c] + mu * (dists[c] - con.budget);
        if (t <= 0.0) continue;
        for (std::size_t v = 0; v < spec.pmf.size(); ++v) {
            const double p = spec.pmf[v];
            if (p <= 0.0) continue;
            const int s = con.side_class[v];
            const double* dv = &con.dist[v * con.recon_size];
            for (int u = 0; u < ch.u_size; ++u) {
                grad[v][u] +=
                    t * p * dv[tables[c][static_cast<std::size_t>(u) * con.n_class + s]];
            }
        }
    }
    return grad;
}

std::vector<double> min_distortions(const Spec& spec) {
    std::vector<double> out;
    out.reserve(spec.constraints.size());
    for (const auto& con : spec.constraints) {
        double d = 0.0;
        for (std::size_t v = 0; v < spec.pmf.size(); ++v) {
            const double* dv = &con.dist[v * con.recon_size];
            double best = dv[0];
            for (int r = 1; r < con.recon_size; ++r) best = std::min(best, dv[r]);
            d += spec.pmf[v] * best;
        }
        out.push_back(d);
    }
    return out;
}

Result solve(const Spec& spec, const OptimizerOptions& opts) {
    const std::size_t n_rows = spec.pmf.size();
    const int u_size = spec.u_size;
    const bool one_hot_ok = u_size >= static_cast<int>(n_rows);

    if (one_hot_ok) {
        const auto floors = min_distortions(spec);
        for (std::size_t c = 0; c < spec.constraints.size(); ++c) {
            if (spec.constraints[c].budget < floors[c] - 1e-12) {
                throw InfeasibleError("distortion budget below the reconstruction floor");
            }
        }
    }

    Tracker tracker(spec, opts.feasibility_tol);
    // Deterministic corner channels, evaluated exactly before any descent.
    if (one_hot_ok) tracker.record(AuxiliaryChannel::one_hot(n_rows, u_size));
    tracker.record(AuxiliaryChannel::constant(n_rows, u_size));

    // A strictly feasible anchor used to repair near-feasible iterates. The
    // one-hot channel works whenever U can index the cells; otherwise sweep
    // the deterministic quantizers (when few enough) and keep the best
    // feasible one.
    std::optional<AuxiliaryChannel> anchor;
    const auto strictly_feasible = [&](const AuxiliaryChannel& ch) {
        const auto tables = optimal_decoders(spec, ch);
        const auto dists = constraint_distortions(spec, ch, tables);
        for (std::size_t c = 0; c < spec.constraints.size(); ++c) {
            if (dists[c] > spec.constraints[c].budget) return false;
        }
        return true;
    };
    if (one_hot_ok) {
        anchor = AuxiliaryChannel::one_hot(n_rows, u_size);
    } else if (std::pow(static_cast<double>(u_size), static_cast<double>(n_rows)) <= 2048.0) {
        double anchor_rate = std::numeric_limits<double>::infinity();
        std::vector<int> assign(n_rows, 0);
        for (;;) {
            AuxiliaryChannel det;
            det.u_size = u_size;
            det.rows.assign(n_rows, std::vector<double>(u_size, 0.0));
            for (std::size_t v = 0; v < n_rows; ++v) det.rows[v][assign[v]] = 1.0;
            tracker.record(det);
            if (strictly_feasible(det)) {
                const double r = exact_objective(spec, det);
                if (r < anchor_rate) {
                    anchor_rate = r;
                    anchor = det;
                }
            }
            std::size_t v = 0;
            while (v < n_rows && ++assign[v] == u_size) assign[v++] = 0;
            if (v == n_rows) break;
        }
    }

    // Record `ch` and, when it sits slightly outside the budgets, also the
    // nearest feasible mix toward the anchor.
    const auto polish_record = [&](const AuxiliaryChannel& ch) {
        tracker.record(ch);
        if (!anchor || spec.constraints.empty()) return;
        const auto tables = optimal_decoders(spec, ch);
        const auto dists = constraint_distortions(spec, ch, tables);
        bool violated = false;
        for (std::size_t c = 0; c < spec.constraints.size(); ++c) {
            if (dists[c] > spec.constraints[c].budget) violated = true;
        }
        if (!violated) return;
        const auto& target = *anchor;
        const auto mix_at = [&](double alpha) {
            AuxiliaryChannel mix = ch;
            for (std::size_t v = 0; v < n_rows; ++v) {
                for (int u = 0; u < u_size; ++u) {
                    mix.rows[v][u] = (1.0 - alpha) * ch.rows[v][u] + alpha * target.rows[v][u];
                }
            }
            return mix;
        };
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (strictly_feasible(mix_at(mid))) hi = mid;
            else lo = mid;
        }
        tracker.record(mix_at(hi));
    };

    auto warm = warm_starts(spec);
    for (const auto& ws : warm) polish_record(ws);
    if (!one_hot_ok && anchor) warm.push_back(*anchor);

    const int anneal_rounds = std::min(opts.max_outer_rounds, 100);
    const double temp_ratio = opts.temp_final / opts.temp_init;

    for (int restart = 0; restart < opts.restarts; ++restart) {
        std::mt19937_64 gen(opts.seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL +
                            static_cast<std::uint64_t>(restart));
        AuxiliaryChannel ch;
        if (restart == 0 && one_hot_ok) {
            ch = AuxiliaryChannel::one_hot(n_rows, u_size);
            smooth_rows(ch, 1e-3);
        } else if (restart <= 1) {
            ch = AuxiliaryChannel::constant(n_rows, u_size);
            smooth_rows(ch, 1e-3);
        } else if (restart - 2 < static_cast<int>(warm.size())) {
            ch = warm[restart - 2];
            smooth_rows(ch, 1e-3);
        } else if (restart % 2 == 1 && tracker.best().valid) {
            // Exploit the incumbent: perturb the best channel found so far.
            ch = dirichlet_channel(n_rows, u_size, gen);
            const auto& base = tracker.best().channel;
            for (std::size_t v = 0; v < n_rows; ++v) {
                for (int u = 0; u < u_size; ++u) {
                    ch.rows[v][u] = 0.7 * base.rows[v][u] + 0.3 * ch.rows[v][u];
                }
            }
        } else {
            ch = dirichlet_channel(n_rows, u_size, gen);
        }

        std::vector<double> lambdas(spec.constraints.size(), 0.0);
        double mu = 8.0;
        double eta = 0.5;
        double prev_value = std::numeric_limits<double>::infinity();

        for (int outer = 0; outer < opts.max_outer_rounds; ++outer) {
            const double frac = std::min(1.0, static_cast<double>(outer) / anneal_rounds);
            const double temp = opts.temp_init * std::pow(temp_ratio, frac);
            const auto tables = optimal_decoders(spec, ch);
            double value = penalized_value(spec, ch, tables, lambdas, mu, temp);

            for (int step = 0; step < opts.inner_steps; ++step) {
                const auto grad = penalized_gradient(spec, ch, tables, lambdas, mu, temp);
                bool accepted = false;
                while (eta > 1e-9) {
                    AuxiliaryChannel trial = ch;
                    for (std::size_t v = 0; v < n_rows; ++v) {
                        const double p = std::max(spec.pmf[v], 1e-12);
                        double lo = grad[v][0];
                        for (int u = 1; u < u_size; ++u) lo = std::min(lo, grad[v][u]);
                        for (int u = 0; u < u_size; ++u) {
                            trial.rows[v][u] =
                                ch.rows[v][u] * std::exp(-eta * (grad[v][u] - lo) / p);
                        }
                        clamp_and_renormalize(trial.rows[v]);
                    }
                    const double trial_value =
                        penalized_value(spec, trial, tables, lambdas, mu, temp);
                    if (trial_value <= value - 1e-14) {
                        ch = std::move(trial);
                        value = trial_value;
                        eta = std::min(eta * 1.25, 20.0);
                        accepted = true;
                        break;
                    }
                    eta *= 0.5;
                }
                if (!accepted) {
                    eta = 0.5;
                    break;
                }
            }

            polish_record(ch);

            const auto post_tables = optimal_decoders(spec, ch);
            const auto dists = constraint_distortions(spec, ch, post_tables);
            bool infeasible = false;
            for (std::size_t c = 0; c < spec.constraints.size(); ++c) {
                const double g = dists[c] - spec.constraints[c].budget;
                lambdas[c] = std::max(0.0, lambdas[c] + mu * g);
                if (g > opts.feasibility_tol) infeasible = true;
            }
            if (infeasible) mu = std::min(mu * 1.2, 1e5);

            if (outer >= anneal_rounds && std::abs(prev_value - value) < opts.tol) break;
            prev_value = value;
        }
    }

    const Candidate& best = tracker.best();
    if (!best.valid || (!best.feasible && !spec.constraints.empty())) {
        throw NonConvergenceError("no feasible channel found within the restart budget");
    }
    Result res;
    res.rate = best.rate;
    res.channel = best.channel;
    res.decoder_tables = best.tables;
    res.distortions = best.distortions;
    res.term_values = best.terms;
    res.feasible = best.feasible;
    res.restarts_used = opts.restarts;
    return res;
}

}  // namespace minimax
}  // namespace cdr
