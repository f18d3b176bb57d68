#include "cdr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cdr {

namespace {

constexpr double kTiny = 1e-300;

struct PairView {
    // Joint over (target, side) with the target coordinate first.
    int nt = 0;
    int ns = 0;
    std::vector<double> pmf;  // pmf[t * ns + s]
};

PairView pair_view(const JointSource& src, int which) {
    if (src.coords() != 2) throw ShapeMismatchError("baselines need a two-coordinate source");
    if (which != 0 && which != 1) throw ShapeMismatchError("target coordinate must be 0 or 1");
    PairView pv;
    pv.nt = src.sizes[which];
    pv.ns = src.sizes[1 - which];
    pv.pmf.resize(static_cast<std::size_t>(pv.nt) * pv.ns);
    for (int a = 0; a < src.sizes[0]; ++a) {
        for (int b = 0; b < src.sizes[1]; ++b) {
            const double p = src.pmf[static_cast<std::size_t>(a) * src.sizes[1] + b];
            const int t = which == 0 ? a : b;
            const int s = which == 0 ? b : a;
            pv.pmf[static_cast<std::size_t>(t) * pv.ns + s] = p;
        }
    }
    return pv;
}

// Blahut-Arimoto with Lagrange slope for a single unconditional RD problem.
// Returns (rate, distortion) at the slope's optimum.
std::pair<double, double> ba_slope(const std::vector<double>& p, const DistortionMeasure& dm,
                                   double slope) {
    const int nt = static_cast<int>(p.size());
    const int nr = dm.recon_size();
    std::vector<double> q(nr, 1.0 / nr);
    std::vector<double> w(static_cast<std::size_t>(nt) * nr, 0.0);
    double prev_rate = std::numeric_limits<double>::infinity();
    double rate = 0.0, dist = 0.0;
    for (int it = 0; it < 2000; ++it) {
        for (int t = 0; t < nt; ++t) {
            if (p[t] <= 0.0) continue;
            double z = 0.0;
            for (int r = 0; r < nr; ++r) {
                w[static_cast<std::size_t>(t) * nr + r] = q[r] * std::exp(-slope * dm.matrix[t][r]);
                z += w[static_cast<std::size_t>(t) * nr + r];
            }
            for (int r = 0; r < nr; ++r) w[static_cast<std::size_t>(t) * nr + r] /= z;
        }
        std::fill(q.begin(), q.end(), 0.0);
        for (int t = 0; t < nt; ++t) {
            if (p[t] <= 0.0) continue;
            for (int r = 0; r < nr; ++r) q[r] += p[t] * w[static_cast<std::size_t>(t) * nr + r];
        }
        rate = 0.0;
        dist = 0.0;
        for (int t = 0; t < nt; ++t) {
            if (p[t] <= 0.0) continue;
            for (int r = 0; r < nr; ++r) {
                const double wr = w[static_cast<std::size_t>(t) * nr + r];
                if (wr > 0.0 && q[r] > 0.0) rate += p[t] * wr * std::log(wr / q[r]);
                dist += p[t] * wr * dm.matrix[t][r];
            }
        }
        if (std::abs(prev_rate - rate) < 1e-9) break;
        prev_rate = rate;
    }
    // When the slope's optimum is a zero-rate (rank-one) point, the iteration
    // approaches the simplex boundary only sublinearly; the closed-form
    // candidate keeps the Lagrangian value exact there.
    double d0 = std::numeric_limits<double>::infinity();
    for (int r = 0; r < nr; ++r) {
        double acc = 0.0;
        for (int t = 0; t < nt; ++t) acc += p[t] * dm.matrix[t][r];
        d0 = std::min(d0, acc);
    }
    if (slope * d0 <= rate + slope * dist) return {0.0, d0};
    return {std::max(rate, 0.0), dist};
}

std::vector<double> slope_grid() {
    std::vector<double> slopes{0.0};
    const double lo = std::log(1e-4), hi = std::log(1e4);
    for (int i = 0; i < 64; ++i) {
        slopes.push_back(std::exp(lo + (hi - lo) * i / 63.0));
    }
    return slopes;
}

// ---- Wyner-Ziv optimizer -------------------------------------------------

struct WZState {
    const PairView* pv = nullptr;
    const DistortionMeasure* dm = nullptr;
    int u_size = 0;
};

std::vector<int> wz_decoder(const WZState& st, const std::vector<std::vector<double>>& ch) {
    const int nt = st.pv->nt, ns = st.pv->ns, nr = st.dm->recon_size();
    std::vector<int> g(static_cast<std::size_t>(st.u_size) * ns, 0);
    for (int u = 0; u < st.u_size; ++u) {
        for (int s = 0; s < ns; ++s) {
            double best = std::numeric_limits<double>::infinity();
            int best_r = 0;
            for (int r = 0; r < nr; ++r) {
                double acc = 0.0;
                for (int t = 0; t < nt; ++t) {
                    acc += st.pv->pmf[static_cast<std::size_t>(t) * ns + s] * ch[t][u] *
                           st.dm->matrix[t][r];
                }
                if (acc < best - 1e-18) {
                    best = acc;
                    best_r = r;
                }
            }
            g[static_cast<std::size_t>(u) * ns + s] = best_r;
        }
    }
    return g;
}

double wz_distortion(const WZState& st, const std::vector<std::vector<double>>& ch,
                     const std::vector<int>& g) {
    const int nt = st.pv->nt, ns = st.pv->ns;
    double d = 0.0;
    for (int t = 0; t < nt; ++t) {
        for (int s = 0; s < ns; ++s) {
            const double p = st.pv->pmf[static_cast<std::size_t>(t) * ns + s];
            if (p <= 0.0) continue;
            for (int u = 0; u < st.u_size; ++u) {
                d += p * ch[t][u] * st.dm->matrix[t][g[static_cast<std::size_t>(u) * ns + s]];
            }
        }
    }
    return d;
}

// I(X;U) - I(Y;U) and its gradient w.r.t. the channel entries.
double wz_objective(const WZState& st, const std::vector<std::vector<double>>& ch,
                    std::vector<std::vector<double>>* grad) {
    const int nt = st.pv->nt, ns = st.pv->ns;
    std::vector<double> pt(nt, 0.0), psd(ns, 0.0);
    for (int t = 0; t < nt; ++t) {
        for (int s = 0; s < ns; ++s) {
            const double p = st.pv->pmf[static_cast<std::size_t>(t) * ns + s];
            pt[t] += p;
            psd[s] += p;
        }
    }
    std::vector<double> pu(st.u_size, 0.0);
    std::vector<double> m(static_cast<std::size_t>(ns) * st.u_size, 0.0);
    for (int t = 0; t < nt; ++t) {
        for (int s = 0; s < ns; ++s) {
            const double p = st.pv->pmf[static_cast<std::size_t>(t) * ns + s];
            if (p <= 0.0) continue;
            for (int u = 0; u < st.u_size; ++u) {
                m[static_cast<std::size_t>(s) * st.u_size + u] += p * ch[t][u];
            }
        }
    }
    for (int s = 0; s < ns; ++s) {
        for (int u = 0; u < st.u_size; ++u) pu[u] += m[static_cast<std::size_t>(s) * st.u_size + u];
    }
    double i_xu = 0.0, i_yu = 0.0;
    for (int t = 0; t < nt; ++t) {
        if (pt[t] <= 0.0) continue;
        for (int u = 0; u < st.u_size; ++u) {
            const double w = pt[t] * ch[t][u];
            if (w > 0.0 && pu[u] > 0.0) i_xu += w * std::log(ch[t][u] / pu[u]);
        }
    }
    for (int s = 0; s < ns; ++s) {
        for (int u = 0; u < st.u_size; ++u) {
            const double w = m[static_cast<std::size_t>(s) * st.u_size + u];
            if (w > 0.0 && psd[s] > 0.0 && pu[u] > 0.0)
                i_yu += w * std::log(w / (psd[s] * pu[u]));
        }
    }
    if (grad) {
        grad->assign(nt, std::vector<double>(st.u_size, 0.0));
        for (int t = 0; t < nt; ++t) {
            if (pt[t] <= 0.0) continue;
            for (int u = 0; u < st.u_size; ++u) {
                double g = pt[t] * (std::log(std::max(ch[t][u], kTiny)) -
                                    std::log(std::max(pu[u], kTiny)));
                for (int s = 0; s < ns; ++s) {
                    const double p = st.pv->pmf[static_cast<std::size_t>(t) * ns + s];
                    if (p <= 0.0) continue;
                    const double ms = m[static_cast<std::size_t>(s) * st.u_size + u];
                    g -= p * (std::log(std::max(ms, kTiny)) - std::log(std::max(pu[u], kTiny)));
                }
                (*grad)[t][u] = g;
            }
        }
    }
    return i_xu - i_yu;
}

void wz_clamp(std::vector<double>& row) {
    double sum = 0.0;
    for (double& q : row) {
        q = std::max(q, 1e-15);
        sum += q;
    }
    for (double& q : row) q /= sum;
}

// Upper bound on R_WZ at a single budget by multi-start alternating
// minimization.
double wz_raw(const WZState& st, double budget, std::uint64_t seed) {
    const int nt = st.pv->nt;
    std::vector<double> pt(nt, 0.0);
    for (int t = 0; t < nt; ++t) {
        for (int s = 0; s < st.pv->ns; ++s) {
            pt[t] += st.pv->pmf[static_cast<std::size_t>(t) * st.pv->ns + s];
        }
    }

    double best = std::numeric_limits<double>::infinity();
    auto record = [&](const std::vector<std::vector<double>>& ch) {
        const auto g = wz_decoder(st, ch);
        if (wz_distortion(st, ch, g) <= budget + 1e-6) {
            best = std::min(best, std::max(0.0, wz_objective(st, ch, nullptr)));
        }
    };

    const int restarts = 8;
    for (int restart = 0; restart < restarts; ++restart) {
        std::mt19937_64 gen(seed * 0x9e3779b97f4a7c15ULL + restart);
        std::vector<std::vector<double>> ch(nt, std::vector<double>(st.u_size, 0.0));
        if (restart == 0) {
            for (int t = 0; t < nt; ++t) ch[t][std::min(t, st.u_size - 1)] = 1.0;
        } else if (restart == 1) {
            for (int t = 0; t < nt; ++t) ch[t][0] = 1.0;
        } else {
            for (auto& row : ch) {
                double sum = 0.0;
                for (double& q : row) {
                    q = -std::log(std::max(static_cast<double>(gen() >> 11) * 0x1.0p-53, 1e-300));
                    sum += q;
                }
                for (double& q : row) q /= sum;
            }
        }
        record(ch);
        for (auto& row : ch) {
            for (double& q : row) q = (1.0 - 1e-3) * q + 1e-3 / st.u_size;
        }

        double lambda = 0.0, mu = 8.0, eta = 0.5;
        for (int outer = 0; outer < 150; ++outer) {
            const auto g = wz_decoder(st, ch);
            auto value = [&](const std::vector<std::vector<double>>& c) {
                double val = wz_objective(st, c, nullptr);
                const double gap = wz_distortion(st, c, g) - budget;
                const double tmul = lambda + mu * gap;
                if (tmul > 0.0) val += (tmul * tmul - lambda * lambda) / (2.0 * mu);
                return val;
            };
            double cur = value(ch);
            for (int step = 0; step < 30; ++step) {
                std::vector<std::vector<double>> grad;
                wz_objective(st, ch, &grad);
                const double gap = wz_distortion(st, ch, g) - budget;
                const double tmul = std::max(0.0, lambda + mu * gap);
                if (tmul > 0.0) {
                    for (int t = 0; t < nt; ++t) {
                        for (int u = 0; u < st.u_size; ++u) {
                            double dd = 0.0;
                            for (int s = 0; s < st.pv->ns; ++s) {
                                dd += st.pv->pmf[static_cast<std::size_t>(t) * st.pv->ns + s] *
                                      st.dm->matrix[t][g[static_cast<std::size_t>(u) * st.pv->ns + s]];
                            }
                            grad[t][u] += tmul * dd;
                        }
                    }
                }
                bool accepted = false;
                while (eta > 1e-9) {
                    auto trial = ch;
                    for (int t = 0; t < nt; ++t) {
                        const double p = std::max(pt[t], 1e-12);
                        double lo = grad[t][0];
                        for (int u = 1; u < st.u_size; ++u) lo = std::min(lo, grad[t][u]);
                        for (int u = 0; u < st.u_size; ++u) {
                            trial[t][u] = ch[t][u] * std::exp(-eta * (grad[t][u] - lo) / p);
                        }
                        wz_clamp(trial[t]);
                    }
                    const double tv = value(trial);
                    if (tv <= cur - 1e-14) {
                        ch = std::move(trial);
                        cur = tv;
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
            record(ch);
            const double gap = wz_distortion(st, ch, wz_decoder(st, ch)) - budget;
            lambda = std::max(0.0, lambda + mu * gap);
            if (gap > 1e-6) mu = std::min(mu * 1.2, 1e5);
        }

        // Feasibility polish toward the identity channel.
        {
            std::vector<std::vector<double>> target(nt, std::vector<double>(st.u_size, 0.0));
            for (int t = 0; t < nt; ++t) target[t][std::min(t, st.u_size - 1)] = 1.0;
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 40; ++it) {
                const double mid = 0.5 * (lo + hi);
                auto mix = ch;
                for (int t = 0; t < nt; ++t) {
                    for (int u = 0; u < st.u_size; ++u) {
                        mix[t][u] = (1.0 - mid) * ch[t][u] + mid * target[t][u];
                    }
                }
                if (wz_distortion(st, mix, wz_decoder(st, mix)) <= budget) hi = mid;
                else lo = mid;
            }
            auto mix = ch;
            for (int t = 0; t < nt; ++t) {
                for (int u = 0; u < st.u_size; ++u) {
                    mix[t][u] = (1.0 - hi) * ch[t][u] + hi * target[t][u];
                }
            }
            record(mix);
        }
    }
    return best;
}

// Distortion reachable at rate zero with side information only.
double side_only_distortion(const PairView& pv, const DistortionMeasure& dm) {
    double d = 0.0;
    for (int s = 0; s < pv.ns; ++s) {
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < dm.recon_size(); ++r) {
            double acc = 0.0;
            for (int t = 0; t < pv.nt; ++t) {
                acc += pv.pmf[static_cast<std::size_t>(t) * pv.ns + s] * dm.matrix[t][r];
            }
            best = std::min(best, acc);
        }
        d += best;
    }
    return d;
}

// Evaluate the lower convex envelope of (d, r) points at `query`.
double lower_envelope_at(std::vector<std::pair<double, double>> pts, double query) {
    std::sort(pts.begin(), pts.end());
    // Lower hull, Andrew monotone chain.
    std::vector<std::pair<double, double>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            const double cross = (b.first - a.first) * (p.second - a.second) -
                                 (b.second - a.second) * (p.first - a.first);
            if (cross <= 0.0) hull.pop_back();
            else break;
        }
        hull.push_back(p);
    }
    if (query <= hull.front().first) return hull.front().second;
    if (query >= hull.back().first) return hull.back().second;
    for (std::size_t i = 1; i < hull.size(); ++i) {
        if (query <= hull[i].first) {
            const auto& a = hull[i - 1];
            const auto& b = hull[i];
            const double t = (query - a.first) / std::max(b.first - a.first, 1e-300);
            return a.second + t * (b.second - a.second);
        }
    }
    return hull.back().second;
}

}  // namespace

double lossless_cd_rate(const JointSource& src) {
    if (src.coords() != 2) throw ShapeMismatchError("lossless CD rate needs two coordinates");
    return std::max(conditional_entropy(src, {0}, {1}), conditional_entropy(src, {1}, {0}));
}

double conditional_rd(const JointSource& src, const DistortionMeasure& dm, double budget,
                      int which) {
    if (budget < 0.0) throw BudgetNegativeError("distortion budget must be >= 0");
    const PairView pv = pair_view(src, which);
    if (dm.source_size() != pv.nt)
        throw ShapeMismatchError("distortion matrix does not match the target alphabet");

    std::vector<double> ps(pv.ns, 0.0);
    for (int t = 0; t < pv.nt; ++t) {
        for (int s = 0; s < pv.ns; ++s) ps[s] += pv.pmf[static_cast<std::size_t>(t) * pv.ns + s];
    }

    const auto support_at = [&](double slope) {
        double rate = 0.0, dist = 0.0;
        for (int s = 0; s < pv.ns; ++s) {
            if (ps[s] <= 0.0) continue;
            std::vector<double> cond(pv.nt);
            for (int t = 0; t < pv.nt; ++t) {
                cond[t] = pv.pmf[static_cast<std::size_t>(t) * pv.ns + s] / ps[s];
            }
            const auto [r, d] = ba_slope(cond, dm, slope);
            rate += ps[s] * r;
            dist += ps[s] * d;
        }
        return rate + slope * (dist - budget);
    };

    const auto grid = slope_grid();
    double best = 0.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = support_at(grid[i]);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    // The dual is concave in the slope, so a golden-section pass over the
    // bracket around the best grid point recovers the accuracy the coarse
    // sweep leaves on the table.
    double lo = grid[best_i > 1 ? best_i - 1 : 1];  // skip the slope-0 entry
    double hi = best_i + 1 < grid.size() ? grid[best_i + 1] : grid.back() * 4.0;
    if (lo > hi) std::swap(lo, hi);
    constexpr double kGolden = 0.6180339887498949;
    double a = hi - kGolden * (hi - lo), b = lo + kGolden * (hi - lo);
    double fa = support_at(a), fb = support_at(b);
    for (int it = 0; it < 48; ++it) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + kGolden * (hi - lo);
            fb = support_at(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - kGolden * (hi - lo);
            fa = support_at(a);
        }
    }
    return std::max({best, fa, fb});
}

double wyner_ziv(const JointSource& src, const DistortionMeasure& dm, double budget, int which) {
    if (budget < 0.0) throw BudgetNegativeError("distortion budget must be >= 0");
    const PairView pv = pair_view(src, which);
    if (dm.source_size() != pv.nt)
        throw ShapeMismatchError("distortion matrix does not match the target alphabet");
    WZState st{&pv, &dm, pv.nt + 1};

    double d_floor = 0.0;
    for (int t = 0; t < pv.nt; ++t) {
        double pt = 0.0;
        for (int s = 0; s < pv.ns; ++s) pt += pv.pmf[static_cast<std::size_t>(t) * pv.ns + s];
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < dm.recon_size(); ++r) best = std::min(best, dm.matrix[t][r]);
        d_floor += pt * best;
    }
    if (budget < d_floor - 1e-12)
        throw NonConvergenceError("budget below the reconstruction floor");

    const double d0 = side_only_distortion(pv, dm);
    if (budget >= d0) return 0.0;

    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(d0, 0.0);
    const int grid_points = 33;
    bool budget_on_grid = false;
    for (int i = 0; i < grid_points; ++i) {
        const double d = d0 * i / (grid_points - 1);
        if (std::abs(d - budget) < 1e-12) budget_on_grid = true;
        pts.emplace_back(d, wz_raw(st, d, 17 + static_cast<std::uint64_t>(i)));
    }
    if (!budget_on_grid) pts.emplace_back(budget, wz_raw(st, budget, 1009));
    // Drop budgets where no feasible channel was found; keeping them would
    // pull the envelope below valid upper bounds.
    std::erase_if(pts, [](const auto& p) { return !std::isfinite(p.second); });
    return std::max(0.0, lower_envelope_at(std::move(pts), budget));
}

SandwichReport sandwich_check(const JointSource& src,
                              const std::pair<DistortionMeasure, DistortionMeasure>& dms,
                              const DistortionBudget& budgets, const OptimizerOptions& opts) {
    SandwichReport rep;
    rep.lower = std::max(conditional_rd(src, dms.first, budgets.values[0], 0),
                         conditional_rd(src, dms.second, budgets.values[1], 1));
    rep.upper = std::max(wyner_ziv(src, dms.first, budgets.values[0], 0),
                         wyner_ziv(src, dms.second, budgets.values[1], 1));
    rep.cd_rate = optimize_cd_rate(src, dms, budgets, opts).rate;
    rep.slack_lower = rep.cd_rate - rep.lower;
    rep.slack_upper = rep.upper - rep.cd_rate;
    rep.violated = rep.slack_lower < -2e-3 || rep.slack_upper < -2e-3;
    return rep;
}

}  // namespace cdr
