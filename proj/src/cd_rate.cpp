#include "cdr/cd_rate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace cdr {

namespace {

void check_cd_source(const JointSource& src) {
    if (src.coords() != 2) throw ShapeMismatchError("CD problems need exactly two coordinates");
}

void check_channel(const JointSource& src, const AuxiliaryChannel& ch) {
    if (ch.rows.size() != src.cells())
        throw ShapeMismatchError("channel rows do not match the source alphabet product");
    for (const auto& row : ch.rows) {
        if (static_cast<int>(row.size()) != ch.u_size)
            throw ShapeMismatchError("ragged channel row");
    }
}

DecoderRule table_to_rule(const std::vector<int>& table, int u_size, int side_size,
                          int recon_size) {
    return DecoderRule{u_size, side_size, recon_size, table};
}

// Joint (U, X, Y) source induced by the channel.
JointSource uxy_joint(const JointSource& src, const AuxiliaryChannel& ch) {
    const int nx = src.sizes[0];
    const int ny = src.sizes[1];
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

std::vector<std::vector<double>> enumerate_grid_rows(int u_size, int grid_q) {
    std::vector<std::vector<double>> rows;
    std::vector<int> counts(u_size, 0);
    // Compositions of grid_q into u_size nonnegative parts.
    const double q = static_cast<double>(grid_q);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == u_size - 1) {
            counts[pos] = left;
            std::vector<double> row(u_size);
            for (int u = 0; u < u_size; ++u) row[u] = counts[u] / q;
            rows.push_back(std::move(row));
            return;
        }
        for (int c = 0; c <= left; ++c) {
            counts[pos] = c;
            rec(pos + 1, left - c);
        }
    };
    rec(0, grid_q);
    return rows;
}

}  // namespace

minimax::Spec cd_spec(const JointSource& src,
                      const std::pair<DistortionMeasure, DistortionMeasure>& dms,
                      const DistortionBudget& budgets, int u_size) {
    check_cd_source(src);
    const int nx = src.sizes[0];
    const int ny = src.sizes[1];
    if (dms.first.source_size() != nx || dms.second.source_size() != ny)
        throw ShapeMismatchError("distortion matrix does not match its source alphabet");
    if (budgets.values.size() != 2) throw ShapeMismatchError("CD needs two budgets");
    for (double d : budgets.values) {
        if (d < 0.0) throw BudgetNegativeError("distortion budget must be >= 0");
    }

    minimax::Spec spec;
    spec.pmf = src.pmf;
    spec.u_size = u_size;

    minimax::Term t_x;  // I(X;U|Y), side information Y
    t_x.n_class = ny;
    minimax::Term t_y;  // I(Y;U|X), side information X
    t_y.n_class = nx;
    t_x.side_class.resize(src.cells());
    t_y.side_class.resize(src.cells());
    for (int x = 0; x < nx; ++x) {
        for (int y = 0; y < ny; ++y) {
            const std::size_t v = static_cast<std::size_t>(x) * ny + y;
            t_x.side_class[v] = y;
            t_y.side_class[v] = x;
        }
    }
    spec.terms = {t_x, t_y};

    minimax::Constraint c_x;  // decoder 1 reproduces X from (U, Y)
    c_x.side_class = t_x.side_class;
    c_x.n_class = ny;
    c_x.recon_size = dms.first.recon_size();
    c_x.dmax = dms.first.dmax;
    c_x.budget = budgets.values[0];
    c_x.dist.resize(src.cells() * c_x.recon_size);
    minimax::Constraint c_y;  // decoder 2 reproduces Y from (U, X)
    c_y.side_class = t_y.side_class;
    c_y.n_class = nx;
    c_y.recon_size = dms.second.recon_size();
    c_y.dmax = dms.second.dmax;
    c_y.budget = budgets.values[1];
    c_y.dist.resize(src.cells() * c_y.recon_size);
    for (int x = 0; x < nx; ++x) {
        for (int y = 0; y < ny; ++y) {
            const std::size_t v = static_cast<std::size_t>(x) * ny + y;
            for (int r = 0; r < c_x.recon_size; ++r)
                c_x.dist[v * c_x.recon_size + r] = dms.first.matrix[x][r];
            for (int r = 0; r < c_y.recon_size; ++r)
                c_y.dist[v * c_y.recon_size + r] = dms.second.matrix[y][r];
        }
    }
    spec.constraints = {c_x, c_y};
    return spec;
}

int default_cd_u_size(const JointSource& src) {
    check_cd_source(src);
    return src.sizes[0] * src.sizes[1] + 2;
}

std::pair<DecoderRule, DecoderRule> optimal_decoders(
    const JointSource& src, const AuxiliaryChannel& ch,
    const std::pair<DistortionMeasure, DistortionMeasure>& dms) {
    check_cd_source(src);
    check_channel(src, ch);
    DistortionBudget dummy{{0.0, 0.0}};
    const auto spec = cd_spec(src, dms, dummy, ch.u_size);
    const auto tables = minimax::optimal_decoders(spec, ch);
    return {table_to_rule(tables[0], ch.u_size, src.sizes[1], dms.first.recon_size()),
            table_to_rule(tables[1], ch.u_size, src.sizes[0], dms.second.recon_size())};
}

double cd_objective(const JointSource& src, const AuxiliaryChannel& ch) {
    check_cd_source(src);
    check_channel(src, ch);
    const JointSource joint = uxy_joint(src, ch);
    const double i_xu_y = conditional_mutual_information(joint, {1}, {0}, {2});
    const double i_yu_x = conditional_mutual_information(joint, {2}, {0}, {1});
    return std::max(i_xu_y, i_yu_x);
}

std::pair<double, double> achieved_distortions(
    const JointSource& src, const AuxiliaryChannel& ch,
    const std::pair<DecoderRule, DecoderRule>& decoders,
    const std::pair<DistortionMeasure, DistortionMeasure>& dms) {
    check_cd_source(src);
    check_channel(src, ch);
    const JointSource joint = uxy_joint(src, ch);
    // (U, X, Y) joint reordered per decoder: decoder 1 targets X with side Y,
    // decoder 2 targets Y with side X.
    const int nx = src.sizes[0];
    const int ny = src.sizes[1];
    std::vector<double> swapped(joint.pmf.size());
    for (int u = 0; u < ch.u_size; ++u) {
        for (int x = 0; x < nx; ++x) {
            for (int y = 0; y < ny; ++y) {
                swapped[(static_cast<std::size_t>(u) * ny + y) * nx + x] =
                    joint.pmf[(static_cast<std::size_t>(u) * nx + x) * ny + y];
            }
        }
    }
    const JointSource joint_yx{{ch.u_size, ny, nx}, std::move(swapped)};
    return {expected_distortion(joint, decoders.first, dms.first),
            expected_distortion(joint_yx, decoders.second, dms.second)};
}

CDSolution optimize_cd_rate(const JointSource& src,
                            const std::pair<DistortionMeasure, DistortionMeasure>& dms,
                            const DistortionBudget& budgets, const OptimizerOptions& opts) {
    const int u_size = opts.u_size_override > 0 ? opts.u_size_override : default_cd_u_size(src);
    const auto spec = cd_spec(src, dms, budgets, u_size);
    const auto res = minimax::solve(spec, opts);

    CDSolution sol;
    sol.rate = res.rate;
    sol.channel = res.channel;
    sol.decoder_x =
        table_to_rule(res.decoder_tables[0], u_size, src.sizes[1], dms.first.recon_size());
    sol.decoder_y =
        table_to_rule(res.decoder_tables[1], u_size, src.sizes[0], dms.second.recon_size());
    sol.achieved_distortions = {res.distortions[0], res.distortions[1]};
    sol.mi_terms = {res.term_values[0], res.term_values[1]};
    sol.feasible = res.feasible;
    sol.restarts_used = res.restarts_used;
    return sol;
}

double brute_force_cd_rate(const JointSource& src,
                           const std::pair<DistortionMeasure, DistortionMeasure>& dms,
                           const DistortionBudget& budgets, int u_size, int grid_q) {
    check_cd_source(src);
    if (src.sizes[0] != 2 || src.sizes[1] != 2)
        throw ShapeMismatchError("brute force supports binary x binary sources only");
    const auto spec = cd_spec(src, dms, budgets, u_size);
    const auto grid_rows = enumerate_grid_rows(u_size, grid_q);
    const std::size_t n_rows = src.cells();
    double total = 1.0;
    for (std::size_t v = 0; v < n_rows; ++v) {
        total *= static_cast<double>(grid_rows.size());
        if (total > 1e8) throw TooLargeError("grid enumeration exceeds the evaluation budget");
    }

    AuxiliaryChannel ch;
    ch.u_size = u_size;
    ch.rows.assign(n_rows, grid_rows[0]);
    std::vector<std::size_t> pick(n_rows, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        const auto tables = minimax::optimal_decoders(spec, ch);
        const auto dists = minimax::constraint_distortions(spec, ch, tables);
        bool feasible = true;
        for (std::size_t c = 0; c < spec.constraints.size(); ++c) {
            if (dists[c] > spec.constraints[c].budget + 1e-12) feasible = false;
        }
        if (feasible) best = std::min(best, minimax::exact_objective(spec, ch));

        std::size_t v = 0;
        while (v < n_rows) {
            if (++pick[v] < grid_rows.size()) {
                ch.rows[v] = grid_rows[pick[v]];
                break;
            }
            pick[v] = 0;
            ch.rows[v] = grid_rows[0];
            ++v;
        }
        if (v == n_rows) break;
    }
    return best;
}

SaturationReport cardinality_saturation_check(
    const JointSource& src, const std::pair<DistortionMeasure, DistortionMeasure>& dms,
    const DistortionBudget& budgets, const OptimizerOptions& opts) {
    if (src.sizes[0] > 3 || src.sizes[1] > 3)
        throw TooLargeError("saturation check is restricted to small instances");
    SaturationReport rep;
    rep.u_size_default = src.sizes[0] * src.sizes[1] + 2;
    rep.u_size_large = src.sizes[0] * src.sizes[1] + 6;

    OptimizerOptions o = opts;
    o.u_size_override = rep.u_size_default;
    rep.rate_default = optimize_cd_rate(src, dms, budgets, o).rate;
    o.u_size_override = rep.u_size_large;
    rep.rate_large = optimize_cd_rate(src, dms, budgets, o).rate;
    rep.difference = rep.rate_default - rep.rate_large;
    return rep;
}

}  // namespace cdr
