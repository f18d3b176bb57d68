#include "cdr/gcd_rate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cdr {

namespace {

constexpr std::size_t kDeskScaleCells = 64;

// Flat side-class index of a full-tuple cell for the given side coordinates.
std::vector<int> side_classes(const JointSource& src, const std::vector<int>& side,
                              int* n_class_out) {
    int n_class = 1;
    for (int c : side) n_class *= src.sizes[c];
    std::vector<int> cls(src.cells());
    for (std::size_t cell = 0; cell < src.cells(); ++cell) {
        const auto letters = src.unravel(cell);
        int idx = 0;
        for (int c : side) idx = idx * src.sizes[c] + letters[c];
        cls[cell] = idx;
    }
    *n_class_out = n_class;
    return cls;
}

}  // namespace

void validate_gcd_problem(const GCDProblem& problem) {
    const auto& src = problem.source;
    if (src.cells() > kDeskScaleCells)
        throw TooLargeError("product alphabet exceeds the desk-scale cap");
    if (problem.decoders.empty()) throw ShapeMismatchError("no decoders");
    for (const auto& dec : problem.decoders) {
        std::vector<bool> is_side(src.coords(), false);
        for (int c : dec.side) {
            if (c < 0 || c >= src.coords()) throw ShapeMismatchError("side coordinate out of range");
            if (is_side[c]) throw ShapeMismatchError("repeated side coordinate");
            is_side[c] = true;
        }
        if (dec.targets.empty()) throw ShapeMismatchError("decoder has no targets (S_j empty)");
        std::vector<bool> is_target(src.coords(), false);
        for (const auto& t : dec.targets) {
            if (t.coordinate < 0 || t.coordinate >= src.coords())
                throw ShapeMismatchError("target coordinate out of range");
            if (is_side[t.coordinate])
                throw CoordOverlapError("target coordinate listed as side information");
            if (is_target[t.coordinate]) throw ShapeMismatchError("repeated target coordinate");
            is_target[t.coordinate] = true;
            if (t.budget < 0.0) throw BudgetNegativeError("distortion budget must be >= 0");
            if (t.dm.source_size() != src.sizes[t.coordinate])
                throw ShapeMismatchError("distortion matrix does not match its coordinate");
        }
        // S_j^c must be exactly the complement of S_j.
        for (int c = 0; c < src.coords(); ++c) {
            if (!is_side[c] && !is_target[c])
                throw CoordOverlapError("side set is not the exact complement of the target set");
        }
    }
}

int default_gcd_u_size(const GCDProblem& problem) {
    int u = static_cast<int>(problem.source.cells());
    for (const auto& dec : problem.decoders) u += static_cast<int>(dec.targets.size());
    return u;
}

minimax::Spec gcd_spec(const GCDProblem& problem, int u_size) {
    validate_gcd_problem(problem);
    const auto& src = problem.source;
    minimax::Spec spec;
    spec.pmf = src.pmf;
    spec.u_size = u_size;
    for (const auto& dec : problem.decoders) {
        minimax::Term term;
        term.side_class = side_classes(src, dec.side, &term.n_class);
        spec.terms.push_back(term);
        for (const auto& t : dec.targets) {
            minimax::Constraint con;
            con.side_class = spec.terms.back().side_class;
            con.n_class = spec.terms.back().n_class;
            con.recon_size = t.dm.recon_size();
            con.dmax = t.dm.dmax;
            con.budget = t.budget;
            con.dist.resize(src.cells() * con.recon_size);
            for (std::size_t cell = 0; cell < src.cells(); ++cell) {
                const int letter = src.unravel(cell)[t.coordinate];
                for (int r = 0; r < con.recon_size; ++r) {
                    con.dist[cell * con.recon_size + r] = t.dm.matrix[letter][r];
                }
            }
            spec.constraints.push_back(std::move(con));
        }
    }
    return spec;
}

double gcd_objective(const GCDProblem& problem, const AuxiliaryChannel& ch) {
    validate_gcd_problem(problem);
    if (ch.rows.size() != problem.source.cells())
        throw ShapeMismatchError("channel rows do not match the product alphabet");
    const auto spec = gcd_spec(problem, ch.u_size);
    return minimax::exact_objective(spec, ch);
}

GCDSolution optimize_gcd_rate(const GCDProblem& problem, const OptimizerOptions& opts) {
    const int u_size =
        opts.u_size_override > 0 ? opts.u_size_override : default_gcd_u_size(problem);
    const auto spec = gcd_spec(problem, u_size);
    const auto res = minimax::solve(spec, opts);
    GCDSolution sol;
    sol.rate = res.rate;
    sol.channel = res.channel;
    sol.decoder_tables = res.decoder_tables;
    sol.achieved_distortions = res.distortions;
    sol.mi_terms = res.term_values;
    sol.feasible = res.feasible;
    sol.restarts_used = res.restarts_used;
    return sol;
}

GCDSolution three_source_example(const JointSource& src,
                                 const std::vector<DistortionMeasure>& dms_by_coord,
                                 const std::vector<double>& budgets,
                                 const OptimizerOptions& opts) {
    if (src.coords() != 3) throw ShapeMismatchError("three-source example needs three coordinates");
    if (dms_by_coord.size() != 3) throw ShapeMismatchError("need one distortion measure per coordinate");
    if (budgets.size() != 6) throw ShapeMismatchError("need six budgets, one per (decoder, target)");
    GCDProblem problem;
    problem.source = src;
    int b = 0;
    for (int j = 0; j < 3; ++j) {
        GCDDecoderSpec dec;
        dec.side = {j};
        for (int i = 0; i < 3; ++i) {
            if (i == j) continue;
            dec.targets.push_back({i, dms_by_coord[i], budgets[b++]});
        }
        problem.decoders.push_back(std::move(dec));
    }
    return optimize_gcd_rate(problem, opts);
}

}  // namespace cdr
