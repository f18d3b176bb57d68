#pragma once

#include <cstdint>
#include <vector>

#include "cdr/prob.hpp"

namespace cdr {

// Conditional pmf P(u | row), one simplex row per source tuple.
struct AuxiliaryChannel {
    int u_size = 0;
    std::vector<std::vector<double>> rows;

    static AuxiliaryChannel one_hot(std::size_t n_rows, int u_size);
    static AuxiliaryChannel constant(std::size_t n_rows, int u_size);
};

struct OptimizerOptions {
    int restarts = 32;
    std::uint64_t seed = 1;
    int max_outer_rounds = 500;
    int inner_steps = 40;
    double tol = 1e-7;
    double temp_init = 1.0;
    double temp_final = 1e-3;
    double feasibility_tol = 1e-6;
    int u_size_override = 0;  // 0 = module default
};

// Shared machinery for minimizing max_j I(T_j; U | S_j) over P(U | full tuple)
// under posterior-optimal-decoder distortion constraints. Each term and each
// constraint is described by the projection of the full tuple onto its
// side-information letters; the term's target is the complement, so
// I(T_j; U | S_j) = H(V | S_j) - H(V | U, S_j) with V the full tuple.
namespace minimax {

struct Term {
    std::vector<int> side_class;  // per full-tuple cell, side-letter class
    int n_class = 1;
};

struct Constraint {
    std::vector<int> side_class;    // per full-tuple cell
    int n_class = 1;
    std::vector<double> dist;       // dist[cell * recon_size + r]
    int recon_size = 0;
    double dmax = 0.0;
    double budget = 0.0;
};

struct Spec {
    std::vector<double> pmf;  // over full tuple cells
    int u_size = 0;
    std::vector<Term> terms;
    std::vector<Constraint> constraints;
};

struct Result {
    double rate = 0.0;
    AuxiliaryChannel channel;
    std::vector<std::vector<int>> decoder_tables;  // per constraint, [u * n_class + s]
    std::vector<double> distortions;
    std::vector<double> term_values;
    bool feasible = false;
    int restarts_used = 0;
};

// Posterior-optimal decoder tables (ties and zero-probability pairs resolve
// to the lowest reconstruction index).
std::vector<std::vector<int>> optimal_decoders(const Spec& spec, const AuxiliaryChannel& ch);

// Values of every I(T_j; U | S_j) for the given channel.
std::vector<double> term_values(const Spec& spec, const AuxiliaryChannel& ch);

// Exact (unsmoothed) objective max_j I(T_j; U | S_j).
double exact_objective(const Spec& spec, const AuxiliaryChannel& ch);

// Expected distortion of each constraint under the given decoder tables.
std::vector<double> constraint_distortions(const Spec& spec, const AuxiliaryChannel& ch,
                                           const std::vector<std::vector<int>>& tables);

// Smoothed objective: temp * log sum_j exp(I_j / temp) plus augmented-Lagrangian
// penalties for the constraints at fixed decoder tables and multipliers.
double penalized_value(const Spec& spec, const AuxiliaryChannel& ch,
                       const std::vector<std::vector<int>>& tables,
                       const std::vector<double>& lambdas, double mu, double temp);

// Analytic gradient of penalized_value w.r.t. the channel entries.
std::vector<std::vector<double>> penalized_gradient(const Spec& spec, const AuxiliaryChannel& ch,
                                                    const std::vector<std::vector<int>>& tables,
                                                    const std::vector<double>& lambdas, double mu,
                                                    double temp);

// Smallest constraint distortion reachable by any channel (one-hot U).
std::vector<double> min_distortions(const Spec& spec);

// Multi-start alternating minimization. Throws InfeasibleError when some
// budget is below the one-hot floor, NonConvergenceError when no feasible
// point was found across restarts.
Result solve(const Spec& spec, const OptimizerOptions& opts);

}  // namespace minimax

}  // namespace cdr
