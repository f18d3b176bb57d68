#pragma once

#include "cdr/minimax.hpp"
#include "cdr/prob.hpp"

namespace cdr {

// One decoder of a generalized problem: it observes the coordinates in
// `side` (S_j^c) and reproduces every coordinate in `targets` (S_j) under a
// per-target distortion measure and budget.
struct GCDDecoderSpec {
    struct Target {
        int coordinate = 0;
        DistortionMeasure dm;
        double budget = 0.0;
    };
    std::vector<int> side;  // S_j^c, sorted coordinate indices
    std::vector<Target> targets;
};

struct GCDProblem {
    JointSource source;
    std::vector<GCDDecoderSpec> decoders;
};

struct GCDSolution {
    double rate = 0.0;  // nats
    AuxiliaryChannel channel;
    // decoder_tables[k] corresponds to the k-th (decoder, target) pair in
    // declaration order; indexed [u * side_cells + side_cell].
    std::vector<std::vector<int>> decoder_tables;
    std::vector<double> achieved_distortions;
    std::vector<double> mi_terms;  // I(X^(S_j); U | X^(S_j^c)) per decoder
    bool feasible = false;
    int restarts_used = 0;
};

// Checks the S_j / S_j^c complement structure and budget signs.
void validate_gcd_problem(const GCDProblem& problem);

int default_gcd_u_size(const GCDProblem& problem);

minimax::Spec gcd_spec(const GCDProblem& problem, int u_size);

// max_j I(X^(S_j); U | X^(S_j^c)) for a channel over the full product
// alphabet.
double gcd_objective(const GCDProblem& problem, const AuxiliaryChannel& ch);

GCDSolution optimize_gcd_rate(const GCDProblem& problem, const OptimizerOptions& opts = {});

// The three-source broadcast instance: decoder j observes coordinate j-1 and
// reproduces the other two. Distortions and budgets are given per (decoder,
// target) pair in the order (1;2),(1;3),(2;1),(2;3),(3;1),(3;2).
GCDSolution three_source_example(const JointSource& src,
                                 const std::vector<DistortionMeasure>& dms_by_coord,
                                 const std::vector<double>& budgets,
                                 const OptimizerOptions& opts = {});

}  // namespace cdr
