#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cdr/cd_rate.hpp"
#include "cdr/coding_sim.hpp"
#include "cdr/gcd_rate.hpp"

namespace cdr {

struct SimConfig {
    std::vector<int> block_lengths{8, 12, 16};
    int trials = 2000;
    double gamma = 0.15;
    double m1 = 1.0;
    double l1 = 1.0;
    double l2 = 1.0;
    TypicalityParams typicality;
    std::uint64_t seed = 1;
};

// One parsed problem document. Two-coordinate files with `budgets` describe
// the canonical CD problem; files with a `decoders` array describe a
// generalized problem.
struct ProblemFile {
    std::vector<std::vector<std::string>> alphabets;
    JointSource source;
    std::vector<DistortionMeasure> distortions;  // per coordinate
    std::vector<double> budgets;                 // CD form, empty otherwise
    std::optional<GCDProblem> gcd;               // decoder-spec form
    int u_size = 0;                              // 0 = module default
    OptimizerOptions optimizer;
    SimConfig simulator;
};

ProblemFile parse_problem(const nlohmann::json& doc);
ProblemFile load_problem(const std::string& path);
nlohmann::json dump_problem(const ProblemFile& problem);

bool is_cd_problem(const ProblemFile& problem);

// CD accessors; throw ShapeMismatchError on a non-CD file.
std::pair<DistortionMeasure, DistortionMeasure> cd_distortions(const ProblemFile& problem);
DistortionBudget cd_budgets(const ProblemFile& problem);

// Optimized-solution round trip used by `rate --dump-solution` and
// `simulate --solution`.
nlohmann::json dump_cd_solution(const CDSolution& sol);
CDSolution parse_cd_solution(const nlohmann::json& doc);

}  // namespace cdr
