#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cdr/baselines.hpp"
#include "cdr/cd_rate.hpp"
#include "cdr/coding_sim.hpp"
#include "cdr/gcd_rate.hpp"
#include "cdr/prob.hpp"

namespace py = pybind11;
using namespace cdr;

namespace {

JointSource make_source(const std::vector<double>& pmf, const std::vector<int>& sizes) {
    return validate_joint(pmf, sizes);
}

std::pair<DistortionMeasure, DistortionMeasure> pair_dms(
    const std::vector<std::vector<double>>& dx, const std::vector<std::vector<double>>& dy) {
    return {make_distortion(dx), make_distortion(dy)};
}

OptimizerOptions opts_from_kwargs(int restarts, std::uint64_t seed, int u_size) {
    OptimizerOptions opts;
    if (restarts > 0) opts.restarts = restarts;
    opts.seed = seed;
    opts.u_size_override = u_size;
    return opts;
}

}  // namespace

PYBIND11_MODULE(_cdrate, m) {
    m.doc() = "complementary-delivery rate-distortion toolkit";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NonConvergenceError>(m, "NonConvergenceError", PyExc_RuntimeError);
    py::register_exception<TooLargeError>(m, "TooLargeError", PyExc_RuntimeError);

    py::class_<JointSource>(m, "JointSource")
        .def(py::init(&make_source), py::arg("pmf"), py::arg("sizes"))
        .def_readonly("sizes", &JointSource::sizes)
        .def_readonly("pmf", &JointSource::pmf)
        .def("cells", &JointSource::cells);

    py::class_<CDSolution>(m, "CDSolution")
        .def_readonly("rate", &CDSolution::rate)
        .def_readonly("achieved_distortions", &CDSolution::achieved_distortions)
        .def_readonly("mi_terms", &CDSolution::mi_terms)
        .def_readonly("feasible", &CDSolution::feasible)
        .def_readonly("restarts_used", &CDSolution::restarts_used)
        .def_property_readonly("u_size",
                               [](const CDSolution& s) { return s.channel.u_size; })
        .def_property_readonly("channel",
                               [](const CDSolution& s) { return s.channel.rows; });

    m.def("conditional_entropy", &conditional_entropy, py::arg("source"), py::arg("target"),
          py::arg("given"));
    m.def("conditional_mutual_information", &conditional_mutual_information, py::arg("source"),
          py::arg("a"), py::arg("b"), py::arg("c"));
    m.def("lossless_cd_rate", &lossless_cd_rate, py::arg("source"));

    m.def(
        "cd_rate",
        [](const JointSource& src, const std::vector<std::vector<double>>& dx,
           const std::vector<std::vector<double>>& dy, double budget_x, double budget_y,
           int restarts, std::uint64_t seed, int u_size) {
            return optimize_cd_rate(src, pair_dms(dx, dy),
                                    DistortionBudget{{budget_x, budget_y}},
                                    opts_from_kwargs(restarts, seed, u_size));
        },
        py::arg("source"), py::arg("distortion_x"), py::arg("distortion_y"),
        py::arg("budget_x"), py::arg("budget_y"), py::arg("restarts") = 0,
        py::arg("seed") = 1, py::arg("u_size") = 0);

    m.def(
        "conditional_rd",
        [](const JointSource& src, const std::vector<std::vector<double>>& dm, double budget,
           int which) { return conditional_rd(src, make_distortion(dm), budget, which); },
        py::arg("source"), py::arg("distortion"), py::arg("budget"), py::arg("which"));

    m.def(
        "wyner_ziv",
        [](const JointSource& src, const std::vector<std::vector<double>>& dm, double budget,
           int which) { return wyner_ziv(src, make_distortion(dm), budget, which); },
        py::arg("source"), py::arg("distortion"), py::arg("budget"), py::arg("which"));

    m.def(
        "gcd_rate",
        [](const JointSource& src, const std::vector<std::vector<int>>& sides,
           const std::vector<std::vector<std::pair<int, double>>>& targets, int restarts,
           std::uint64_t seed, int u_size) {
            GCDProblem problem;
            problem.source = src;
            for (std::size_t j = 0; j < sides.size(); ++j) {
                GCDDecoderSpec dec;
                dec.side = sides[j];
                for (const auto& [coord, budget] : targets.at(j)) {
                    GCDDecoderSpec::Target t;
                    t.coordinate = coord;
                    t.dm = hamming_distortion(src.sizes.at(coord));
                    t.budget = budget;
                    dec.targets.push_back(std::move(t));
                }
                problem.decoders.push_back(std::move(dec));
            }
            const auto sol = optimize_gcd_rate(problem, opts_from_kwargs(restarts, seed, u_size));
            return py::make_tuple(sol.rate, sol.achieved_distortions, sol.feasible);
        },
        py::arg("source"), py::arg("sides"), py::arg("targets"), py::arg("restarts") = 0,
        py::arg("seed") = 1, py::arg("u_size") = 0,
        "Hamming-distortion generalized problem: sides[j] lists the coordinates decoder j "
        "observes, targets[j] its (coordinate, budget) pairs.");

    m.def(
        "simulate",
        [](const JointSource& src, const CDSolution& sol,
           const std::vector<std::vector<double>>& dx, const std::vector<std::vector<double>>& dy,
           int n, int trials, double gamma, std::uint64_t seed) {
            CodebookConfig cfg;
            cfg.n = n;
            cfg.gamma = gamma;
            cfg.seed = seed;
            const auto dms = pair_dms(dx, dy);
            const auto decs = optimal_decoders(src, sol.channel, dms);
            const auto rec = run_trials(src, sol.channel, decs, dms, cfg, TypicalityParams{},
                                        trials);
            py::dict out;
            out["n"] = rec.n;
            out["M_U"] = rec.codewords;
            out["L_U"] = rec.bin_width;
            out["N_U"] = rec.bins;
            out["rate_nats"] = rec.rate_nats;
            out["p_E0c"] = rec.p_source_atypical;
            out["p_enc_fail"] = rec.p_encode_fail;
            out["p_dec1_fail"] = rec.p_decode1_fail;
            out["p_dec2_fail"] = rec.p_decode2_fail;
            out["dist_x"] = rec.dist_x;
            out["dist_y"] = rec.dist_y;
            out["trials"] = rec.trials;
            out["success_trials"] = rec.success_trials;
            out["dist_x_success"] = rec.dist_x_success;
            out["dist_y_success"] = rec.dist_y_success;
            return out;
        },
        py::arg("source"), py::arg("solution"), py::arg("distortion_x"), py::arg("distortion_y"),
        py::arg("n") = 12, py::arg("trials") = 500, py::arg("gamma") = 0.15, py::arg("seed") = 1);
}
