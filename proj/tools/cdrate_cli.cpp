// cdrate: rate-distortion computations for complementary-delivery coding.
//
// Exit codes: 0 ok, 2 input/validation failure, 3 convergence failure,
// 4 resource limit exceeded.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cdr/baselines.hpp"
#include "cdr/cd_rate.hpp"
#include "cdr/coding_sim.hpp"
#include "cdr/gcd_rate.hpp"
#include "cdr/problem_io.hpp"

using nlohmann::json;

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct CommonFlags {
    std::string problem_path;
    std::string format = "json";
    bool bits = false;
    std::int64_t seed = -1;      // -1 = keep the problem file's seed
    int restarts = 0;            // 0 = keep
    int u_size = 0;              // 0 = keep
    std::string dump_solution;   // empty = off
    bool dump_problem = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_solution_dump) {
    cmd->add_option("problem", flags.problem_path, "problem file (JSON)")->required();
    cmd->add_option("--format", flags.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_flag("--bits", flags.bits, "also report rates in bits");
    cmd->add_option("--seed", flags.seed, "override the optimizer seed");
    cmd->add_option("--restarts", flags.restarts, "override the restart count");
    cmd->add_option("--u-size", flags.u_size, "override the auxiliary alphabet size");
    if (with_solution_dump) {
        cmd->add_option("--dump-solution", flags.dump_solution,
                        "write the optimized channel and decoders to this file");
    }
    cmd->add_flag("--dump-problem", flags.dump_problem,
                  "echo the parsed problem as JSON and exit");
}

cdr::ProblemFile load_with_overrides(const CommonFlags& flags) {
    auto pf = cdr::load_problem(flags.problem_path);
    if (flags.seed >= 0) {
        pf.optimizer.seed = static_cast<std::uint64_t>(flags.seed);
        pf.simulator.seed = static_cast<std::uint64_t>(flags.seed);
    }
    if (flags.restarts > 0) pf.optimizer.restarts = flags.restarts;
    if (flags.u_size > 0) pf.u_size = flags.u_size;
    return pf;
}

// Returns true when the caller should stop after the echo.
bool maybe_echo_problem(const CommonFlags& flags, const cdr::ProblemFile& pf) {
    if (!flags.dump_problem) return false;
    std::cout << cdr::dump_problem(pf).dump(2) << "\n";
    return true;
}

cdr::OptimizerOptions solver_options(const cdr::ProblemFile& pf) {
    auto opts = pf.optimizer;
    opts.u_size_override = pf.u_size;
    return opts;
}

void emit(const json& doc, const std::string& format) {
    if (format == "csv") {
        // Flat single-row CSV view of a report object.
        std::vector<std::string> keys;
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            if (it->is_number() || it->is_boolean() || it->is_string()) keys.push_back(it.key());
        }
        for (std::size_t i = 0; i < keys.size(); ++i)
            std::cout << keys[i] << (i + 1 < keys.size() ? "," : "\n");
        for (std::size_t i = 0; i < keys.size(); ++i) {
            const auto& v = doc.at(keys[i]);
            if (v.is_string()) std::cout << v.get<std::string>();
            else std::cout << v.dump();
            std::cout << (i + 1 < keys.size() ? "," : "\n");
        }
    } else {
        std::cout << doc.dump(2) << "\n";
    }
}

json rate_report(const cdr::CDSolution& sol, const cdr::ProblemFile& pf, bool bits) {
    json doc;
    doc["units"] = "nats";
    doc["seed"] = pf.optimizer.seed;
    doc["rate_nats"] = sol.rate;
    if (bits) doc["rate_bits"] = sol.rate / kLn2;
    doc["distortion_x"] = sol.achieved_distortions.first;
    doc["distortion_y"] = sol.achieved_distortions.second;
    doc["mi_x_u_given_y"] = sol.mi_terms.first;
    doc["mi_y_u_given_x"] = sol.mi_terms.second;
    doc["feasible"] = sol.feasible;
    doc["restarts_used"] = sol.restarts_used;
    doc["u_size"] = sol.channel.u_size;
    return doc;
}

int cmd_rate(const CommonFlags& flags) {
    const auto pf = load_with_overrides(flags);
    if (maybe_echo_problem(flags, pf)) return 0;
    if (!cdr::is_cd_problem(pf))
        throw cdr::ShapeMismatchError("rate needs a two-coordinate problem with budgets");
    const auto sol = cdr::optimize_cd_rate(pf.source, cdr::cd_distortions(pf),
                                           cdr::cd_budgets(pf), solver_options(pf));
    emit(rate_report(sol, pf, flags.bits), flags.format);
    if (!flags.dump_solution.empty()) {
        std::ofstream out(flags.dump_solution);
        if (!out) throw cdr::InputError("cannot write solution file: " + flags.dump_solution);
        out << cdr::dump_cd_solution(sol).dump(2) << "\n";
    }
    return 0;
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw cdr::InputError("bad grid value: " + item);
        }
    }
    return values;
}

int cmd_curve(const CommonFlags& flags, const std::string& grid, const std::string& grid_x,
              const std::string& grid_y) {
    const auto pf = load_with_overrides(flags);
    if (maybe_echo_problem(flags, pf)) return 0;
    if (!cdr::is_cd_problem(pf))
        throw cdr::ShapeMismatchError("curve needs a two-coordinate problem with budgets");

    std::vector<double> dxs, dys;
    if (!grid.empty()) {
        dxs = parse_grid(grid);
        dys = dxs;
    } else {
        dxs = parse_grid(grid_x);
        dys = parse_grid(grid_y);
    }
    if (dxs.empty() || dxs.size() != dys.size())
        throw cdr::InputError("curve needs matching nonempty --grid-x/--grid-y (or --grid)");

    const auto dms = cdr::cd_distortions(pf);
    const auto opts = solver_options(pf);

    std::cout << "d_x,d_y,rate_nats";
    if (flags.bits) std::cout << ",rate_bits";
    std::cout << ",status\n";
    double prev = -1.0;
    bool monotone = true;
    bool diagonal = !grid.empty();
    for (std::size_t i = 0; i < dxs.size(); ++i) {
        std::string status = "ok";
        double rate = std::nan("");
        try {
            const auto sol = cdr::optimize_cd_rate(pf.source, dms,
                                                   cdr::DistortionBudget{{dxs[i], dys[i]}}, opts);
            rate = sol.rate;
        } catch (const cdr::NonConvergenceError&) {
            status = "no_convergence";
        } catch (const cdr::InputError&) {
            status = "infeasible";
        }
        std::cout << dxs[i] << "," << dys[i] << ",";
        if (std::isnan(rate)) std::cout << "";
        else std::cout << rate;
        if (flags.bits) {
            std::cout << ",";
            if (!std::isnan(rate)) std::cout << rate / kLn2;
        }
        std::cout << "," << status << "\n";
        if (!std::isnan(rate)) {
            if (prev >= 0.0 && rate > prev + 1e-6) monotone = false;
            prev = rate;
        }
    }
    std::cout << "# units=nats seed=" << opts.seed;
    if (diagonal) std::cout << " monotone_nonincreasing=" << (monotone ? "true" : "false");
    std::cout << "\n";
    return 0;
}

int cmd_baselines(const CommonFlags& flags) {
    const auto pf = load_with_overrides(flags);
    if (maybe_echo_problem(flags, pf)) return 0;
    if (!cdr::is_cd_problem(pf))
        throw cdr::ShapeMismatchError("baselines needs a two-coordinate problem with budgets");
    const auto dms = cdr::cd_distortions(pf);
    const auto budgets = cdr::cd_budgets(pf);
    const auto report = cdr::sandwich_check(pf.source, dms, budgets, solver_options(pf));

    json doc;
    doc["units"] = "nats";
    doc["seed"] = pf.optimizer.seed;
    doc["lossless_rate_nats"] = cdr::lossless_cd_rate(pf.source);
    doc["cond_rd_x_nats"] = cdr::conditional_rd(pf.source, dms.first, budgets.values[0], 0);
    doc["cond_rd_y_nats"] = cdr::conditional_rd(pf.source, dms.second, budgets.values[1], 1);
    doc["wyner_ziv_x_nats"] = cdr::wyner_ziv(pf.source, dms.first, budgets.values[0], 0);
    doc["wyner_ziv_y_nats"] = cdr::wyner_ziv(pf.source, dms.second, budgets.values[1], 1);
    doc["cd_rate_nats"] = report.cd_rate;
    doc["sandwich_lower_nats"] = report.lower;
    doc["sandwich_upper_nats"] = report.upper;
    doc["slack_lower"] = report.slack_lower;
    doc["slack_upper"] = report.slack_upper;
    doc["sandwich_violated"] = report.violated;
    if (flags.bits) doc["cd_rate_bits"] = report.cd_rate / kLn2;
    emit(doc, flags.format);
    return 0;
}

int cmd_simulate(const CommonFlags& flags, const std::string& solution_path,
                 const std::string& out_prefix) {
    const auto pf = load_with_overrides(flags);
    if (maybe_echo_problem(flags, pf)) return 0;
    if (!cdr::is_cd_problem(pf))
        throw cdr::ShapeMismatchError("simulate needs a two-coordinate problem with budgets");
    const auto dms = cdr::cd_distortions(pf);

    cdr::CDSolution sol;
    if (!solution_path.empty()) {
        std::ifstream in(solution_path);
        if (!in) throw cdr::InputError("cannot open solution file: " + solution_path);
        json doc;
        try {
            in >> doc;
            sol = cdr::parse_cd_solution(doc);
        } catch (const json::exception& e) {
            throw cdr::InputError(std::string("invalid solution file: ") + e.what());
        }
    } else {
        sol = cdr::optimize_cd_rate(pf.source, dms, cdr::cd_budgets(pf), solver_options(pf));
    }

    const auto& sim = pf.simulator;
    json rows = json::array();
    std::ostringstream csv;
    csv << "n,M_U,L_U,N_U,rate_nats,p_E0c,p_enc_fail,p_dec1_fail,p_dec2_fail,"
        << "dist_x,dist_y,trials\n";
    for (int n : sim.block_lengths) {
        cdr::CodebookConfig cfg;
        cfg.n = n;
        cfg.gamma = sim.gamma;
        cfg.m1 = sim.m1;
        cfg.l1 = sim.l1;
        cfg.l2 = sim.l2;
        cfg.seed = sim.seed;
        const auto rec = cdr::run_trials(pf.source, sol.channel,
                                         {sol.decoder_x, sol.decoder_y}, dms, cfg,
                                         sim.typicality, sim.trials);
        json row;
        row["n"] = rec.n;
        row["M_U"] = rec.codewords;
        row["L_U"] = rec.bin_width;
        row["N_U"] = rec.bins;
        row["rate_nats"] = rec.rate_nats;
        row["p_E0c"] = rec.p_source_atypical;
        row["p_enc_fail"] = rec.p_encode_fail;
        row["p_dec1_fail"] = rec.p_decode1_fail;
        row["p_dec2_fail"] = rec.p_decode2_fail;
        row["dist_x"] = rec.dist_x;
        row["dist_y"] = rec.dist_y;
        row["trials"] = rec.trials;
        row["success_trials"] = rec.success_trials;
        row["dist_x_success"] = rec.dist_x_success;
        row["dist_y_success"] = rec.dist_y_success;
        rows.push_back(row);
        csv << rec.n << "," << rec.codewords << "," << rec.bin_width << "," << rec.bins << ","
            << rec.rate_nats << "," << rec.p_source_atypical << "," << rec.p_encode_fail << ","
            << rec.p_decode1_fail << "," << rec.p_decode2_fail << "," << rec.dist_x << ","
            << rec.dist_y << "," << rec.trials << "\n";
    }
    json doc;
    doc["units"] = "nats";
    doc["seed"] = sim.seed;
    doc["trials"] = sim.trials;
    doc["gamma"] = sim.gamma;
    doc["rows"] = rows;

    std::ofstream jout(out_prefix + ".json");
    std::ofstream cout_file(out_prefix + ".csv");
    if (!jout || !cout_file)
        throw cdr::InputError("cannot write output files with prefix: " + out_prefix);
    jout << doc.dump(2) << "\n";
    cout_file << csv.str();
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_gcd(const CommonFlags& flags) {
    const auto pf = load_with_overrides(flags);
    if (maybe_echo_problem(flags, pf)) return 0;
    if (!pf.gcd) throw cdr::ShapeMismatchError("gcd needs a problem file with decoder specs");
    auto problem = *pf.gcd;
    auto opts = solver_options(pf);
    const auto sol = cdr::optimize_gcd_rate(problem, opts);

    json doc;
    doc["units"] = "nats";
    doc["seed"] = pf.optimizer.seed;
    doc["rate_nats"] = sol.rate;
    if (flags.bits) doc["rate_bits"] = sol.rate / kLn2;
    doc["achieved_distortions"] = sol.achieved_distortions;
    doc["mi_terms_nats"] = sol.mi_terms;
    doc["feasible"] = sol.feasible;
    doc["restarts_used"] = sol.restarts_used;
    doc["u_size"] = sol.channel.u_size;

    // The N=2 canonical layout (decoder 1 sees Y and wants X, decoder 2 the
    // reverse) is exactly the CD problem; cross-check and report the delta.
    const bool canonical_pair =
        problem.decoders.size() == 2 && pf.source.coords() == 2 &&
        problem.decoders[0].side == std::vector<int>{1} &&
        problem.decoders[0].targets.size() == 1 &&
        problem.decoders[0].targets[0].coordinate == 0 &&
        problem.decoders[1].side == std::vector<int>{0} &&
        problem.decoders[1].targets.size() == 1 &&
        problem.decoders[1].targets[0].coordinate == 1;
    if (canonical_pair) {
        const auto cd = cdr::optimize_cd_rate(
            pf.source,
            {problem.decoders[0].targets[0].dm, problem.decoders[1].targets[0].dm},
            cdr::DistortionBudget{{problem.decoders[0].targets[0].budget,
                                   problem.decoders[1].targets[0].budget}},
            opts);
        doc["cd_cross_check_nats"] = cd.rate;
        doc["cd_cross_check_delta"] = sol.rate - cd.rate;
    }
    emit(doc, flags.format);
    return 0;
}

int cmd_selfcheck(std::int64_t seed_flag) {
    const std::uint64_t seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag) : 1;
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "pass" : "FAIL") << "  " << name << "\n";
        if (!ok) ++failures;
    };

    const auto dsbs = cdr::validate_joint({0.45, 0.05, 0.05, 0.45}, {2, 2});
    const auto hamming = cdr::hamming_distortion(2);

    // Chain rule on a fixed 3-coordinate joint.
    {
        const auto j = cdr::validate_joint(
            {0.10, 0.05, 0.07, 0.03, 0.20, 0.05, 0.15, 0.35}, {2, 2, 2});
        const double lhs = cdr::conditional_mutual_information(j, {0, 1}, {2}, {});
        const double rhs = cdr::conditional_mutual_information(j, {1}, {2}, {}) +
                           cdr::conditional_mutual_information(j, {0}, {2}, {1});
        check("chain rule", std::abs(lhs - rhs) <= 1e-9);
    }

    // Lossless corner on DSBS(0.1).
    cdr::OptimizerOptions opts;
    opts.seed = seed;
    opts.restarts = 8;
    {
        const auto sol =
            cdr::optimize_cd_rate(dsbs, {hamming, hamming}, cdr::DistortionBudget{{0, 0}}, opts);
        const double target = cdr::lossless_cd_rate(dsbs);
        check("lossless corner", std::abs(sol.rate - target) <= 1e-3);
    }

    // Slack budgets give rate zero.
    {
        const auto sol =
            cdr::optimize_cd_rate(dsbs, {hamming, hamming}, cdr::DistortionBudget{{1, 1}}, opts);
        check("saturated budgets", sol.rate <= 1e-9);
    }

    // Determinism under a fixed seed.
    {
        const cdr::DistortionBudget b{{0.05, 0.05}};
        const auto a = cdr::optimize_cd_rate(dsbs, {hamming, hamming}, b, opts);
        const auto c = cdr::optimize_cd_rate(dsbs, {hamming, hamming}, b, opts);
        check("seeded determinism", a.rate == c.rate);
    }

    std::cout << (failures == 0 ? "selfcheck ok" : "selfcheck FAILED") << "\n";
    return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"complementary-delivery rate-distortion toolkit"};
    app.require_subcommand(1);

    CommonFlags rate_flags, curve_flags, base_flags, sim_flags, gcd_flags;
    std::string grid, grid_x, grid_y;
    std::string solution_path, out_prefix = "simulation";
    std::int64_t selfcheck_seed = -1;

    auto* rate = app.add_subcommand("rate", "optimize R(X,Y|D_X,D_Y) for a problem file");
    add_common(rate, rate_flags, true);

    auto* curve = app.add_subcommand("curve", "sweep the rate over a distortion grid (CSV)");
    add_common(curve, curve_flags, false);
    curve->add_option("--grid", grid, "diagonal budgets D, comma separated");
    curve->add_option("--grid-x", grid_x, "D_X values, comma separated");
    curve->add_option("--grid-y", grid_y, "D_Y values, comma separated");

    auto* baselines = app.add_subcommand("baselines",
                                         "lossless, conditional-RD and Wyner-Ziv comparisons");
    add_common(baselines, base_flags, false);

    auto* simulate = app.add_subcommand("simulate", "random-binning Monte Carlo simulation");
    add_common(simulate, sim_flags, false);
    simulate->add_option("--solution", solution_path,
                         "reuse a solution file from rate --dump-solution");
    simulate->add_option("--out-prefix", out_prefix, "output path prefix (.json/.csv)");

    auto* gcd = app.add_subcommand("gcd", "generalized problem with explicit decoder specs");
    add_common(gcd, gcd_flags, false);

    auto* selfcheck = app.add_subcommand("selfcheck", "run built-in invariant checks");
    selfcheck->add_option("--seed", selfcheck_seed, "optimizer seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rate->parsed()) return cmd_rate(rate_flags);
        if (curve->parsed()) return cmd_curve(curve_flags, grid, grid_x, grid_y);
        if (baselines->parsed()) return cmd_baselines(base_flags);
        if (simulate->parsed()) return cmd_simulate(sim_flags, solution_path, out_prefix);
        if (gcd->parsed()) return cmd_gcd(gcd_flags);
        if (selfcheck->parsed()) return cmd_selfcheck(selfcheck_seed);
    } catch (const cdr::TooLargeError& e) {
        std::cerr << "error (resource): " << e.what() << "\n";
        return 4;
    } catch (const cdr::NonConvergenceError& e) {
        std::cerr << "error (convergence): " << e.what() << "\n";
        return 3;
    } catch (const cdr::InputError& e) {
        std::cerr << "error (input): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
