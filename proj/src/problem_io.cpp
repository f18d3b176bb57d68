#include "cdr/problem_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace cdr {

namespace {

using nlohmann::json;

DistortionMeasure parse_distortion(const json& doc) {
    std::vector<std::vector<double>> matrix;
    for (const auto& row : doc) matrix.push_back(row.get<std::vector<double>>());
    return make_distortion(std::move(matrix));
}

json dump_distortion(const DistortionMeasure& dm) { return json(dm.matrix); }

OptimizerOptions parse_optimizer(const json& doc) {
    OptimizerOptions opts;
    if (doc.contains("restarts")) opts.restarts = doc.at("restarts").get<int>();
    if (doc.contains("seed")) opts.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("max_outer_rounds"))
        opts.max_outer_rounds = doc.at("max_outer_rounds").get<int>();
    if (doc.contains("inner_steps")) opts.inner_steps = doc.at("inner_steps").get<int>();
    if (doc.contains("tol")) opts.tol = doc.at("tol").get<double>();
    if (doc.contains("feasibility_tol"))
        opts.feasibility_tol = doc.at("feasibility_tol").get<double>();
    return opts;
}

json dump_optimizer(const OptimizerOptions& opts) {
    return json{{"restarts", opts.restarts},
                {"seed", opts.seed},
                {"max_outer_rounds", opts.max_outer_rounds},
                {"inner_steps", opts.inner_steps},
                {"tol", opts.tol},
                {"feasibility_tol", opts.feasibility_tol}};
}

SimConfig parse_simulator(const json& doc) {
    SimConfig cfg;
    if (doc.contains("block_lengths"))
        cfg.block_lengths = doc.at("block_lengths").get<std::vector<int>>();
    if (doc.contains("trials")) cfg.trials = doc.at("trials").get<int>();
    if (doc.contains("gamma")) cfg.gamma = doc.at("gamma").get<double>();
    if (doc.contains("m1")) cfg.m1 = doc.at("m1").get<double>();
    if (doc.contains("l1")) cfg.l1 = doc.at("l1").get<double>();
    if (doc.contains("l2")) cfg.l2 = doc.at("l2").get<double>();
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("delta")) cfg.typicality.delta = doc.at("delta").get<double>();
    if (doc.contains("k0")) cfg.typicality.k0 = doc.at("k0").get<double>();
    if (doc.contains("k1")) cfg.typicality.k1 = doc.at("k1").get<double>();
    if (doc.contains("k2")) cfg.typicality.k2 = doc.at("k2").get<double>();
    if (doc.contains("k3")) cfg.typicality.k3 = doc.at("k3").get<double>();
    return cfg;
}

json dump_simulator(const SimConfig& cfg) {
    return json{{"block_lengths", cfg.block_lengths},
                {"trials", cfg.trials},
                {"gamma", cfg.gamma},
                {"m1", cfg.m1},
                {"l1", cfg.l1},
                {"l2", cfg.l2},
                {"seed", cfg.seed},
                {"delta", cfg.typicality.delta},
                {"k0", cfg.typicality.k0},
                {"k1", cfg.typicality.k1},
                {"k2", cfg.typicality.k2},
                {"k3", cfg.typicality.k3}};
}

}  // namespace

ProblemFile parse_problem(const json& doc) {
    ProblemFile pf;
    for (const auto& alpha : doc.at("alphabets")) {
        pf.alphabets.push_back(alpha.get<std::vector<std::string>>());
    }
    std::vector<int> sizes;
    for (const auto& alpha : pf.alphabets) sizes.push_back(static_cast<int>(alpha.size()));
    pf.source = validate_joint(doc.at("pmf").get<std::vector<double>>(), sizes);

    for (const auto& dm : doc.at("distortions")) pf.distortions.push_back(parse_distortion(dm));
    if (pf.distortions.size() != pf.alphabets.size())
        throw ShapeMismatchError("need one distortion matrix per coordinate");
    for (std::size_t c = 0; c < pf.distortions.size(); ++c) {
        if (pf.distortions[c].source_size() != sizes[c])
            throw ShapeMismatchError("distortion matrix rows do not match its alphabet");
    }

    if (doc.contains("budgets")) pf.budgets = doc.at("budgets").get<std::vector<double>>();
    if (doc.contains("u_size")) pf.u_size = doc.at("u_size").get<int>();
    if (doc.contains("optimizer")) pf.optimizer = parse_optimizer(doc.at("optimizer"));
    if (doc.contains("simulator")) pf.simulator = parse_simulator(doc.at("simulator"));
    for (double b : pf.budgets) {
        if (b < 0.0) throw BudgetNegativeError("distortion budget must be >= 0");
    }

    if (doc.contains("decoders")) {
        GCDProblem problem;
        problem.source = pf.source;
        for (const auto& dec : doc.at("decoders")) {
            GCDDecoderSpec spec;
            spec.side = dec.at("side").get<std::vector<int>>();
            for (const auto& tgt : dec.at("targets")) {
                GCDDecoderSpec::Target t;
                t.coordinate = tgt.at("coordinate").get<int>();
                t.budget = tgt.at("budget").get<double>();
                if (tgt.contains("distortion")) t.dm = parse_distortion(tgt.at("distortion"));
                else {
                    if (t.coordinate < 0 || t.coordinate >= static_cast<int>(pf.distortions.size()))
                        throw ShapeMismatchError("target coordinate out of range");
                    t.dm = pf.distortions[t.coordinate];
                }
                spec.targets.push_back(std::move(t));
            }
            problem.decoders.push_back(std::move(spec));
        }
        validate_gcd_problem(problem);
        pf.gcd = std::move(problem);
    } else if (pf.budgets.empty()) {
        throw ShapeMismatchError("problem file needs either budgets or decoders");
    }

    if (!pf.budgets.empty()) {
        if (pf.alphabets.size() != 2 || pf.budgets.size() != 2)
            throw ShapeMismatchError("budgets form requires two coordinates and two budgets");
    }
    return pf;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open problem file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
    try {
        return parse_problem(doc);
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid problem document: ") + e.what());
    }
}

json dump_problem(const ProblemFile& pf) {
    json doc;
    doc["alphabets"] = pf.alphabets;
    doc["pmf"] = pf.source.pmf;
    json dms = json::array();
    for (const auto& dm : pf.distortions) dms.push_back(dump_distortion(dm));
    doc["distortions"] = dms;
    if (!pf.budgets.empty()) doc["budgets"] = pf.budgets;
    if (pf.gcd) {
        json decs = json::array();
        for (const auto& dec : pf.gcd->decoders) {
            json targets = json::array();
            for (const auto& t : dec.targets) {
                targets.push_back(json{{"coordinate", t.coordinate},
                                       {"budget", t.budget},
                                       {"distortion", dump_distortion(t.dm)}});
            }
            decs.push_back(json{{"side", dec.side}, {"targets", targets}});
        }
        doc["decoders"] = decs;
    }
    if (pf.u_size > 0) doc["u_size"] = pf.u_size;
    doc["optimizer"] = dump_optimizer(pf.optimizer);
    doc["simulator"] = dump_simulator(pf.simulator);
    return doc;
}

bool is_cd_problem(const ProblemFile& pf) { return pf.budgets.size() == 2; }

std::pair<DistortionMeasure, DistortionMeasure> cd_distortions(const ProblemFile& pf) {
    if (!is_cd_problem(pf)) throw ShapeMismatchError("not a two-coordinate CD problem");
    return {pf.distortions[0], pf.distortions[1]};
}

DistortionBudget cd_budgets(const ProblemFile& pf) {
    if (!is_cd_problem(pf)) throw ShapeMismatchError("not a two-coordinate CD problem");
    return DistortionBudget{pf.budgets};
}

json dump_cd_solution(const CDSolution& sol) {
    json doc;
    doc["rate_nats"] = sol.rate;
    doc["u_size"] = sol.channel.u_size;
    doc["channel"] = sol.channel.rows;
    doc["decoder_x"] = json{{"u_size", sol.decoder_x.u_size},
                            {"side_size", sol.decoder_x.side_size},
                            {"recon_size", sol.decoder_x.recon_size},
                            {"table", sol.decoder_x.table}};
    doc["decoder_y"] = json{{"u_size", sol.decoder_y.u_size},
                            {"side_size", sol.decoder_y.side_size},
                            {"recon_size", sol.decoder_y.recon_size},
                            {"table", sol.decoder_y.table}};
    doc["distortion_x"] = sol.achieved_distortions.first;
    doc["distortion_y"] = sol.achieved_distortions.second;
    doc["feasible"] = sol.feasible;
    doc["restarts_used"] = sol.restarts_used;
    return doc;
}

CDSolution parse_cd_solution(const json& doc) {
    CDSolution sol;
    sol.rate = doc.at("rate_nats").get<double>();
    sol.channel.u_size = doc.at("u_size").get<int>();
    sol.channel.rows = doc.at("channel").get<std::vector<std::vector<double>>>();
    auto parse_rule = [](const json& d) {
        return DecoderRule{d.at("u_size").get<int>(), d.at("side_size").get<int>(),
                           d.at("recon_size").get<int>(), d.at("table").get<std::vector<int>>()};
    };
    sol.decoder_x = parse_rule(doc.at("decoder_x"));
    sol.decoder_y = parse_rule(doc.at("decoder_y"));
    sol.achieved_distortions = {doc.at("distortion_x").get<double>(),
                                doc.at("distortion_y").get<double>()};
    sol.feasible = doc.at("feasible").get<bool>();
    sol.restarts_used = doc.at("restarts_used").get<int>();
    return sol;
}

}  // namespace cdr
