#include "rcs/config.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "rcs/errors.hpp"

namespace rcs {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
}

double get_real(const json& obj, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError("\"" + key + "\" must be a number");
    return v.get<double>();
}

double get_real_or(const json& obj, const std::string& key, double fallback) {
    return obj.contains(key) ? get_real(obj, key) : fallback;
}

long get_int(const json& obj, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError("\"" + key + "\" must be an integer");
    return v.get<long>();
}

std::vector<double> parse_grid(const json& v, const std::string& where) {
    std::vector<double> grid;
    if (v.is_array()) {
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(where + " entries must be numbers");
            grid.push_back(e.get<double>());
        }
    } else if (v.is_object()) {
        check_keys(v, where, {"from", "to", "step"});
        double a = get_real(v, "from"), b = get_real(v, "to"), h = get_real(v, "step");
        if (!(h > 0.0) || b < a) throw ConfigError(where + ": need step > 0 and to >= from");
        long count = std::lround(std::floor((b - a) / h + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) grid.push_back(a + double(i) * h);
    } else {
        throw ConfigError(where + " must be an array or {from, to, step}");
    }
    return grid;
}

void require_increasing(const std::vector<double>& g, const std::string& where) {
    if (g.empty()) throw ConfigError(where + " must be non-empty");
    for (size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) throw ConfigError(where + " must be strictly increasing");
}

}  // namespace

std::string solver_name(SolverChoice c) {
    switch (c) {
        case SolverChoice::Rs: return "rs";
        case SolverChoice::Rsb1: return "rsb1";
        case SolverChoice::Sim: return "sim";
    }
    return "?";
}

void SweepSpec::validate() const {
    require_increasing(grid, "sweep.grid");
    for (double v : grid)
        if (!(v > 0.0)) throw ConfigError("sweep.grid values must be positive");
    if (lambda_minimize) {
        if (variable != Variable::Rate)
            throw ConfigError("sweep.lambda_minimize requires variable = \"rate\"");
        require_increasing(lambda_minimize->grid, "sweep.lambda_minimize.grid");
        for (double v : lambda_minimize->grid)
            if (!(v > 0.0)) throw ConfigError("sweep.lambda_minimize.grid values must be positive");
        if (lambda_minimize->refine_iters < 0)
            throw ConfigError("sweep.lambda_minimize.refine_iters must be >= 0");
    }
}

SimConfig RunConfig::make_sim_config() const {
    if (!sim) throw ConfigError("config has no \"sim\" block");
    SimConfig sc;
    sc.n = sim->n;
    sc.ensemble = system.ensemble;
    sc.penalty = system.penalty;
    sc.prior = system.prior;
    sc.lambda = system.lambda;
    sc.lambda0 = system.lambda0;
    sc.trials = sim->trials;
    sc.seed = sim->seed;
    return sc;
}

RunConfig parse_config(const std::string& json_text, const std::string& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("top level must be a JSON object");
    check_keys(root, "config", {"ensemble", "spectrum_csv", "r", "penalty", "s", "lambda",
                                "lambda0", "solver", "quadrature", "sweep", "sim"});
    for (const char* req : {"ensemble", "r", "penalty"})
        if (!root.contains(req)) throw ConfigError(std::string("missing required key \"") + req + "\"");

    RunConfig cfg;
    double r = get_real(root, "r");

    std::string ens = root.at("ensemble").get<std::string>();
    if (ens == "iid") {
        cfg.system.ensemble = EnsembleSpec::iid(r);
    } else if (ens == "projector") {
        cfg.system.ensemble = EnsembleSpec::projector(r);
    } else if (ens == "tabulated") {
        if (!root.contains("spectrum_csv"))
            throw ConfigError("tabulated ensemble requires \"spectrum_csv\"");
        std::filesystem::path p = root.at("spectrum_csv").get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        cfg.system.ensemble = load_spectrum_csv(p.string(), r);
    } else {
        throw ConfigError("\"ensemble\" must be one of iid, projector, tabulated");
    }

    std::string pen = root.at("penalty").get<std::string>();
    if (pen == "l2")
        cfg.system.penalty = PenaltySpec::l2();
    else if (pen == "l1")
        cfg.system.penalty = PenaltySpec::l1();
    else if (pen == "l0")
        cfg.system.penalty = PenaltySpec::l0();
    else
        throw ConfigError("\"penalty\" must be one of l2, l1, l0");

    cfg.system.prior.s = get_real_or(root, "s", 0.1);
    cfg.system.lambda = get_real_or(root, "lambda", 1.0);
    cfg.system.lambda0 = get_real_or(root, "lambda0", 0.01);

    if (root.contains("quadrature")) {
        const json& quad = root.at("quadrature");
        if (!quad.is_object()) throw ConfigError("\"quadrature\" must be an object");
        check_keys(quad, "quadrature", {"N"});
        if (quad.contains("N")) cfg.system.quadrature_n = int(get_int(quad, "N"));
    }

    if (root.contains("solver")) {
        const json& sv = root.at("solver");
        if (!sv.is_array()) throw ConfigError("\"solver\" must be an array");
        for (const auto& e : sv) {
            std::string name = e.get<std::string>();
            if (name == "rs")
                cfg.solvers.push_back(SolverChoice::Rs);
            else if (name == "rsb1")
                cfg.solvers.push_back(SolverChoice::Rsb1);
            else if (name == "sim")
                cfg.solvers.push_back(SolverChoice::Sim);
            else
                throw ConfigError("unknown solver \"" + name + "\"");
        }
        if (cfg.solvers.empty()) throw ConfigError("\"solver\" must not be empty");
    } else {
        cfg.solvers.push_back(SolverChoice::Rs);
    }

    if (root.contains("sweep")) {
        const json& sw = root.at("sweep");
        if (!sw.is_object()) throw ConfigError("\"sweep\" must be an object");
        check_keys(sw, "sweep", {"variable", "grid", "lambda_minimize"});
        SweepSpec spec;
        std::string var = sw.at("variable").get<std::string>();
        if (var == "lambda")
            spec.variable = SweepSpec::Variable::Lambda;
        else if (var == "rate")
            spec.variable = SweepSpec::Variable::Rate;
        else
            throw ConfigError("sweep.variable must be \"lambda\" or \"rate\"");
        spec.grid = parse_grid(sw.at("grid"), "sweep.grid");
        if (sw.contains("lambda_minimize")) {
            const json& lm = sw.at("lambda_minimize");
            if (!lm.is_object()) throw ConfigError("sweep.lambda_minimize must be an object");
            check_keys(lm, "sweep.lambda_minimize", {"grid", "refine_iters"});
            SweepSpec::LambdaMinimize mini;
            mini.grid = parse_grid(lm.at("grid"), "sweep.lambda_minimize.grid");
            if (lm.contains("refine_iters")) mini.refine_iters = int(get_int(lm, "refine_iters"));
            spec.lambda_minimize = std::move(mini);
        }
        spec.validate();
        cfg.sweep = std::move(spec);
    }

    if (root.contains("sim")) {
        const json& sm = root.at("sim");
        if (!sm.is_object()) throw ConfigError("\"sim\" must be an object");
        check_keys(sm, "sim", {"n", "trials", "seed"});
        RunConfig::SimBlock blk;
        blk.n = int(get_int(sm, "n"));
        if (sm.contains("trials")) blk.trials = int(get_int(sm, "trials"));
        if (sm.contains("seed")) {
            const json& sd = sm.at("seed");
            if (!sd.is_number_integer()) throw ConfigError("sim.seed must be an integer");
            blk.seed = sd.get<std::uint64_t>();
        }
        cfg.sim = blk;
    }

    try {
        cfg.system.validate();
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace rcs
