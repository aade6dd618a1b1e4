#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "rcs/csv.hpp"
#include "rcs/errors.hpp"
#include "rcs/rsb_solver.hpp"
#include "rcs/sweep.hpp"

namespace {

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw rcs::ConfigError("cannot open output file: " + path);
    out.write(text.data(), std::streamsize(text.size()));
}

int run(int argc, char** argv) {
    CLI::App app{"asymptotic MSE of regularized least-squares reconstruction: "
                 "replica predictions and finite-size Monte Carlo"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    int jobs = 1;
    bool strict = false, restricted_rs = false;

    auto* predict = app.add_subcommand("predict", "single-point fixed-point predictions (CSV)");
    auto* sweep = app.add_subcommand("sweep", "grid sweep over lambda or rate (CSV)");
    auto* simulate = app.add_subcommand("simulate", "finite-size Monte Carlo (CSV + JSON summary)");
    for (auto* sub : {predict, sweep, simulate}) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_path, "output CSV path (default: standard output)");
    }
    for (auto* sub : {predict, sweep})
        sub->add_flag("--strict", strict, "exit 3 when any reported row is non-converged");
    for (auto* sub : {sweep, simulate})
        sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sweep->add_flag("--restricted-rs", restricted_rs,
                    "restrict symmetric-solver lambda minimization to converged points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    rcs::RunConfig cfg = rcs::load_config(config_path);

    if (simulate->parsed()) {
        rcs::SimConfig sc = cfg.make_sim_config();
        auto t0 = std::chrono::steady_clock::now();
        rcs::SimReport rep = rcs::run_sim(sc, jobs);
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        nlohmann::json summary{
            {"seed", sc.seed},
            {"n", sc.n},
            {"k", sc.k()},
            {"r", sc.ensemble.r},
            {"trials", sc.trials},
            {"lambda", sc.lambda},
            {"lambda0", sc.lambda0},
            {"s", sc.prior.s},
            {"mean_distortion", rep.mean},
            {"mean_D_dB", rcs::to_db(rep.mean, sc.prior.s)},
            {"std_error", rep.std_error},
            {"mean_iterations", rep.mean_iterations},
            {"max_iterations", rep.max_iterations},
            {"wall_seconds", wall},
        };
        std::string csv = rcs::trials_csv(rep);
        std::string sum = summary.dump(2) + "\n";
        if (out_path.empty()) {  // keep the data stream clean for piping
            write_text("", csv);
            std::fputs(sum.c_str(), stderr);
        } else {
            write_text(out_path, csv);
            std::fwrite(sum.data(), 1, sum.size(), stdout);
        }
        return 0;
    }

    std::vector<rcs::SweepRow> rows;
    if (predict->parsed()) {
        rows = rcs::predict_rows(cfg);
    } else {
        rcs::SweepOptions opts;
        opts.jobs = jobs;
        opts.restricted_rs = restricted_rs;
        rows = rcs::run_sweep(cfg, opts);
    }
    write_text(out_path, rcs::sweep_csv(rows, cfg.system.prior.s));
    if (strict && rcs::any_nonconverged(rows)) {
        std::fputs("strict mode: non-converged rows present\n", stderr);
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const rcs::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const rcs::SizeError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const rcs::DomainError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
