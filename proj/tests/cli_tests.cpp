#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

struct RunResult {
    int code;
    std::string out, err;
};

RunResult run_cli(const std::string& args) {
    std::string o = "/tmp/rcs_cli_stdout", e = "/tmp/rcs_cli_stderr";
    std::string cmd = std::string(RCS_CLI_PATH) + " " + args + " > " + o + " 2> " + e;
    int st = std::system(cmd.c_str());
    int code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return {code, slurp(o), slurp(e)};
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("predict emits the quadratic-penalty fixed point") {
        spit("/tmp/rcs_cli_l2.json",
             R"({"ensemble": "iid", "r": 2.0, "penalty": "l2",
                 "lambda": 0.01, "lambda0": 0.01, "solver": ["rs"]})");
        auto res = run_cli("predict --config /tmp/rcs_cli_l2.json");
        CHECK(res.code == 0);
        CHECK(res.out.find("solver,lambda,rate") != std::string::npos);
        CHECK(res.out.find("rs,0.01,2") != std::string::npos);
        CHECK(res.out.find("0.05481") != std::string::npos);
        CHECK(res.out.find("Converged") != std::string::npos);
    }

    TEST_CASE("config errors name the offending key and exit 2") {
        spit("/tmp/rcs_cli_bad.json",
             R"({"ensemble": "iid", "r": 2.0, "penalty": "l2", "lambada": 3})");
        auto res = run_cli("predict --config /tmp/rcs_cli_bad.json");
        CHECK(res.code == 2);
        CHECK(res.err.find("lambada") != std::string::npos);
    }

    TEST_CASE("strict mode surfaces the invalid region as exit 3") {
        spit("/tmp/rcs_cli_l0.json",
             R"({"ensemble": "iid", "r": 4.0, "penalty": "l0",
                 "lambda": 0.3, "solver": ["rs"]})");
        auto loose = run_cli("predict --config /tmp/rcs_cli_l0.json");
        CHECK(loose.code == 0);
        CHECK(loose.out.find("Converged") == std::string::npos);
        auto strict = run_cli("predict --strict --config /tmp/rcs_cli_l0.json");
        CHECK(strict.code == 3);
    }

    TEST_CASE("sweep output is byte-stable and job-count independent") {
        spit("/tmp/rcs_cli_sweep.json",
             R"({"ensemble": "iid", "r": 2.0, "penalty": "l1",
                 "solver": ["rs", "rsb1"],
                 "sweep": {"variable": "lambda", "grid": [0.3, 0.6, 1.0]}})");
        auto a = run_cli("sweep --config /tmp/rcs_cli_sweep.json --out /tmp/rcs_cli_sweep_a.csv");
        auto b = run_cli("sweep --config /tmp/rcs_cli_sweep.json --out /tmp/rcs_cli_sweep_b.csv");
        auto c = run_cli(
            "sweep --jobs 3 --config /tmp/rcs_cli_sweep.json --out /tmp/rcs_cli_sweep_c.csv");
        REQUIRE(a.code == 0);
        REQUIRE(b.code == 0);
        REQUIRE(c.code == 0);
        std::string ca = slurp("/tmp/rcs_cli_sweep_a.csv");
        CHECK(!ca.empty());
        CHECK(ca == slurp("/tmp/rcs_cli_sweep_b.csv"));
        CHECK(ca == slurp("/tmp/rcs_cli_sweep_c.csv"));
        // one row per grid point per solver
        CHECK(ca.find("rs,0.3") != std::string::npos);
        CHECK(ca.find("rsb1,0.3") != std::string::npos);
        CHECK(ca.find("rs,1,") != std::string::npos);
    }

    TEST_CASE("simulate echoes the seed and writes per-trial rows") {
        spit("/tmp/rcs_cli_sim.json",
             R"({"ensemble": "iid", "r": 2.0, "penalty": "l2",
                 "lambda": 0.01, "lambda0": 0.01,
                 "sim": {"n": 100, "trials": 3, "seed": 42}})");
        auto res =
            run_cli("simulate --config /tmp/rcs_cli_sim.json --out /tmp/rcs_cli_trials.csv");
        CHECK(res.code == 0);
        CHECK(res.out.find("\"seed\": 42") != std::string::npos);
        CHECK(res.out.find("\"trials\": 3") != std::string::npos);
        std::string csv = slurp("/tmp/rcs_cli_trials.csv");
        CHECK(csv.find("trial,distortion") != std::string::npos);
        CHECK(csv.find("2,") != std::string::npos);
        // byte-stable rerun
        auto res2 =
            run_cli("simulate --config /tmp/rcs_cli_sim.json --out /tmp/rcs_cli_trials2.csv");
        CHECK(res2.code == 0);
        CHECK(csv == slurp("/tmp/rcs_cli_trials2.csv"));
    }

    TEST_CASE("combinatorial simulation size cap maps to exit 2") {
        spit("/tmp/rcs_cli_l0sim.json",
             R"({"ensemble": "iid", "r": 2.0, "penalty": "l0", "lambda": 0.3,
                 "sim": {"n": 50, "trials": 1, "seed": 1}})");
        auto res = run_cli("simulate --config /tmp/rcs_cli_l0sim.json");
        CHECK(res.code == 2);
        CHECK(res.err.find("20") != std::string::npos);
    }
}
