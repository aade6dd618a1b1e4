#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcs/rs_solver.hpp"
#include "rcs/simulate.hpp"

namespace rcs {

enum class SolverChoice { Rs, Rsb1, Sim };
std::string solver_name(SolverChoice c);

struct SweepSpec {
    enum class Variable { Lambda, Rate };
    Variable variable = Variable::Lambda;
    std::vector<double> grid;
    struct LambdaMinimize {
        std::vector<double> grid;
        int refine_iters = 40;
    };
    std::optional<LambdaMinimize> lambda_minimize;
    void validate() const;
};

// Parsed and validated run description. The system block doubles as the
// single-point prediction target; sweep/sim blocks are optional and only
// required by the corresponding subcommands.
struct RunConfig {
    SystemConfig system;
    std::vector<SolverChoice> solvers;
    std::optional<SweepSpec> sweep;
    struct SimBlock {
        int n = 0;
        int trials = 1;
        std::uint64_t seed = 0;
    };
    std::optional<SimBlock> sim;

    SimConfig make_sim_config() const;  // ConfigError without a sim block
};

// Strict parse: unknown keys at any level are ConfigErrors naming the key.
// base_dir anchors relative spectrum file paths.
RunConfig parse_config(const std::string& json_text, const std::string& base_dir);
RunConfig load_config(const std::string& path);

}  // namespace rcs
