#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "bimodal/model.hpp"
#include "bimodal/run_config.hpp"

namespace bimodal {

enum ExitCode : int {
    exit_ok = 0,
    exit_acceptance_failure = 1,
    exit_config_error = 2,
    exit_numerical_failure = 3,
};

/// Agreement targets between the analytic solution and the two oracles.
struct OracleThresholds {
    double u_relative = 0.02;
    double z_relative = 0.02;
    double z_floor = 1e-3;          ///< Z compared only while |Z| exceeds this
    double f_micro = 0.02;          ///< absolute
    double f_lindblad = 5e-3;       ///< absolute
    double memory_factor = 100.0;   ///< |u12| compared for t >= memory_factor / W
};

/// Cat fidelity from the master-equation oracle at each time in `times`.
struct LindbladCatRun {
    std::vector<double> fidelity;
    double max_top_population = 0.0;
    bool truncation_ok = true;
    int dim = 0;
};

LindbladCatRun lindblad_cat_fidelities(const PhysicalConfig& physics, cplx alpha0, std::span<const double> times,
                                       int dim_override = 0);

int cmd_fidelity_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_oracle_compare(const RunConfig& cfg, std::ostream& out, std::ostream& log,
                       const OracleThresholds& thresholds = {});
int cmd_dump_mixing(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_dump_qfunction(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// Dispatches by subcommand name ("fidelity-sweep", "oracle-compare",
/// "dump-mixing", "dump-q") and maps exceptions to exit codes.
int run_command(std::string_view name, const RunConfig& cfg, std::ostream& out, std::ostream& log);

}  // namespace bimodal
