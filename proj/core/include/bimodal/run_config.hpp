#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bimodal/model.hpp"
#include "bimodal/states.hpp"

namespace bimodal {

enum class Oracle { analytic, micro, lindblad };

std::string_view to_string(Oracle o);
std::vector<Oracle> parse_oracles(std::string_view list);

/// Physical dimension expected by a configuration key; decides how a bare
/// number and a unit suffix are interpreted.
enum class Dimension {
    time,       ///< bare = s; s, ms, us, ns
    frequency,  ///< bare = rad/s; rad/s, krad/s, Mrad/s, Hz, kHz, MHz, GHz (×2π)
    rate,       ///< bare = 1/s; /s, 1/s, /ms, /us
    dimensionless,
};

double parse_quantity(std::string_view text, Dimension dim);

/// "1.5", "-0.5i", "1+2i", "1-2.5e-1i".
cplx parse_complex(std::string_view text);

/// Everything a CLI run needs. Defaults:
/// T1 = 1 ms, T2 = 0.9 ms, α ∈ {0.5, 1, 1.5, 2}, t ∈ [0, 3 ms].
struct RunConfig {
    PhysicalConfig physics = fig1_config();
    std::vector<cplx> alphas{0.5, 1.0, 1.5, 2.0};
    double t_max = 3e-3;
    int t_steps = 301;
    std::vector<Oracle> oracles{Oracle::analytic};
    std::size_t bath_modes = 800;
    double bath_bandwidth = two_pi * 1e5;
    int fock_dim = 0;  ///< 0: per-α default rule
    std::string output;
    std::uint64_t seed = 0;
    bool strict = false;

    double q_time = 0.0;
    GridSpec q_grid{};

    bool uses(Oracle o) const;
    std::vector<double> time_grid() const;
};

/// Applies one `key=value` setting. Throws ConfigError naming the key.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Flat key=value file; '#' starts a comment.
void load_config_file(RunConfig& cfg, const std::string& path);

/// Throws ConfigError naming the offending field.
void validate_run_config(const RunConfig& cfg);

/// Resolved configuration as `key=value` lines (SI units) for output headers.
std::vector<std::string> describe(const RunConfig& cfg);

/// 12 significant digits, locale independent.
std::string format_number(double value);

/// "1.5" for real values, "1.5+0.5i" otherwise.
std::string format_complex(cplx value);

}  // namespace bimodal
