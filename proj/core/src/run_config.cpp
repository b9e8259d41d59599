#include "bimodal/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bimodal/errors.hpp"

namespace bimodal {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

// Parses the leading number; returns the remainder (unit suffix).
double leading_number(std::string_view text, std::string_view& rest) {
    double value = 0.0;
    const char* begin = text.data();
    if (!text.empty() && text.front() == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), value);
    if (ec != std::errc() || !std::isfinite(value)) throw ConfigError("not a number: '" + std::string(text) + "'");
    rest = trim(std::string_view(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr)));
    return value;
}

double full_number(std::string_view text) {
    std::string_view rest;
    const double v = leading_number(trim(text), rest);
    if (!rest.empty()) throw ConfigError("unexpected suffix '" + std::string(rest) + "'");
    return v;
}

long integer(std::string_view text) {
    text = trim(text);
    long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("not an integer: '" + std::string(text) + "'");
    return value;
}

}  // namespace

std::string format_complex(cplx z) {
    if (z.imag() == 0.0) return format_number(z.real());
    std::string s = format_number(z.real());
    if (z.imag() >= 0.0) s += '+';
    return s + format_number(z.imag()) + "i";
}

std::string_view to_string(Oracle o) {
    switch (o) {
        case Oracle::analytic: return "analytic";
        case Oracle::micro: return "micro";
        case Oracle::lindblad: return "lindblad";
    }
    return "analytic";
}

std::vector<Oracle> parse_oracles(std::string_view list) {
    std::vector<Oracle> out;
    for (auto item : split(list, ',')) {
        Oracle o;
        if (item == "analytic")
            o = Oracle::analytic;
        else if (item == "micro")
            o = Oracle::micro;
        else if (item == "lindblad")
            o = Oracle::lindblad;
        else
            throw ConfigError("oracles: unknown oracle '" + std::string(item) + "'");
        if (std::find(out.begin(), out.end(), o) == out.end()) out.push_back(o);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double parse_quantity(std::string_view text, Dimension dim) {
    std::string_view unit;
    const double value = leading_number(trim(text), unit);
    if (unit.empty()) return value;
    switch (dim) {
        case Dimension::time:
            if (unit == "s") return value;
            if (unit == "ms") return value * 1e-3;
            if (unit == "us") return value * 1e-6;
            if (unit == "ns") return value * 1e-9;
            break;
        case Dimension::frequency:
            if (unit == "rad/s") return value;
            if (unit == "krad/s") return value * 1e3;
            if (unit == "Mrad/s") return value * 1e6;
            if (unit == "Hz") return value * two_pi;
            if (unit == "kHz") return value * two_pi * 1e3;
            if (unit == "MHz") return value * two_pi * 1e6;
            if (unit == "GHz") return value * two_pi * 1e9;
            break;
        case Dimension::rate:
            if (unit == "/s" || unit == "1/s") return value;
            if (unit == "/ms" || unit == "1/ms") return value * 1e3;
            if (unit == "/us" || unit == "1/us") return value * 1e6;
            break;
        case Dimension::dimensionless: break;
    }
    throw ConfigError("unsupported unit '" + std::string(unit) + "'");
}

cplx parse_complex(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw ConfigError("empty complex number");
    if (text.back() != 'i') return full_number(text);
    const std::string_view body = text.substr(0, text.size() - 1);
    // Split at the last sign that is not a leading sign or an exponent sign.
    std::size_t split_at = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split_at = k;
            break;
        }
    }
    auto imag_part = [](std::string_view s) {
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        return full_number(s);
    };
    if (split_at == std::string_view::npos) return {0.0, imag_part(body)};
    return {full_number(body.substr(0, split_at)), imag_part(body.substr(split_at))};
}

bool RunConfig::uses(Oracle o) const { return std::find(oracles.begin(), oracles.end(), o) != oracles.end(); }

std::vector<double> RunConfig::time_grid() const {
    std::vector<double> grid(static_cast<std::size_t>(std::max(t_steps, 0)));
    for (int i = 0; i < t_steps; ++i) grid[i] = t_max * i / (t_steps - 1);
    return grid;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    auto& p = cfg.physics;
    try {
        if (key == "omega1") p.omega1 = parse_quantity(value, Dimension::frequency);
        else if (key == "omega2") p.omega2 = parse_quantity(value, Dimension::frequency);
        else if (key == "g") p.g = parse_quantity(value, Dimension::frequency);
        else if (key == "delta1") p.delta1 = parse_quantity(value, Dimension::frequency);
        else if (key == "branch") p.branch = parse_atom_branch(value);
        else if (key == "T1") p.gamma11 = 1.0 / parse_quantity(value, Dimension::time);
        else if (key == "T2") p.gamma22 = 1.0 / parse_quantity(value, Dimension::time);
        else if (key == "gamma11") p.gamma11 = parse_quantity(value, Dimension::rate);
        else if (key == "gamma22") p.gamma22 = parse_quantity(value, Dimension::rate);
        else if (key == "kappa") p.kappa = full_number(value);
        else if (key == "dshift1") p.dshift1 = parse_quantity(value, Dimension::frequency);
        else if (key == "dshift2") p.dshift2 = parse_quantity(value, Dimension::frequency);
        else if (key == "dshift12") p.dshift12 = parse_quantity(value, Dimension::frequency);
        else if (key == "nbar") p.nbar = full_number(value);
        else if (key == "frame") p.frame = parse_frame(value);
        else if (key == "alpha" || key == "alphas") {
            cfg.alphas.clear();
            if (!value.empty())
                for (auto item : split(value, ',')) cfg.alphas.push_back(parse_complex(item));
        } else if (key == "t_max") cfg.t_max = parse_quantity(value, Dimension::time);
        else if (key == "t_steps") cfg.t_steps = static_cast<int>(integer(value));
        else if (key == "oracles") cfg.oracles = parse_oracles(value);
        else if (key == "bath_N" || key == "N") {
            const long n = integer(value);
            if (n < 0) throw ConfigError("must be non-negative");
            cfg.bath_modes = static_cast<std::size_t>(n);
        } else if (key == "bath_W" || key == "W") cfg.bath_bandwidth = parse_quantity(value, Dimension::frequency);
        else if (key == "fock_dim") cfg.fock_dim = static_cast<int>(integer(value));
        else if (key == "out") cfg.output = std::string(value);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(integer(value));
        else if (key == "q_time") cfg.q_time = parse_quantity(value, Dimension::time);
        else if (key == "q_extent") cfg.q_grid.extent = full_number(value);
        else if (key == "q_points") cfg.q_grid.points = static_cast<int>(integer(value));
        else if (key == "q_center") cfg.q_grid.center = parse_complex(value);
        else throw ConfigError("unknown key");
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(key) + ": " + e.what());
    }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        apply_setting(cfg, view.substr(0, eq), view.substr(eq + 1));
    }
}

void validate_run_config(const RunConfig& cfg) {
    require_valid(cfg.physics);
    if (cfg.alphas.empty()) throw ConfigError("alphas: at least one amplitude is required");
    if (cfg.t_steps < 2) throw ConfigError("t_steps: need at least 2 time points");
    if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max)) throw ConfigError("t_max: must be > 0");
    if (cfg.oracles.empty()) throw ConfigError("oracles: at least one oracle is required");
    if (cfg.fock_dim != 0 && cfg.fock_dim < 2) throw ConfigError("fock_dim: must be 0 (automatic) or >= 2");
    if (cfg.uses(Oracle::micro)) {
        if (cfg.bath_modes < 2) throw ConfigError("bath_N: need at least 2 bath modes");
        if (!(cfg.bath_bandwidth > 0.0)) throw ConfigError("bath_W: must be > 0");
    }
    if (cfg.q_grid.points < 2) throw ConfigError("q_points: need at least 2 points per axis");
    if (!(cfg.q_grid.extent > 0.0)) throw ConfigError("q_extent: must be > 0");
    if (!(cfg.q_time >= 0.0)) throw ConfigError("q_time: must be >= 0");
}

std::vector<std::string> describe(const RunConfig& cfg) {
    const auto& p = cfg.physics;
    std::vector<std::string> lines;
    auto add = [&](std::string key, std::string value) { lines.push_back(key + "=" + value); };
    add("omega1", format_number(p.omega1) + " rad/s");
    add("omega2", format_number(p.omega2) + " rad/s");
    add("g", format_number(p.g) + " rad/s");
    add("delta1", format_number(p.delta1) + " rad/s");
    add("branch", std::string(to_string(p.branch)));
    add("gamma11", format_number(p.gamma11) + " /s");
    add("gamma22", format_number(p.gamma22) + " /s");
    add("kappa", format_number(p.kappa));
    add("gamma12", format_number(p.gamma12()) + " /s");
    add("dshift1", format_number(p.dshift1) + " rad/s");
    add("dshift2", format_number(p.dshift2) + " rad/s");
    add("dshift12", format_number(p.dshift12) + " rad/s");
    add("nbar", format_number(p.nbar));
    add("frame", std::string(to_string(p.frame)));
    std::string alphas;
    for (std::size_t i = 0; i < cfg.alphas.size(); ++i) alphas += (i ? "," : "") + format_complex(cfg.alphas[i]);
    add("alphas", alphas);
    add("t_max", format_number(cfg.t_max) + " s");
    add("t_steps", std::to_string(cfg.t_steps));
    std::string oracles;
    for (std::size_t i = 0; i < cfg.oracles.size(); ++i)
        oracles += (i ? "," : "") + std::string(to_string(cfg.oracles[i]));
    add("oracles", oracles);
    add("bath_N", std::to_string(cfg.bath_modes));
    add("bath_W", format_number(cfg.bath_bandwidth) + " rad/s");
    add("fock_dim", cfg.fock_dim == 0 ? std::string("auto") : std::to_string(cfg.fock_dim));
    add("seed", std::to_string(cfg.seed));
    return lines;
}

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value + 0.0);
    return buf;
}

}  // namespace bimodal
