#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bimodal/commands.hpp"
#include "bimodal/errors.hpp"
#include "bimodal/run_config.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::string out;
    std::optional<std::string> oracles;
    std::optional<std::string> kappa;
    std::optional<std::string> nbar;
    std::optional<std::string> frame;
    std::optional<std::string> alpha;
    std::optional<std::string> t_max;
    std::optional<std::string> t_steps;
    std::optional<std::string> bath_n;
    std::optional<std::string> bath_w;
    std::optional<std::string> fock_dim;
    std::optional<std::string> q_time;
    std::vector<std::string> settings;
    bool strict = false;
};

void add_common_options(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config_path, "key=value configuration file");
    sub->add_option("--out", o.out, "write CSV here instead of stdout");
    sub->add_option("--oracles", o.oracles, "comma list of analytic,micro,lindblad");
    sub->add_option("--kappa", o.kappa, "cross-decay correlation in [0,1]");
    sub->add_option("--nbar", o.nbar, "reservoir mean occupation");
    sub->add_option("--frame", o.frame, "rotating or lab");
    sub->add_option("--alpha", o.alpha, "comma list of initial amplitudes (complex as re+imi)");
    sub->add_option("--t-max", o.t_max, "end time, e.g. 3ms");
    sub->add_option("--t-steps", o.t_steps, "number of grid points including t=0");
    sub->add_option("--bath-n", o.bath_n, "micro-bath mode count");
    sub->add_option("--bath-w", o.bath_w, "micro-bath bandwidth, e.g. 100kHz");
    sub->add_option("--fock-dim", o.fock_dim, "Fock cutoff per mode for the Lindblad oracle (0 = automatic)");
    sub->add_option("--set", o.settings, "extra key=value setting (repeatable)");
    sub->add_flag("--strict", o.strict, "treat invariant warnings as numerical failures");
}

bimodal::RunConfig resolve(const Overrides& o) {
    bimodal::RunConfig cfg;
    if (!o.config_path.empty()) bimodal::load_config_file(cfg, o.config_path);
    const std::pair<const char*, const std::optional<std::string>*> flags[] = {
        {"oracles", &o.oracles}, {"kappa", &o.kappa},   {"nbar", &o.nbar},       {"frame", &o.frame},
        {"alphas", &o.alpha},    {"t_max", &o.t_max},   {"t_steps", &o.t_steps}, {"bath_N", &o.bath_n},
        {"bath_W", &o.bath_w},   {"fock_dim", &o.fock_dim}, {"q_time", &o.q_time},
    };
    for (const auto& [key, value] : flags)
        if (value->has_value()) bimodal::apply_setting(cfg, key, **value);
    for (const auto& s : o.settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw bimodal::ConfigError("--set expects key=value, got '" + s + "'");
        bimodal::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (!o.out.empty()) cfg.output = o.out;
    cfg.strict = cfg.strict || o.strict;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cat-state decoherence in a dissipative two-mode cavity"};
    app.require_subcommand(1);

    Overrides o;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"fidelity-sweep", "cat fidelity F(t) for each amplitude and oracle"},
        {"oracle-compare", "analytic solution against the microscopic bath (and optionally Lindblad)"},
        {"dump-mixing", "mixing coefficients u_ij(t), leak L1 and thermal noise D"},
        {"dump-q", "Husimi Q function of the cat on a grid"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common_options(sub, o);
        if (name == "dump-q") {
            sub->add_option("--time", o.q_time, "evaluation time, e.g. 0.5ms");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : bimodal::exit_config_error;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    bimodal::RunConfig cfg;
    try {
        cfg = resolve(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return bimodal::exit_config_error;
    }

    if (cfg.output.empty()) return bimodal::run_command(name, cfg, std::cout, std::cerr);
    std::ofstream file(cfg.output);
    if (!file) {
        std::cerr << "error: cannot open '" << cfg.output << "' for writing\n";
        return bimodal::exit_config_error;
    }
    const int code = bimodal::run_command(name, cfg, file, std::cerr);
    file.flush();
    if (!file) {
        std::cerr << "error: write to '" << cfg.output << "' failed\n";
        return bimodal::exit_numerical_failure;
    }
    return code;
}
