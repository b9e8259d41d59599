#include "bimodal/model.hpp"

#include <cmath>
#include <sstream>

#include "bimodal/errors.hpp"

namespace bimodal {

std::string_view to_string(AtomBranch b) {
    switch (b) {
        case AtomBranch::none: return "none";
        case AtomBranch::ground: return "ground";
        case AtomBranch::excited: return "excited";
    }
    return "none";
}

std::string_view to_string(Frame f) { return f == Frame::rotating ? "rotating" : "lab"; }

AtomBranch parse_atom_branch(std::string_view text) {
    if (text == "none") return AtomBranch::none;
    if (text == "ground" || text == "g") return AtomBranch::ground;
    if (text == "excited" || text == "e") return AtomBranch::excited;
    throw ConfigError("branch: expected none|ground|excited, got '" + std::string(text) + "'");
}

Frame parse_frame(std::string_view text) {
    if (text == "rotating") return Frame::rotating;
    if (text == "lab") return Frame::lab;
    throw ConfigError("frame: expected rotating|lab, got '" + std::string(text) + "'");
}

double PhysicalConfig::gamma12() const {
    return kappa * std::sqrt(std::max(gamma11, 0.0) * std::max(gamma22, 0.0));
}

double PhysicalConfig::dispersive_offset() const {
    switch (branch) {
        case AtomBranch::none: return 0.0;
        case AtomBranch::ground: return -chi_shift(g, delta1);
        case AtomBranch::excited: return chi_shift(g, delta1);
    }
    return 0.0;
}

PhysicalConfig fig1_config(double kappa) {
    PhysicalConfig cfg;
    cfg.gamma11 = 1.0 / 1.0e-3;
    cfg.gamma22 = 1.0 / 0.9e-3;
    cfg.kappa = kappa;
    return cfg;
}

std::vector<Violation> validate(const PhysicalConfig& cfg) {
    std::vector<Violation> out;
    auto finite = [&](const char* name, double v) {
        if (!std::isfinite(v)) out.push_back({name, "must be finite"});
    };
    finite("omega1", cfg.omega1);
    finite("omega2", cfg.omega2);
    finite("g", cfg.g);
    finite("delta1", cfg.delta1);
    finite("gamma11", cfg.gamma11);
    finite("gamma22", cfg.gamma22);
    finite("kappa", cfg.kappa);
    finite("dshift1", cfg.dshift1);
    finite("dshift2", cfg.dshift2);
    finite("dshift12", cfg.dshift12);
    finite("nbar", cfg.nbar);

    if (!(cfg.gamma11 >= 0.0)) out.push_back({"gamma11", "negative decay rate (need gamma11 >= 0)"});
    if (!(cfg.gamma22 >= 0.0)) out.push_back({"gamma22", "negative decay rate (need gamma22 >= 0)"});
    if (!(std::abs(cfg.kappa) <= 1.0))
        out.push_back({"kappa", "cross-decay bound violated (need |kappa| <= 1)"});
    if (cfg.branch != AtomBranch::none && cfg.delta1 == 0.0)
        out.push_back({"delta1", "zero detuning with an atomic branch selected (need delta1 != 0)"});
    if (!(cfg.nbar >= 0.0)) out.push_back({"nbar", "negative thermal occupation (need nbar >= 0)"});
    return out;
}

void require_valid(const PhysicalConfig& cfg) {
    const auto violations = validate(cfg);
    if (violations.empty()) return;
    std::ostringstream msg;
    msg << "invalid physical configuration:";
    for (const auto& v : violations) msg << "\n  " << v.field << ": " << v.message;
    throw ConfigError(msg.str());
}

double chi_shift(double g, double delta1) {
    if (delta1 == 0.0) throw DomainError("chi_shift: zero detuning");
    return g * g / delta1;
}

Eigen::Matrix2cd DriftConstants::drift_matrix() const {
    Eigen::Matrix2cd m;
    m << A, -C, -C, B;
    return m;
}

DriftConstants drift_constants(const PhysicalConfig& cfg) {
    require_valid(cfg);
    const double ref = cfg.frame_frequency();
    const cplx i{0.0, 1.0};
    DriftConstants dc;
    dc.A = i * (cfg.omega1 - ref + cfg.dispersive_offset() + cfg.dshift1) + cfg.gamma11 / 2.0;
    dc.B = i * (cfg.omega2 - ref + cfg.dshift2) + cfg.gamma22 / 2.0;
    dc.C = -i * cfg.dshift12 - cfg.gamma12() / 2.0;
    return dc;
}

}  // namespace bimodal
