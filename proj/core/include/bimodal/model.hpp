#pragma once

#include <complex>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace bimodal {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Static atomic state selecting the sign of the dispersive shift on mode 1.
enum class AtomBranch { none, ground, excited };

/// Phase convention. `rotating` removes the bare mode-1 frequency from
/// every oscillator (modes and bath) so that only dissipation, mixing and
/// the dispersive/Lamb offsets remain.
enum class Frame { rotating, lab };

std::string_view to_string(AtomBranch b);
std::string_view to_string(Frame f);
AtomBranch parse_atom_branch(std::string_view text);
Frame parse_frame(std::string_view text);

/// All physical parameters of the two-mode cavity + atom + reservoir.
/// Frequencies in rad/s, rates in 1/s.
struct PhysicalConfig {
    double omega1 = two_pi * 51.1e9;
    double omega2 = two_pi * 51.1e9;
    double g = 0.0;
    double delta1 = 0.0;  ///< detuning ω1 − ω0
    AtomBranch branch = AtomBranch::none;
    double gamma11 = 1.0 / 1.0e-3;
    double gamma22 = 1.0 / 0.9e-3;
    double kappa = 0.0;  ///< γ12 = κ·√(γ11·γ22)
    double dshift1 = 0.0;
    double dshift2 = 0.0;
    double dshift12 = 0.0;
    double nbar = 0.0;
    Frame frame = Frame::rotating;

    double gamma12() const;

    /// Signed frequency offset of mode 1 due to the atom: −χ (ground), +χ (excited), 0 (none).
    double dispersive_offset() const;

    /// Reference frequency removed by the frame convention.
    double frame_frequency() const { return frame == Frame::rotating ? omega1 : 0.0; }
};

/// Reference cavity: T1 = 1 ms, T2 = 0.9 ms, cross-decay κ.
PhysicalConfig fig1_config(double kappa = 0.0);

struct Violation {
    std::string field;
    std::string message;
};

std::vector<Violation> validate(const PhysicalConfig& cfg);

/// Throws ConfigError listing every violation.
void require_valid(const PhysicalConfig& cfg);

/// Dispersive coupling χ = g²/δ1. Throws DomainError for δ1 = 0.
double chi_shift(double g, double delta1);

/// Complex drift rates of the mode amplitudes.
///
///   A = i(ω1 − ω_ref ∓ χ + Δω1) + γ11/2
///   B = i(ω2 − ω_ref + Δω2) + γ22/2
///   C = −iΔω12 − γ12/2
///
/// The mean amplitudes obey d⟨a⟩/dt = −M⟨a⟩ with M = [[A, −C], [−C, B]].
struct DriftConstants {
    cplx A{};
    cplx B{};
    cplx C{};

    Eigen::Matrix2cd drift_matrix() const;
};

DriftConstants drift_constants(const PhysicalConfig& cfg);

}  // namespace bimodal
