#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "bimodal/model.hpp"
#include "bimodal/propagator.hpp"

namespace bimodal {

/// Discretized reservoir: N oscillators on a uniform grid of width W around
/// the frame reference, each coupled to both cavity modes with flat
/// magnitude. Frequencies are relative to PhysicalConfig::frame_frequency()
/// of a rotating-frame config.
struct BathModel {
    std::vector<double> omegas;
    std::vector<cplx> lambda1;
    std::vector<cplx> lambda2;
    double bandwidth = 0.0;
    double rho_dos = 0.0;  ///< N / W
    double kappa = 0.0;

    std::size_t size() const { return omegas.size(); }

    /// 2π·ρ: beyond this time the discrete bath feeds amplitude back.
    double recurrence_time() const { return two_pi * rho_dos; }

    /// Longest time for which the bath is trusted (half the recurrence time).
    double horizon() const { return 0.5 * recurrence_time(); }

    bool real_couplings() const;
};

/// Couplings satisfy 2π|λjk|²ρ = γjj for every k; 2π·Re(λ1k λ̄2k)ρ = γ12
/// holds per mode for κ ≠ 0 and on average over adjacent pairs for κ = 0.
/// Throws HorizonError (with the required N) if `horizon` exceeds the
/// trusted span, DomainError for N < 2 or W <= 0.
BathModel build_bath(const PhysicalConfig& cfg, std::size_t n_modes, double bandwidth, double horizon = 0.0);

/// (a1, a2, β1..βN) coherent amplitudes of the full system.
using MicroAmplitudeVector = Eigen::VectorXcd;

/// Exact evolution of the quadratic Hamiltonian of two modes + discrete
/// bath. Coherent amplitudes evolve as v(t) = exp(−iΩt) v(0); Ω is
/// diagonalized once at construction.
class MicroBath {
public:
    MicroBath(const PhysicalConfig& cfg, BathModel bath);

    const BathModel& bath() const { return bath_; }
    const PhysicalConfig& config() const { return cfg_; }
    std::size_t dimension() const { return static_cast<std::size_t>(energies_.size()); }

    /// (2+N)×(2+N) Hermitian coupling matrix (rotating frame).
    Eigen::MatrixXcd coupling_matrix() const;

    MicroAmplitudeVector propagate(const MicroAmplitudeVector& v0, double t) const;

    /// Mode-1 row of exp(−iΩt): (u11, u12, ϑ11..ϑ1N).
    Eigen::VectorXcd row1(double t) const;

    /// Exact u_ij; throws HorizonError beyond bath().horizon().
    MixingMatrix extract_mixing(double t) const;

    /// Σk |ϑ1k(t)|².
    double bath_leak_row1(double t) const;

    /// Exact coherence between the branches (±α0, α0, 0, …): product of
    /// coherent overlaps over mode 2 and every bath oscillator.
    cplx cat_coherence(cplx alpha0, double t) const;

    /// Fidelity of the exact reduced cat state against the static cat,
    /// evaluated in an orthonormalized basis of {|±α0⟩, |a±(t)⟩}.
    double micro_fidelity(cplx alpha0, double t) const;

private:
    void check_horizon(double t) const;
    Eigen::VectorXcd phases(double t) const;
    cplx frame_phase(double t) const;

    PhysicalConfig cfg_;
    BathModel bath_;
    Eigen::VectorXd diagonal_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXcd modes_;  // columns: eigenvectors of Ω
};

}  // namespace bimodal
