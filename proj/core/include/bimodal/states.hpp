#pragma once

#include <vector>

#include <Eigen/Core>

#include "bimodal/model.hpp"
#include "bimodal/propagator.hpp"

namespace bimodal {

/// One term c·|a⟩₁|b⟩₂ of a superposition of two-mode coherent products.
struct CoherentBranch {
    cplx weight{1.0, 0.0};
    cplx mode1{};
    cplx mode2{};
};

/// Finite superposition of coherent products; the reservoir is in vacuum.
/// Weights need not be normalized.
struct BranchedState {
    std::vector<CoherentBranch> branches;

    /// ⟨ψ|ψ⟩ evaluated with the coherent-state Gram matrix.
    double norm_squared() const;
};

/// |α0⟩₁|α0⟩₂ + |−α0⟩₁|α0⟩₂: cat in mode 1, coherent state in mode 2.
BranchedState make_cat_state(cplx alpha0);

/// ⟨b|a⟩ for coherent states.
cplx coherent_overlap(cplx bra, cplx ket);

/// Reduced mode-1 state ρ1 = Σij w_i w̄_j z_ij |a_i⟩⟨a_j| / Tr, where a_i are
/// the evolved mode-1 amplitudes and z_ij the overlaps of the branch
/// environments (mode 2 and reservoir).
struct BranchedDensity {
    double t = 0.0;
    std::vector<cplx> weights;     ///< normalized so the full state has unit norm
    std::vector<cplx> mode1_amps;  ///< a_i(t)
    Eigen::MatrixXcd coh;          ///< z_ij, Hermitian, unit diagonal

    std::size_t size() const { return mode1_amps.size(); }

    /// Coefficient of |a_i⟩⟨a_j|.
    cplx coefficient(std::size_t i, std::size_t j) const;

    /// Gram matrix of the branch vectors, [w_i w̄_j z_ij ⟨a_j|a_i⟩].
    Eigen::MatrixXcd weighted_gram() const;

    double trace() const;

    /// Smallest eigenvalue of weighted_gram(); ≥ 0 up to round-off for a valid state.
    double min_gram_eigenvalue() const;

    /// ⟨φ|ρ1|φ⟩ for a normalized pure superposition |φ⟩ = Σ c_k |β_k⟩.
    double expectation(const std::vector<cplx>& ket_weights, const std::vector<cplx>& ket_amps) const;

    /// Dense Fock-basis matrix truncated to `dim` levels.
    Eigen::MatrixXcd to_fock(int dim) const;
};

/// Evolve a branched state at zero temperature. a_i(t) = u11 a_i + u12 b_i;
/// the environment overlap uses the mode-2 row of U and the reservoir Gram
/// matrix 1 − U†U.
BranchedDensity evolve_branched(const MixingMatrix& mix, const BranchedState& state);

/// α(t) = α0 (u11 + u12).
cplx evolved_amplitude(const MixingMatrix& mix, cplx alpha0);

/// Cat coherence Z(t) = exp{−2|α0|² [(1 − |u11|²) + i Im(ū12 u11)]}.
cplx decoherence_factor(const MixingMatrix& mix, cplx alpha0);

/// Fidelity of the evolved cat against the static prepared cat
/// (|α0⟩ + |−α0⟩ in mode 1, |α0⟩ in mode 2 initially). Uses both evolved
/// branch amplitudes [±u11 + u12]α0, the coherence Z and the normalizations
/// N_p, N_e. Identical to fidelity_scs_symmetric when u12 = 0.
double fidelity_scs(const MixingMatrix& mix, cplx alpha0);

/// The fully reduced closed form
///   F = N_p² N_e² e^{−(|α(t)|² + |α0|²)} {cosh[ᾱ0α + α0ᾱ] + cosh[ᾱ0α − α0ᾱ]} [2 + Z + Z̄]
/// which assumes the evolved branches are ±α(t).
double fidelity_scs_symmetric(const MixingMatrix& mix, cplx alpha0);

/// Everything reported for one (t, α0) point.
struct CatObservables {
    cplx alpha_t{};
    cplx Z{};
    double Np = 0.0;
    double Ne = 0.0;
    double F = 0.0;
    double D = 0.0;
};

CatObservables cat_observables(const MixingMatrix& mix, cplx alpha0, double nbar = 0.0);

/// Normally ordered characteristic function Tr[ρ1 e^{η a†} e^{−η̄ a}]
/// multiplied by the thermal factor e^{−|η|² D}.
cplx char_function(const BranchedDensity& bd, cplx eta, double D = 0.0);

struct GridSpec {
    cplx center{};
    double extent = 4.0;  ///< half-width along each axis
    int points = 81;      ///< per axis

    double spacing() const;
    cplx point(int i_re, int i_im) const;
};

/// Values stored row-major: index = i_im * points + i_re.
struct PhaseSpaceField {
    GridSpec grid;
    std::vector<double> values;

    double at(int i_re, int i_im) const { return values[static_cast<std::size_t>(i_im) * grid.points + i_re]; }
    double integral() const;
};

/// Husimi function Q(ξ) = ⟨ξ|ρ1|ξ⟩/π at a single point; thermal noise D
/// enters as a Gaussian convolution of width 1 + D.
double husimi_q(const BranchedDensity& bd, cplx xi, double D = 0.0);
PhaseSpaceField husimi_q(const BranchedDensity& bd, const GridSpec& grid, double D = 0.0);

}  // namespace bimodal
