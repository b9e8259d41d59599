#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "bimodal/model.hpp"
#include "bimodal/states.hpp"

namespace bimodal {

/// Two-mode Fock box |n1, n2⟩ with n1 < d1, n2 < d2, flattened as n1·d2 + n2.
class FockSpace {
public:
    FockSpace(int d1, int d2);

    int d1() const { return d1_; }
    int d2() const { return d2_; }
    Eigen::Index dimension() const { return static_cast<Eigen::Index>(d1_) * d2_; }
    std::array<int, 2> state(Eigen::Index i) const {
        return {static_cast<int>(i / d2_), static_cast<int>(i % d2_)};
    }

    /// Position of |n1, n2⟩, or −1 outside the box.
    Eigen::Index index(int n1, int n2) const {
        if (n1 < 0 || n2 < 0 || n1 >= d1_ || n2 >= d2_) return -1;
        return static_cast<Eigen::Index>(n1) * d2_ + n2;
    }

private:
    int d1_;
    int d2_;
};

struct FockDensity {
    FockSpace space;
    Eigen::MatrixXcd rho;
    double t = 0.0;
};

/// ceil(|α|² + 6|α| + 8), clamped to [16, 40].
int default_fock_dim(double amplitude);

/// Truncated (unnormalized) coherent state ⟨n|α⟩, n < dim.
Eigen::VectorXcd coherent_fock(cplx alpha, int dim);

/// Normalized Fock vector of a branched coherent superposition.
Eigen::VectorXcd branched_state_fock(const BranchedState& state, const FockSpace& space);

FockDensity pure_density(const Eigen::VectorXcd& psi, const FockSpace& space);

/// Markovian master equation for two modes sharing one reservoir:
///
///   dρ/dt = −i[H, ρ]
///           + Σjj' γjj'(n̄+1) (a_j' ρ a_j† − ½{a_j† a_j', ρ})
///           + Σjj' γjj' n̄    (a_j† ρ a_j' − ½{a_j' a_j†, ρ})
///
/// with H = δ1 n1 + δ2 n2 + Δω12 (a1† a2 + a2† a1) in the rotating frame.
/// The decay matrix is diagonalized into independent jump operators.
class LindbladGenerator {
public:
    using Sparse = Eigen::SparseMatrix<cplx>;

    LindbladGenerator(const PhysicalConfig& cfg, FockSpace space);

    const FockSpace& space() const { return space_; }
    Eigen::Index dimension() const { return space_.dimension(); }

    /// Reference frequency re-applied to outputs in the lab frame.
    double frame_frequency() const { return frame_frequency_; }

    /// Upper bound on the generator's spectral radius (induced ∞-norm).
    double rate_scale() const { return rate_scale_; }

    /// Largest decay rate including thermal enhancement; sets the γt scale.
    double decay_scale() const { return decay_scale_; }

    const Sparse& annihilation(int mode) const { return mode == 0 ? a1_ : a2_; }

    void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;

private:
    FockSpace space_;
    double frame_frequency_ = 0.0;
    double rate_scale_ = 0.0;
    double decay_scale_ = 0.0;
    Sparse a1_;
    Sparse a2_;
    using RowSparse = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
    RowSparse effective_;  // H − (i/2) Σ J†J
    std::vector<RowSparse> jumps_;
};

LindbladGenerator build_generator(const PhysicalConfig& cfg, int d1, int d2);

struct EvolveOptions {
    double richardson_tol = 1e-10;  ///< max-abs step-doubling error per grid interval
    double trace_tol = 1e-9;       ///< trace drift per unit γt
    double top_population_tol = 1e-6;
    int max_refinements = 14;
};

struct Trajectory {
    std::vector<FockDensity> states;
    double max_top_population = 0.0;
    bool truncation_ok = true;
    double max_step_error = 0.0;
    long total_steps = 0;
};

/// Classic RK4 with step doubling per grid interval; the step count is
/// doubled until the Richardson estimate and the trace drift are within
/// tolerance. Throws NumericalError if refinement is exhausted.
Trajectory evolve(const FockDensity& rho0, const LindbladGenerator& gen, std::span<const double> t_grid,
                  const EvolveOptions& options = {});

/// Partial trace over mode 2.
Eigen::MatrixXcd reduce_mode1(const FockDensity& rho);

/// ⟨Ψ|ρ1|Ψ⟩ with |Ψ⟩ the normalized static cat ∝ |α0⟩ + |−α0⟩, clamped to
/// [0, 1]. Throws DomainError if the cat's tail beyond ρ1's dimension
/// exceeds 1e-10, NumericalError for an excursion beyond 1e-9.
double oracle_fidelity(const Eigen::MatrixXcd& rho1, cplx alpha0);

/// (⟨a1⟩, ⟨a2⟩).
std::array<cplx, 2> mean_amplitudes(const FockDensity& rho);

/// Population in the highest Fock level of either mode.
double top_level_population(const FockDensity& rho);

struct Physicality {
    double trace_error = 0.0;
    double hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
};

Physicality check_physicality(const Eigen::MatrixXcd& rho);

/// Uhlmann fidelity (Tr √(√ρ σ √ρ))² between two density matrices.
double state_fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);

}  // namespace bimodal
