#include "bimodal/micro_bath.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bimodal/errors.hpp"

namespace bimodal {

bool BathModel::real_couplings() const {
    for (std::size_t k = 0; k < size(); ++k)
        if (lambda1[k].imag() != 0.0 || lambda2[k].imag() != 0.0) return false;
    return true;
}

BathModel build_bath(const PhysicalConfig& cfg, std::size_t n_modes, double bandwidth, double horizon) {
    require_valid(cfg);
    if (cfg.dshift12 != 0.0)
        throw ConfigError("dshift12: a flat symmetric bath cannot represent a cross Lamb shift");
    if (n_modes < 2) throw DomainError("build_bath: need at least 2 bath modes");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw DomainError("build_bath: bandwidth must be > 0");

    BathModel bath;
    bath.bandwidth = bandwidth;
    bath.rho_dos = static_cast<double>(n_modes) / bandwidth;
    bath.kappa = cfg.kappa;
    if (horizon > bath.horizon()) {
        const auto required = static_cast<std::size_t>(std::ceil(horizon * bandwidth / std::numbers::pi));
        std::ostringstream msg;
        msg << "bath horizon " << bath.horizon() << " s is shorter than the requested " << horizon
            << " s; need N >= " << required << " for W = " << bandwidth << " rad/s";
        throw HorizonError(msg.str(), required);
    }

    const double spacing = bandwidth / static_cast<double>(n_modes);
    const double c1 = std::sqrt(cfg.gamma11 / (two_pi * bath.rho_dos));
    const double c2 = std::sqrt(cfg.gamma22 / (two_pi * bath.rho_dos));
    const double ortho = std::sqrt(std::max(0.0, 1.0 - cfg.kappa * cfg.kappa));

    bath.omegas.resize(n_modes);
    bath.lambda1.resize(n_modes);
    bath.lambda2.resize(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        bath.omegas[k] = -0.5 * bandwidth + (static_cast<double>(k) + 0.5) * spacing;
        bath.lambda1[k] = c1;
        // Unit-modulus mixture of the parallel and alternating (orthogonal)
        // directions; real when kappa is 0 or ±1.
        if (cfg.kappa == 0.0)
            bath.lambda2[k] = c2 * sign;
        else
            bath.lambda2[k] = c2 * cplx(cfg.kappa, ortho * sign);
    }
    return bath;
}

MicroBath::MicroBath(const PhysicalConfig& cfg, BathModel bath) : cfg_(cfg), bath_(std::move(bath)) {
    require_valid(cfg_);
    if (cfg_.dshift12 != 0.0)
        throw ConfigError("dshift12: a flat symmetric bath cannot represent a cross Lamb shift");
    const auto n = static_cast<Eigen::Index>(bath_.size());
    diagonal_.resize(n + 2);
    diagonal_(0) = cfg_.dispersive_offset() + cfg_.dshift1;
    diagonal_(1) = cfg_.omega2 - cfg_.omega1 + cfg_.dshift2;
    for (Eigen::Index k = 0; k < n; ++k) diagonal_(k + 2) = bath_.omegas[k];

    if (bath_.real_couplings()) {
        const Eigen::MatrixXd omega = coupling_matrix().real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(omega);
        if (es.info() != Eigen::Success) throw NumericalError("MicroBath: eigendecomposition failed");
        energies_ = es.eigenvalues();
        modes_ = es.eigenvectors().cast<cplx>();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(coupling_matrix());
        if (es.info() != Eigen::Success) throw NumericalError("MicroBath: eigendecomposition failed");
        energies_ = es.eigenvalues();
        modes_ = es.eigenvectors();
    }
}

Eigen::MatrixXcd MicroBath::coupling_matrix() const {
    const Eigen::Index dim = diagonal_.size();
    Eigen::MatrixXcd omega = Eigen::MatrixXcd::Zero(dim, dim);
    omega.diagonal() = diagonal_.cast<cplx>();
    for (Eigen::Index k = 0; k + 2 < dim; ++k) {
        omega(0, k + 2) = bath_.lambda1[k];
        omega(k + 2, 0) = std::conj(bath_.lambda1[k]);
        omega(1, k + 2) = bath_.lambda2[k];
        omega(k + 2, 1) = std::conj(bath_.lambda2[k]);
    }
    return omega;
}

Eigen::VectorXcd MicroBath::phases(double t) const {
    Eigen::VectorXcd ph(energies_.size());
    for (Eigen::Index i = 0; i < energies_.size(); ++i) ph(i) = std::polar(1.0, -energies_(i) * t);
    return ph;
}

// Lab frame: every amplitude carries the common e^{−iω1 t}.
cplx MicroBath::frame_phase(double t) const {
    return cfg_.frame == Frame::lab ? std::polar(1.0, -cfg_.omega1 * t) : cplx(1.0);
}

void MicroBath::check_horizon(double t) const {
    if (t < 0.0) throw DomainError("MicroBath: negative time");
    if (t > bath_.horizon()) {
        std::ostringstream msg;
        msg << "t = " << t << " s lies beyond the bath horizon " << bath_.horizon() << " s";
        const auto required = static_cast<std::size_t>(std::ceil(t * bath_.bandwidth / std::numbers::pi));
        throw HorizonError(msg.str(), required);
    }
}

MicroAmplitudeVector MicroBath::propagate(const MicroAmplitudeVector& v0, double t) const {
    if (v0.size() != energies_.size()) throw DomainError("MicroBath::propagate: dimension mismatch");
    const Eigen::VectorXcd coeffs = (modes_.adjoint() * v0).cwiseProduct(phases(t));
    return frame_phase(t) * (modes_ * coeffs);
}

Eigen::VectorXcd MicroBath::row1(double t) const {
    const Eigen::RowVectorXcd left = modes_.row(0).cwiseProduct(phases(t).transpose());
    return frame_phase(t) * (left * modes_.adjoint()).transpose();
}

MixingMatrix MicroBath::extract_mixing(double t) const {
    check_horizon(t);
    const Eigen::VectorXcd ph = phases(t);
    const Eigen::MatrixXcd top = modes_.topRows(2);
    Eigen::Matrix2cd u = (top * ph.asDiagonal()) * top.adjoint();
    u *= frame_phase(t);
    return MixingMatrix::from_matrix(t, u);
}

double MicroBath::bath_leak_row1(double t) const {
    check_horizon(t);
    const Eigen::VectorXcd r = row1(t);
    return r.tail(r.size() - 2).squaredNorm();
}

cplx MicroBath::cat_coherence(cplx alpha0, double t) const {
    check_horizon(t);
    const Eigen::Index dim = energies_.size();
    MicroAmplitudeVector plus = MicroAmplitudeVector::Zero(dim);
    MicroAmplitudeVector minus = MicroAmplitudeVector::Zero(dim);
    plus(0) = alpha0;
    plus(1) = alpha0;
    minus(0) = -alpha0;
    minus(1) = alpha0;
    const MicroAmplitudeVector vp = propagate(plus, t);
    const MicroAmplitudeVector vm = propagate(minus, t);
    cplx exponent{};
    for (Eigen::Index k = 1; k < dim; ++k)
        exponent += std::conj(vm(k)) * vp(k) - 0.5 * std::norm(vp(k)) - 0.5 * std::norm(vm(k));
    return std::exp(exponent);
}

double MicroBath::micro_fidelity(cplx alpha0, double t) const {
    check_horizon(t);
    const Eigen::Index dim = energies_.size();
    MicroAmplitudeVector plus = MicroAmplitudeVector::Zero(dim);
    MicroAmplitudeVector minus = MicroAmplitudeVector::Zero(dim);
    plus(0) = alpha0;
    plus(1) = alpha0;
    minus(0) = -alpha0;
    minus(1) = alpha0;
    const cplx a_plus = propagate(plus, t)(0);
    const cplx a_minus = propagate(minus, t)(0);
    const cplx z = cat_coherence(alpha0, t);

    // Non-orthogonal family {|α0⟩, |−α0⟩, |a+⟩, |a−⟩}.
    const std::array<cplx, 4> amps{alpha0, -alpha0, a_plus, a_minus};
    Eigen::Matrix4cd gram;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            gram(i, j) = std::exp(-0.5 * std::norm(amps[i]) - 0.5 * std::norm(amps[j]) + std::conj(amps[i]) * amps[j]);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(gram);
    const double largest = es.eigenvalues().maxCoeff();
    std::vector<int> kept;
    for (int m = 0; m < 4; ++m)
        if (es.eigenvalues()(m) > 1e-12 * largest) kept.push_back(m);

    // Coordinates y = Λ^{-1/2} V† G x in the orthonormal basis.
    Eigen::MatrixXcd to_basis(static_cast<Eigen::Index>(kept.size()), 4);
    for (std::size_t r = 0; r < kept.size(); ++r) {
        const int m = kept[r];
        to_basis.row(static_cast<Eigen::Index>(r)) =
            es.eigenvectors().col(m).adjoint() * gram / std::sqrt(es.eigenvalues()(m));
    }

    Eigen::Matrix2cd branch_weights;
    branch_weights << 1.0, z, std::conj(z), 1.0;
    const Eigen::MatrixXcd branch_coords = to_basis.rightCols(2);
    const Eigen::MatrixXcd rho = branch_coords * branch_weights * branch_coords.adjoint();

    Eigen::Vector4cd cat_coeffs(1.0, 1.0, 0.0, 0.0);
    const Eigen::VectorXcd psi = to_basis * cat_coeffs;

    const double f = psi.dot(rho * psi).real() / (rho.trace().real() * psi.squaredNorm());
    if (f < -1e-9 || f > 1.0 + 1e-9) throw NumericalError("micro_fidelity outside [0,1]");
    return std::clamp(f, 0.0, 1.0);
}

}  // namespace bimodal
