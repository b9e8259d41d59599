#include "bimodal/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bimodal/diagnostics.hpp"
#include "bimodal/errors.hpp"

namespace bimodal {
namespace {

constexpr double excursion_tolerance = 1e-9;

double clamp_unit(double value, const char* what) {
    if (value < -excursion_tolerance || value > 1.0 + excursion_tolerance) {
        std::ostringstream msg;
        msg << what << " outside [0,1]: " << value;
        throw NumericalError(msg.str());
    }
    return std::clamp(value, 0.0, 1.0);
}

// ⟨n|a⟩ for n = 0..dim-1.
Eigen::VectorXcd fock_amplitudes(cplx a, int dim) {
    Eigen::VectorXcd v(dim);
    cplx term = std::exp(-0.5 * std::norm(a));
    for (int n = 0; n < dim; ++n) {
        v(n) = term;
        term *= a / std::sqrt(static_cast<double>(n + 1));
    }
    return v;
}

// ⟨Ψ|x⟩ for the normalized static cat |Ψ⟩ ∝ |α0⟩ + |−α0⟩.
cplx cat_overlap(cplx alpha0, cplx x) {
    const double norm2 = 2.0 * (1.0 + std::exp(-2.0 * std::norm(alpha0)));
    return (coherent_overlap(alpha0, x) + coherent_overlap(-alpha0, x)) / std::sqrt(norm2);
}

}  // namespace

cplx coherent_overlap(cplx bra, cplx ket) {
    return std::exp(-0.5 * std::norm(ket) - 0.5 * std::norm(bra) + std::conj(bra) * ket);
}

double BranchedState::norm_squared() const {
    cplx sum{};
    for (const auto& bi : branches)
        for (const auto& bj : branches)
            sum += std::conj(bj.weight) * bi.weight * coherent_overlap(bj.mode1, bi.mode1) *
                   coherent_overlap(bj.mode2, bi.mode2);
    return sum.real();
}

BranchedState make_cat_state(cplx alpha0) {
    return BranchedState{{{1.0, alpha0, alpha0}, {1.0, -alpha0, alpha0}}};
}

cplx BranchedDensity::coefficient(std::size_t i, std::size_t j) const {
    return weights[i] * std::conj(weights[j]) * coh(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

Eigen::MatrixXcd BranchedDensity::weighted_gram() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXcd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            g(i, j) = coefficient(i, j) * coherent_overlap(mode1_amps[j], mode1_amps[i]);
    return g;
}

double BranchedDensity::trace() const { return weighted_gram().sum().real(); }

double BranchedDensity::min_gram_eigenvalue() const {
    const Eigen::MatrixXcd g = weighted_gram();
    const Eigen::MatrixXcd h = 0.5 * (g + g.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double BranchedDensity::expectation(const std::vector<cplx>& ket_weights,
                                    const std::vector<cplx>& ket_amps) const {
    std::vector<cplx> proj(size());
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t k = 0; k < ket_amps.size(); ++k)
            proj[i] += std::conj(ket_weights[k]) * coherent_overlap(ket_amps[k], mode1_amps[i]);
    cplx sum{};
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = 0; j < size(); ++j) sum += coefficient(i, j) * proj[i] * std::conj(proj[j]);
    return sum.real() / trace();
}

Eigen::MatrixXcd BranchedDensity::to_fock(int dim) const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXcd kets(dim, n);
    for (Eigen::Index i = 0; i < n; ++i) kets.col(i) = fock_amplitudes(mode1_amps[i], dim);
    Eigen::MatrixXcd w(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) w(i, j) = coefficient(i, j);
    return kets * w * kets.adjoint() / trace();
}

BranchedDensity evolve_branched(const MixingMatrix& mix, const BranchedState& state) {
    if (state.branches.empty()) throw DomainError("evolve_branched: empty state");
    const double norm2 = state.norm_squared();
    if (!(norm2 > 0.0)) throw DomainError("evolve_branched: state has zero norm");

    const Eigen::Matrix2cd u = mix.matrix();
    const Eigen::Matrix2cd bath_gram = Eigen::Matrix2cd::Identity() - u.adjoint() * u;

    const auto n = static_cast<Eigen::Index>(state.branches.size());
    BranchedDensity bd;
    bd.t = mix.t;
    bd.weights.resize(state.branches.size());
    bd.mode1_amps.resize(state.branches.size());
    std::vector<cplx> mode2_amps(state.branches.size());
    std::vector<Eigen::Vector2cd> initial(state.branches.size());

    const double scale = 1.0 / std::sqrt(norm2);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& b = state.branches[i];
        initial[i] = Eigen::Vector2cd(b.mode1, b.mode2);
        const Eigen::Vector2cd evolved = u * initial[i];
        bd.weights[i] = b.weight * scale;
        bd.mode1_amps[i] = evolved(0);
        mode2_amps[i] = evolved(1);
    }

    bd.coh.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const cplx cross = initial[j].dot(bath_gram * initial[i]);
            const double self_i = initial[i].dot(bath_gram * initial[i]).real();
            const double self_j = initial[j].dot(bath_gram * initial[j]).real();
            const cplx bath = std::exp(cross - 0.5 * self_i - 0.5 * self_j);
            bd.coh(i, j) = coherent_overlap(mode2_amps[j], mode2_amps[i]) * bath;
        }
        bd.coh(i, i) = 1.0;
    }
    return bd;
}

cplx evolved_amplitude(const MixingMatrix& mix, cplx alpha0) { return alpha0 * (mix.u11 + mix.u12); }

cplx decoherence_factor(const MixingMatrix& mix, cplx alpha0) {
    const double loss = 1.0 - std::norm(mix.u11);
    const double phase = std::imag(std::conj(mix.u12) * mix.u11);
    return std::exp(-2.0 * std::norm(alpha0) * cplx(loss, phase));
}

double fidelity_scs(const MixingMatrix& mix, cplx alpha0) {
    const cplx plus = alpha0 * (mix.u11 + mix.u12);
    const cplx minus = alpha0 * (-mix.u11 + mix.u12);
    const cplx z = decoherence_factor(mix, alpha0);
    const double trace = 2.0 + 2.0 * std::real(z * coherent_overlap(minus, plus));
    const cplx hp = cat_overlap(alpha0, plus);
    const cplx hm = cat_overlap(alpha0, minus);
    const double f = (std::norm(hp) + std::norm(hm) + 2.0 * std::real(z * hp * std::conj(hm))) / trace;
    return clamp_unit(f, "fidelity_scs");
}

double fidelity_scs_symmetric(const MixingMatrix& mix, cplx alpha0) {
    const cplx a = evolved_amplitude(mix, alpha0);
    const cplx z = decoherence_factor(mix, alpha0);
    const double np2 = 1.0 / (1.0 + std::exp(-2.0 * std::norm(alpha0)));
    const double ne2 = 1.0 / (2.0 + 2.0 * std::real(z * std::exp(-2.0 * std::norm(a))));
    const cplx w = std::conj(alpha0) * a;
    const cplx wc = alpha0 * std::conj(a);
    const cplx bracket = std::cosh(w + wc) + std::cosh(w - wc);
    const cplx f = np2 * ne2 * std::exp(-(std::norm(a) + std::norm(alpha0))) * bracket * (2.0 + z + std::conj(z));
    return clamp_unit(f.real(), "fidelity_scs_symmetric");
}

CatObservables cat_observables(const MixingMatrix& mix, cplx alpha0, double nbar) {
    CatObservables obs;
    obs.alpha_t = evolved_amplitude(mix, alpha0);
    obs.Z = decoherence_factor(mix, alpha0);
    obs.Np = 1.0 / std::sqrt(1.0 + std::exp(-2.0 * std::norm(alpha0)));
    const cplx plus = alpha0 * (mix.u11 + mix.u12);
    const cplx minus = alpha0 * (-mix.u11 + mix.u12);
    obs.Ne = 1.0 / std::sqrt(2.0 + 2.0 * std::real(obs.Z * coherent_overlap(minus, plus)));
    obs.F = fidelity_scs(mix, alpha0);
    obs.D = thermal_noise_D(mix, nbar);
    return obs;
}

cplx char_function(const BranchedDensity& bd, cplx eta, double D) {
    if (!(D >= 0.0)) throw DomainError("char_function: negative D");
    cplx sum{};
    for (std::size_t i = 0; i < bd.size(); ++i)
        for (std::size_t j = 0; j < bd.size(); ++j)
            sum += bd.coefficient(i, j) * coherent_overlap(bd.mode1_amps[j], bd.mode1_amps[i]) *
                   std::exp(eta * std::conj(bd.mode1_amps[j]) - std::conj(eta) * bd.mode1_amps[i]);
    return sum / bd.trace() * std::exp(-std::norm(eta) * D);
}

double GridSpec::spacing() const { return points > 1 ? 2.0 * extent / (points - 1) : 0.0; }

cplx GridSpec::point(int i_re, int i_im) const {
    const double h = spacing();
    return center + cplx(-extent + i_re * h, -extent + i_im * h);
}

double PhaseSpaceField::integral() const {
    const double h = grid.spacing();
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * h * h;
}

double husimi_q(const BranchedDensity& bd, cplx xi, double D) {
    if (!(D >= 0.0)) throw DomainError("husimi_q: negative D");
    const double width = 1.0 + D;
    cplx sum{};
    for (std::size_t i = 0; i < bd.size(); ++i)
        for (std::size_t j = 0; j < bd.size(); ++j) {
            const cplx ai = bd.mode1_amps[i];
            const cplx aj = bd.mode1_amps[j];
            sum += bd.coefficient(i, j) * coherent_overlap(aj, ai) *
                   std::exp(-(std::conj(xi) - std::conj(aj)) * (xi - ai) / width);
        }
    double q = sum.real() / (bd.trace() * std::numbers::pi * width);
    if (q < 0.0) {
        if (q < -1e-12) {
            std::ostringstream msg;
            msg << "negative Husimi value " << q << " at xi=" << xi;
            diag::warn(msg.str());
        }
        q = 0.0;
    }
    return q;
}

PhaseSpaceField husimi_q(const BranchedDensity& bd, const GridSpec& grid, double D) {
    if (grid.points < 2 || !(grid.extent > 0.0)) throw DomainError("husimi_q: degenerate grid");
    PhaseSpaceField field{grid, {}};
    field.values.reserve(static_cast<std::size_t>(grid.points) * grid.points);
    for (int j = 0; j < grid.points; ++j)
        for (int i = 0; i < grid.points; ++i) field.values.push_back(husimi_q(bd, grid.point(i, j), D));
    return field;
}

}  // namespace bimodal
