#include "bimodal/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bimodal/diagnostics.hpp"
#include "bimodal/errors.hpp"

namespace bimodal {
namespace {

using Sparse = LindbladGenerator::Sparse;
using Triplet = Eigen::Triplet<cplx>;

// Annihilation operator of one mode embedded in the product space.
Sparse annihilation_operator(int mode, const FockSpace& space) {
    std::vector<Triplet> entries;
    for (Eigen::Index col = 0; col < space.dimension(); ++col) {
        const auto [n1, n2] = space.state(col);
        const int n = mode == 0 ? n1 : n2;
        if (n == 0) continue;
        const Eigen::Index row = mode == 0 ? space.index(n1 - 1, n2) : space.index(n1, n2 - 1);
        entries.emplace_back(row, col, std::sqrt(static_cast<double>(n)));
    }
    Sparse a(space.dimension(), space.dimension());
    a.setFromTriplets(entries.begin(), entries.end());
    return a;
}

using RowSparse = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline void mul_add(double& re, double& im, cplx a, cplx b) {
    re += a.real() * b.real() - a.imag() * b.imag();
    im += a.real() * b.imag() + a.imag() * b.real();
}

// dst = scale · (m · src) for one column.
void gather(const RowSparse& m, const cplx* src, cplx* dst, cplx scale) {
    const auto* outer = m.outerIndexPtr();
    const auto* inner = m.innerIndexPtr();
    const cplx* values = m.valuePtr();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        double re = 0.0;
        double im = 0.0;
        for (auto p = outer[r]; p < outer[r + 1]; ++p) mul_add(re, im, values[p], src[inner[p]]);
        double out_re = 0.0;
        double out_im = 0.0;
        mul_add(out_re, out_im, scale, cplx(re, im));
        dst[r] = cplx(out_re, out_im);
    }
}

// dst += scale · Σ_k conj(m(row, k)) · columns(:, k); the column-c slice of src·m†.
void scatter_row(const RowSparse& m, Eigen::Index row, const cplx* columns, Eigen::Index dim, cplx* dst,
                 cplx scale) {
    const auto* outer = m.outerIndexPtr();
    const auto* inner = m.innerIndexPtr();
    const cplx* values = m.valuePtr();
    auto* out = reinterpret_cast<double*>(dst);
    for (auto p = outer[row]; p < outer[row + 1]; ++p) {
        double w_re = 0.0;
        double w_im = 0.0;
        mul_add(w_re, w_im, scale, std::conj(values[p]));
        const auto* col = reinterpret_cast<const double*>(columns + inner[p] * dim);
        for (Eigen::Index r = 0; r < dim; ++r) {
            out[2 * r] += w_re * col[2 * r] - w_im * col[2 * r + 1];
            out[2 * r + 1] += w_re * col[2 * r + 1] + w_im * col[2 * r];
        }
    }
}

double max_row_sum(const Sparse& m) {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(m.rows());
    for (Eigen::Index k = 0; k < m.outerSize(); ++k)
        for (Sparse::InnerIterator it(m, k); it; ++it) sums(it.row()) += std::abs(it.value());
    return m.rows() > 0 ? sums.maxCoeff() : 0.0;
}

Sparse adjoint(const Sparse& m) { return Sparse(m.adjoint()); }

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

FockSpace::FockSpace(int d1, int d2) : d1_(d1), d2_(d2) {
    if (d1 < 2 || d2 < 2) throw DomainError("FockSpace: each Fock dimension must be >= 2");
}

int default_fock_dim(double amplitude) {
    const double a = std::abs(amplitude);
    const int d = static_cast<int>(std::ceil(a * a + 6.0 * a + 8.0));
    return std::clamp(d, 16, 40);
}

Eigen::VectorXcd coherent_fock(cplx alpha, int dim) {
    Eigen::VectorXcd v(dim);
    cplx term = std::exp(-0.5 * std::norm(alpha));
    for (int n = 0; n < dim; ++n) {
        v(n) = term;
        term *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    return v;
}

Eigen::VectorXcd branched_state_fock(const BranchedState& state, const FockSpace& space) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(space.dimension());
    for (const auto& b : state.branches) {
        const Eigen::VectorXcd v1 = coherent_fock(b.mode1, space.d1());
        const Eigen::VectorXcd v2 = coherent_fock(b.mode2, space.d2());
        for (Eigen::Index i = 0; i < space.dimension(); ++i) {
            const auto [n1, n2] = space.state(i);
            psi(i) += b.weight * v1(n1) * v2(n2);
        }
    }
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw DomainError("branched_state_fock: zero vector");
    return psi / norm;
}

FockDensity pure_density(const Eigen::VectorXcd& psi, const FockSpace& space) {
    if (psi.size() != space.dimension()) throw DomainError("pure_density: dimension mismatch");
    return FockDensity{space, psi * psi.adjoint(), 0.0};
}

LindbladGenerator::LindbladGenerator(const PhysicalConfig& cfg, FockSpace space) : space_(std::move(space)) {
    require_valid(cfg);

    PhysicalConfig rotating = cfg;
    rotating.frame = Frame::rotating;
    const DriftConstants dc = drift_constants(rotating);
    frame_frequency_ = cfg.frame == Frame::lab ? cfg.omega1 : 0.0;
    decay_scale_ = std::max(cfg.gamma11, cfg.gamma22) * (1.0 + cfg.nbar);

    a1_ = annihilation_operator(0, space_);
    a2_ = annihilation_operator(1, space_);
    const Sparse a1d = adjoint(a1_);
    const Sparse a2d = adjoint(a2_);

    Sparse hamiltonian = cplx(dc.A.imag()) * Sparse(a1d * a1_) + cplx(dc.B.imag()) * Sparse(a2d * a2_);
    if (cfg.dshift12 != 0.0) hamiltonian += cplx(cfg.dshift12) * Sparse(Sparse(a1d * a2_) + Sparse(a2d * a1_));

    Eigen::Matrix2d decay;
    decay << cfg.gamma11, cfg.gamma12(), cfg.gamma12(), cfg.gamma22;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(decay);
    if (es.eigenvalues().minCoeff() < -1e-12 * decay.trace())
        throw ConfigError("decay matrix is not positive semidefinite");

    std::vector<Sparse> jumps;
    Sparse loss(dimension(), dimension());
    for (int m = 0; m < 2; ++m) {
        const double rate = std::max(0.0, es.eigenvalues()(m));
        if (rate == 0.0) continue;
        const Eigen::Vector2d v = es.eigenvectors().col(m);
        const Sparse lower = cplx(v(0)) * a1_ + cplx(v(1)) * a2_;
        const Sparse jump = cplx(std::sqrt(rate * (cfg.nbar + 1.0))) * lower;
        jumps.push_back(jump);
        if (cfg.nbar > 0.0) jumps.push_back(cplx(std::sqrt(rate * cfg.nbar)) * adjoint(lower));
    }
    for (const auto& j : jumps) loss += Sparse(adjoint(j) * j);
    const Sparse effective = hamiltonian - cplx(0.0, 0.5) * loss;

    rate_scale_ = 2.0 * max_row_sum(effective);
    for (const auto& j : jumps) rate_scale_ += std::pow(max_row_sum(j), 2);
    effective_ = RowSparse(effective);
    effective_.makeCompressed();
    for (const auto& j : jumps) {
        jumps_.emplace_back(j);
        jumps_.back().makeCompressed();
    }
}

void LindbladGenerator::apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
    // L(ρ) = −iKρ + iρK† + Σ JρJ†, evaluated column by column.
    const Eigen::Index dim = dimension();
    if (rho.rows() != dim || rho.cols() != dim) throw DomainError("LindbladGenerator::apply: dimension mismatch");
    out.resize(dim, dim);

    thread_local std::vector<Eigen::MatrixXcd> left;
    left.resize(jumps_.size());
    for (std::size_t m = 0; m < jumps_.size(); ++m) {
        left[m].resize(dim, dim);
        for (Eigen::Index c = 0; c < dim; ++c) gather(jumps_[m], rho.data() + c * dim, left[m].data() + c * dim, 1.0);
    }

    for (Eigen::Index c = 0; c < dim; ++c) {
        cplx* dst = out.data() + c * dim;
        gather(effective_, rho.data() + c * dim, dst, cplx(0.0, -1.0));
        scatter_row(effective_, c, rho.data(), dim, dst, cplx(0.0, 1.0));
        for (std::size_t m = 0; m < jumps_.size(); ++m) scatter_row(jumps_[m], c, left[m].data(), dim, dst, 1.0);
    }
}

Eigen::MatrixXcd LindbladGenerator::apply(const Eigen::MatrixXcd& rho) const {
    Eigen::MatrixXcd out(rho.rows(), rho.cols());
    apply(rho, out);
    return out;
}

LindbladGenerator build_generator(const PhysicalConfig& cfg, int d1, int d2) {
    return LindbladGenerator(cfg, FockSpace(d1, d2));
}

namespace {

class Rk4 {
public:
    explicit Rk4(const LindbladGenerator& gen) : gen_(gen) {}

    void advance(Eigen::MatrixXcd& rho, double h, long steps) {
        for (long s = 0; s < steps; ++s) {
            gen_.apply(rho, k1_);
            tmp_ = rho + (0.5 * h) * k1_;
            gen_.apply(tmp_, k2_);
            tmp_ = rho + (0.5 * h) * k2_;
            gen_.apply(tmp_, k3_);
            tmp_ = rho + h * k3_;
            gen_.apply(tmp_, k4_);
            rho += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
        }
    }

private:
    const LindbladGenerator& gen_;
    Eigen::MatrixXcd k1_, k2_, k3_, k4_, tmp_;
};

void apply_frame(FockDensity& state, double omega) {
    if (omega == 0.0) return;
    const Eigen::Index dim = state.rho.rows();
    std::vector<cplx> phase(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto [n1, n2] = state.space.state(i);
        phase[static_cast<std::size_t>(i)] = std::polar(1.0, -omega * state.t * (n1 + n2));
    }
    for (Eigen::Index c = 0; c < dim; ++c)
        for (Eigen::Index r = 0; r < dim; ++r) state.rho(r, c) *= phase[r] * std::conj(phase[c]);
}

}  // namespace

Trajectory evolve(const FockDensity& rho0, const LindbladGenerator& gen, std::span<const double> t_grid,
                  const EvolveOptions& options) {
    if (rho0.space.d1() != gen.space().d1() || rho0.space.d2() != gen.space().d2())
        throw DomainError("evolve: dimension mismatch");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("evolve: time grid must be strictly increasing");

    Trajectory traj;
    traj.states.reserve(t_grid.size());
    if (t_grid.empty()) return traj;

    Rk4 rk(gen);
    Eigen::MatrixXcd current = rho0.rho;
    const double trace0 = current.trace().real();
    double t = rho0.t;

    auto record = [&](double time) {
        FockDensity state{rho0.space, current, time};
        const double top = top_level_population(state);
        traj.max_top_population = std::max(traj.max_top_population, top);
        apply_frame(state, gen.frame_frequency());
        traj.states.push_back(std::move(state));
    };

    long steps = 1;
    for (double target : t_grid) {
        const double span = target - t;
        if (span < 0.0) throw DomainError("evolve: time grid starts before the initial state");
        if (span == 0.0) {
            record(target);
            continue;
        }
        steps = std::max(steps, static_cast<long>(std::ceil(span * gen.rate_scale() / 2.0)));
        const long max_steps = steps << options.max_refinements;

        Eigen::MatrixXcd coarse = current;
        rk.advance(coarse, span / static_cast<double>(steps), steps);
        for (;;) {
            Eigen::MatrixXcd fine = current;
            rk.advance(fine, span / static_cast<double>(2 * steps), 2 * steps);
            traj.total_steps += 3 * steps;
            const double err = max_abs(fine - coarse) / 15.0;
            const double drift = std::abs(fine.trace().real() - trace0);
            const double drift_allowed = options.trace_tol * std::max(1.0, gen.decay_scale() * (target - t_grid.front()));
            if (err <= options.richardson_tol && drift <= drift_allowed) {
                traj.max_step_error = std::max(traj.max_step_error, err);
                current = std::move(fine);
                break;
            }
            steps *= 2;
            if (steps > max_steps) {
                std::ostringstream msg;
                msg << "evolve: step control failed on [" << t << ", " << target << "] after " << steps
                    << " steps (Richardson estimate " << err << ", trace drift " << drift << ")";
                throw NumericalError(msg.str());
            }
            coarse = std::move(fine);
        }
        t = target;
        record(target);
    }

    if (traj.max_top_population > options.top_population_tol) {
        traj.truncation_ok = false;
        std::ostringstream msg;
        msg << "Fock truncation: top-level population " << traj.max_top_population << " exceeds "
            << options.top_population_tol << " (d1=" << rho0.space.d1() << ", d2=" << rho0.space.d2() << ")";
        diag::warn(msg.str());
    }
    return traj;
}

Eigen::MatrixXcd reduce_mode1(const FockDensity& rho) {
    const FockSpace& space = rho.space;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(space.d1(), space.d1());
    for (int n1 = 0; n1 < space.d1(); ++n1)
        for (int m1 = 0; m1 < space.d1(); ++m1)
            for (int n2 = 0; n2 < space.d2(); ++n2) out(n1, m1) += rho.rho(space.index(n1, n2), space.index(m1, n2));
    return out;
}

double oracle_fidelity(const Eigen::MatrixXcd& rho1, cplx alpha0) {
    const int dim = static_cast<int>(rho1.rows());
    Eigen::VectorXcd cat = coherent_fock(alpha0, dim) + coherent_fock(-alpha0, dim);
    const double full_norm2 = 2.0 * (1.0 + std::exp(-2.0 * std::norm(alpha0)));
    const double tail = 1.0 - cat.squaredNorm() / full_norm2;
    if (tail > 1e-10) {
        std::ostringstream msg;
        msg << "oracle_fidelity: cat tail mass " << tail << " beyond dimension " << dim;
        throw DomainError(msg.str());
    }
    cat.normalize();
    const double f = cat.dot(rho1 * cat).real();
    if (f < -1e-9 || f > 1.0 + 1e-9) throw NumericalError("oracle_fidelity outside [0,1]");
    return std::clamp(f, 0.0, 1.0);
}

std::array<cplx, 2> mean_amplitudes(const FockDensity& rho) {
    const Sparse a1 = annihilation_operator(0, rho.space);
    const Sparse a2 = annihilation_operator(1, rho.space);
    return {(a1 * rho.rho).trace(), (a2 * rho.rho).trace()};
}

double top_level_population(const FockDensity& rho) {
    const FockSpace& space = rho.space;
    double top1 = 0.0;
    double top2 = 0.0;
    for (int n = 0; n < space.d2(); ++n) {
        const Eigen::Index i = space.index(space.d1() - 1, n);
        top1 += rho.rho(i, i).real();
    }
    for (int n = 0; n < space.d1(); ++n) {
        const Eigen::Index i = space.index(n, space.d2() - 1);
        top2 += rho.rho(i, i).real();
    }
    return std::max(top1, top2);
}

Physicality check_physicality(const Eigen::MatrixXcd& rho) {
    Physicality p;
    p.trace_error = std::abs(rho.trace().real() - 1.0);
    p.hermiticity_error = max_abs(rho - rho.adjoint());
    const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    p.min_eigenvalue = es.eigenvalues().minCoeff();
    return p;
}

double state_fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
    if (rho.rows() != sigma.rows()) throw DomainError("state_fidelity: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()));
    const Eigen::VectorXd sqrt_vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXcd root = es.eigenvectors() * sqrt_vals.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    const Eigen::MatrixXcd inner = root * sigma * root;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
    const double s = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return s * s;
}

}  // namespace bimodal
