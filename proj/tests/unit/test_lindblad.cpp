#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "bimodal/diagnostics.hpp"
#include "bimodal/errors.hpp"
#include "bimodal/lindblad.hpp"
#include "bimodal/propagator.hpp"
#include "bimodal/states.hpp"
#include "fock_oracle.hpp"

using namespace bimodal;

namespace {

Eigen::MatrixXcd random_matrix(Eigen::Index dim, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    Eigen::MatrixXcd m(dim, dim);
    for (auto& x : m.reshaped()) x = cplx(n(rng), n(rng));
    return m;
}

FockDensity product_coherent(cplx a, cplx b, const FockSpace& space) {
    return pure_density(branched_state_fock(BranchedState{{{1.0, a, b}}}, space), space);
}

struct WarningCapture {
    std::vector<std::string> messages;
    diag::WarningHandler previous;
    WarningCapture() {
        previous = diag::set_warning_handler([this](std::string_view m) { messages.emplace_back(m); });
    }
    ~WarningCapture() { diag::set_warning_handler(previous); }
};

// Fock-basis master equation, scipy expm_multiply, d = 16 per mode (tests/oracles/generate_reference.py).
const double me_reference[2][3] = {
    {0.787836570860285, 0.717130271032593, 0.655874903920578},
    {0.790128508577193, 0.719486412718669, 0.662940173353646},
};

}  // namespace

TEST_CASE("Fock box indexing") {
    const FockSpace space(5, 3);
    CHECK(space.dimension() == 15);
    for (Eigen::Index i = 0; i < space.dimension(); ++i) {
        const auto [n1, n2] = space.state(i);
        CHECK(space.index(n1, n2) == i);
    }
    CHECK(space.index(5, 0) == -1);
    CHECK(space.index(0, -1) == -1);
    CHECK_THROWS_AS(FockSpace(1, 4), DomainError);
}

TEST_CASE("default Fock dimension") {
    CHECK(default_fock_dim(0.5) == 16);
    CHECK(default_fock_dim(1.0) == 16);
    CHECK(default_fock_dim(2.0) == 24);
    CHECK(default_fock_dim(3.0) == 35);
    CHECK(default_fock_dim(5.0) == 40);
}

TEST_CASE("generator preserves trace and adjoints") {
    for (double kappa : {0.0, 1.0})
        for (double nbar : {0.0, 0.3}) {
            PhysicalConfig cfg = fig1_config(kappa);
            cfg.nbar = nbar;
            cfg.dshift12 = 200.0;
            const LindbladGenerator gen = build_generator(cfg, 6, 5);
            const Eigen::MatrixXcd x = random_matrix(gen.dimension(), 3);
            const Eigen::MatrixXcd lx = gen.apply(x);
            CHECK(std::abs(lx.trace()) < 1e-12 * gen.rate_scale() * x.cwiseAbs().maxCoeff());
            const Eigen::MatrixXcd lxa = gen.apply(Eigen::MatrixXcd(x.adjoint()));
            CHECK((lxa - lx.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * gen.rate_scale());
        }
}

TEST_CASE("vacuum is stationary at zero temperature") {
    const LindbladGenerator gen = build_generator(fig1_config(0.7), 8, 8);
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(gen.dimension());
    vac(0) = 1.0;
    const FockDensity rho = pure_density(vac, gen.space());
    CHECK(gen.apply(rho.rho).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mean amplitudes follow the drift matrix") {
    for (double kappa : {0.0, 0.6, 1.0})
        for (double nbar : {0.0, 0.5}) {
            PhysicalConfig cfg = fig1_config(kappa);
            cfg.nbar = nbar;
            cfg.g = two_pi * 40e3;
            cfg.delta1 = two_pi * 300e3;
            cfg.branch = AtomBranch::excited;
            cfg.dshift2 = -500.0;
            cfg.dshift12 = 250.0;
            const LindbladGenerator gen = build_generator(cfg, 20, 20);
            FockDensity rho = product_coherent(cplx(0.4, 0.2), cplx(-0.3, 0.1), gen.space());
            rho.rho = gen.apply(rho.rho);
            const auto da = mean_amplitudes(rho);
            const FockDensity rho0 = product_coherent(cplx(0.4, 0.2), cplx(-0.3, 0.1), gen.space());
            const auto a = mean_amplitudes(rho0);
            const Eigen::Vector2cd expected = -drift_constants(cfg).drift_matrix() * Eigen::Vector2cd(a[0], a[1]);
            const double scale = drift_constants(cfg).drift_matrix().cwiseAbs().maxCoeff();
            CHECK(std::abs(da[0] - expected(0)) < 1e-10 * scale);
            CHECK(std::abs(da[1] - expected(1)) < 1e-10 * scale);
        }
}

TEST_CASE("evolution at the initial time returns the initial state") {
    const LindbladGenerator gen = build_generator(fig1_config(1.0), 12, 12);
    const FockDensity rho0 = product_coherent(1.0, 0.5, gen.space());
    const double grid[] = {0.0};
    const Trajectory traj = evolve(rho0, gen, grid);
    REQUIRE(traj.states.size() == 1);
    CHECK((traj.states[0].rho - rho0.rho).cwiseAbs().maxCoeff() == 0.0);

    const double bad[] = {1e-4, 1e-4};
    CHECK_THROWS_AS(evolve(rho0, gen, bad), DomainError);
    const LindbladGenerator other = build_generator(fig1_config(1.0), 12, 9);
    CHECK_THROWS_AS(evolve(rho0, other, grid), DomainError);
}

TEST_CASE("coherent states stay coherent with the propagated amplitude") {
    const PhysicalConfig cfg = fig1_config(1.0);
    const LindbladGenerator gen = build_generator(cfg, 16, 16);
    const cplx a0(1.0, 0.0), b0(0.5, -0.2);
    const std::vector<double> grid{0.2e-3, 1e-3, 2.5e-3};
    const Trajectory traj = evolve(product_coherent(a0, b0, gen.space()), gen, grid);
    const DriftConstants dc = drift_constants(cfg);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const MixingMatrix m = mixing_coefficients(dc, grid[i]);
        const auto a = mean_amplitudes(traj.states[i]);
        CHECK(std::abs(a[0] - (m.u11 * a0 + m.u12 * b0)) < 1e-6);
        CHECK(std::abs(a[1] - (m.u21 * a0 + m.u22 * b0)) < 1e-6);
        const Eigen::MatrixXcd& r = traj.states[i].rho;
        CHECK((r * r).trace().real() == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("lossless beam splitter keeps product states pure") {
    PhysicalConfig cfg;
    cfg.gamma11 = 0.0;
    cfg.gamma22 = 0.0;
    cfg.dshift12 = 2000.0;
    const LindbladGenerator gen = build_generator(cfg, 14, 14);
    const std::vector<double> grid{0.3e-3, 0.785e-3};
    const Trajectory traj = evolve(product_coherent(1.2, 0.0, gen.space()), gen, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Eigen::MatrixXcd& r = traj.states[i].rho;
        CHECK((r * r).trace().real() == doctest::Approx(1.0).epsilon(1e-8));
        const MixingMatrix m = mixing_coefficients(drift_constants(cfg), grid[i]);
        const auto a = mean_amplitudes(traj.states[i]);
        CHECK(std::abs(a[0] - 1.2 * m.u11) < 1e-7);
        CHECK(std::abs(a[1] - 1.2 * m.u21) < 1e-7);
    }
}

TEST_CASE("thermal reservoir fills the mode to nbar") {
    PhysicalConfig cfg = fig1_config();
    cfg.gamma22 = 0.0;
    cfg.nbar = 2.0;
    const LindbladGenerator gen = build_generator(cfg, 40, 2);
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(gen.dimension());
    vac(0) = 1.0;
    const std::vector<double> grid{1e-3, 12e-3};
    const Trajectory traj = evolve(pure_density(vac, gen.space()), gen, grid);
    CHECK(traj.truncation_ok);
    const Eigen::MatrixXcd r1 = reduce_mode1(traj.states[1]);
    double n = 0.0;
    for (int k = 0; k < r1.rows(); ++k) n += k * r1(k, k).real();
    CHECK(n == doctest::Approx(2.0 * (1.0 - std::exp(-12.0))).epsilon(1e-4));
    const Eigen::MatrixXcd r1a = reduce_mode1(traj.states[0]);
    double na = 0.0;
    for (int k = 0; k < r1a.rows(); ++k) na += k * r1a(k, k).real();
    CHECK(na == doctest::Approx(2.0 * (1.0 - std::exp(-1.0))).epsilon(1e-6));
}

TEST_CASE("partial trace") {
    const FockSpace space(4, 3);
    const FockDensity prod = product_coherent(0.3, cplx(0.0, 0.4), space);
    const Eigen::MatrixXcd r1 = reduce_mode1(prod);
    Eigen::VectorXcd a = coherent_fock(0.3, 4);
    Eigen::VectorXcd b = coherent_fock(cplx(0.0, 0.4), 3);
    const Eigen::MatrixXcd expected = a * a.adjoint() * b.squaredNorm() / (a.squaredNorm() * b.squaredNorm());
    CHECK((r1 - expected).cwiseAbs().maxCoeff() < 1e-14);

    Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(space.dimension());
    bell(space.index(0, 0)) = 1.0 / std::sqrt(2.0);
    bell(space.index(1, 1)) = 1.0 / std::sqrt(2.0);
    const Eigen::MatrixXcd rb = reduce_mode1(pure_density(bell, space));
    CHECK(rb(0, 0).real() == doctest::Approx(0.5));
    CHECK(rb(1, 1).real() == doctest::Approx(0.5));
    CHECK(std::abs(rb(0, 1)) < 1e-15);
}

TEST_CASE("cat fidelity in the Fock basis") {
    const Eigen::VectorXcd cat = oracle::cat_vector(1.3, 30);
    CHECK(oracle_fidelity(cat * cat.adjoint(), 1.3) == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::MatrixXcd vac = Eigen::MatrixXcd::Zero(30, 30);
    vac(0, 0) = 1.0;
    CHECK(oracle_fidelity(vac, 1.0) == doctest::Approx(0.6480542736638853).epsilon(1e-12));
    CHECK_THROWS_AS(oracle_fidelity(Eigen::MatrixXcd::Identity(16, 16) / 16.0, 5.0), DomainError);
}

TEST_CASE("cat fidelity matches the frozen master-equation reference") {
    const std::vector<double> grid{0.5e-3, 1e-3, 3e-3};
    for (int k = 0; k < 2; ++k) {
        const PhysicalConfig cfg = fig1_config(k == 0 ? 0.0 : 1.0);
        const LindbladGenerator gen = build_generator(cfg, 16, 16);
        const FockDensity rho0 = pure_density(branched_state_fock(make_cat_state(1.0), gen.space()), gen.space());
        const Trajectory traj = evolve(rho0, gen, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            INFO("kappa=" << cfg.kappa << " t=" << grid[i]);
            CHECK(oracle_fidelity(reduce_mode1(traj.states[i]), 1.0) ==
                  doctest::Approx(me_reference[k][i]).epsilon(1e-8));
            const Physicality p = check_physicality(traj.states[i].rho);
            CHECK(p.trace_error < 1e-8);
            CHECK(p.hermiticity_error < 1e-10);
            CHECK(p.min_eigenvalue >= -1e-8);
        }
    }
}

TEST_CASE("reduced states agree with the branched solution") {
    const PhysicalConfig cfg = fig1_config(1.0);
    const LindbladGenerator gen = build_generator(cfg, 18, 18);
    const double w = two_pi / 3.0;
    const BranchedState compass{{{1.0, 1.0, 0.5},
                                 {1.0, std::polar(1.0, w), 0.5},
                                 {1.0, std::polar(1.0, 2.0 * w), 0.5}}};
    for (const BranchedState& s : {make_cat_state(1.0), compass}) {
        const std::vector<double> grid{0.4e-3, 1.5e-3};
        const Trajectory traj = evolve(pure_density(branched_state_fock(s, gen.space()), gen.space()), gen, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const BranchedDensity bd = evolve_branched(mixing_coefficients(drift_constants(cfg), grid[i]), s);
            CHECK(state_fidelity(reduce_mode1(traj.states[i]), bd.to_fock(18)) >= 0.999);
            CHECK((reduce_mode1(traj.states[i]) - bd.to_fock(18)).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("larger Fock boxes do not change the fidelity") {
    const PhysicalConfig cfg = fig1_config(1.0);
    const std::vector<double> grid{1e-3};
    std::vector<double> f;
    for (int d : {16, 22}) {
        const LindbladGenerator gen = build_generator(cfg, d, d);
        const FockDensity rho0 = pure_density(branched_state_fock(make_cat_state(1.0), gen.space()), gen.space());
        f.push_back(oracle_fidelity(reduce_mode1(evolve(rho0, gen, grid).states[0]), 1.0));
    }
    CHECK(std::abs(f[0] - f[1]) < 1e-4);
}

TEST_CASE("truncation is flagged") {
    WarningCapture capture;
    const LindbladGenerator gen = build_generator(fig1_config(), 4, 4);
    const FockDensity rho0 = pure_density(branched_state_fock(make_cat_state(1.5), gen.space()), gen.space());
    CHECK(top_level_population(rho0) > 1e-6);
    const std::vector<double> grid{1e-4};
    const Trajectory traj = evolve(rho0, gen, grid);
    CHECK_FALSE(traj.truncation_ok);
    REQUIRE(capture.messages.size() == 1);
    CHECK(capture.messages[0].find("Fock truncation") != std::string::npos);
}

TEST_CASE("exhausted step control throws") {
    const LindbladGenerator gen = build_generator(fig1_config(1.0), 6, 6);
    const FockDensity rho0 = product_coherent(0.5, 0.5, gen.space());
    EvolveOptions opts;
    opts.richardson_tol = 1e-300;
    opts.max_refinements = 2;
    const std::vector<double> grid{1e-3};
    CHECK_THROWS_AS(evolve(rho0, gen, grid, opts), NumericalError);
}

TEST_CASE("physicality diagnostics") {
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(3, 3);
    r(0, 0) = 0.6;
    r(1, 1) = 0.5;
    r(2, 2) = -0.1;
    r(0, 1) = cplx(0.0, 1e-3);
    const Physicality p = check_physicality(r);
    CHECK(p.trace_error == doctest::Approx(0.0).epsilon(1e-15).scale(1.0));
    CHECK(p.hermiticity_error == doctest::Approx(1e-3));
    CHECK(p.min_eigenvalue < -0.09);
}

TEST_CASE("Uhlmann fidelity") {
    const Eigen::VectorXcd a = oracle::coherent_vector(0.5, 20);
    const Eigen::VectorXcd b = oracle::coherent_vector(cplx(0.2, 0.3), 20);
    const Eigen::MatrixXcd ra = a * a.adjoint();
    const Eigen::MatrixXcd rb = b * b.adjoint();
    CHECK(state_fidelity(ra, ra) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(state_fidelity(ra, rb) == doctest::Approx(std::norm(a.dot(b))).epsilon(1e-8));
    CHECK_THROWS_AS(state_fidelity(ra, Eigen::MatrixXcd::Identity(3, 3)), DomainError);
}
