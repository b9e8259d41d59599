#include <doctest.h>

#include <cmath>
#include <random>

#include "bimodal/errors.hpp"
#include "bimodal/micro_bath.hpp"
#include "bimodal/propagator.hpp"
#include "bimodal/states.hpp"

using namespace bimodal;

namespace {

constexpr std::size_t default_modes = 800;
const double default_width = two_pi * 1e5;

MicroBath make_micro(const PhysicalConfig& cfg, std::size_t n = default_modes, double w = default_width) {
    return MicroBath(cfg, build_bath(cfg, n, w));
}

}  // namespace

TEST_CASE("coupling magnitudes reproduce the decay matrix") {
    for (double kappa : {0.0, 0.4, -0.7, 1.0}) {
        const PhysicalConfig cfg = fig1_config(kappa);
        const BathModel bath = build_bath(cfg, default_modes, default_width);
        REQUIRE(bath.size() == default_modes);
        CHECK(bath.rho_dos == doctest::Approx(default_modes / default_width));
        double cross = 0.0;
        for (std::size_t k = 0; k < bath.size(); ++k) {
            CHECK(two_pi * std::norm(bath.lambda1[k]) * bath.rho_dos == doctest::Approx(cfg.gamma11).epsilon(1e-12));
            CHECK(two_pi * std::norm(bath.lambda2[k]) * bath.rho_dos == doctest::Approx(cfg.gamma22).epsilon(1e-12));
            if (kappa != 0.0)
                CHECK(two_pi * std::real(bath.lambda1[k] * std::conj(bath.lambda2[k])) * bath.rho_dos ==
                      doctest::Approx(cfg.gamma12()).epsilon(1e-12));
            cross += std::real(bath.lambda1[k] * std::conj(bath.lambda2[k]));
        }
        // Summed over the band the overlap follows kappa.
        const double expected = cfg.gamma12() / (two_pi * bath.rho_dos) * static_cast<double>(bath.size());
        CHECK(std::abs(cross - expected) < 1e-9 * std::abs(bath.lambda1[0]) * std::abs(bath.lambda2[0]) * bath.size());
    }
}

TEST_CASE("frequency grid is uniform and centred") {
    const BathModel bath = build_bath(fig1_config(), 10, 100.0);
    for (std::size_t k = 0; k < bath.size(); ++k) CHECK(bath.omegas[k] == doctest::Approx(-45.0 + 10.0 * k));
    CHECK(bath.recurrence_time() == doctest::Approx(two_pi * 0.1));
    CHECK(bath.horizon() == doctest::Approx(std::numbers::pi * 0.1));
}

TEST_CASE("independent channels couple orthogonally") {
    const BathModel bath = build_bath(fig1_config(0.0), 400, default_width);
    CHECK(bath.real_couplings());
    cplx overlap{};
    for (std::size_t k = 0; k < bath.size(); ++k) overlap += bath.lambda1[k] * std::conj(bath.lambda2[k]);
    CHECK(std::abs(overlap) < 1e-12);
}

TEST_CASE("fully correlated equal channels share the coupling") {
    PhysicalConfig cfg = fig1_config(1.0);
    cfg.gamma22 = cfg.gamma11;
    const BathModel bath = build_bath(cfg, 100, default_width);
    CHECK(bath.real_couplings());
    for (std::size_t k = 0; k < bath.size(); ++k) CHECK(bath.lambda2[k] == bath.lambda1[k]);
}

TEST_CASE("horizon check names the required mode count") {
    const PhysicalConfig cfg = fig1_config();
    try {
        build_bath(cfg, 100, default_width, 3e-3);
        FAIL("expected HorizonError");
    } catch (const HorizonError& e) {
        const auto required = static_cast<std::size_t>(std::ceil(3e-3 * default_width / std::numbers::pi));
        CHECK(e.required_modes() == required);
        CHECK(e.required_modes() == 600);
        CHECK_NOTHROW(build_bath(cfg, e.required_modes(), default_width, 3e-3));
    }

    const MicroBath micro = make_micro(cfg, 100);
    CHECK_THROWS_AS(micro.extract_mixing(1e-3), HorizonError);
    CHECK_THROWS_AS(micro.extract_mixing(-1e-6), DomainError);
    CHECK_NOTHROW(micro.extract_mixing(micro.bath().horizon()));
}

TEST_CASE("invalid bath parameters") {
    CHECK_THROWS_AS(build_bath(fig1_config(), 1, default_width), DomainError);
    CHECK_THROWS_AS(build_bath(fig1_config(), 10, 0.0), DomainError);
    CHECK_THROWS_AS(build_bath(fig1_config(1.2), 10, default_width), ConfigError);
    PhysicalConfig cross = fig1_config();
    cross.dshift12 = 10.0;
    CHECK_THROWS_AS(build_bath(cross, 10, default_width), ConfigError);
}

TEST_CASE("propagation is unitary") {
    for (double kappa : {0.0, 0.5, 1.0}) {
        const MicroBath micro = make_micro(fig1_config(kappa), 300);
        const Eigen::MatrixXcd omega = micro.coupling_matrix();
        CHECK((omega - omega.adjoint()).cwiseAbs().maxCoeff() == 0.0);

        std::mt19937_64 rng(5);
        std::normal_distribution<double> n;
        Eigen::VectorXcd v0(static_cast<Eigen::Index>(micro.dimension()));
        for (auto& x : v0) x = cplx(n(rng), n(rng));
        CHECK((micro.propagate(v0, 0.0) - v0).norm() < 1e-12 * v0.norm());
        for (double t : {1e-5, 4e-4, 1.4e-3}) {
            CHECK(std::abs(micro.propagate(v0, t).norm() / v0.norm() - 1.0) < 1e-10);
            const MixingMatrix m = micro.extract_mixing(t);
            CHECK(std::abs(std::norm(m.u11) + std::norm(m.u12) + micro.bath_leak_row1(t) - 1.0) < 1e-10);
            CHECK(std::abs(micro.row1(t)(0) - m.u11) < 1e-13);
            CHECK(std::abs(micro.row1(t)(1) - m.u12) < 1e-13);
        }
    }
}

TEST_CASE("uncoupled modes only rotate") {
    PhysicalConfig cfg;
    cfg.gamma11 = 0.0;
    cfg.gamma22 = 0.0;
    cfg.g = two_pi * 50e3;
    cfg.delta1 = two_pi * 200e3;
    cfg.branch = AtomBranch::ground;
    cfg.dshift2 = 300.0;
    const MicroBath micro = make_micro(cfg, 50);
    const double t = 1e-4;
    const MixingMatrix m = micro.extract_mixing(t);
    CHECK(std::abs(m.u11 - std::polar(1.0, -cfg.dispersive_offset() * t)) < 1e-12);
    CHECK(std::abs(m.u22 - std::polar(1.0, -300.0 * t)) < 1e-12);
    CHECK(std::abs(m.u12) < 1e-15);
    CHECK(micro.bath_leak_row1(t) < 1e-20);
    const MixingMatrix a = mixing_coefficients(drift_constants(cfg), t);
    CHECK(std::abs(a.u11 - m.u11) < 1e-12);
}

TEST_CASE("lab frame multiplies by the carrier phase") {
    PhysicalConfig lab = fig1_config(0.5);
    lab.frame = Frame::lab;
    const MicroBath rot = make_micro(fig1_config(0.5), 200);
    const MicroBath labm = make_micro(lab, 200);
    const double t = 3.3e-4;
    const cplx carrier = std::polar(1.0, -lab.omega1 * t);
    CHECK(std::abs(labm.extract_mixing(t).u11 - carrier * rot.extract_mixing(t).u11) < 1e-12);
    CHECK(labm.micro_fidelity(1.0, t) == doctest::Approx(rot.micro_fidelity(1.0, t)).epsilon(1e-10));
}

TEST_CASE("extracted mixing approaches the Markovian propagator") {
    for (double kappa : {0.0, 1.0}) {
        const PhysicalConfig cfg = fig1_config(kappa);
        const MicroBath micro = make_micro(cfg);
        CHECK(std::abs(micro.extract_mixing(0.0).u11 - 1.0) < 1e-12);
        CHECK(std::abs(micro.extract_mixing(0.0).u12) < 1e-12);
        const DriftConstants dc = drift_constants(cfg);
        for (double t : {0.2e-3, 0.5e-3, 1e-3, 2e-3, 3e-3}) {
            const MixingMatrix a = mixing_coefficients(dc, t);
            const MixingMatrix m = micro.extract_mixing(t);
            INFO("kappa=" << kappa << " t=" << t);
            CHECK(std::abs(m.u11) == doctest::Approx(std::abs(a.u11)).epsilon(0.02));
            CHECK(std::abs(m.u22) == doctest::Approx(std::abs(a.u22)).epsilon(0.02));
            if (kappa != 0.0)
                CHECK(std::abs(m.u12) == doctest::Approx(std::abs(a.u12)).epsilon(0.02));
            else
                CHECK(std::abs(m.u12) < 0.02 * std::abs(m.u11));
            CHECK(micro.bath_leak_row1(t) == doctest::Approx(bath_leak_row1(a)).epsilon(0.02));
        }
    }
}

TEST_CASE("short-time decay is quadratic") {
    // Before the bath correlation time the population loss grows as
    // Σ|λ1k|² t² = γ11 W t² / 2π rather than γ11 t.
    const PhysicalConfig cfg = fig1_config();
    const MicroBath micro = make_micro(cfg);
    const double t = 0.01 / default_width;
    const double loss = 1.0 - std::norm(micro.extract_mixing(t).u11);
    CHECK(loss / (cfg.gamma11 * default_width * t * t / two_pi) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(loss < 0.1 * cfg.gamma11 * t);
}

TEST_CASE("cat coherence") {
    const MicroBath micro = make_micro(fig1_config(0.0));
    CHECK(std::abs(micro.cat_coherence(1.5, 0.0) - 1.0) < 1e-12);
    const double t = std::log(2.0) / 1000.0;
    CHECK(std::abs(micro.cat_coherence(1.0, t)) == doctest::Approx(std::exp(-1.0)).epsilon(0.02));

    const MicroBath mixed = make_micro(fig1_config(1.0));
    for (double t2 : {0.5e-3, 2e-3}) {
        const cplx z = mixed.cat_coherence(2.0, t2);
        const cplx za = decoherence_factor(mixing_coefficients(drift_constants(fig1_config(1.0)), t2), 2.0);
        CHECK(std::abs(z) == doctest::Approx(std::abs(za)).epsilon(0.02));
    }
}

TEST_CASE("micro fidelity") {
    const MicroBath micro = make_micro(fig1_config(1.0));
    for (double a : {0.5, 1.0, 2.0}) CHECK(micro.micro_fidelity(a, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    const DriftConstants dc = drift_constants(fig1_config(1.0));
    for (double t : {0.5e-3, 1e-3, 3e-3})
        for (double a : {0.5, 1.0, 1.5, 2.0}) {
            const double f = micro.micro_fidelity(a, t);
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
            CHECK(std::abs(f - fidelity_scs(mixing_coefficients(dc, t), a)) < 0.02);
        }
}

TEST_CASE("long-time fidelity approaches the vacuum overlap") {
    const double limit = 2.0 * std::exp(-1.0) / (1.0 + std::exp(-2.0));
    const MicroBath micro = make_micro(fig1_config(0.0), 2000, two_pi * 2e4);
    CHECK(micro.micro_fidelity(1.0, 30e-3) == doctest::Approx(limit).epsilon(0.02));
}
