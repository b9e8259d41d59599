#include "bimodal/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bimodal/diagnostics.hpp"
#include "bimodal/errors.hpp"

namespace bimodal {
namespace {

constexpr double series_threshold = 1e-6;

// sinh(x)/x, even in x.
cplx sinhc(cplx x) {
    if (std::abs(x) < series_threshold) return 1.0 + x * x / 6.0;
    return std::sinh(x) / x;
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_inputs(const DriftConstants& dc, double t) {
    if (!finite(dc.A) || !finite(dc.B) || !finite(dc.C) || !std::isfinite(t))
        throw DomainError("mixing coefficients: non-finite input");
    if (t < 0.0) throw DomainError("mixing coefficients: negative time");
}

}  // namespace

Eigen::Matrix2cd MixingMatrix::matrix() const {
    Eigen::Matrix2cd u;
    u << u11, u12, u21, u22;
    return u;
}

MixingMatrix MixingMatrix::from_matrix(double t, const Eigen::Matrix2cd& u) {
    return MixingMatrix{t, u(0, 0), u(0, 1), u(1, 0), u(1, 1)};
}

MixingMatrix mixing_coefficients(const DriftConstants& dc, double t) {
    check_inputs(dc, t);
    const Eigen::Matrix2cd m = dc.drift_matrix();

    // M = s·I + N with N traceless, N² = q²·I, so
    // exp(−Mt) = e^{−st} [cosh(qt) I − t·sinhc(qt) N].
    const cplx s = 0.5 * (m(0, 0) + m(1, 1));
    Eigen::Matrix2cd n = m;
    n(0, 0) -= s;
    n(1, 1) -= s;
    const cplx q = std::sqrt(n(0, 0) * n(0, 0) + n(0, 1) * n(1, 0));
    const cplx qt = q * t;

    cplx c;   // e^{−st} cosh(qt)
    cplx sc;  // e^{−st} sinh(qt)/q
    if (std::abs(qt) < 0.5) {
        const cplx damp = std::exp(-s * t);
        c = damp * std::cosh(qt);
        sc = damp * t * sinhc(qt);
    } else {
        const cplx ep = std::exp((q - s) * t);
        const cplx em = std::exp((-q - s) * t);
        c = 0.5 * (ep + em);
        sc = (ep - em) / (2.0 * q);
    }

    Eigen::Matrix2cd u = -sc * n;
    u(0, 0) += c;
    u(1, 1) += c;
    return MixingMatrix::from_matrix(t, u);
}

MixingMatrix mixing_closed_form(const DriftConstants& dc, double t) {
    check_inputs(dc, t);
    const cplx A = dc.A;
    const cplx B = dc.B;
    const cplx C = dc.C;
    const cplx radical = std::sqrt((B - A) * (B - A) + 4.0 * C * C);
    const cplx half = 0.5 * radical * t;
    const cplx envelope = std::exp(-(A + B) / 2.0 * t);
    const cplx ch = std::cosh(half);
    // sinh(R t/2)/R = (t/2)·sinhc(R t/2); finite as R → 0.
    const cplx sh_over_r = 0.5 * t * sinhc(half);

    MixingMatrix mix;
    mix.t = t;
    mix.u11 = envelope * ((B - A) * sh_over_r + ch);
    mix.u12 = envelope * (2.0 * C * sh_over_r);
    // Swap A ↔ B for the second mode; the off-diagonal is symmetric.
    mix.u22 = envelope * ((A - B) * sh_over_r + ch);
    mix.u21 = mix.u12;
    return mix;
}

double bath_leak_row1(const MixingMatrix& mix) {
    const double leak = 1.0 - std::norm(mix.u11) - std::norm(mix.u12);
    if (leak < -1e-9 || leak > 1.0 + 1e-9) {
        std::ostringstream msg;
        msg << "row contraction violated at t=" << mix.t << " (1-|u11|^2-|u12|^2 = " << leak << ")";
        diag::warn(msg.str());
    }
    return std::clamp(leak, 0.0, 1.0);
}

double thermal_noise_D(const MixingMatrix& mix, double nbar) {
    if (!(nbar >= 0.0)) throw DomainError("thermal_noise_D: negative nbar");
    if (nbar == 0.0) return 0.0;
    return nbar * bath_leak_row1(mix);
}

}  // namespace bimodal
