#pragma once

#include <Eigen/Core>

#include "bimodal/model.hpp"

namespace bimodal {

/// 2×2 mode-mixing propagator at time t:
///   a1(t) = u11 a1(0) + u12 a2(0) + Σk ϑ1k bk(0)
///   a2(t) = u21 a1(0) + u22 a2(0) + Σk ϑ2k bk(0)
struct MixingMatrix {
    double t = 0.0;
    cplx u11{1.0, 0.0};
    cplx u12{};
    cplx u21{};
    cplx u22{1.0, 0.0};

    Eigen::Matrix2cd matrix() const;
    static MixingMatrix from_matrix(double t, const Eigen::Matrix2cd& u);
};

/// U(t) = exp(−M t) via the Cayley–Hamilton form of the 2×2 exponential.
/// Overflow-safe for large t; uses a sinh(x)/x series near degeneracy.
MixingMatrix mixing_coefficients(const DriftConstants& dc, double t);

/// Hyperbolic closed form with R = √((B−A)² + 4C²) and argument R·t/2.
/// Evaluates exp(−(A+B)t/2) directly, so moderate t only.
MixingMatrix mixing_closed_form(const DriftConstants& dc, double t);

/// Fraction of mode-1 excitation that has leaked into the reservoir:
/// L1 = 1 − |u11|² − |u12|² = Σk |ϑ1k|². Clamped to [0, 1].
double bath_leak_row1(const MixingMatrix& mix);

/// Thermal noise D(t) = Σk |ϑ1k|² n̄ for a flat occupation n̄, i.e. n̄·L1(t).
double thermal_noise_D(const MixingMatrix& mix, double nbar);

}  // namespace bimodal
