#pragma once

#include <array>
#include <string>

#include "minsurf/chart.hpp"
#include "minsurf/exact.hpp"
#include "minsurf/types.hpp"

namespace minsurf::families {

struct FamilyError : MinsurfError {
    using MinsurfError::MinsurfError;
};

/// Coefficient vectors of the degree-6 harmonic chart
///   r(u,v) = a (u^6-15u^4v^2+15u^2v^4-v^6) + b (3u^5v-10u^3v^3+3uv^5)
///          + c (u^5-10u^3v^2+5uv^4) + d (v^5-10u^2v^3+5u^4v)
///          + e (u^4-6u^2v^2+v^4) + f uv(u^2-v^2) + g u(u^2-3v^2) + h v(v^2-3u^2)
///          + i (u^2-v^2) + j uv + k u + l v + m.
/// Components are kept exact (rationals and radicals) so the minimality
/// system below can certify exact zeros.
struct Degree6Coeffs {
    exact::Vec3 a, b, c, d, e, f, g, h, i, j, k, l, m;

    static constexpr std::array<const char*, 13> names = {"a", "b", "c", "d", "e", "f", "g",
                                                          "h", "i", "j", "k", "l", "m"};
    exact::Vec3& by_index(int idx);
    const exact::Vec3& by_index(int idx) const;
    Eigen::Matrix<Real, 13, 3> to_real() const;
    bool all_zero() const;
};

/// Residuals of the minimality system: 22 equations, left minus right.
struct SystemResidual {
    std::array<exact::Scalar, 22> exact;
    Eigen::Matrix<Real, 22, 1> values() const;
    bool all_exact_zero() const;
    Real max_abs() const;
};

SystemResidual check_system(const Degree6Coeffs& coeffs);

/// Exact polynomial chart (provenance polynomial_family, exact jet).
Chart degree6_chart(const Degree6Coeffs& coeffs);

// Shape-parameter constructors. The Z components carry the radicals
// sqrt(3/2) sqrt(|a i| - a i) and -2 sqrt(6) sqrt(|a i| + a i).
Degree6Coeffs r1_coeffs(Real a1, Real i1);
Degree6Coeffs r2_coeffs(Real a2, Real i2);
Degree6Coeffs assoc_coeffs(Real a1, Real i1, Real t);  // r1[a1,i1] cos t + r2[-a1,i1] sin t
Degree6Coeffs s_coeffs(Real a1, Real a2, Real c3, Real d3);

Chart r1(Real a1, Real i1);
Chart r2(Real a2, Real i2);
Chart assoc_family(Real a1, Real i1, Real t);
Chart s_family(Real a1, Real a2, Real c3, Real d3);
Chart s1(Real a1, Real c3);  // s[a1, 0, c3, 0]
Chart s2(Real a2, Real d3);  // s[0, a2, 0, d3]

std::string coeffs_to_json(const Degree6Coeffs& coeffs);
Degree6Coeffs coeffs_from_json(const std::string& text);

}  // namespace minsurf::families
