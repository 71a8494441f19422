#pragma once

#include <vector>

#include "minsurf/analytic.hpp"
#include "minsurf/chart.hpp"
#include "minsurf/types.hpp"

namespace minsurf {

/// A pair of holomorphic generators (f, g) plus the integration base point.
/// The generated isotropic curve is
///   Psi(z) = int_{z0}^{z} ( f(1-g^2)/2, i f(1+g^2)/2, f g ) dz.
struct WeierstrassPair {
    analytic::Expr f, g;
    Complex z0{0, 0};
};

struct PairError : MinsurfError {
    using MinsurfError::MinsurfError;
};

/// Validating constructor: rejects z0 on a pole of f, g or g', an
/// identically-zero f, and a constant g (the generated surface would be
/// planar/degenerate). Aggregate initialization skips these checks.
WeierstrassPair make_weierstrass_pair(analytic::Expr f, analytic::Expr g, Complex z0 = Complex(0, 0));

CVec3 curve_derivative(const WeierstrassPair& p, Complex z);
CVec3 curve_second_derivative(const WeierstrassPair& p, Complex z);

/// Psi(z) by adaptive quadrature on the straight segment [z0, z].
CVec3 integrate_curve(const WeierstrassPair& p, Complex z, Real abstol = 1e-12);

struct MinimalCurve {
    std::function<CVec3(Complex)> psi;
    std::function<CVec3(Complex)> dpsi;
};
MinimalCurve minimal_curve(const WeierstrassPair& p);

Chart chart_real(const WeierstrassPair& p);
Chart chart_imag(const WeierstrassPair& p);
Chart chart_assoc(const WeierstrassPair& p, Real t);

struct Metric {
    Real E, F, G;
};

/// First fundamental form in closed form: E = G = |f|^2 (1+|g|^2)^2 / 4, F = 0.
Metric metric_closed(const WeierstrassPair& p, Complex z);

/// Normal curvature in closed form: nu = 4|g'| / (|f| (1+|g|^2)^2).
/// Throws when f(z) = 0 (nu unbounded there).
Real nu_closed(const WeierstrassPair& p, Complex z);

/// The pair (f = -1/g', g): its real part is parametrized in canonical
/// principal parameters by construction.
WeierstrassPair canonical_generator(analytic::Expr g, Complex z0);

struct ExtractedPair {
    WeierstrassPair pair;
    Real fit_residual;  // relative to the sampled scale
};

/// Recovers (f, g) from a minimal isothermal chart via
///   f = phi_1 - i phi_2,  g = phi_3 / (phi_1 - i phi_2),
/// where (phi_1, phi_2, phi_3) = x_u - i x_v, fitted as polynomials on a
/// ring of samples. degree < 0 picks chart.poly_degree - 1 (or 7).
ExtractedPair extract_pair(const Chart& c, int degree = -1, Real sample_radius = 1.0);

/// Least-squares polynomial fit of fn on a ring |z - center| = radius.
std::vector<Complex> fit_polynomial(const std::function<Complex(Complex)>& fn, int degree,
                                    Real radius, Complex center = Complex(0, 0),
                                    Real* residual = nullptr);

/// Scale f by a real factor; the generated surface scales by the same factor.
WeierstrassPair scale_pair(const WeierstrassPair& p, Real lambda);

}  // namespace minsurf
