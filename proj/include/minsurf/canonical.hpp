#pragma once

#include <optional>
#include <vector>

#include "minsurf/analytic.hpp"
#include "minsurf/surfgeom.hpp"
#include "minsurf/weierstrass.hpp"

namespace minsurf {

struct CanonicalError : MinsurfError {
    using MinsurfError::MinsurfError;
};

/// Annulus sector about `center`: rmin <= |w - center| <= rmax and
/// arg(w - center) within [amin, amin + width]. A disk is rmin = 0,
/// width = 2 pi.
struct WDomain {
    Complex center{0, 0};
    Real rmin = 0, rmax = 1;
    Real amin = -kPi;
    Real width = 2 * kPi;

    bool contains(Complex w, Real slack = 0) const;
    static WDomain disk(Complex c, Real r);
    static WDomain annulus_sector(Complex c, Real r0, Real r1, Real a0, Real a1);
};

struct ZTrajectoryPoint {
    Real s;  // ray parameter in [0, 1]
    Complex w, z;
};

/// The canonical reparametrization of a Weierstrass-generated surface:
/// z(w) solves (z')^2 = -1/(f g') with z(w0) = z0, and the canonical
/// generator is g~(w) = g(z(w)). Numeric forms integrate a fresh ray
/// w0 -> w per evaluation (the domain is star-shaped about the anchor);
/// closed forms are expression-backed.
struct CanonicalForm {
    std::function<Complex(Complex)> z_of_w;
    std::function<analytic::JetValue(Complex)> gtilde;  // value and d g~ / dw
    WDomain domain;
    Complex w0{0, 0}, z0{0, 0};
    int initial_sign = +1;  // +1 principal square root at the anchor
    bool closed_form = false;
    analytic::Expr gtilde_expr;  // set for closed forms
    std::optional<WeierstrassPair> source;
    Real ode_tol = 1e-12;
    std::function<std::vector<ZTrajectoryPoint>(Complex)> ray_trajectory;
};

struct TransformOptions {
    Complex w0{0, 0};
    int initial_sign = +1;  // -1 flips the square-root branch at the anchor
    std::optional<Complex> align_dz;  // pick the sign whose z'(w0) aligns with this
    Real ode_tol = 1e-12;
};

CanonicalForm transform_to_canonical(const WeierstrassPair& p, const WDomain& domain, Complex z0,
                                     const TransformOptions& opt = {});

/// Canonical normal curvature nu(w) = 4 |g~'|^2 / (1 + |g~|^2)^2.
Real canonical_nu_at(const CanonicalForm& cf, Complex w);

struct NuField {
    Real x0 = 0, y0 = 0, h = 0;
    int nx = 0, ny = 0;
    Eigen::ArrayXXd values;
    BoolGrid mask;
    std::function<Real(Complex)> eval;  // exact evaluator (off-grid use)
    WDomain domain;
    std::optional<CanonicalForm> form;  // source form, when built from one
    Complex node(int ix, int iy) const { return Complex(x0 + ix * h, y0 + iy * h); }
};

/// Stateful nu evaluator for optimizers: per slot, the reparametrization
/// continues from the previously evaluated point instead of re-integrating
/// the whole ray from the anchor. Not thread-safe.
class NuProbe {
  public:
    explicit NuProbe(const CanonicalForm& cf);
    Real operator()(int slot, Complex w);

  private:
    const CanonicalForm* cf_;
    struct Slot {
        bool valid = false;
        Complex w, z, dir;
    };
    std::vector<Slot> slots_;
};

NuField canonical_nu(const CanonicalForm& cf, int n);             // n x n over the bounding box
NuField canonical_nu_spacing(const CanonicalForm& cf, Real h);    // fixed grid spacing

Real nu_field_pde_residual(const NuField& field);

/// Closed-form canonical data of the first polynomial family (parameters
/// a1, i1 with a1 i1 > 0, associated angle t): g~(w) is linear in w.
CanonicalForm closed_form_r_family(Real a1, Real i1, Real t);

/// Closed-form canonical data of the second polynomial family:
/// g~(w) = C (-w^2)^(1/5) on a sector avoiding the branch point w = 0.
CanonicalForm closed_form_s_family(Real a1, Real a2, Real c3, Real d3);

/// Expression-backed canonical form (oracles, synthetic gauge tests).
CanonicalForm canonical_from_expression(analytic::Expr gtilde, const WDomain& domain);

/// The residual parameter freedom w -> eps w + c applied to a form.
CanonicalForm apply_parameter_gauge(const CanonicalForm& cf, int eps, Complex c);

std::string canonical_form_to_json(const CanonicalForm& cf, int rays = 8, int samples_per_ray = 17);

}  // namespace minsurf
