#include "minsurf/canonical.hpp"

#include <cmath>

#include <json.hpp>

namespace minsurf {

using analytic::Expr;
using analytic::JetValue;

// ---------------------------------------------------------------------------
// Domain

bool WDomain::contains(Complex w, Real slack) const {
    const Complex d = w - center;
    const Real r = std::abs(d);
    if (r < rmin - slack || r > rmax + slack) return false;
    if (width >= 2 * kPi - 1e-12) return true;
    if (r == 0) return rmin == 0;
    Real a = std::arg(d) - amin;
    a -= 2 * kPi * std::floor(a / (2 * kPi));  // wrap into [0, 2 pi)
    const Real aslack = r > 0 ? slack / r : 0;
    return a <= width + aslack;
}

WDomain WDomain::disk(Complex c, Real r) { return WDomain{c, 0, r, -kPi, 2 * kPi}; }

WDomain WDomain::annulus_sector(Complex c, Real r0, Real r1, Real a0, Real a1) {
    if (r1 <= r0 || a1 <= a0) throw CanonicalError("annulus_sector: empty domain");
    return WDomain{c, r0, r1, a0, a1 - a0};
}

// ---------------------------------------------------------------------------
// Ray integration of (z')^2 = -1/(f g')

namespace {

struct RayState {
    Complex w, z;
    Complex dir;  // current branch of dz/dw
};

Complex branch_root(const WeierstrassPair& p, Complex z, Complex ref) {
    const JetValue f = analytic::eval(p.f, z);
    const JetValue g = analytic::eval(p.g, z);
    const Complex q = f.value * g.derivative;
    const Real aq = std::abs(q);
    if (aq < 1e-30 || !std::isfinite(aq))
        throw CanonicalError("canonical transform: singularity on ray (f g' -> 0)");
    Complex r = std::sqrt(Complex(-1, 0) / q);
    if ((r * std::conj(ref)).real() < 0) r = -r;
    return r;
}

// Dormand-Prince 5(4) along the straight segment state.w -> w1.
void continue_ray(const WeierstrassPair& p, RayState& st, Complex w1, Real tol,
                  std::vector<ZTrajectoryPoint>* record) {
    const Complex dw = w1 - st.w;
    const Real len = std::abs(dw);
    if (len == 0) return;

    static constexpr Real a21 = 1.0 / 5;
    static constexpr Real a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr Real a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr Real a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
    static constexpr Real a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr Real b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr Real e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                          e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

    auto rhs = [&](Complex z, Complex ref) { return dw * branch_root(p, z, ref); };

    Real s = 0, h = 0.1;
    const Complex w_start = st.w;
    if (record) record->push_back({0, st.w, st.z});
    int steps = 0;
    while (s < 1) {
        if (++steps > 100000)
            throw CanonicalError("canonical transform: step limit exceeded on ray");
        h = std::min(h, 1 - s);
        const Complex ref = st.dir;
        const Complex k1 = rhs(st.z, ref);
        const Complex k2 = rhs(st.z + h * (a21 * k1), ref);
        const Complex k3 = rhs(st.z + h * (a31 * k1 + a32 * k2), ref);
        const Complex k4 = rhs(st.z + h * (a41 * k1 + a42 * k2 + a43 * k3), ref);
        const Complex k5 = rhs(st.z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), ref);
        const Complex k6 =
            rhs(st.z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), ref);
        const Complex z5 = st.z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Complex k7 = rhs(z5, ref);
        const Complex z4 =
            st.z + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const Real err = std::abs(z5 - z4);
        const Real scale = tol * (1 + std::abs(st.z));
        if (err <= scale) {
            // keep the branch turning slowly; a >60 degree turn means the
            // step outran the continuity tracking
            const Complex dir_new = branch_root(p, z5, ref);
            if ((dir_new * std::conj(ref)).real() <
                0.5 * std::abs(dir_new) * std::abs(ref)) {
                h *= 0.25;
                if (h < 1e-14)
                    throw CanonicalError("canonical transform: step underflow at a branch turn");
                continue;
            }
            s += h;
            st.z = z5;
            st.w = w_start + s * dw;
            st.dir = dir_new;
            if (record) record->push_back({s, st.w, st.z});
        }
        const Real grow = err > 0 ? 0.9 * std::pow(scale / err, 0.2) : 5.0;
        h *= std::min(Real(5), std::max(Real(0.2), grow));
        if (h < 1e-14) throw CanonicalError("canonical transform: step size underflow");
    }
    st.w = w1;
}

RayState anchor_state(const WeierstrassPair& p, Complex w0, Complex z0, int sign) {
    RayState st{w0, z0, Complex(1, 0)};
    const JetValue f = analytic::eval(p.f, z0);
    const JetValue g = analytic::eval(p.g, z0);
    const Complex q = f.value * g.derivative;
    if (std::abs(q) < 1e-30)
        throw CanonicalError("canonical transform: f g' vanishes at the anchor");
    st.dir = Real(sign) * std::sqrt(Complex(-1, 0) / q);
    return st;
}

}  // namespace

CanonicalForm transform_to_canonical(const WeierstrassPair& p, const WDomain& domain, Complex z0,
                                     const TransformOptions& opt) {
    int sign = opt.initial_sign;
    if (opt.align_dz) {
        const RayState probe = anchor_state(p, opt.w0, z0, +1);
        sign = (probe.dir * std::conj(*opt.align_dz)).real() >= 0 ? +1 : -1;
    }
    anchor_state(p, opt.w0, z0, sign);  // validates the anchor

    CanonicalForm cf;
    cf.domain = domain;
    cf.w0 = opt.w0;
    cf.z0 = z0;
    cf.initial_sign = sign;
    cf.source = p;
    cf.ode_tol = opt.ode_tol;
    const Real tol = opt.ode_tol;
    const Complex w0 = opt.w0;

    cf.z_of_w = [p, w0, z0, sign, tol](Complex w) {
        RayState st = anchor_state(p, w0, z0, sign);
        continue_ray(p, st, w, tol, nullptr);
        return st.z;
    };
    cf.gtilde = [p, w0, z0, sign, tol](Complex w) {
        RayState st = anchor_state(p, w0, z0, sign);
        continue_ray(p, st, w, tol, nullptr);
        const JetValue g = analytic::eval(p.g, st.z);
        const Complex dz = branch_root(p, st.z, st.dir);
        return JetValue{g.value, g.derivative * dz};
    };
    cf.ray_trajectory = [p, w0, z0, sign, tol](Complex w) {
        std::vector<ZTrajectoryPoint> record;
        RayState st = anchor_state(p, w0, z0, sign);
        continue_ray(p, st, w, tol, &record);
        return record;
    };
    return cf;
}

// ---------------------------------------------------------------------------
// Canonical normal curvature

Real canonical_nu_at(const CanonicalForm& cf, Complex w) {
    const JetValue g = cf.gtilde(w);
    const Real m = std::norm(g.value);
    const Real nu = 4 * std::norm(g.derivative) / ((1 + m) * (1 + m));
    if (!std::isfinite(nu)) throw CanonicalError("canonical nu: non-finite value");
    return nu;
}

namespace {

NuField build_nu_field(const CanonicalForm& cf, Real h, int n) {
    NuField field;
    field.domain = cf.domain;
    const Real cx = cf.domain.center.real(), cy = cf.domain.center.imag();
    const Real R = cf.domain.rmax;
    if (n > 0) {
        field.h = 2 * R / (n - 1);
        field.nx = field.ny = n;
    } else {
        field.h = h;
        field.nx = field.ny = static_cast<int>(std::floor(2 * R / h)) + 1;
    }
    field.x0 = cx - R;
    field.y0 = cy - R;
    field.values.setZero(field.nx, field.ny);
    field.mask.setConstant(field.nx, field.ny, false);
    field.eval = [keep = cf](Complex w) { return canonical_nu_at(keep, w); };
    field.form = cf;
    for (int ix = 0; ix < field.nx; ++ix) {
        for (int iy = 0; iy < field.ny; ++iy) {
            const Complex w = field.node(ix, iy);
            if (!cf.domain.contains(w, 1e-12)) continue;
            try {
                field.values(ix, iy) = canonical_nu_at(cf, w);
                field.mask(ix, iy) = true;
            } catch (const MinsurfError&) {
                // singular ray or evaluation failure: node stays masked out
            }
        }
    }
    return field;
}

}  // namespace

NuField canonical_nu(const CanonicalForm& cf, int n) { return build_nu_field(cf, 0, n); }

NuField canonical_nu_spacing(const CanonicalForm& cf, Real h) { return build_nu_field(cf, h, 0); }

NuProbe::NuProbe(const CanonicalForm& cf) : cf_(&cf) {}

Real NuProbe::operator()(int slot, Complex w) {
    if (cf_->closed_form || !cf_->source) return canonical_nu_at(*cf_, w);
    if (slot >= static_cast<int>(slots_.size())) slots_.resize(slot + 1);
    Slot& s = slots_[slot];
    const WeierstrassPair& p = *cf_->source;

    RayState st;
    const Real reach = std::max(cf_->domain.rmax, s.valid ? std::abs(s.w - cf_->w0) : Real(0));
    if (s.valid && std::abs(w - s.w) <= 0.3 * reach)
        st = RayState{s.w, s.z, s.dir};
    else
        st = anchor_state(p, cf_->w0, cf_->z0, cf_->initial_sign);
    try {
        continue_ray(p, st, w, cf_->ode_tol, nullptr);
    } catch (const MinsurfError&) {
        s.valid = false;
        throw;
    }
    s = Slot{true, w, st.z, st.dir};

    const JetValue g = analytic::eval(p.g, st.z);
    const Complex dz = branch_root(p, st.z, st.dir);
    const Complex dgt = g.derivative * dz;
    const Real m = std::norm(g.value);
    const Real nu = 4 * std::norm(dgt) / ((1 + m) * (1 + m));
    if (!std::isfinite(nu)) throw CanonicalError("canonical nu: non-finite value");
    return nu;
}

Real nu_field_pde_residual(const NuField& field) {
    return canonical_pde_residual(field.values, field.h, &field.mask);
}

// ---------------------------------------------------------------------------
// Closed forms for the polynomial families

CanonicalForm canonical_from_expression(Expr gtilde, const WDomain& domain) {
    CanonicalForm cf;
    cf.closed_form = true;
    cf.gtilde_expr = gtilde;
    cf.domain = domain;
    cf.gtilde = [gtilde](Complex w) { return analytic::eval(gtilde, w); };
    return cf;
}

CanonicalForm closed_form_r_family(Real a1, Real i1, Real t) {
    const Real p = a1 * i1;
    if (p <= 0) throw CanonicalError("closed_form_r_family requires a1 * i1 > 0");
    // g~(w) = (-1 + i) 3^{1/4} a1 e^{i t/2} w / (2 (a1 i1)^{3/4})
    const Complex coef = Complex(-1, 1) * std::pow(3.0, 0.25) * a1 *
                         std::exp(Complex(0, t / 2)) / (2 * std::pow(p, 0.75));
    const Real kappa = std::abs(coef);
    const WDomain domain = WDomain::disk(Complex(0, 0), 1 / kappa);
    Expr w = analytic::variable("w");
    CanonicalForm cf = canonical_from_expression(analytic::mul(analytic::constant(coef), w), domain);
    // z(w) = sqrt((1+i) e^{i t/2} w) / (sqrt 2 (3 a1 i1)^{1/8}), principal root
    const Complex zc = Complex(1, 1) * std::exp(Complex(0, t / 2));
    const Real zd = std::sqrt(2.0) * std::pow(3 * p, 0.125);
    cf.z_of_w = [zc, zd](Complex ww) { return std::sqrt(zc * ww) / zd; };
    return cf;
}

CanonicalForm closed_form_s_family(Real a1, Real a2, Real c3, Real d3) {
    if (a1 == 0 && a2 == 0) throw CanonicalError("closed_form_s_family requires a1^2 + a2^2 > 0");
    if (c3 == 0 && d3 == 0) throw CanonicalError("closed_form_s_family requires c3^2 + d3^2 > 0");
    const Complex cd(c3, -d3);                       // c3 - i d3
    const Complex aa(a1, a2);                        // a1 + i a2
    // g~(w) = -6 * 2^{3/5} (a1 + i a2) / (5^{4/5} (c3 - i d3)^{6/5}) * (-w^2)^{1/5}
    const Complex coef = -Real(6) * std::pow(2.0, 0.6) * aa /
                         (std::pow(5.0, 0.8) * std::pow(cd, Real(1.2)));
    // natural radius: |g~| = 1 where 36 * 2^{6/5} rho^2 |w|^{4/5} = 1
    const Real rho2 = std::norm(coef);
    const Real wstar = std::pow(1 / rho2, 1.25);
    const WDomain domain = WDomain::annulus_sector(Complex(0, 0), 1e-3 * wstar, wstar,
                                                   0.15 * kPi, 0.85 * kPi);
    Expr w = analytic::variable("w");
    Expr gt = analytic::mul(analytic::constant(coef),
                            analytic::pow_rational(analytic::neg(analytic::pow_int(w, 2)), 1, 5));
    CanonicalForm cf = canonical_from_expression(std::move(gt), domain);
    // z(w) = 5^{1/5} (-w^2)^{1/5} / (2^{2/5} (c3 - i d3)^{1/5})
    const Complex zden = std::pow(2.0, 0.4) * std::pow(cd, Real(0.2));
    cf.z_of_w = [zden](Complex ww) {
        return std::pow(5.0, 0.2) * std::pow(-ww * ww, Real(0.2)) / zden;
    };
    return cf;
}

CanonicalForm apply_parameter_gauge(const CanonicalForm& cf, int eps, Complex c) {
    if (eps != 1 && eps != -1) throw CanonicalError("parameter gauge needs eps = +/-1");
    CanonicalForm out = cf;
    const Real e = eps;
    out.gtilde = [inner = cf.gtilde, e, c](Complex w) {
        JetValue j = inner(e * w + c);
        j.derivative *= e;
        return j;
    };
    if (cf.z_of_w) out.z_of_w = [inner = cf.z_of_w, e, c](Complex w) { return inner(e * w + c); };
    out.ray_trajectory = nullptr;
    // preimage of the domain under w -> eps w + c
    out.domain.center = (cf.domain.center - c) * e;
    if (eps == -1) out.domain.amin = cf.domain.amin + kPi;
    out.w0 = (cf.w0 - c) * e;
    return out;
}

std::string canonical_form_to_json(const CanonicalForm& cf, int rays, int samples_per_ray) {
    nlohmann::json j;
    j["anchor"] = {{"w0", {cf.w0.real(), cf.w0.imag()}}, {"z0", {cf.z0.real(), cf.z0.imag()}}};
    j["initial_sign"] = cf.initial_sign;
    j["closed_form"] = cf.closed_form;
    if (cf.gtilde_expr) j["gtilde"] = analytic::print(cf.gtilde_expr);
    j["domain"] = {{"center", {cf.domain.center.real(), cf.domain.center.imag()}},
                   {"rmin", cf.domain.rmin},
                   {"rmax", cf.domain.rmax},
                   {"amin", cf.domain.amin},
                   {"width", cf.domain.width}};
    nlohmann::json jr = nlohmann::json::array();
    for (int k = 0; k < rays; ++k) {
        const Real ang = cf.domain.amin + cf.domain.width * (k + 0.5) / rays;
        const Complex target =
            cf.domain.center + Real(0.9) * cf.domain.rmax * std::exp(Complex(0, ang));
        nlohmann::json samples = nlohmann::json::array();
        try {
            if (cf.ray_trajectory) {
                for (const auto& pt : cf.ray_trajectory(target))
                    samples.push_back({{"s", pt.s},
                                       {"w", {pt.w.real(), pt.w.imag()}},
                                       {"z", {pt.z.real(), pt.z.imag()}}});
            } else if (cf.z_of_w) {
                for (int m = 0; m < samples_per_ray; ++m) {
                    const Real s = static_cast<Real>(m) / (samples_per_ray - 1);
                    const Complex w = cf.w0 + s * (target - cf.w0);
                    if (!cf.domain.contains(w, 1e-12)) continue;
                    const Complex z = cf.z_of_w(w);
                    samples.push_back(
                        {{"s", s}, {"w", {w.real(), w.imag()}}, {"z", {z.real(), z.imag()}}});
                }
            }
        } catch (const MinsurfError&) {
            continue;  // rays through singular points are skipped
        }
        jr.push_back({{"angle", ang}, {"samples", samples}});
    }
    j["rays"] = jr;
    return j.dump(2);
}

}  // namespace minsurf
