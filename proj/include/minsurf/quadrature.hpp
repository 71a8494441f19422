#pragma once

#include <array>
#include <cmath>

#include "minsurf/types.hpp"

namespace minsurf::quad {

struct QuadratureError : MinsurfError {
    enum class Kind { pole_on_path, no_convergence };
    QuadratureError(Kind k, const std::string& what) : MinsurfError(what), kind(k) {}
    Kind kind;
};

namespace detail {

// 15-point Kronrod / 7-point Gauss pair on [-1, 1] (positive half).
inline constexpr std::array<Real, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<Real, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<Real, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15(F&& f, Real a, Real b, CVec3& kronrod, Real& err) {
    const Real mid = 0.5 * (a + b), half = 0.5 * (b - a);
    CVec3 fv[15];
    // nodes ordered: -x0..-x6, 0, x6..x0
    for (int i = 0; i < 7; ++i) fv[i] = f(mid - half * kXgk[i]);
    fv[7] = f(mid);
    for (int i = 0; i < 7; ++i) fv[14 - i] = f(mid + half * kXgk[i]);

    CVec3 resk = CVec3::Zero(), resg = CVec3::Zero();
    for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
    resk += kWgk[7] * fv[7];
    // Gauss nodes are the odd Kronrod indices
    for (int i = 0; i < 3; ++i) resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    resg += kWg[3] * fv[7];

    kronrod = half * resk;
    err = (half * (resk - resg)).cwiseAbs().sum();
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f along the straight segment
/// [z0, z1]; f maps Complex -> CVec3. Absolute tolerance per component,
/// allocated proportionally to sub-segment length.
template <class F>
CVec3 integrate_segment(F&& f, Complex z0, Complex z1, Real abstol, int max_depth = 20,
                        Real* err_out = nullptr) {
    const Complex dz = z1 - z0;
    auto g = [&](Real s) -> CVec3 { return f(z0 + s * dz) * dz; };

    CVec3 total = CVec3::Zero();
    Real total_err = 0;
    auto rec = [&](auto&& self, Real a, Real b, int depth) -> void {
        CVec3 val;
        Real err;
        detail::gk15(g, a, b, val, err);
        if (err <= abstol * (b - a) || depth >= max_depth) {
            if (err > abstol * (b - a))
                throw QuadratureError(QuadratureError::Kind::no_convergence,
                                      "quadrature failed to converge (max subdivision depth)");
            total += val;
            total_err += err;
            return;
        }
        const Real m = 0.5 * (a + b);
        self(self, a, m, depth + 1);
        self(self, m, b, depth + 1);
    };
    rec(rec, 0.0, 1.0, 0);
    if (err_out) *err_out = total_err;
    return total;
}

}  // namespace minsurf::quad
