#pragma once

#include <functional>

#include "minsurf/types.hpp"

namespace minsurf {

struct ChartJet {
    Vec3 x = Vec3::Zero();
    Vec3 xu = Vec3::Zero(), xv = Vec3::Zero();
    Vec3 xuu = Vec3::Zero(), xuv = Vec3::Zero(), xvv = Vec3::Zero();
};

/// A sampled immersion (u,v) -> R^3. `jet` is optional; when present it
/// returns exact derivatives (polynomial and Weierstrass-backed charts).
struct Chart {
    enum class Provenance {
        weierstrass_real,
        weierstrass_imag,
        associated,
        polynomial_family,
        external,
    };
    Provenance provenance = Provenance::external;
    Real assoc_angle = 0;  // associated-family parameter, when applicable
    int poly_degree = 0;   // > 0 for polynomial charts
    std::function<Vec3(Real, Real)> position;
    std::function<ChartJet(Real, Real)> jet;
};

struct GridSpec {
    Real u0 = -1, u1 = 1, v0 = -1, v1 = 1;
    int nu = 21, nv = 21;
    Real du() const { return (u1 - u0) / (nu - 1); }
    Real dv() const { return (v1 - v0) / (nv - 1); }
    Real diameter() const { return std::hypot(u1 - u0, v1 - v0); }
};

/// Chart derivatives: the exact jet when available (and wanted), otherwise
/// 4th-order central differences of `position` with step h.
ChartJet chart_jet(const Chart& c, Real u, Real v, Real h, bool prefer_exact = true);

}  // namespace minsurf
