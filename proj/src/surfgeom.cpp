#include "minsurf/surfgeom.hpp"

#include <cmath>
#include <cstdio>

namespace minsurf {

FundamentalForms fundamental_forms(const Chart& c, Real u, Real v, Real h, bool prefer_exact) {
    const ChartJet j = chart_jet(c, u, v, h, prefer_exact);
    const Vec3 cross = j.xu.cross(j.xv);
    const Real cn = cross.norm();
    if (cn < 1e-12) throw GeometryError("fundamental_forms: degenerate point (|xu x xv| ~ 0)");
    const Vec3 n = cross / cn;
    return FundamentalForms{j.xu.dot(j.xu), j.xu.dot(j.xv), j.xv.dot(j.xv),
                            n.dot(j.xuu),  n.dot(j.xuv),  n.dot(j.xvv)};
}

CurvatureSample curvature(const FundamentalForms& ff) {
    const Real det = ff.E * ff.G - ff.F * ff.F;
    if (det <= 0) throw GeometryError("curvature: EG - F^2 <= 0");
    CurvatureSample s;
    s.K = (ff.L * ff.N - ff.M * ff.M) / det;
    s.H = (ff.E * ff.N - 2 * ff.F * ff.M + ff.G * ff.L) / (2 * det);
    if (s.K <= 0) {
        s.nu = std::sqrt(-s.K);
        s.nu_defined = true;
    } else if (s.K < 1e-14) {
        s.nu = 0;  // round-off above zero; normal curvature clamped
        s.nu_defined = true;
        s.nu_clamped = true;
    } else {
        s.nu = 0;
        s.nu_defined = false;
    }
    return s;
}

namespace {

Real default_step(const GridSpec& grid, Real h) { return h > 0 ? h : 1e-4 * grid.diameter(); }

}  // namespace

MinimalityReport check_minimal(const Chart& c, const GridSpec& grid, Real tol, Real h,
                               bool prefer_exact) {
    const Real step = default_step(grid, h);
    MinimalityReport rep;
    for (int iu = 0; iu < grid.nu; ++iu) {
        for (int iv = 0; iv < grid.nv; ++iv) {
            const Real u = grid.u0 + iu * grid.du(), v = grid.v0 + iv * grid.dv();
            CurvatureSample s;
            try {
                s = curvature(fundamental_forms(c, u, v, step, prefer_exact));
            } catch (const GeometryError&) {
                ++rep.degenerate_nodes;
                continue;
            }
            rep.max_abs_H = std::max(rep.max_abs_H, std::abs(s.H));
            rep.max_nu = std::max(rep.max_nu, s.nu);
        }
    }
    rep.residual = rep.max_abs_H / std::max(rep.max_nu, Real(1e-300));
    rep.pass = rep.residual <= tol;
    return rep;
}

IsothermalReport check_isothermal(const Chart& c, const GridSpec& grid, Real tol, Real h,
                                  bool prefer_exact) {
    const Real step = default_step(grid, h);
    IsothermalReport rep;
    for (int iu = 0; iu < grid.nu; ++iu) {
        for (int iv = 0; iv < grid.nv; ++iv) {
            const Real u = grid.u0 + iu * grid.du(), v = grid.v0 + iv * grid.dv();
            FundamentalForms ff;
            try {
                ff = fundamental_forms(c, u, v, step, prefer_exact);
            } catch (const GeometryError&) {
                ++rep.degenerate_nodes;
                continue;
            }
            const Real scale = ff.E + ff.G;
            rep.max_eg = std::max(rep.max_eg, std::abs(ff.E - ff.G) / scale);
            rep.max_f = std::max(rep.max_f, std::abs(ff.F) / scale);
        }
    }
    rep.pass = rep.max_eg <= tol && rep.max_f <= tol;
    return rep;
}

Real canonical_pde_residual(const Eigen::ArrayXXd& nu, Real h, const BoolGrid* mask) {
    const Eigen::Index nx = nu.rows(), ny = nu.cols();
    if (nx < 5 || ny < 5) throw GeometryError("canonical_pde_residual: grid too small");

    auto in_mask = [&](Eigen::Index i, Eigen::Index j) { return !mask || (*mask)(i, j); };

    Eigen::ArrayXXd lognu(nx, ny);
    for (Eigen::Index i = 0; i < nx; ++i)
        for (Eigen::Index j = 0; j < ny; ++j) {
            if (!in_mask(i, j)) continue;
            if (!(nu(i, j) > 0))
                throw GeometryError("canonical_pde_residual: nu <= 0 at a masked-in node");
            lognu(i, j) = std::log(nu(i, j));
        }

    Real worst = -1;
    const Real h2 = 12 * h * h;
    for (Eigen::Index i = 2; i < nx - 2; ++i) {
        for (Eigen::Index j = 2; j < ny - 2; ++j) {
            bool ok = true;
            for (int d = -2; d <= 2 && ok; ++d) ok = in_mask(i + d, j) && in_mask(i, j + d);
            if (!ok) continue;
            const Real lap =
                (-lognu(i + 2, j) + 16 * lognu(i + 1, j) - 30 * lognu(i, j) + 16 * lognu(i - 1, j) -
                 lognu(i - 2, j) - lognu(i, j + 2) + 16 * lognu(i, j + 1) - 30 * lognu(i, j) +
                 16 * lognu(i, j - 1) - lognu(i, j - 2)) /
                h2;
            worst = std::max(worst, std::abs(lap + 2 * nu(i, j)));
        }
    }
    if (worst < 0) throw GeometryError("canonical_pde_residual: no interior nodes to score");
    return worst;
}

std::vector<CurvatureGridRow> curvature_grid(const Chart& c, const GridSpec& grid, Real h,
                                             bool prefer_exact) {
    const Real step = default_step(grid, h);
    std::vector<CurvatureGridRow> rows;
    rows.reserve(static_cast<std::size_t>(grid.nu) * grid.nv);
    for (int iu = 0; iu < grid.nu; ++iu) {
        for (int iv = 0; iv < grid.nv; ++iv) {
            const Real u = grid.u0 + iu * grid.du(), v = grid.v0 + iv * grid.dv();
            const FundamentalForms ff = fundamental_forms(c, u, v, step, prefer_exact);
            const CurvatureSample s = curvature(ff);
            rows.push_back({u, v, ff.E, ff.F, ff.G, s.K, s.H, s.nu});
        }
    }
    return rows;
}

std::string curvature_csv(const std::vector<CurvatureGridRow>& rows) {
    std::string out = "u,v,E,F,G,K,H,nu\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.u,
                      r.v, r.E, r.F, r.G, r.K, r.H, r.nu);
        out += buf;
    }
    return out;
}

}  // namespace minsurf
