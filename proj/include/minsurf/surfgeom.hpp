#pragma once

#include <string>
#include <vector>

#include "minsurf/chart.hpp"
#include "minsurf/types.hpp"

namespace minsurf {

struct GeometryError : MinsurfError {
    using MinsurfError::MinsurfError;
};

struct FundamentalForms {
    Real E, F, G, L, M, N;
};

struct CurvatureSample {
    Real K = 0, H = 0, nu = 0;
    bool nu_defined = false;  // false when K > 0 beyond round-off
    bool nu_clamped = false;  // K slightly positive, clamped to nu = 0
};

/// Fundamental forms at (u, v): exact jet when the chart provides one,
/// otherwise 4th-order central differences with step h.
FundamentalForms fundamental_forms(const Chart& c, Real u, Real v, Real h,
                                   bool prefer_exact = true);

CurvatureSample curvature(const FundamentalForms& ff);

struct MinimalityReport {
    Real max_abs_H = 0;
    Real max_nu = 0;
    Real residual = 0;      // max |H| / max nu
    int degenerate_nodes = 0;  // skipped (|xu x xv| ~ 0, e.g. a branch point of the chart)
    bool pass = false;
};

struct IsothermalReport {
    Real max_eg = 0;  // max |E-G| / (E+G)
    Real max_f = 0;   // max |F| / (E+G)
    int degenerate_nodes = 0;
    bool pass = false;
};

/// h < 0 picks the default step 1e-4 * grid diameter.
MinimalityReport check_minimal(const Chart& c, const GridSpec& grid, Real tol = 1e-8, Real h = -1,
                               bool prefer_exact = true);
IsothermalReport check_isothermal(const Chart& c, const GridSpec& grid, Real tol = 1e-8, Real h = -1,
                                  bool prefer_exact = true);

using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// max over interior nodes of |Laplacian(ln nu) + 2 nu| on a uniform grid
/// with spacing h; the Laplacian uses the 5-point-per-axis 4th-order stencil.
/// With a mask, only nodes whose full stencil is masked-in are scored.
Real canonical_pde_residual(const Eigen::ArrayXXd& nu, Real h, const BoolGrid* mask = nullptr);

struct CurvatureGridRow {
    Real u, v, E, F, G, K, H, nu;
};

std::vector<CurvatureGridRow> curvature_grid(const Chart& c, const GridSpec& grid, Real h = -1,
                                             bool prefer_exact = true);
std::string curvature_csv(const std::vector<CurvatureGridRow>& rows);

}  // namespace minsurf
