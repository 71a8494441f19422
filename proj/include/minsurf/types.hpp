#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace minsurf {

using Real = double;
using Complex = std::complex<Real>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using CVec3 = Eigen::Vector3cd;

inline constexpr Real kPi = 3.14159265358979323846;

/// Numeric knobs shared across the library. Every threshold used by a
/// check or a decision is collected here so the CLI can override them.
struct Tolerances {
    Real quadrature_abs = 1e-12;   // contour integration, absolute per component
    Real ode = 1e-12;              // reparametrization ODE, local error per step
    Real branch_point = 1e-8;      // |base| below which a fractional power is refused
    Real minimal = 1e-8;           // max |H| / max nu over a grid
    Real isothermal = 1e-8;        // max(|E-G|, |F|) / (E+G) over a grid
    Real system = 1e-12;           // degree-6 coefficient system residuals
    Real pde_residual = 1e-5;      // canonical PDE certificate
    Real curvature_match = 1e-6;   // normalized nu-field match residual
    Real cloud_rms = 1e-6;         // rigid alignment rms, relative to cloud diameter
    Real mobius_fit = 1e-6;        // generator gauge fit residual
    Real fit_residual = 1e-8;      // polynomial extraction residual
};

struct MinsurfError : std::runtime_error {
    explicit MinsurfError(const std::string& what) : std::runtime_error(what) {}
};

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline void require_finite(Complex z, const char* where) {
    if (!is_finite(z)) throw MinsurfError(std::string(where) + ": non-finite value");
}

}  // namespace minsurf
