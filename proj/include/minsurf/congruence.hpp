#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minsurf/canonical.hpp"
#include "minsurf/weierstrass.hpp"

namespace minsurf {

struct CongruenceError : MinsurfError {
    using MinsurfError::MinsurfError;
};

/// Residual freedom under which a minimal surface is unchanged up to
/// position in space: parameter change w -> eps w + shift plus the
/// generator change g -> e^{i phi} (alpha + g) / (1 - conj(alpha) g).
struct GaugeParams {
    int epsilon = 1;
    Complex shift{0, 0};
    Real phi = 0;  // in (-pi, pi]
    Complex alpha{0, 0};
};

struct CongruenceReport {
    bool decided = false;  // false: a stage failed, decision unknown
    bool congruent = false;
    bool up_to_homothety = false;
    Real homothety_ratio = 1;  // size of B relative to A (when homothety is on)
    GaugeParams gauge;
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
    Real rotation_det = 1;
    Real curvature_residual = std::numeric_limits<Real>::quiet_NaN();
    Real mobius_residual = std::numeric_limits<Real>::quiet_NaN();
    Real cloud_rms = std::numeric_limits<Real>::quiet_NaN();
    Real cloud_diameter = 0;
    std::vector<std::string> stages;
    std::string failure;  // set when !decided
};

/// g -> e^{i phi} (alpha + g) / (1 - conj(alpha) g) as an expression.
analytic::Expr mobius_apply(const analytic::Expr& g, Real phi, Complex alpha);

/// Rotation realized by the generator gauge (phi, alpha = a + i b):
/// the product of the phi-rotation about the third axis and the
/// alpha-dependent orthogonal matrix.
Mat3 rotation_from_gauge(const GaugeParams& gauge);

struct MatchResult {
    int epsilon = 1;
    Complex shift{0, 0};
    Real residual = std::numeric_limits<Real>::infinity();  // relative
    bool converged = false;
};

/// Fits nu_a(w) = nu_b(eps w + shift) by multi-start least squares over
/// eps in {+1,-1} and the complex shift.
MatchResult match_canonical(const NuField& a, const NuField& b);

/// Best fit per eps, ordered +1 first. Radially symmetric nu fields fit
/// both signs equally well while only one corresponds to a pointwise
/// congruence; the generator fit downstream arbitrates.
std::vector<MatchResult> match_canonical_candidates(const NuField& a, const NuField& b);

struct MobiusFit {
    Real phi = 0;
    Complex alpha{0, 0};
    Real residual = std::numeric_limits<Real>::infinity();  // relative
    bool converged = false;
};

/// Fits (phi, alpha) so the gauge maps a's generator onto b's after the
/// (eps, shift) parameter alignment found by match_canonical.
MobiusFit match_mobius(const CanonicalForm& a, const CanonicalForm& b, int epsilon, Complex shift);

struct HomothetyNormalization {
    WeierstrassPair pair;
    Real lambda = 1;  // size of the input surface relative to the normalized one
    bool monomial = false;
};

/// Monomial pairs (a z^k, b z^n) normalize to the unit representative
/// (z^k, z^n) with lambda = |a| |b|^{-(k+1)/n}. Other pairs are rescaled
/// so their peak normal curvature near the base point equals 1.
HomothetyNormalization homothety_normalize(const WeierstrassPair& p);

struct RigidMotion {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
    Real rms = 0;
    Real det = 1;
    Real diameter = 0;
    bool degenerate = false;  // cloud covariance rank < 3
};

/// Closed-form orthogonal alignment (reflections allowed) mapping P onto Q.
RigidMotion procrustes(std::span<const Vec3> P, std::span<const Vec3> Q);

using ParamChange = std::function<std::pair<Real, Real>(Real, Real)>;

/// Samples corresponding points a(map(u,v)) <-> b(u,v) over the grid and
/// aligns them rigidly; the independent check of every congruence claim.
RigidMotion procrustes_oracle(const Chart& a, const Chart& b, const GridSpec& grid,
                              const ParamChange& map = nullptr);

struct SurfaceInput {
    std::optional<WeierstrassPair> pair;
    std::optional<Chart> chart;
    static SurfaceInput from_pair(WeierstrassPair p);
    static SurfaceInput from_chart(Chart c);
};

struct DecideOptions {
    bool up_to_homothety = false;
    Complex anchor{1, 0};      // z0 for the canonical transforms
    int grid_n = 17;           // nu-field resolution (peak starts only; matching is exact)
    int cloud_samples = 120;
    Real domain_scale = 0.25;  // w-radius = scale / sqrt(nu(anchor))
    int branch_a = +1, branch_b = +1;
    Tolerances tol;
};

/// Full pipeline: extract generators (for charts), optional homothety
/// normalization, canonical transforms, curvature match, generator gauge
/// fit, rotation recovery and the rigid-alignment cross check.
CongruenceReport decide_congruence(const SurfaceInput& a, const SurfaceInput& b,
                                   const DecideOptions& opts = {});

std::string congruence_report_to_json(const CongruenceReport& report);

}  // namespace minsurf
