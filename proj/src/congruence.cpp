#include "minsurf/congruence.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace minsurf {

using analytic::Expr;
using analytic::JetValue;

// ---------------------------------------------------------------------------
// Small damped least-squares driver (numeric Jacobian)

namespace {

struct LMOutcome {
    Eigen::VectorXd x;
    Real cost = std::numeric_limits<Real>::infinity();
    bool converged = false;
};

template <class F>
LMOutcome levenberg_marquardt(const F& residuals, Eigen::VectorXd x, int max_iter = 120) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd f = residuals(x);
    Real cost = f.squaredNorm();
    Real lambda = 1e-3;
    bool converged = false;

    for (int it = 0; it < max_iter; ++it) {
        Eigen::MatrixXd J(f.size(), n);
        for (int j = 0; j < n; ++j) {
            const Real h = 1e-7 * (1 + std::abs(x(j)));
            Eigen::VectorXd xp = x;
            xp(j) += h;
            J.col(j) = (residuals(xp) - f) / h;
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * f;
        if (g.lpNorm<Eigen::Infinity>() < 1e-15 * (1 + cost)) {
            converged = true;
            break;
        }
        bool stepped = false;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-12);
            const Eigen::VectorXd delta = A.ldlt().solve(-g);
            const Eigen::VectorXd xn = x + delta;
            const Eigen::VectorXd fn = residuals(xn);
            const Real cn = fn.squaredNorm();
            if (cn < cost) {
                if (delta.norm() <= 1e-13 * (1 + x.norm())) converged = true;
                x = xn;
                f = fn;
                cost = cn;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                break;
            }
            lambda *= 8;
        }
        if (!stepped || converged) {
            converged = converged || !stepped;
            break;
        }
    }
    return {x, cost, converged};
}

}  // namespace

// ---------------------------------------------------------------------------
// Generator gauge

Expr mobius_apply(const Expr& g, Real phi, Complex alpha) {
    using namespace analytic;
    Expr rotated = mul(constant(std::exp(Complex(0, phi))),
                       div(add(constant(alpha), g), sub(constant(Complex(1, 0)),
                                                        mul(constant(std::conj(alpha)), g))));
    return rotated;
}

Mat3 rotation_from_gauge(const GaugeParams& gauge) {
    const Real a = gauge.alpha.real(), b = gauge.alpha.imag();
    const Real phi = gauge.phi;
    Mat3 A;
    A << std::cos(phi), -std::sin(phi), 0, std::sin(phi), std::cos(phi), 0, 0, 0, 1;
    const Real den = 1 + a * a + b * b;
    Mat3 B;
    B << (1 - a * a + b * b) / den, -2 * a * b / den, -2 * a / den,
        -2 * a * b / den, (1 + a * a - b * b) / den, -2 * b / den,
        2 * a / den, 2 * b / den, (1 - a * a - b * b) / den;
    Mat3 R = A * B;
    if ((R.transpose() * R - Mat3::Identity()).norm() > 1e-12)
        throw CongruenceError("rotation_from_gauge: matrix is not orthogonal");
    return R;
}

// ---------------------------------------------------------------------------
// Curvature-field matching

namespace {

std::vector<Complex> domain_samples(const WDomain& d, int target) {
    const Real span = d.rmax - d.rmin;
    const Real r0 = d.rmin + (d.rmin > 0 ? 0.2 : 0.05) * span;
    const Real r1 = d.rmin + 0.55 * span;
    Real a0 = d.amin, width = d.width;
    if (width < 2 * kPi - 1e-12) {
        a0 += 0.15 * width;
        width *= 0.7;
    }
    const int nr = std::max(3, static_cast<int>(std::sqrt(target / 2.0)));
    const int na = std::max(6, (target + nr - 1) / nr);
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(nr) * na);
    for (int i = 0; i < nr; ++i) {
        const Real r = r0 + (r1 - r0) * i / (nr - 1);
        for (int j = 0; j < na; ++j) {
            const Real ang = a0 + width * (j + 0.5) / na;
            out.push_back(d.center + r * std::exp(Complex(0, ang)));
        }
    }
    return out;
}

Complex field_peak(const NuField& f) {
    Real best = -1;
    Complex at = f.domain.center;
    for (int ix = 0; ix < f.nx; ++ix)
        for (int iy = 0; iy < f.ny; ++iy)
            if (f.mask(ix, iy) && f.values(ix, iy) > best) {
                best = f.values(ix, iy);
                at = f.node(ix, iy);
            }
    return at;
}

}  // namespace

std::vector<MatchResult> match_canonical_candidates(const NuField& a, const NuField& b) {
    const std::vector<Complex> ws = domain_samples(a.domain, 160);
    const int m = static_cast<int>(ws.size());
    Eigen::VectorXd va(m);
    for (int k = 0; k < m; ++k) va(k) = a.eval(ws[k]);
    const Real scale2 = va.squaredNorm();
    if (!(scale2 > 0)) throw CongruenceError("match_canonical: empty or zero nu field");
    const Real penalty = 3 * va.cwiseAbs().maxCoeff() + 1;

    std::optional<NuProbe> probe;
    if (b.form) probe.emplace(*b.form);
    auto nu_b = [&](int slot, Complex w) -> Real {
        try {
            const Real v = probe ? (*probe)(slot, w) : b.eval(w);
            return std::isfinite(v) ? v : penalty;
        } catch (const MinsurfError&) {
            return penalty;
        }
    };

    const Complex peak_a = field_peak(a), peak_b = field_peak(b);
    std::vector<MatchResult> out;
    for (int eps : {1, -1}) {
        const Real e = eps;
        auto residuals = [&](const Eigen::VectorXd& x) {
            const Complex c(x(0), x(1));
            Eigen::VectorXd r(m);
            for (int k = 0; k < m; ++k) r(k) = va(k) - nu_b(k, e * ws[k] + c);
            return r;
        };
        std::vector<Complex> starts = {b.domain.center - e * a.domain.center,
                                       peak_b - e * peak_a};
        const Real jig = 0.15 * b.domain.rmax;
        for (const Complex off : {Complex(jig, 0), Complex(-jig, 0), Complex(0, jig), Complex(0, -jig)})
            starts.push_back(starts[0] + off);
        MatchResult best;
        for (const Complex& c0 : starts) {
            Eigen::VectorXd x0(2);
            x0 << c0.real(), c0.imag();
            const LMOutcome lm = levenberg_marquardt(residuals, x0);
            const Real rel = std::sqrt(lm.cost / scale2);
            if (rel < best.residual) {
                best.epsilon = eps;
                best.shift = Complex(lm.x(0), lm.x(1));
                best.residual = rel;
                best.converged = lm.converged;
            }
        }
        out.push_back(best);
    }
    return out;
}

MatchResult match_canonical(const NuField& a, const NuField& b) {
    const std::vector<MatchResult> cands = match_canonical_candidates(a, b);
    // +1 is listed first and wins near-ties; a reflection must be clearly better
    if (cands[1].residual < 0.95 * cands[0].residual) return cands[1];
    return cands[0];
}

MobiusFit match_mobius(const CanonicalForm& a, const CanonicalForm& b, int epsilon, Complex shift) {
    const std::vector<Complex> ws = domain_samples(a.domain, 120);
    std::vector<Complex> ga, gb;
    ga.reserve(ws.size());
    gb.reserve(ws.size());
    const Real e = epsilon;
    for (const Complex& w : ws) {
        try {
            const Complex va = a.gtilde(w).value;
            const Complex vb = b.gtilde(e * w + shift).value;
            ga.push_back(va);
            gb.push_back(vb);
        } catch (const MinsurfError&) {
            continue;
        }
    }
    const int m = static_cast<int>(ga.size());
    if (m < 12) throw CongruenceError("match_mobius: not enough evaluable sample points");
    Real scale2 = 0;
    for (const Complex& v : gb) scale2 += std::norm(v);
    if (!(scale2 > 0)) throw CongruenceError("match_mobius: zero target generator");

    auto residuals = [&](const Eigen::VectorXd& x) {
        const Complex alpha(x(1), x(2));
        const Complex rot = std::exp(Complex(0, x(0)));
        Eigen::VectorXd r(2 * m);
        for (int k = 0; k < m; ++k) {
            const Complex den = Complex(1, 0) - std::conj(alpha) * ga[k];
            Complex delta;
            if (std::abs(den) < 1e-9)
                delta = Complex(1e6, 0);
            else
                delta = rot * (alpha + ga[k]) / den - gb[k];
            r(2 * k) = delta.real();
            r(2 * k + 1) = delta.imag();
        }
        return r;
    };

    MobiusFit best;
    for (int k = 0; k < 16; ++k) {
        Eigen::VectorXd x0(3);
        x0 << k * kPi / 8, 0, 0;
        const LMOutcome out = levenberg_marquardt(residuals, x0);
        const Real rel = std::sqrt(out.cost / scale2);
        if (rel < best.residual) {
            Real phi = std::remainder(out.x(0), 2 * kPi);
            if (phi <= -kPi) phi += 2 * kPi;
            best.phi = phi;
            best.alpha = Complex(out.x(1), out.x(2));
            best.residual = rel;
            best.converged = out.converged;
        }
        if (best.residual < 1e-13) break;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Homothety normalization

namespace {

struct Monomial {
    Complex coef;
    int degree;
};

std::optional<Monomial> as_monomial(const Expr& e) {
    for (Real radius : {1.0, 0.6, 1.5}) {
        Real residual = 0;
        std::vector<Complex> coeffs;
        try {
            coeffs = fit_polynomial([&](Complex z) { return analytic::eval(e, z).value; }, 12,
                                    radius, Complex(0, 0), &residual);
        } catch (const MinsurfError&) {
            continue;
        }
        if (residual > 1e-9) return std::nullopt;  // genuinely non-polynomial
        Real cmax = 0;
        for (const Complex& c : coeffs) cmax = std::max(cmax, std::abs(c));
        if (cmax == 0) return std::nullopt;
        int idx = -1;
        for (int k = 0; k < static_cast<int>(coeffs.size()); ++k) {
            if (std::abs(coeffs[k]) > 1e-8 * cmax) {
                if (idx >= 0) return std::nullopt;  // a second surviving term
                idx = k;
            }
        }
        return Monomial{coeffs[idx], idx};
    }
    return std::nullopt;
}

Expr unit_monomial(int degree) {
    return degree == 1 ? analytic::variable("z") : analytic::pow_int(analytic::variable("z"), degree);
}

}  // namespace

HomothetyNormalization homothety_normalize(const WeierstrassPair& p) {
    const std::optional<Monomial> mf = as_monomial(p.f);
    const std::optional<Monomial> mg = as_monomial(p.g);
    if (mf && mg && std::abs(mf->coef) > 0 && std::abs(mg->coef) > 0 && mg->degree >= 1) {
        HomothetyNormalization out;
        out.monomial = true;
        out.lambda = std::abs(mf->coef) *
                     std::pow(std::abs(mg->coef), -Real(mf->degree + 1) / mg->degree);
        out.pair = WeierstrassPair{unit_monomial(mf->degree), unit_monomial(mg->degree),
                                   Complex(1, 0)};
        return out;
    }
    // general pair: scale so the peak normal curvature on a probe ring is 1
    Real numax = 0;
    for (int k = 0; k < 16; ++k) {
        const Complex z = p.z0 + Real(0.5) * std::exp(Complex(0, 2 * kPi * k / 16));
        try {
            numax = std::max(numax, nu_closed(p, z));
        } catch (const MinsurfError&) {
            continue;
        }
    }
    if (numax <= 0)
        throw CongruenceError("homothety_normalize: could not probe the normal curvature scale");
    HomothetyNormalization out;
    out.monomial = false;
    out.lambda = 1 / numax;             // normalized surface is numax * input
    out.pair = scale_pair(p, numax);
    return out;
}

// ---------------------------------------------------------------------------
// Rigid alignment

RigidMotion procrustes(std::span<const Vec3> P, std::span<const Vec3> Q) {
    if (P.size() != Q.size() || P.size() < 3)
        throw CongruenceError("procrustes: need matched clouds of at least 3 points");
    const int n = static_cast<int>(P.size());
    Vec3 pc = Vec3::Zero(), qc = Vec3::Zero();
    for (int k = 0; k < n; ++k) {
        pc += P[k];
        qc += Q[k];
    }
    pc /= n;
    qc /= n;
    Mat3 H = Mat3::Zero();
    for (int k = 0; k < n; ++k) H += (P[k] - pc) * (Q[k] - qc).transpose();
    const Eigen::JacobiSVD<Mat3> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    RigidMotion motion;
    motion.rotation = svd.matrixV() * svd.matrixU().transpose();
    motion.det = motion.rotation.determinant();
    motion.translation = qc - motion.rotation * pc;
    const auto& sigma = svd.singularValues();
    motion.degenerate = sigma(2) <= 1e-12 * std::max(sigma(0), Real(1e-300));

    Real acc = 0;
    Vec3 lo = Q[0], hi = Q[0];
    for (int k = 0; k < n; ++k) {
        acc += (motion.rotation * P[k] + motion.translation - Q[k]).squaredNorm();
        lo = lo.cwiseMin(Q[k]);
        hi = hi.cwiseMax(Q[k]);
    }
    motion.rms = std::sqrt(acc / n);
    motion.diameter = (hi - lo).norm();
    return motion;
}

RigidMotion procrustes_oracle(const Chart& a, const Chart& b, const GridSpec& grid,
                              const ParamChange& map) {
    std::vector<Vec3> P, Q;
    P.reserve(static_cast<std::size_t>(grid.nu) * grid.nv);
    Q.reserve(P.capacity());
    for (int iu = 0; iu < grid.nu; ++iu)
        for (int iv = 0; iv < grid.nv; ++iv) {
            const Real u = grid.u0 + iu * grid.du(), v = grid.v0 + iv * grid.dv();
            Real ua = u, va = v;
            if (map) std::tie(ua, va) = map(u, v);
            P.push_back(a.position(ua, va));
            Q.push_back(b.position(u, v));
        }
    return procrustes(P, Q);
}

// ---------------------------------------------------------------------------
// Decision pipeline

SurfaceInput SurfaceInput::from_pair(WeierstrassPair p) {
    SurfaceInput s;
    s.pair = std::move(p);
    return s;
}

SurfaceInput SurfaceInput::from_chart(Chart c) {
    SurfaceInput s;
    s.chart = std::move(c);
    return s;
}

namespace {

std::string fmt(const char* pattern, Real v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

WeierstrassPair resolve_pair(const SurfaceInput& in, const char* tag,
                             std::vector<std::string>& stages) {
    if (in.pair) return *in.pair;
    if (!in.chart) throw CongruenceError("decide_congruence: empty surface input");
    const ExtractedPair e = extract_pair(*in.chart);
    stages.push_back(std::string("extract_pair(") + tag + "): residual " +
                     fmt("%.3e", e.fit_residual));
    if (e.fit_residual > 1e-6)
        throw CongruenceError("generator extraction residual too large; chart is not in the "
                              "expected polynomial class");
    return e.pair;
}

struct CanonicalSide {
    WeierstrassPair pair;
    CanonicalForm form;
    NuField field;
};

CanonicalSide build_side(const WeierstrassPair& pair, const char* tag, const DecideOptions& opts,
                         int branch, std::vector<std::string>& stages) {
    const Complex z0 = opts.anchor;
    const Real nu0 = nu_closed(pair, z0);
    if (!(nu0 > 0))
        throw CanonicalError("canonical anchor sits at a flat point (nu = 0); move the anchor");
    Real radius = opts.domain_scale / std::sqrt(nu0);

    TransformOptions topt;
    topt.initial_sign = branch;
    topt.ode_tol = opts.tol.ode;
    CanonicalSide side{pair, {}, {}};
    for (int attempt = 0;; ++attempt) {
        side.form = transform_to_canonical(pair, WDomain::disk(Complex(0, 0), radius), z0, topt);
        bool ok = true;
        for (int k = 0; k < 12 && ok; ++k) {
            const Complex w = Real(0.95) * radius * std::exp(Complex(0, 2 * kPi * k / 12));
            try {
                canonical_nu_at(side.form, w);
            } catch (const MinsurfError&) {
                ok = false;
            }
        }
        if (ok) break;
        radius *= 0.6;
        if (attempt >= 6)
            throw CanonicalError("canonical transform keeps hitting singular rays; no usable "
                                 "w-domain found");
    }
    side.field = canonical_nu(side.form, opts.grid_n);
    stages.push_back(std::string("canonical(") + tag + "): nu0 " + fmt("%.3e", nu0) +
                     ", w-radius " + fmt("%.3g", radius));
    return side;
}

NuField scaled_nu_view(const NuField& f, Real s) {
    NuField out = f;
    out.x0 *= s;
    out.y0 *= s;
    out.h *= s;
    out.values /= s;
    out.domain.center *= s;
    out.domain.rmin *= s;
    out.domain.rmax *= s;
    out.eval = [inner = f.eval, s](Complex w) { return inner(w / s) / s; };
    out.form.reset();  // the source form does not know about the scaling
    return out;
}

}  // namespace

CongruenceReport decide_congruence(const SurfaceInput& a, const SurfaceInput& b,
                                   const DecideOptions& opts) {
    CongruenceReport rep;
    rep.up_to_homothety = opts.up_to_homothety;
    try {
        WeierstrassPair pa = resolve_pair(a, "A", rep.stages);
        WeierstrassPair pb = resolve_pair(b, "B", rep.stages);

        Real lambda_a = 1, lambda_b = 1, extra_scale = 1;
        bool monomials = false;
        if (opts.up_to_homothety) {
            const HomothetyNormalization na = homothety_normalize(pa);
            const HomothetyNormalization nb = homothety_normalize(pb);
            monomials = na.monomial && nb.monomial;
            lambda_a = na.lambda;
            lambda_b = nb.lambda;
            pa = na.pair;
            pb = nb.pair;
            rep.stages.push_back(std::string("homothety: ") +
                                 (monomials ? "monomial normalization" : "scale search") +
                                 ", lambda_A " + fmt("%.6g", lambda_a) + ", lambda_B " +
                                 fmt("%.6g", lambda_b));
        }

        CanonicalSide sa = build_side(pa, "A", opts, opts.branch_a, rep.stages);
        CanonicalSide sb = build_side(pb, "B", opts, opts.branch_b, rep.stages);

        MatchResult match;
        if (opts.up_to_homothety && !monomials) {
            // 1-D scale refinement: nu_B scaled by s is (1/s) nu_B(w/s)
            Real best_s = 1, best_res = std::numeric_limits<Real>::infinity();
            auto try_scale = [&](Real s) {
                const NuField view = scaled_nu_view(sb.field, s);
                const Real res = match_canonical(sa.field, view).residual;
                if (res < best_res) {
                    best_res = res;
                    best_s = s;
                }
                return res;
            };
            for (int k = -12; k <= 12; ++k) try_scale(std::pow(10.0, k / 4.0));
            // golden-section refinement around the best coarse scale
            Real lo = best_s / std::pow(10.0, 0.25), hi = best_s * std::pow(10.0, 0.25);
            const Real gr = 0.5 * (std::sqrt(5.0) - 1);
            Real x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
            Real r1 = try_scale(x1), r2 = try_scale(x2);
            for (int it = 0; it < 40 && hi - lo > 1e-9 * hi; ++it) {
                if (r1 < r2) {
                    hi = x2;
                    x2 = x1;
                    r2 = r1;
                    x1 = hi - gr * (hi - lo);
                    r1 = try_scale(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    r1 = r2;
                    x2 = lo + gr * (hi - lo);
                    r2 = try_scale(x2);
                }
            }
            extra_scale = best_s;
            rep.stages.push_back("homothety scale search: s " + fmt("%.9g", best_s));
            // re-run the pipeline on the rescaled generator pair
            pb = scale_pair(pb, 1 / best_s);
            sb = build_side(pb, "B'", opts, opts.branch_b, rep.stages);
        }
        const std::vector<MatchResult> cands = match_canonical_candidates(sa.field, sb.field);
        match = (cands[1].residual < 0.95 * cands[0].residual) ? cands[1] : cands[0];

        // A radially symmetric curvature field fits both parameter signs; only
        // one of them is the pointwise congruence (for the quintic-type charts
        // the canonical plane covers the surface with a nontrivial deck flip).
        // The generator fit is angle-sensitive and arbitrates.
        std::optional<MobiusFit> fit;
        for (const MatchResult& cand : cands) {
            if (cand.residual > opts.tol.curvature_match) continue;
            try {
                const MobiusFit f = match_mobius(sa.form, sb.form, cand.epsilon, cand.shift);
                if (!fit || f.residual < 0.95 * fit->residual) {
                    fit = f;
                    match = cand;
                }
            } catch (const MinsurfError&) {
                // this sheet has no usable generator samples; the other may
            }
        }
        rep.homothety_ratio = extra_scale * lambda_b / lambda_a;
        rep.gauge.epsilon = match.epsilon;
        rep.gauge.shift = match.shift;
        rep.curvature_residual = match.residual;
        rep.stages.push_back(std::string("match_canonical: eps ") +
                             (match.epsilon > 0 ? "+1" : "-1") + ", |shift| " +
                             fmt("%.3e", std::abs(match.shift)) + ", residual " +
                             fmt("%.3e", match.residual));

        const bool curvature_fails = match.residual > opts.tol.curvature_match;
        if (!fit) {
            try {
                fit = match_mobius(sa.form, sb.form, match.epsilon, match.shift);
            } catch (const MinsurfError& e) {
                // meaningful only on matched fields; a failed curvature match decides anyway
                if (!curvature_fails) throw;
                rep.stages.push_back(std::string("match_mobius: skipped (") + e.what() + ")");
            }
        }
        if (fit) {
            rep.gauge.phi = fit->phi;
            rep.gauge.alpha = fit->alpha;
            rep.mobius_residual = fit->residual;
            rep.stages.push_back("match_mobius: phi " + fmt("%.9g", fit->phi) + ", |alpha| " +
                                 fmt("%.3e", std::abs(fit->alpha)) + ", residual " +
                                 fmt("%.3e", fit->residual));
        }

        // rigid alignment of matched sample clouds, the independent oracle
        const Chart chart_a = chart_real(pa), chart_b = chart_real(pb);
        const std::vector<Complex> ws = domain_samples(sa.form.domain, opts.cloud_samples);
        std::vector<Vec3> P, Q;
        for (const Complex& w : ws) {
            try {
                const Complex za = sa.form.z_of_w(w);
                const Complex zb = sb.form.z_of_w(Real(match.epsilon) * w + match.shift);
                const Vec3 xa = chart_a.position(za.real(), za.imag());
                const Vec3 xb = chart_b.position(zb.real(), zb.imag());
                P.push_back(xa);
                Q.push_back(xb);
            } catch (const MinsurfError&) {
                continue;
            }
        }
        if (P.size() < 12) {
            // no usable correspondence; decisive only when the curvature match
            // already rules the pair out
            if (curvature_fails) {
                rep.stages.push_back("procrustes: skipped (no matched cloud; curvature residual "
                                     "already above tolerance)");
                rep.congruent = false;
                rep.decided = true;
                return rep;
            }
            throw CongruenceError("cloud sampling failed on matched domains");
        }
        const RigidMotion motion = procrustes(P, Q);
        rep.rotation = motion.rotation;
        rep.translation = motion.translation;
        rep.rotation_det = motion.det;
        rep.cloud_rms = motion.rms;
        rep.cloud_diameter = motion.diameter;
        rep.stages.push_back("procrustes: rms " + fmt("%.3e", motion.rms) + ", diameter " +
                             fmt("%.3g", motion.diameter) + ", det " + fmt("%.0f", motion.det));

        rep.congruent = match.residual <= opts.tol.curvature_match &&
                        motion.rms <= opts.tol.cloud_rms * motion.diameter;
        rep.decided = true;

        const Mat3 gauge_rot = rotation_from_gauge(rep.gauge);
        rep.stages.push_back("gauge rotation angle " +
                             fmt("%.9g", std::atan2(gauge_rot(1, 0), gauge_rot(0, 0))));
    } catch (const MinsurfError& e) {
        rep.decided = false;
        rep.congruent = false;
        rep.failure = e.what();
        rep.stages.push_back(std::string("failed: ") + e.what());
    }
    return rep;
}

std::string congruence_report_to_json(const CongruenceReport& rep) {
    nlohmann::json j;
    j["decided"] = rep.decided;
    j["congruent"] = rep.congruent;
    j["up_to_homothety"] = rep.up_to_homothety;
    j["homothety_ratio"] = rep.homothety_ratio;
    j["gauge"] = {{"epsilon", rep.gauge.epsilon},
                  {"shift", {rep.gauge.shift.real(), rep.gauge.shift.imag()}},
                  {"phi", rep.gauge.phi},
                  {"alpha", {rep.gauge.alpha.real(), rep.gauge.alpha.imag()}}};
    j["rotation"] = nlohmann::json::array();
    for (int r = 0; r < 3; ++r)
        j["rotation"].push_back({rep.rotation(r, 0), rep.rotation(r, 1), rep.rotation(r, 2)});
    j["translation"] = {rep.translation(0), rep.translation(1), rep.translation(2)};
    j["rotation_det"] = rep.rotation_det;
    j["curvature_residual"] = rep.curvature_residual;
    j["mobius_residual"] = rep.mobius_residual;
    j["cloud_rms"] = rep.cloud_rms;
    j["cloud_diameter"] = rep.cloud_diameter;
    j["stages"] = rep.stages;
    if (!rep.failure.empty()) j["failure"] = rep.failure;
    return j.dump(2);
}

}  // namespace minsurf
