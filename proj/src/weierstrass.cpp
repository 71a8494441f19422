#include "minsurf/weierstrass.hpp"

#include <cmath>

#include "minsurf/quadrature.hpp"

namespace minsurf {

using analytic::EvalError;
using analytic::Expr;
using analytic::JetValue;

WeierstrassPair make_weierstrass_pair(Expr f, Expr g, Complex z0) {
    WeierstrassPair p{std::move(f), std::move(g), z0};
    JetValue g0;
    try {
        analytic::eval(p.f, z0);
        g0 = analytic::eval(p.g, z0);
    } catch (const EvalError& e) {
        throw PairError(std::string("base point z0 is singular for the pair: ") + e.what());
    }
    // sampled degeneracy checks on a small ring around z0
    Real fmax = 0, gdev = 0;
    for (int k = 0; k < 8; ++k) {
        const Real t = 2 * kPi * k / 8;
        const Complex z = z0 + Real(0.5) * Complex(std::cos(t), std::sin(t));
        try {
            fmax = std::max(fmax, std::abs(analytic::eval(p.f, z).value));
            gdev = std::max(gdev, std::abs(analytic::eval(p.g, z).value - g0.value));
        } catch (const EvalError&) {
            continue;  // poles on the probe ring don't decide degeneracy
        }
    }
    if (fmax == 0) throw PairError("f is identically zero on the probe ring");
    if (gdev <= 1e-14 * (1 + std::abs(g0.value)))
        throw PairError("g is constant; the generated surface is degenerate");
    return p;
}

CVec3 curve_derivative(const WeierstrassPair& p, Complex z) {
    const Complex f = analytic::eval(p.f, z).value;
    const Complex g = analytic::eval(p.g, z).value;
    const Complex g2 = g * g;
    CVec3 d;
    d << Real(0.5) * f * (Real(1) - g2), Complex(0, 0.5) * f * (Real(1) + g2), f * g;
    return d;
}

CVec3 curve_second_derivative(const WeierstrassPair& p, Complex z) {
    const JetValue f = analytic::eval(p.f, z);
    const JetValue g = analytic::eval(p.g, z);
    const Complex gg = g.value * g.derivative;
    CVec3 d;
    d << Real(0.5) * f.derivative * (Real(1) - g.value * g.value) - f.value * gg,
        Complex(0, 0.5) * (f.derivative * (Real(1) + g.value * g.value) + Real(2) * f.value * gg),
        f.derivative * g.value + f.value * g.derivative;
    return d;
}

CVec3 integrate_curve(const WeierstrassPair& p, Complex z, Real abstol) {
    if (z == p.z0) return CVec3::Zero();
    try {
        return quad::integrate_segment([&](Complex zz) { return curve_derivative(p, zz); }, p.z0, z,
                                       abstol);
    } catch (const EvalError& e) {
        throw quad::QuadratureError(quad::QuadratureError::Kind::pole_on_path,
                                    std::string("pole on integration path: ") + e.what());
    }
}

MinimalCurve minimal_curve(const WeierstrassPair& p) {
    return MinimalCurve{[p](Complex z) { return integrate_curve(p, z); },
                        [p](Complex z) { return curve_derivative(p, z); }};
}

namespace {

Chart make_assoc_chart(const WeierstrassPair& p, Real t, Chart::Provenance prov) {
    const Complex c = std::exp(Complex(0, -t));
    Chart chart;
    chart.provenance = prov;
    chart.assoc_angle = t;
    chart.position = [p, c](Real u, Real v) -> Vec3 {
        const CVec3 psi = integrate_curve(p, Complex(u, v));
        return (c * psi.array()).real();
    };
    chart.jet = [p, c](Real u, Real v) -> ChartJet {
        const Complex z(u, v);
        const CVec3 psi = integrate_curve(p, z);
        const CVec3 d1 = curve_derivative(p, z);
        const CVec3 d2 = curve_second_derivative(p, z);
        ChartJet j;
        j.x = (c * psi.array()).real();
        j.xu = (c * d1.array()).real();
        j.xv = -(c * d1.array()).imag();
        j.xuu = (c * d2.array()).real();
        j.xuv = -(c * d2.array()).imag();
        j.xvv = -j.xuu;
        return j;
    };
    return chart;
}

}  // namespace

Chart chart_real(const WeierstrassPair& p) {
    return make_assoc_chart(p, 0, Chart::Provenance::weierstrass_real);
}

Chart chart_imag(const WeierstrassPair& p) {
    return make_assoc_chart(p, kPi / 2, Chart::Provenance::weierstrass_imag);
}

Chart chart_assoc(const WeierstrassPair& p, Real t) {
    return make_assoc_chart(p, t, Chart::Provenance::associated);
}

Metric metric_closed(const WeierstrassPair& p, Complex z) {
    const Real af = std::abs(analytic::eval(p.f, z).value);
    const Real ag = std::abs(analytic::eval(p.g, z).value);
    const Real e = Real(0.25) * af * af * (1 + ag * ag) * (1 + ag * ag);
    return Metric{e, 0, e};
}

Real nu_closed(const WeierstrassPair& p, Complex z) {
    const Real af = std::abs(analytic::eval(p.f, z).value);
    const JetValue g = analytic::eval(p.g, z);
    const Real ag = std::abs(g.value);
    if (af == 0)
        throw PairError("nu_closed: f vanishes at the point, normal curvature is unbounded");
    return 4 * std::abs(g.derivative) / (af * (1 + ag * ag) * (1 + ag * ag));
}

WeierstrassPair canonical_generator(Expr g, Complex z0) {
    Expr f = analytic::div(analytic::constant(Complex(-1, 0)), analytic::differentiate(g));
    return make_weierstrass_pair(std::move(f), std::move(g), z0);
}

std::vector<Complex> fit_polynomial(const std::function<Complex(Complex)>& fn, int degree,
                                    Real radius, Complex center, Real* residual) {
    const int m = std::max(2 * (degree + 1), 24);
    Eigen::MatrixXcd a(m, degree + 1);
    Eigen::VectorXcd b(m);
    for (int k = 0; k < m; ++k) {
        const Real t = 2 * kPi * k / m;
        const Complex z = center + radius * Complex(std::cos(t), std::sin(t));
        b(k) = fn(z);
        Complex pw(1, 0);
        for (int j = 0; j <= degree; ++j) {
            a(k, j) = pw;
            pw *= z;
        }
    }
    Eigen::VectorXcd coef = a.colPivHouseholderQr().solve(b);
    if (residual) {
        const Real scale = std::max(b.cwiseAbs().maxCoeff(), Real(1e-300));
        *residual = (a * coef - b).cwiseAbs().maxCoeff() / scale;
    }
    return {coef.data(), coef.data() + coef.size()};
}

ExtractedPair extract_pair(const Chart& c, int degree, Real sample_radius) {
    const int d = degree >= 0 ? degree : (c.poly_degree > 0 ? c.poly_degree - 1 : 7);
    const int m = std::max(2 * (d + 1), 24);

    const Real radii[] = {1.0, 1.07, 0.93, 1.15};
    std::string last_problem;
    for (Real rf : radii) {
        const Real rho = sample_radius * rf;
        std::vector<Complex> zs(m), fv(m), phi3(m);
        bool ok = true;
        for (int k = 0; k < m && ok; ++k) {
            const Real t = 2 * kPi * k / m;
            const Real u = rho * std::cos(t), v = rho * std::sin(t);
            const ChartJet j = chart_jet(c, u, v, 1e-3 * rho);
            if (k < 3) {
                const Real E = j.xu.squaredNorm(), G = j.xv.squaredNorm(), F = j.xu.dot(j.xv);
                if (std::abs(E - G) > 1e-6 * (E + G) || std::abs(F) > 1e-6 * (E + G))
                    throw PairError("extract_pair: chart is not isothermal near the sample ring");
            }
            zs[k] = Complex(u, v);
            Complex phi[3];
            for (int i = 0; i < 3; ++i) phi[i] = Complex(j.xu[i], 0) - Complex(0, 1) * j.xv[i];
            fv[k] = phi[0] - Complex(0, 1) * phi[1];
            phi3[k] = phi[2];
        }
        Real fmax = 0, fmin = 1e300;
        for (const Complex& w : fv) {
            fmax = std::max(fmax, std::abs(w));
            fmin = std::min(fmin, std::abs(w));
        }
        if (fmax < 1e-12) throw PairError("extract_pair: phi1 - i*phi2 vanishes identically");
        if (fmin < 1e-10 * fmax) {
            last_problem = "f has a zero on the sample ring";
            continue;  // retry on a shifted ring
        }

        auto fit = [&](const std::vector<Complex>& vals, Real* res) {
            Eigen::MatrixXcd a(m, d + 1);
            Eigen::VectorXcd b(m);
            for (int k = 0; k < m; ++k) {
                b(k) = vals[k];
                Complex pw(1, 0);
                for (int j = 0; j <= d; ++j) {
                    a(k, j) = pw;
                    pw *= zs[k];
                }
            }
            Eigen::VectorXcd coef = a.colPivHouseholderQr().solve(b);
            const Real scale = std::max(b.cwiseAbs().maxCoeff(), Real(1e-300));
            *res = (a * coef - b).cwiseAbs().maxCoeff() / scale;
            std::vector<Complex> out(coef.data(), coef.data() + coef.size());
            const Real cmax = coef.cwiseAbs().maxCoeff();
            for (Complex& w : out)
                if (std::abs(w) < 1e-10 * cmax) w = Complex(0, 0);
            return out;
        };

        Real res_f = 0, res_g = 0;
        const std::vector<Complex> cf = fit(fv, &res_f);
        std::vector<Complex> gv(m);
        for (int k = 0; k < m; ++k) gv[k] = phi3[k] / fv[k];
        const std::vector<Complex> cg = fit(gv, &res_g);

        WeierstrassPair pair{analytic::polynomial(cf), analytic::polynomial(cg), Complex(0, 0)};
        return ExtractedPair{std::move(pair), std::max(res_f, res_g)};
    }
    throw PairError("extract_pair: " + last_problem);
}

WeierstrassPair scale_pair(const WeierstrassPair& p, Real lambda) {
    return WeierstrassPair{analytic::mul(analytic::constant(Complex(lambda, 0)), p.f), p.g, p.z0};
}

}  // namespace minsurf
