#include <doctest.h>

#include <cmath>
#include <random>

#include "minsurf/congruence.hpp"
#include "minsurf/families.hpp"

using namespace minsurf;
using analytic::parse;
using analytic::ParamMap;

namespace {

Mat3 rot_z(Real ang) {
    Mat3 r;
    r << std::cos(ang), -std::sin(ang), 0, std::sin(ang), std::cos(ang), 0, 0, 0, 1;
    return r;
}

}  // namespace

TEST_CASE("mobius gauge: identity, constants and involution") {
    const analytic::Expr g = parse("z^2 - 0.5*z");
    const analytic::Expr same = mobius_apply(g, 0, Complex(0, 0));
    const analytic::Expr constant_shift = mobius_apply(parse("0*z"), 0, Complex(0, 1));
    CHECK(std::abs(analytic::eval(constant_shift, Complex(0.3, 0)).value - Complex(0, 1)) < 1e-15);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<Real> u(-0.6, 0.6);
    const Real phi = 1.1;
    const Complex alpha(0.25, -0.4);
    const analytic::Expr fwd = mobius_apply(g, phi, alpha);
    const analytic::Expr back =
        mobius_apply(fwd, -phi, -alpha * std::exp(Complex(0, phi)));
    for (int k = 0; k < 10; ++k) {
        const Complex z(u(rng), u(rng));
        const Complex gv = analytic::eval(g, z).value;
        CHECK(std::abs(analytic::eval(same, z).value - gv) <= 1e-14);
        CHECK(std::abs(analytic::eval(back, z).value - gv) <= 1e-12 * (1 + std::abs(gv)));
    }
}

TEST_CASE("rotation_from_gauge matches the printed matrices") {
    GaugeParams id;
    CHECK((rotation_from_gauge(id) - Mat3::Identity()).norm() < 1e-15);

    GaugeParams phi_only;
    phi_only.phi = 0.77;
    CHECK((rotation_from_gauge(phi_only) - rot_z(0.77)).norm() < 1e-14);

    GaugeParams a1;  // alpha = 1: B = [[0,0,-1],[0,1,0],[1,0,0]]
    a1.alpha = Complex(1, 0);
    Mat3 expect;
    expect << 0, 0, -1, 0, 1, 0, 1, 0, 0;
    CHECK((rotation_from_gauge(a1) - expect).norm() < 1e-14);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<Real> u(-1.5, 1.5);
    for (int k = 0; k < 100; ++k) {
        GaugeParams g;
        g.phi = u(rng);
        g.alpha = Complex(u(rng), u(rng));
        const Mat3 r = rotation_from_gauge(g);
        CHECK((r.transpose() * r - Mat3::Identity()).norm() <= 1e-12);
    }
}

TEST_CASE("procrustes recovers a synthetic rigid motion") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<Real> u(-1, 1);
    const Mat3 R = rot_z(0.4) * Eigen::AngleAxisd(0.9, Vec3(1, 1, 0).normalized()).toRotationMatrix();
    const Vec3 T(0.3, -2, 0.7);
    std::vector<Vec3> P, Q;
    for (int k = 0; k < 40; ++k) {
        const Vec3 p(u(rng), u(rng), u(rng));
        P.push_back(p);
        Q.push_back(R * p + T);
    }
    const RigidMotion m = procrustes(P, Q);
    CHECK((m.rotation - R).norm() <= 1e-12);
    CHECK((m.translation - T).norm() <= 1e-12);
    CHECK(m.rms <= 1e-12);
    CHECK_FALSE(m.degenerate);

    // rank-deficient cloud is flagged
    std::vector<Vec3> flatP, flatQ;
    for (int k = 0; k < 10; ++k) {
        const Vec3 p(u(rng), u(rng), 0);
        flatP.push_back(p);
        flatQ.push_back(R * p + T);
    }
    CHECK(procrustes(flatP, flatQ).degenerate);
}

TEST_CASE("parameter change + rotation carries r1 onto its associated chart") {
    const Real t = 1.3;
    const Chart c1 = families::r1(1, 500);
    const Chart ct = families::assoc_family(1, 500, t);
    const GridSpec grid{-1, 1, -1, 1, 13, 13};
    const ParamChange map = [t](Real u, Real v) {
        return std::pair<Real, Real>(u * std::cos(t / 4) + v * std::sin(t / 4),
                                     -u * std::sin(t / 4) + v * std::cos(t / 4));
    };
    const RigidMotion m = procrustes_oracle(c1, ct, grid, map);
    CHECK(m.rms <= 1e-8 * m.diameter);
    CHECK((m.rotation - rot_z(t / 2)).norm() <= 1e-9);
    CHECK(std::abs(m.translation.norm()) <= 1e-8 * m.diameter);
}

TEST_CASE("u->v, v->-u plus a quarter turn carries s1 onto s2") {
    const Real a1 = 2, c3 = 1.5;
    const Chart cs1 = families::s1(a1, c3);
    const Chart cs2 = families::s2(-a1, c3);
    const GridSpec grid{-0.4, 0.4, -0.4, 0.4, 13, 13};
    const ParamChange map = [](Real u, Real v) { return std::pair<Real, Real>(v, -u); };
    const RigidMotion m = procrustes_oracle(cs1, cs2, grid, map);
    CHECK(m.rms <= 1e-9 * m.diameter);
    CHECK((m.rotation - rot_z(kPi / 2)).norm() <= 1e-9);
}

TEST_CASE("match_canonical on identical fields is the identity gauge") {
    const CanonicalForm cf = closed_form_r_family(1, 500, 0);
    const NuField f = canonical_nu(cf, 41);
    const MatchResult m = match_canonical(f, f);
    CHECK(m.epsilon == 1);
    CHECK(std::abs(m.shift) <= 1e-8);
    CHECK(m.residual <= 1e-10);
}

TEST_CASE("synthetic gauges are recovered from the nu-field and generator fits") {
    const analytic::Expr gt = parse("w + 0.3*w^2");
    const WDomain disk = WDomain::disk(Complex(0, 0), 0.8);
    const CanonicalForm cf1 = canonical_from_expression(gt, disk);
    const NuField f1 = canonical_nu(cf1, 41);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<Real> uphi(-3, 3), umag(-0.28, 0.28);
    for (int draw = 0; draw < 5; ++draw) {
        const Real phi = uphi(rng);
        const Complex alpha(umag(rng), umag(rng));
        const Complex c(umag(rng), umag(rng));
        const int eps = (draw % 2) ? -1 : 1;

        const CanonicalForm gauged = apply_parameter_gauge(
            canonical_from_expression(mobius_apply(gt, phi, alpha), disk), eps, c);
        const NuField f2 = canonical_nu(gauged, 41);

        const MatchResult m = match_canonical(f1, f2);
        CHECK(m.epsilon == eps);
        CHECK(std::abs(m.shift + Real(eps) * c) <= 1e-6);

        const MobiusFit fit = match_mobius(cf1, gauged, m.epsilon, m.shift);
        CHECK(std::abs(std::remainder(fit.phi - phi, 2 * kPi)) <= 1e-6);
        CHECK(std::abs(fit.alpha - alpha) <= 1e-6);
        CHECK(fit.residual <= 1e-8);
    }
}

TEST_CASE("mobius fit recovers the t/2 rotation between associated canonical forms") {
    const CanonicalForm g0 = closed_form_r_family(1, 500, 0);
    for (Real t : {0.3, 1.0}) {
        const CanonicalForm gtf = closed_form_r_family(1, 500, t);
        const MobiusFit fit = match_mobius(g0, gtf, 1, Complex(0, 0));
        CHECK(std::abs(fit.phi - t / 2) <= 1e-8);
        CHECK(std::abs(fit.alpha) <= 1e-8);
        CHECK(fit.residual <= 1e-10);
    }
}

TEST_CASE("mobius fit between the two s-family reductions is a pure rotation") {
    // With the principal-branch convention of closed_form_s_family the two
    // generators differ by the unimodular constant e^{i pi/10} (a quarter turn
    // times a fifth root of unity absorbed by the branch choice); the
    // chart-level quarter-turn itself is checked by the parameter-map oracle.
    const CanonicalForm gs1 = closed_form_s_family(2, 0, 1.5, 0);
    CanonicalForm gs2 = closed_form_s_family(0, -2, 0, 1.5);
    gs2.domain = gs1.domain;
    const Complex expected = std::exp(Complex(0, kPi / 10));
    for (const Complex w : {Complex(0.001, 0.003), Complex(-0.002, 0.004)}) {
        const Complex v1 = gs1.gtilde(w).value, v2 = gs2.gtilde(w).value;
        CHECK(std::abs(v2 / v1 - expected) <= 1e-12);
    }
    const MobiusFit fit = match_mobius(gs1, gs2, 1, Complex(0, 0));
    CHECK(std::abs(fit.phi - kPi / 10) <= 1e-8);
    CHECK(std::abs(fit.alpha) <= 1e-8);
    CHECK(fit.residual <= 1e-10);
}

TEST_CASE("homothety normalization") {
    // already the unit representative
    const WeierstrassPair rep{parse("z"), parse("z^2"), Complex(1, 0)};
    const HomothetyNormalization n0 = homothety_normalize(rep);
    CHECK(n0.monomial);
    CHECK(n0.lambda == doctest::Approx(1.0));

    // first-family pair: f = 2000 z (k=1), g = i sqrt(3/500) z^2 (n=2)
    ParamMap pg{{"c", Complex(0, std::sqrt(3.0 / 500.0))}};
    const WeierstrassPair fam{parse("2000*z"), parse("c*z^2", pg), Complex(0, 0)};
    const HomothetyNormalization n1 = homothety_normalize(fam);
    CHECK(n1.monomial);
    CHECK(n1.lambda == doctest::Approx(2000 / std::sqrt(std::sqrt(3.0 / 500.0) *
                                                        std::sqrt(3.0 / 500.0))));
    CHECK(analytic::print(n1.pair.f) == "z");
    CHECK(analytic::print(n1.pair.g) == "z^2");

    // catenoid generators are not monomial: scale gauge instead
    const WeierstrassPair cat{parse("exp(z)"), parse("exp(-z)"), Complex(0, 0)};
    const HomothetyNormalization n2 = homothety_normalize(cat);
    CHECK_FALSE(n2.monomial);
    CHECK(n2.lambda == doctest::Approx(1.0).epsilon(1e-9));  // peak nu is already 1
}

TEST_CASE("decide_congruence: sign flips of the first family are congruent") {
    const DecideOptions opts;
    const CongruenceReport rep =
        decide_congruence(SurfaceInput::from_chart(families::r1(1, 500)),
                          SurfaceInput::from_chart(families::r1(-1, 500)), opts);
    REQUIRE(rep.decided);
    CHECK(rep.congruent);
    CHECK(rep.curvature_residual <= 1e-6);
    CHECK(rep.cloud_rms <= 1e-6 * rep.cloud_diameter);
}

TEST_CASE("decide_congruence: associated surfaces coincide, rotated by t/2") {
    const CongruenceReport rep =
        decide_congruence(SurfaceInput::from_chart(families::r1(1, 500)),
                          SurfaceInput::from_chart(families::assoc_family(1, 500, 1.0)), {});
    REQUIRE(rep.decided);
    CHECK(rep.congruent);
    CHECK(std::abs(rep.gauge.phi - 0.5) <= 1e-6);
    CHECK(std::abs(rep.gauge.alpha) <= 1e-6);
    // the recovered motion is a rotation about the third axis by t/2
    CHECK(std::abs(rep.rotation(2, 2) - 1) <= 1e-6);
    CHECK(std::abs(std::atan2(rep.rotation(1, 0), rep.rotation(0, 0)) - 0.5) <= 1e-6);
}

TEST_CASE("decide_congruence: the two families are not congruent, even up to homothety") {
    DecideOptions opts;
    opts.up_to_homothety = true;
    const CongruenceReport rep =
        decide_congruence(SurfaceInput::from_chart(families::r1(1, 500)),
                          SurfaceInput::from_chart(families::s1(1, 1)), opts);
    REQUIRE(rep.decided);
    CHECK_FALSE(rep.congruent);
    CHECK(rep.curvature_residual > 1e-3);
}

TEST_CASE("decide_congruence is symmetric on the test families") {
    const SurfaceInput a = SurfaceInput::from_chart(families::s1(2, 1.5));
    const SurfaceInput b = SurfaceInput::from_chart(families::s2(-2, 1.5));
    const CongruenceReport ab = decide_congruence(a, b, {});
    const CongruenceReport ba = decide_congruence(b, a, {});
    REQUIRE(ab.decided);
    REQUIRE(ba.decided);
    CHECK(ab.congruent);
    CHECK(ba.congruent);
}

TEST_CASE("decide_congruence: homothety classes via the scale search") {
    // (3 e^z, e^{-z}) is three times the catenoid; generators are not monomial
    const SurfaceInput a =
        SurfaceInput::from_pair({parse("exp(z)"), parse("exp(-z)"), Complex(0, 0)});
    const SurfaceInput b =
        SurfaceInput::from_pair({parse("3*exp(z)"), parse("exp(-z)"), Complex(0, 0)});
    DecideOptions opts;
    opts.up_to_homothety = true;
    opts.anchor = Complex(0.2, 0.1);  // keep the anchor away from nothing in particular
    const CongruenceReport rep = decide_congruence(a, b, opts);
    REQUIRE(rep.decided);
    CHECK(rep.congruent);
    CHECK(rep.homothety_ratio == doctest::Approx(3.0).epsilon(1e-6));

    // without the flag the two are not congruent
    DecideOptions strict;
    strict.anchor = Complex(0.2, 0.1);
    const CongruenceReport rigid = decide_congruence(a, b, strict);
    REQUIRE(rigid.decided);
    CHECK_FALSE(rigid.congruent);
}

TEST_CASE("congruence report serializes to JSON") {
    const CongruenceReport rep =
        decide_congruence(SurfaceInput::from_chart(families::s1(2, 1.5)),
                          SurfaceInput::from_chart(families::s2(-2, 1.5)), {});
    const std::string text = congruence_report_to_json(rep);
    CHECK(text.find("\"congruent\": true") != std::string::npos);
    CHECK(text.find("curvature_residual") != std::string::npos);
    CHECK(text.find("stages") != std::string::npos);
}
