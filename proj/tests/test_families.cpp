#include <doctest.h>

#include <cmath>
#include <random>

#include "minsurf/analytic.hpp"
#include "minsurf/families.hpp"
#include "minsurf/surfgeom.hpp"
#include "minsurf/weierstrass.hpp"

using namespace minsurf;
using namespace minsurf::families;
using exact::Rational;
using exact::Scalar;

TEST_CASE("exact scalars fold radicals") {
    CHECK((Scalar::from_double(0.25) * Scalar(4) - Scalar(1)).is_zero());
    CHECK_FALSE((Scalar::from_double(0.1) * Scalar(10) - Scalar(1)).is_zero());  // binary 0.1

    const Scalar s2 = Scalar::sqrt_of(Rational(2));
    CHECK((s2 * s2 - Scalar(2)).is_zero());
    CHECK((Scalar::sqrt_of(Rational(3, 2)) * Scalar::sqrt_of(Rational(6)) - Scalar(3)).is_zero());
    CHECK(Scalar::sqrt_of(Rational(0)).is_zero());

    // (|p| - p)(|p| + p) = 0 regardless of sign
    for (Real p : {0.37, -1.26}) {
        const Rational rp(p), ap = p < 0 ? Rational(-rp) : rp;
        CHECK((Scalar::sqrt_of(ap - rp) * Scalar::sqrt_of(ap + rp)).is_zero());
    }
    CHECK(Scalar::sqrt_of(Rational(6000)).to_double() == doctest::Approx(std::sqrt(6000.0)));
}

TEST_CASE("r1 coefficient vectors and the corrected seventh equation") {
    const Degree6Coeffs cs = r1_coeffs(1, 500);
    const auto C = cs.to_real();
    CHECK(C(0, 0) == 1.0);                                    // a = (1, 0, 0)
    CHECK(C(1, 1) == 2.0);                                    // b = (0, 2, 0)
    CHECK(C(8, 0) == 500.0);                                  // i = (500, 0, 0)
    CHECK(C(9, 1) == -1000.0);                                // j = (0, -1000, 0)
    CHECK(C(4, 2) == 0.0);                                    // e: radicand |ai| - ai = 0
    CHECK(C(5, 2) == doctest::Approx(-2 * std::sqrt(6000.0)));  // f = (0, 0, -2 sqrt(6) sqrt(1000))

    // hand expansion: -f^2 + 24 a.i - 6 b.j = -24000 + 12000 + 12000 = 0
    const SystemResidual res = check_system(cs);
    CHECK(res.exact[6].is_zero());
    CHECK(res.all_exact_zero());
}

TEST_CASE("family constructors satisfy the 22-equation system exactly") {
    CHECK(check_system(r1_coeffs(-1, 500)).all_exact_zero());
    CHECK(check_system(r1_coeffs(1, -500)).all_exact_zero());
    CHECK(check_system(r2_coeffs(-1, 500)).all_exact_zero());
    CHECK(check_system(assoc_coeffs(1, 500, 0.7)).all_exact_zero());
    CHECK(check_system(s_coeffs(1, 2, 1, -1)).all_exact_zero());
    CHECK(check_system(s_coeffs(3, 0, 1, 0)).all_exact_zero());
    CHECK(check_system(Degree6Coeffs{}).all_exact_zero());  // plane, degenerate but consistent
}

TEST_CASE("random family draws: exact system zeros and isothermal charts") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<Real> mag(0.5, 2.0), ang(0, 2 * kPi);
    auto sgn = [&] { return rng() & 1 ? 1.0 : -1.0; };
    const GridSpec grid{-0.5, 0.5, -0.5, 0.5, 11, 11};
    for (int k = 0; k < 20; ++k) {
        const Real a1 = sgn() * mag(rng), i1 = sgn() * mag(rng);
        const Real a2 = sgn() * mag(rng), c3 = sgn() * mag(rng), d3 = sgn() * mag(rng);
        const Degree6Coeffs draws[] = {
            r1_coeffs(a1, i1),
            r2_coeffs(a2, i1),
            assoc_coeffs(a1, i1, ang(rng)),
            s_coeffs(a1, a2, c3, d3),
        };
        for (const auto& cs : draws) {
            CHECK(check_system(cs).all_exact_zero());
            const Chart chart = degree6_chart(cs);
            const IsothermalReport iso = check_isothermal(chart, grid);
            CHECK(iso.pass);
            CHECK(check_minimal(chart, grid).pass);
        }
    }
}

TEST_CASE("a unit perturbation breaks the system and the isothermal property") {
    Degree6Coeffs cs = r1_coeffs(1, 500);
    cs.f.z += Scalar(1);
    const SystemResidual res = check_system(cs);
    CHECK_FALSE(res.exact[6].is_zero());
    CHECK(std::abs(res.values()(6)) > 1e-3);

    const Chart chart = degree6_chart(cs);
    const GridSpec grid{-1, 1, -1, 1, 21, 21};
    const IsothermalReport iso = check_isothermal(chart, grid);
    CHECK(std::max(iso.max_eg, iso.max_f) > 1e-4);
}

TEST_CASE("degree-6 chart evaluation") {
    const Chart chart = r1(1, 500);
    CHECK((chart.position(1, 0) - Vec3(501, 0, 0)).norm() < 1e-12);
    CHECK(chart.poly_degree == 6);

    // degenerate all-zero chart is constant and flagged by the geometry layer
    const Degree6Coeffs zero{};
    CHECK(zero.all_zero());
    const Chart flat = degree6_chart(zero);
    CHECK_THROWS_AS(fundamental_forms(flat, 0.1, 0.2, 1e-3), GeometryError);
}

TEST_CASE("conjugate surfaces: imaginary part of the r1 curve is r2[-a1, i1]") {
    for (auto [a1, i1] : {std::pair<Real, Real>{1, 500}, {2, 3}}) {
        const Chart c1 = r1(a1, i1);
        const ExtractedPair ep = extract_pair(c1);
        REQUIRE(ep.fit_residual <= 1e-8);
        const Chart conj = chart_imag(ep.pair);
        const Chart c2 = r2(-a1, i1);
        for (Real u : {-0.9, 0.2, 0.6})
            for (Real v : {-0.5, 0.8}) {
                CHECK((conj.position(u, v) - c2.position(u, v)).norm() <=
                      1e-9 * (1 + c2.position(u, v).norm()));
            }
    }
}

TEST_CASE("associated family endpoints match r1 and r2") {
    const Chart a0 = assoc_family(1, 500, 0);
    const Chart c1 = r1(1, 500);
    const Chart aq = assoc_family(1, 500, kPi / 2);
    const Chart c2 = r2(-1, 500);
    for (Real u : {-0.4, 0.7})
        for (Real v : {0.1, -0.8}) {
            CHECK((a0.position(u, v) - c1.position(u, v)).norm() < 1e-12);
            CHECK((aq.position(u, v) - c2.position(u, v)).norm() < 1e-12);
        }
}

TEST_CASE("extract_pair recovers the printed generators of the families") {
    // r1[1,500]: f = 4 i1 z = 2000 z, g = sqrt(3) i / sqrt(500) z^2
    {
        const ExtractedPair ep = extract_pair(r1(1, 500));
        CHECK(ep.fit_residual <= 1e-8);
        const Complex z(0.31, -0.62);
        CHECK(std::abs(analytic::eval(ep.pair.f, z).value - Real(2000) * z) <= 1e-6 * 2000);
        const Complex gcoef(0, std::sqrt(3.0 / 500.0));
        CHECK(std::abs(analytic::eval(ep.pair.g, z).value - gcoef * z * z) <= 1e-9);
    }
    // assoc at t = 1: f = 2000 e^{-i} z
    {
        const ExtractedPair ep = extract_pair(assoc_family(1, 500, 1.0));
        const Complex z(0.4, 0.2);
        const Complex expect = Real(2000) * std::exp(Complex(0, -1)) * z;
        CHECK(std::abs(analytic::eval(ep.pair.f, z).value - expect) <= 1e-6 * 2000);
    }
    // s1[2, 1.5]: f = -25 c3^2/(12 a1) z^3, g = -12 a1 / (5 c3) z
    {
        const ExtractedPair ep = extract_pair(s1(2, 1.5), -1, 0.5);
        CHECK(ep.fit_residual <= 1e-8);
        const Complex z(0.21, 0.12);
        CHECK(std::abs(analytic::eval(ep.pair.f, z).value - Real(-25 * 2.25 / 24) * z * z * z) <=
              1e-9);
        CHECK(std::abs(analytic::eval(ep.pair.g, z).value - Real(-3.2) * z) <= 1e-9);
    }
    // s[1,2,1,-1]: the complex-coefficient pair
    {
        const ExtractedPair ep = extract_pair(s_family(1, 2, 1, -1), -1, 0.5);
        CHECK(ep.fit_residual <= 1e-8);
        const Complex z(-0.3, 0.18);
        const Complex fc = Real(-25) * Complex(1, 1) * Complex(1, 1) / (Real(12) * Complex(1, 2));
        const Complex gc = Real(-12) * Complex(1, 2) / (Real(5) * Complex(1, 1));
        CHECK(std::abs(analytic::eval(ep.pair.f, z).value - fc * z * z * z) <= 1e-8);
        CHECK(std::abs(analytic::eval(ep.pair.g, z).value - gc * z) <= 1e-8);
    }
}

TEST_CASE("coefficient JSON round trip") {
    const Degree6Coeffs cs = s_coeffs(1, 2, 1, -1);
    const std::string text = coeffs_to_json(cs);
    const Degree6Coeffs back = coeffs_from_json(text);
    CHECK((back.to_real() - cs.to_real()).cwiseAbs().maxCoeff() == 0.0);
    // exactness does not survive the double round trip (e-components are not
    // dyadic), but the residual stays at round-off scale
    CHECK(check_system(back).max_abs() <= 1e-12);

    const Degree6Coeffs r1rt = coeffs_from_json(coeffs_to_json(r1_coeffs(1, 500)));
    CHECK(check_system(r1rt).max_abs() <= 1e-9);

    CHECK_THROWS_AS(coeffs_from_json("{\"a\": [1, 2]}"), FamilyError);
    CHECK_THROWS_AS(coeffs_from_json("not json"), FamilyError);
}

TEST_CASE("family parameter preconditions") {
    CHECK_THROWS_AS(r1_coeffs(0, 0), FamilyError);
    CHECK_THROWS_AS(assoc_coeffs(1, 0, 0.5), FamilyError);
    CHECK_THROWS_AS(s_coeffs(0, 0, 1, 1), FamilyError);
}
