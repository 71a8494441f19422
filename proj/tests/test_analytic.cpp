#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "minsurf/analytic.hpp"

using namespace minsurf;
using namespace minsurf::analytic;

namespace {

// Independent derivative oracle: central finite difference.
Complex central_difference(const Expr& e, Complex z, Real h = 1e-6) {
    const Complex fp = eval(e, z + Complex(h, 0)).value;
    const Complex fm = eval(e, z - Complex(h, 0)).value;
    return (fp - fm) / (2 * h);
}

bool close(Complex a, Complex b, Real tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("parse produces the expected node kinds") {
    Expr e = parse("z");
    CHECK(e->kind == Node::Kind::Variable);
    CHECK(e->var == "z");

    Expr f = parse("exp(-z)");
    CHECK(f->kind == Node::Kind::Exp);
    CHECK(eval(f, Complex(0, 0)).value == Complex(1, 0));
}

TEST_CASE("parse binds named parameters as constants") {
    ParamMap params{{"t", Complex(0, 0)}};
    Expr e = parse("4*500*exp(-i*t)*z", params);
    const JetValue j = eval(e, Complex(0.37, -0.11));
    CHECK(close(j.derivative, Complex(2000, 0), 1e-12));
    CHECK(close(j.value, Complex(2000, 0) * Complex(0.37, -0.11), 1e-9));
}

TEST_CASE("parse reports syntax errors with a position") {
    CHECK_THROWS_AS(parse("z + * 2"), ParseError);
    CHECK_THROWS_AS(parse("exp(z"), ParseError);
    CHECK_THROWS_AS(parse("z^1.5"), ParseError);
    CHECK_THROWS_AS(parse("z^(1/0)"), ParseError);
    CHECK_THROWS_AS(parse("z^2^3"), ParseError);
}

TEST_CASE("jet evaluation of simple expressions") {
    Expr sq = parse("z^2");
    const JetValue j = eval(sq, Complex(1, 1));
    CHECK(close(j.value, Complex(0, 2), 1e-15));
    CHECK(close(j.derivative, Complex(2, 2), 1e-15));

    Expr ex = parse("exp(z)");
    const JetValue k = eval(ex, Complex(0, 0));
    CHECK(close(k.value, Complex(1, 0), 1e-15));
    CHECK(close(k.derivative, Complex(1, 0), 1e-15));
}

TEST_CASE("principal fractional power at w = i") {
    Expr e = parse("(-w^2)^(1/5)");
    const JetValue j = eval(e, Complex(0, 1));
    CHECK(close(j.value, Complex(1, 0), 1e-14));
    // derivative oracle: central difference with step 1e-6
    const Complex fd = central_difference(e, Complex(0, 1));
    CHECK(close(j.derivative, fd, 1e-8));
    CHECK(close(j.derivative, Complex(0, -0.4), 1e-12));  // (1/5)(-w^2)^(-4/5)(-2w) at w=i
}

TEST_CASE("poles and branch points are reported") {
    Expr inv = parse("1/z");
    CHECK_THROWS_AS(eval(inv, Complex(0, 0)), EvalError);
    Expr frac = parse("z^(1/3)");
    CHECK_THROWS_AS(eval(frac, Complex(1e-10, 0)), EvalError);
}

TEST_CASE("symbolic differentiation matches hand results") {
    Expr dsq = differentiate(parse("z^2"));
    CHECK(close(eval(dsq, Complex(1.5, -0.5)).value, Complex(3, -1), 1e-14));

    Expr dex = differentiate(parse("exp(z)"));
    CHECK(close(eval(dex, Complex(0.3, 0.2)).value, std::exp(Complex(0.3, 0.2)), 1e-14));

    // d/dz (b z^n) = n b z^(n-1)
    ParamMap params{{"b", Complex(2, 1)}};
    Expr mono = parse("b*z^5", params);
    Expr dmono = differentiate(mono);
    const Complex z(0.8, -0.3);
    CHECK(close(eval(dmono, z).value, Complex(10, 5) * std::pow(z, 4), 1e-12));
}

TEST_CASE("AD derivative agrees with central differences at random points") {
    const std::vector<Expr> exprs = {
        parse("z^3 - 2*z + 1"),
        parse("exp(z)*z^2"),
        parse("(1 - z^2)/(1 + z^2)"),
        parse("sqrt(z + 3)"),
        parse("exp(-z)*(1 + z)^2"),
        parse("(z^2 + 1)^(2/3)"),
    };
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<Real> u(-0.8, 0.8);
    for (const Expr& e : exprs) {
        int checked = 0;
        while (checked < 100) {
            const Complex z(u(rng) + 1.5, u(rng));  // shifted right of poles/branch points
            JetValue j;
            try {
                j = eval(e, z);
            } catch (const EvalError&) {
                continue;
            }
            const Complex fd = central_difference(e, z);
            CHECK(std::abs(j.derivative - fd) <= 1e-6 * (1 + std::abs(j.derivative)));
            ++checked;
        }
    }
}

TEST_CASE("print round-trips through parse") {
    const std::vector<Expr> exprs = {
        parse("z^2 - 3*z + 2"),
        parse("exp(-z)*(1+z)"),
        parse("(z - 1)/(z + 2)"),
        parse("sqrt(1 + z^2)"),
        parse("(-z^2)^(1/5)"),
        differentiate(parse("exp(z^2)*(z-4)^3")),
        parse("1.5e-3*z + 2.25"),
    };
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<Real> u(-0.5, 0.5);
    for (const Expr& e : exprs) {
        Expr round = parse(print(e));
        for (int k = 0; k < 20; ++k) {
            const Complex z(u(rng) + 2.0, u(rng));
            Complex a, b;
            try {
                a = eval(e, z).value;
                b = eval(round, z).value;
            } catch (const EvalError&) {
                continue;
            }
            CHECK(std::abs(a - b) <= 1e-12 * (1 + std::abs(a)));
        }
    }
}

TEST_CASE("tracked branch returns to start on a loop around no branch point") {
    // sqrt(z), tracked, on a circle of radius 0.3 around 2 (branch point at 0 stays outside)
    Expr e = sqrt_of(variable("z"), BranchTag::tracked);
    std::vector<Complex> path;
    const int n = 200;
    for (int k = 0; k <= n; ++k) {
        const Real t = 2 * kPi * k / n;
        path.push_back(Complex(2, 0) + Real(0.3) * Complex(std::cos(t), std::sin(t)));
    }
    const Complex start = eval(e, std::span<const Complex>(path.data(), 1)).value;
    const Complex back = eval(e, path).value;
    CHECK(std::abs(back - start) <= 1e-9);
}

TEST_CASE("tracked branch follows continuation around a branch point") {
    // A full loop around 0 lands sqrt on the other sheet.
    Expr e = sqrt_of(variable("z"), BranchTag::tracked);
    std::vector<Complex> path;
    const int n = 400;
    for (int k = 0; k <= n; ++k) {
        const Real t = 2 * kPi * k / n;
        path.push_back(Complex(std::cos(t), std::sin(t)));
    }
    const Complex back = eval(e, path).value;
    CHECK(std::abs(back - Complex(-1, 0)) <= 1e-9);
}

TEST_CASE("multi-variable value evaluation for chart expressions") {
    Expr e = parse("u^2 - v^2 + 3*u*v");
    ParamMap b{{"u", Complex(2, 0)}, {"v", Complex(1, 0)}};
    CHECK(eval_value(e, b) == Complex(9, 0));
    ParamMap missing{{"u", Complex(2, 0)}};
    CHECK_THROWS_AS(eval_value(e, missing), EvalError);
}
