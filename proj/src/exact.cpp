#include "minsurf/exact.hpp"

#include <cmath>

namespace minsurf::exact {

namespace {

// folds sqrt(r) into (q', r'): q' rational factor, r' = 1 if r is a perfect square
bool perfect_square_root(const Rational& r, Rational& root) {
    const BigInt num = numerator(r), den = denominator(r);
    const BigInt sn = sqrt(num), sd = sqrt(den);
    if (sn * sn == num && sd * sd == den) {
        root = Rational(sn, sd);
        return true;
    }
    return false;
}

}  // namespace

Scalar::Scalar(int v) {
    if (v != 0) terms_.push_back(Term{Rational(v), Rational(1)});
}

Scalar::Scalar(Rational q) {
    if (q != 0) terms_.push_back(Term{std::move(q), Rational(1)});
}

Scalar Scalar::from_double(Real v) { return Scalar(Rational(v)); }

Scalar Scalar::sqrt_of(Rational r) {
    if (r < 0) throw MinsurfError("exact::Scalar: negative radicand");
    Scalar s;
    s.push(Rational(1), std::move(r));
    return s;
}

void Scalar::push(Rational coef, Rational radicand) {
    if (coef == 0 || radicand == 0) return;
    Rational root;
    if (perfect_square_root(radicand, root)) {
        coef *= root;
        radicand = 1;
    }
    for (auto& t : terms_) {
        if (t.radicand == radicand) {
            t.coef += coef;
            if (t.coef == 0) {
                t = terms_.back();
                terms_.pop_back();
            }
            return;
        }
    }
    terms_.push_back(Term{std::move(coef), std::move(radicand)});
}

Scalar Scalar::operator+(const Scalar& o) const {
    Scalar r = *this;
    for (const auto& t : o.terms_) r.push(t.coef, t.radicand);
    return r;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    for (const auto& t : o.terms_) push(t.coef, t.radicand);
    return *this;
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator-() const {
    Scalar r = *this;
    for (auto& t : r.terms_) t.coef = -t.coef;
    return r;
}

Scalar Scalar::operator*(const Scalar& o) const {
    Scalar r;
    for (const auto& s : terms_)
        for (const auto& t : o.terms_) r.push(s.coef * t.coef, s.radicand * t.radicand);
    return r;
}

Real Scalar::to_double() const {
    Real acc = 0;
    for (const auto& t : terms_)
        acc += t.coef.convert_to<Real>() * std::sqrt(t.radicand.convert_to<Real>());
    return acc;
}

}  // namespace minsurf::exact
