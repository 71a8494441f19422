#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

#include "minsurf/types.hpp"

namespace minsurf::exact {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Sum of terms q * sqrt(r) with q, r rational and r >= 0. Doubles convert
/// exactly, perfect-square radicands fold into the rational part, and a
/// product of radicals whose radicands multiply to a perfect square (or to
/// zero) collapses back to a rational. This is all the degree-6 coefficient
/// constructions need for their residuals to vanish identically.
class Scalar {
  public:
    Scalar() = default;
    Scalar(int v);
    explicit Scalar(Rational q);
    static Scalar from_double(Real v);
    static Scalar sqrt_of(Rational r);  // r >= 0

    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);

    bool is_zero() const { return terms_.empty(); }
    Real to_double() const;

  private:
    struct Term {
        Rational coef;
        Rational radicand;  // 1 for rational terms
    };
    std::vector<Term> terms_;  // nonzero coefs, distinct radicands
    void push(Rational coef, Rational radicand);
};

inline Scalar operator*(int k, const Scalar& s) { return Scalar(k) * s; }

struct Vec3 {
    Scalar x, y, z;
    Scalar dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Scalar squared() const { return dot(*this); }
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 scaled(const Scalar& s) const { return {s * x, s * y, s * z}; }
    bool is_zero() const { return x.is_zero() && y.is_zero() && z.is_zero(); }

    friend Vec3 operator*(const Scalar& s, const Vec3& v) { return v.scaled(s); }
};

}  // namespace minsurf::exact
