#include "minsurf/families.hpp"

#include <cmath>

#include <json.hpp>

namespace minsurf::families {

using exact::Rational;
using exact::Scalar;

exact::Vec3& Degree6Coeffs::by_index(int idx) {
    exact::Vec3* v[] = {&a, &b, &c, &d, &e, &f, &g, &h, &i, &j, &k, &l, &m};
    if (idx < 0 || idx >= 13) throw FamilyError("coefficient index out of range");
    return *v[idx];
}

const exact::Vec3& Degree6Coeffs::by_index(int idx) const {
    return const_cast<Degree6Coeffs*>(this)->by_index(idx);
}

Eigen::Matrix<Real, 13, 3> Degree6Coeffs::to_real() const {
    Eigen::Matrix<Real, 13, 3> out;
    for (int r = 0; r < 13; ++r) {
        const exact::Vec3& v = by_index(r);
        out(r, 0) = v.x.to_double();
        out(r, 1) = v.y.to_double();
        out(r, 2) = v.z.to_double();
    }
    return out;
}

bool Degree6Coeffs::all_zero() const {
    for (int r = 0; r < 13; ++r)
        if (!by_index(r).is_zero()) return false;
    return true;
}

SystemResidual check_system(const Degree6Coeffs& cs) {
    const exact::Vec3 &a = cs.a, &b = cs.b, &c = cs.c, &d = cs.d, &e = cs.e, &f = cs.f, &g = cs.g,
                      &h = cs.h, &i = cs.i, &j = cs.j, &k = cs.k, &l = cs.l;
    SystemResidual r;
    r.exact[0] = 4 * a.squared() - b.squared();
    r.exact[1] = a.dot(b);
    r.exact[2] = 2 * a.dot(c) - b.dot(d);
    r.exact[3] = 2 * a.dot(d) + b.dot(c);
    r.exact[4] = 25 * c.squared() - 25 * d.squared() + 48 * a.dot(e) - 6 * b.dot(f);
    r.exact[5] = 25 * d.dot(c) + 12 * b.dot(e) + 6 * a.dot(f);
    r.exact[6] = 16 * e.squared() - f.squared() + 30 * c.dot(g) + 30 * d.dot(h) + 24 * a.dot(i) -
                 6 * b.dot(j);
    r.exact[7] = 4 * e.dot(f) - 15 * c.dot(h) + 15 * d.dot(g) + 6 * b.dot(i) + 6 * a.dot(j);
    r.exact[8] = 9 * g.squared() - 9 * h.squared() + 16 * e.dot(i) - 2 * f.dot(j) + 10 * c.dot(k) -
                 10 * l.dot(d);
    r.exact[9] = 9 * g.dot(h) - 2 * f.dot(i) - 4 * e.dot(j) - 5 * d.dot(k) - 5 * c.dot(l);
    r.exact[10] = 4 * i.squared() - j.squared() + 6 * g.dot(k) + 6 * h.dot(l);
    r.exact[11] = 2 * i.dot(j) + 3 * g.dot(l) - 3 * h.dot(k);
    r.exact[12] = 18 * a.dot(g) + 9 * b.dot(h) + 20 * e.dot(c) - 5 * f.dot(d);
    r.exact[13] = 18 * a.dot(h) - 9 * b.dot(g) - 20 * e.dot(d) - 5 * f.dot(c);
    r.exact[14] =
        6 * a.dot(k) - 3 * b.dot(l) + 10 * c.dot(i) - 5 * d.dot(j) + 12 * e.dot(g) + 3 * f.dot(h);
    r.exact[15] =
        6 * a.dot(l) + 3 * b.dot(k) + 5 * c.dot(j) + 10 * d.dot(i) + 3 * f.dot(g) - 12 * e.dot(h);
    r.exact[16] = 4 * e.dot(k) - f.dot(l) + 3 * h.dot(j) + 6 * g.dot(i);
    r.exact[17] = 4 * e.dot(l) + f.dot(k) + 3 * g.dot(j) - 6 * h.dot(i);
    r.exact[18] = 2 * l.dot(i) + k.dot(j);
    r.exact[19] = 2 * k.dot(i) - l.dot(j);
    r.exact[20] = k.squared() - l.squared();
    r.exact[21] = k.dot(l);
    return r;
}

Eigen::Matrix<Real, 22, 1> SystemResidual::values() const {
    Eigen::Matrix<Real, 22, 1> v;
    for (int n = 0; n < 22; ++n) v(n) = exact[n].to_double();
    return v;
}

bool SystemResidual::all_exact_zero() const {
    for (const Scalar& s : exact)
        if (!s.is_zero()) return false;
    return true;
}

Real SystemResidual::max_abs() const { return values().cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------
// Chart evaluation

namespace {

// Each basis polynomial is Re(mu z^m) for a complex multiplier mu.
struct BasisEntry {
    Complex mu;
    int m;
};

const std::array<BasisEntry, 13> kBasis = {{
    {Complex(1, 0), 6},      // a
    {Complex(0, -0.5), 6},   // b
    {Complex(1, 0), 5},      // c
    {Complex(0, -1), 5},     // d
    {Complex(1, 0), 4},      // e
    {Complex(0, -0.25), 4},  // f
    {Complex(1, 0), 3},      // g
    {Complex(0, 1), 3},      // h
    {Complex(1, 0), 2},      // i
    {Complex(0, -0.5), 2},   // j
    {Complex(1, 0), 1},      // k
    {Complex(0, -1), 1},     // l
    {Complex(1, 0), 0},      // m
}};

}  // namespace

Chart degree6_chart(const Degree6Coeffs& coeffs) {
    const Eigen::Matrix<Real, 13, 3> C = coeffs.to_real();
    Chart chart;
    chart.provenance = Chart::Provenance::polynomial_family;
    chart.poly_degree = 6;
    chart.jet = [C](Real u, Real v) -> ChartJet {
        Complex zp[7];  // z^0 .. z^6
        zp[0] = Complex(1, 0);
        const Complex z(u, v);
        for (int n = 1; n <= 6; ++n) zp[n] = zp[n - 1] * z;
        ChartJet j;
        for (int r = 0; r < 13; ++r) {
            const auto& [mu, m] = kBasis[r];
            const Vec3 row = C.row(r).transpose();
            j.x += std::real(mu * zp[m]) * row;
            if (m >= 1) {
                const Complex d1 = mu * Real(m) * zp[m - 1];
                j.xu += std::real(d1) * row;
                j.xv += -std::imag(d1) * row;
            }
            if (m >= 2) {
                const Complex d2 = mu * Real(m * (m - 1)) * zp[m - 2];
                j.xuu += std::real(d2) * row;
                j.xuv += -std::imag(d2) * row;
                j.xvv += -std::real(d2) * row;
            }
        }
        return j;
    };
    chart.position = [jet = chart.jet](Real u, Real v) { return jet(u, v).x; };
    return chart;
}

// ---------------------------------------------------------------------------
// Shape-parameter constructors

namespace {

// sqrt(3/2) * sqrt(|p| - p) and -2 sqrt(6) * sqrt(|p| + p) for p = a*i
Scalar radical_e3(const Rational& p) {
    const Rational ap = p < 0 ? Rational(-p) : p;
    return Scalar::sqrt_of(Rational(3, 2) * (ap - p));
}

Scalar radical_f3(const Rational& p) {
    const Rational ap = p < 0 ? Rational(-p) : p;
    return -2 * Scalar::sqrt_of(6 * (ap + p));
}

Scalar sc(Real v) { return Scalar::from_double(v); }

}  // namespace

Degree6Coeffs r1_coeffs(Real a1, Real i1) {
    if (a1 == 0 && i1 == 0) throw FamilyError("r1 requires (a1, i1) != (0, 0)");
    const Rational p = Rational(a1) * Rational(i1);
    Degree6Coeffs cs;
    cs.a.x = sc(a1);
    cs.b.y = 2 * sc(a1);
    cs.i.x = sc(i1);
    cs.j.y = -2 * sc(i1);
    cs.e.z = radical_e3(p);
    cs.f.z = radical_f3(p);
    return cs;
}

Degree6Coeffs r2_coeffs(Real a2, Real i2) {
    if (a2 == 0 && i2 == 0) throw FamilyError("r2 requires (a2, i2) != (0, 0)");
    const Rational p = Rational(a2) * Rational(i2);
    Degree6Coeffs cs;
    cs.a.y = sc(a2);
    cs.b.x = -2 * sc(a2);
    cs.i.y = sc(i2);
    cs.j.x = 2 * sc(i2);
    cs.e.z = radical_e3(p);
    cs.f.z = radical_f3(p);
    return cs;
}

Degree6Coeffs assoc_coeffs(Real a1, Real i1, Real t) {
    if (a1 * i1 == 0) throw FamilyError("assoc requires a1 * i1 != 0");
    const Degree6Coeffs x = r1_coeffs(a1, i1);
    // conjugate chart of r1[a1,i1]: r2[-a1,i1] except that the exact imaginary
    // part carries +sqrt(24 (|p| - p)) on the f-component, which flips the
    // printed r2 sign when a1 i1 < 0 (both agree for a1 i1 > 0)
    Degree6Coeffs y = r2_coeffs(-a1, i1);
    const Rational p = Rational(a1) * Rational(i1);
    const Rational ap = p < 0 ? Rational(-p) : p;
    y.f.z = 2 * Scalar::sqrt_of(6 * (ap - p));
    const Scalar ct = sc(std::cos(t)), st = sc(std::sin(t));
    Degree6Coeffs out;
    for (int r = 0; r < 13; ++r)
        out.by_index(r) = ct * x.by_index(r) + st * y.by_index(r);
    return out;
}

Degree6Coeffs s_coeffs(Real a1, Real a2, Real c3, Real d3) {
    if (a1 == 0 && a2 == 0) throw FamilyError("s requires a1^2 + a2^2 > 0");
    const Rational ra1(a1), ra2(a2), rc3(c3), rd3(d3);
    const Rational den = 96 * (ra1 * ra1 + ra2 * ra2);
    const Rational e1 = 25 * (-ra1 * rc3 * rc3 + 2 * ra2 * rc3 * rd3 + ra1 * rd3 * rd3) / den;
    const Rational e2 = 25 * (-ra2 * rc3 * rc3 - 2 * ra1 * rc3 * rd3 + ra2 * rd3 * rd3) / den;
    Degree6Coeffs cs;
    cs.a.x = Scalar(ra1);
    cs.a.y = Scalar(ra2);
    cs.b.x = Scalar(-2 * ra2);
    cs.b.y = Scalar(2 * ra1);
    cs.c.z = Scalar(rc3);
    cs.d.z = Scalar(rd3);
    cs.e.x = Scalar(e1);
    cs.e.y = Scalar(e2);
    cs.f.x = Scalar(4 * e2);
    cs.f.y = Scalar(-4 * e1);
    return cs;
}

Chart r1(Real a1, Real i1) { return degree6_chart(r1_coeffs(a1, i1)); }
Chart r2(Real a2, Real i2) { return degree6_chart(r2_coeffs(a2, i2)); }

Chart assoc_family(Real a1, Real i1, Real t) {
    Chart c = degree6_chart(assoc_coeffs(a1, i1, t));
    c.provenance = Chart::Provenance::polynomial_family;
    c.assoc_angle = t;
    return c;
}

Chart s_family(Real a1, Real a2, Real c3, Real d3) {
    return degree6_chart(s_coeffs(a1, a2, c3, d3));
}

Chart s1(Real a1, Real c3) { return s_family(a1, 0, c3, 0); }
Chart s2(Real a2, Real d3) { return s_family(0, a2, 0, d3); }

// ---------------------------------------------------------------------------
// JSON I/O (13 named vectors, plain doubles)

std::string coeffs_to_json(const Degree6Coeffs& coeffs) {
    nlohmann::json j;
    const Eigen::Matrix<Real, 13, 3> C = coeffs.to_real();
    for (int r = 0; r < 13; ++r) j[Degree6Coeffs::names[r]] = {C(r, 0), C(r, 1), C(r, 2)};
    return j.dump(2);
}

Degree6Coeffs coeffs_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FamilyError(std::string("bad coefficient JSON: ") + e.what());
    }
    Degree6Coeffs cs;
    for (int r = 0; r < 13; ++r) {
        const char* name = Degree6Coeffs::names[r];
        if (!j.contains(name)) continue;  // missing vectors stay zero
        const auto& arr = j.at(name);
        if (!arr.is_array() || arr.size() != 3)
            throw FamilyError(std::string("coefficient '") + name + "' must be a 3-vector");
        exact::Vec3& v = cs.by_index(r);
        v.x = Scalar::from_double(arr[0].get<Real>());
        v.y = Scalar::from_double(arr[1].get<Real>());
        v.z = Scalar::from_double(arr[2].get<Real>());
    }
    return cs;
}

}  // namespace minsurf::families
