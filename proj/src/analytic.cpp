#include "minsurf/analytic.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace minsurf::analytic {

namespace {

Expr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

long long gcd_ll(long long a, long long b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

}  // namespace

Expr constant(Complex c) {
    Node n;
    n.kind = Node::Kind::Constant;
    n.cval = c;
    return make(std::move(n));
}

Expr variable(std::string name) {
    Node n;
    n.kind = Node::Kind::Variable;
    n.var = std::move(name);
    return make(std::move(n));
}

static Expr binary(Node::Kind k, Expr x, Expr y) {
    Node n;
    n.kind = k;
    n.a = std::move(x);
    n.b = std::move(y);
    return make(std::move(n));
}

Expr add(Expr x, Expr y) { return binary(Node::Kind::Add, std::move(x), std::move(y)); }
Expr sub(Expr x, Expr y) { return binary(Node::Kind::Sub, std::move(x), std::move(y)); }
Expr mul(Expr x, Expr y) { return binary(Node::Kind::Mul, std::move(x), std::move(y)); }
Expr div(Expr x, Expr y) { return binary(Node::Kind::Div, std::move(x), std::move(y)); }

Expr neg(Expr x) {
    Node n;
    n.kind = Node::Kind::Neg;
    n.a = std::move(x);
    return make(std::move(n));
}

Expr pow_int(Expr x, long long k) {
    Node n;
    n.kind = Node::Kind::PowInt;
    n.a = std::move(x);
    n.ipow = k;
    return make(std::move(n));
}

Expr pow_rational(Expr x, long long p, long long q, BranchTag tag) {
    if (q == 0) throw MinsurfError("pow_rational: zero denominator");
    if (q < 0) {
        p = -p;
        q = -q;
    }
    const long long g = gcd_ll(p, q);
    if (g > 1) {
        p /= g;
        q /= g;
    }
    if (q == 1) return pow_int(std::move(x), p);
    Node n;
    n.kind = Node::Kind::PowRational;
    n.a = std::move(x);
    n.rpow = RationalExp{p, q};
    n.branch = tag;
    return make(std::move(n));
}

Expr exp_of(Expr x) {
    Node n;
    n.kind = Node::Kind::Exp;
    n.a = std::move(x);
    return make(std::move(n));
}

Expr sqrt_of(Expr x, BranchTag tag) {
    Node n;
    n.kind = Node::Kind::Sqrt;
    n.a = std::move(x);
    n.branch = tag;
    return make(std::move(n));
}

Expr polynomial(std::span<const Complex> coeffs, const std::string& var) {
    Expr z = variable(var);
    Expr sum;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k] == Complex(0, 0)) continue;
        Expr term;
        if (k == 0)
            term = constant(coeffs[k]);
        else {
            Expr p = (k == 1) ? z : pow_int(z, static_cast<long long>(k));
            term = (coeffs[k] == Complex(1, 0)) ? p : mul(constant(coeffs[k]), p);
        }
        sum = sum ? add(std::move(sum), std::move(term)) : std::move(term);
    }
    return sum ? sum : constant(Complex(0, 0));
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct EvalCtx {
    Complex z{};
    std::string active_var;                    // adopted on first variable hit (single-var mode)
    const ParamMap* bindings = nullptr;        // multi-var mode
    std::map<const Node*, Complex>* branch_state = nullptr;
    bool first_path_point = true;
    Real branch_tol = 1e-8;
};

Complex ipow_value(Complex u, long long k) {
    // binary exponentiation; k >= 0
    Complex acc(1, 0), base = u;
    while (k > 0) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

JetValue eval_node(const Node* n, EvalCtx& ctx) {
    using K = Node::Kind;
    switch (n->kind) {
        case K::Constant:
            return {n->cval, Complex(0, 0)};
        case K::Variable: {
            if (ctx.bindings) {
                auto it = ctx.bindings->find(n->var);
                if (it == ctx.bindings->end())
                    throw EvalError(EvalError::Kind::UnboundVariable,
                                    "unbound variable '" + n->var + "'");
                return {it->second, Complex(0, 0)};
            }
            if (ctx.active_var.empty()) ctx.active_var = n->var;
            if (n->var != ctx.active_var)
                throw EvalError(EvalError::Kind::UnboundVariable,
                                "expression has more than one free variable ('" + ctx.active_var +
                                    "' and '" + n->var + "')");
            return {ctx.z, Complex(1, 0)};
        }
        case K::Add: {
            const JetValue x = eval_node(n->a.get(), ctx), y = eval_node(n->b.get(), ctx);
            return {x.value + y.value, x.derivative + y.derivative};
        }
        case K::Sub: {
            const JetValue x = eval_node(n->a.get(), ctx), y = eval_node(n->b.get(), ctx);
            return {x.value - y.value, x.derivative - y.derivative};
        }
        case K::Mul: {
            const JetValue x = eval_node(n->a.get(), ctx), y = eval_node(n->b.get(), ctx);
            return {x.value * y.value, x.derivative * y.value + x.value * y.derivative};
        }
        case K::Div: {
            const JetValue x = eval_node(n->a.get(), ctx), y = eval_node(n->b.get(), ctx);
            if (y.value == Complex(0, 0))
                throw EvalError(EvalError::Kind::Pole, "pole: division by zero");
            const Complex v = x.value / y.value;
            return {v, (x.derivative - v * y.derivative) / y.value};
        }
        case K::Neg: {
            const JetValue x = eval_node(n->a.get(), ctx);
            return {-x.value, -x.derivative};
        }
        case K::PowInt: {
            const JetValue u = eval_node(n->a.get(), ctx);
            const long long k = n->ipow;
            if (k == 0) return {Complex(1, 0), Complex(0, 0)};
            if (k > 0) {
                const Complex um1 = ipow_value(u.value, k - 1);
                return {um1 * u.value, static_cast<Real>(k) * um1 * u.derivative};
            }
            if (u.value == Complex(0, 0))
                throw EvalError(EvalError::Kind::Pole, "pole: zero base with negative exponent");
            const Complex v = Complex(1, 0) / ipow_value(u.value, -k);
            return {v, static_cast<Real>(k) * v / u.value * u.derivative};
        }
        case K::PowRational:
        case K::Sqrt: {
            const JetValue u = eval_node(n->a.get(), ctx);
            const long long p = (n->kind == K::Sqrt) ? 1 : n->rpow.num;
            const long long q = (n->kind == K::Sqrt) ? 2 : n->rpow.den;
            const Real r = static_cast<Real>(p) / static_cast<Real>(q);
            if (std::abs(u.value) < ctx.branch_tol)
                throw EvalError(EvalError::Kind::BranchPoint,
                                "fractional power evaluated within branch-point tolerance");
            Complex v = std::pow(u.value, r);  // principal sheet
            if (n->branch == BranchTag::tracked) {
                if (!ctx.branch_state)
                    throw EvalError(EvalError::Kind::BranchPoint,
                                    "tracked branch requires an evaluation path");
                auto& state = *ctx.branch_state;
                auto it = state.find(n);
                if (it != state.end() && !ctx.first_path_point) {
                    Complex best = v;
                    Real best_d = std::abs(v - it->second);
                    for (long long k = 1; k < q; ++k) {
                        const Real ang = 2.0 * kPi * static_cast<Real>(k * p) / static_cast<Real>(q);
                        const Complex cand = v * Complex(std::cos(ang), std::sin(ang));
                        const Real d = std::abs(cand - it->second);
                        if (d < best_d) {
                            best_d = d;
                            best = cand;
                        }
                    }
                    v = best;
                }
                state[n] = v;
            }
            return {v, r * v / u.value * u.derivative};
        }
        case K::Exp: {
            const JetValue u = eval_node(n->a.get(), ctx);
            const Complex v = std::exp(u.value);
            return {v, v * u.derivative};
        }
    }
    throw MinsurfError("eval: unknown node kind");
}

bool has_tracked(const Node* n) {
    if (!n) return false;
    if ((n->kind == Node::Kind::PowRational || n->kind == Node::Kind::Sqrt) &&
        n->branch == BranchTag::tracked)
        return true;
    return has_tracked(n->a.get()) || has_tracked(n->b.get());
}

JetValue checked(JetValue j) {
    if (!is_finite(j.value) || !is_finite(j.derivative))
        throw EvalError(EvalError::Kind::NotFinite, "evaluation produced a non-finite value");
    return j;
}

}  // namespace

JetValue eval(const Expr& e, Complex z) {
    if (has_tracked(e.get()))
        throw EvalError(EvalError::Kind::BranchPoint,
                        "expression has tracked branches; supply an evaluation path");
    EvalCtx ctx;
    ctx.z = z;
    return checked(eval_node(e.get(), ctx));
}

JetValue eval(const Expr& e, std::span<const Complex> path) {
    if (path.empty()) throw MinsurfError("eval: empty branch path");
    BranchTracker tracker(e);
    JetValue j{};
    for (const Complex& z : path) j = tracker.advance(z);
    return j;
}

Complex eval_value(const Expr& e, const ParamMap& bindings) {
    EvalCtx ctx;
    ctx.bindings = &bindings;
    const JetValue j = eval_node(e.get(), ctx);
    if (!is_finite(j.value))
        throw EvalError(EvalError::Kind::NotFinite, "evaluation produced a non-finite value");
    return j.value;
}

BranchTracker::BranchTracker(Expr e) : expr_(std::move(e)) {}

JetValue BranchTracker::advance(Complex z) {
    EvalCtx ctx;
    ctx.z = z;
    ctx.branch_state = &last_;
    ctx.first_path_point = first_;
    first_ = false;
    return checked(eval_node(expr_.get(), ctx));
}

// ---------------------------------------------------------------------------
// Differentiation

Expr differentiate(const Expr& e) {
    using K = Node::Kind;
    switch (e->kind) {
        case K::Constant:
            return constant(Complex(0, 0));
        case K::Variable:
            return constant(Complex(1, 0));
        case K::Add:
            return add(differentiate(e->a), differentiate(e->b));
        case K::Sub:
            return sub(differentiate(e->a), differentiate(e->b));
        case K::Mul:
            return add(mul(differentiate(e->a), e->b), mul(e->a, differentiate(e->b)));
        case K::Div:
            return div(sub(mul(differentiate(e->a), e->b), mul(e->a, differentiate(e->b))),
                       pow_int(e->b, 2));
        case K::Neg:
            return neg(differentiate(e->a));
        case K::PowInt: {
            if (e->ipow == 0) return constant(Complex(0, 0));
            return mul(constant(Complex(static_cast<Real>(e->ipow), 0)),
                       mul(pow_int(e->a, e->ipow - 1), differentiate(e->a)));
        }
        case K::PowRational:
            // r * u^r * u' / u, reusing this node so branch choices stay shared
            return mul(constant(Complex(e->rpow.value(), 0)),
                       div(mul(e, differentiate(e->a)), e->a));
        case K::Sqrt:
            return div(differentiate(e->a), mul(constant(Complex(2, 0)), e));
        case K::Exp:
            return mul(e, differentiate(e->a));
    }
    throw MinsurfError("differentiate: unknown node kind");
}

std::vector<std::string> free_variables(const Expr& e) {
    std::vector<std::string> out;
    auto walk = [&](auto&& self, const Node* n) -> void {
        if (!n) return;
        if (n->kind == Node::Kind::Variable) {
            for (const auto& s : out)
                if (s == n->var) return;
            out.push_back(n->var);
            return;
        }
        self(self, n->a.get());
        self(self, n->b.get());
    };
    walk(walk, e.get());
    return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Lexer {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos);
    }
};

struct Parser {
    Lexer lex;
    const ParamMap* params;

    Expr parse_expr() {
        Expr x = parse_term();
        for (;;) {
            if (lex.accept('+'))
                x = add(std::move(x), parse_term());
            else if (lex.accept('-'))
                x = sub(std::move(x), parse_term());
            else
                return x;
        }
    }

    Expr parse_term() {
        Expr x = parse_unary();
        for (;;) {
            if (lex.accept('*'))
                x = mul(std::move(x), parse_unary());
            else if (lex.accept('/'))
                x = div(std::move(x), parse_unary());
            else
                return x;
        }
    }

    Expr parse_unary() {
        if (lex.accept('-')) return neg(parse_unary());
        if (lex.accept('+')) return parse_unary();
        return parse_postfix();
    }

    Expr parse_postfix() {
        Expr x = parse_atom();
        if (lex.accept('^')) {
            auto [p, q] = parse_exponent();
            x = pow_rational(std::move(x), p, q);
            if (lex.peek() == '^')
                throw ParseError("chained '^' requires parentheses", lex.pos);
        }
        return x;
    }

    std::pair<long long, long long> parse_exponent() {
        if (lex.accept('(')) {
            long long p = parse_integer();
            long long q = 1;
            if (lex.accept('/')) q = parse_integer();
            lex.expect(')');
            if (q == 0) throw ParseError("exponent denominator is zero", lex.pos);
            return {p, q};
        }
        return {parse_integer(), 1};
    }

    long long parse_integer() {
        lex.skip_ws();
        std::size_t start = lex.pos;
        bool negative = false;
        if (lex.accept('-')) negative = true;
        lex.skip_ws();
        std::size_t digits_start = lex.pos;
        while (lex.pos < lex.text.size() && std::isdigit(static_cast<unsigned char>(lex.text[lex.pos])))
            ++lex.pos;
        if (lex.pos == digits_start) throw ParseError("expected an integer exponent", start);
        if (lex.pos < lex.text.size() && (lex.text[lex.pos] == '.' || lex.text[lex.pos] == 'e' ||
                                          lex.text[lex.pos] == 'E'))
            throw ParseError("exponent must be an integer or a rational (p/q)", lex.pos);
        long long v = 0;
        auto res = std::from_chars(lex.text.data() + digits_start, lex.text.data() + lex.pos, v);
        if (res.ec != std::errc{}) throw ParseError("bad integer exponent", start);
        return negative ? -v : v;
    }

    Expr parse_atom() {
        lex.skip_ws();
        if (lex.pos >= lex.text.size()) throw ParseError("unexpected end of input", lex.pos);
        const char c = lex.text[lex.pos];
        if (c == '(') {
            ++lex.pos;
            Expr x = parse_expr();
            lex.expect(')');
            return x;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", lex.pos);
    }

    Expr parse_number() {
        std::size_t start = lex.pos;
        while (lex.pos < lex.text.size()) {
            const char c = lex.text[lex.pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                ++lex.pos;
            } else if (c == 'e' || c == 'E') {
                // exponent part of a literal; must be followed by digits or sign
                std::size_t save = lex.pos;
                ++lex.pos;
                if (lex.pos < lex.text.size() && (lex.text[lex.pos] == '+' || lex.text[lex.pos] == '-'))
                    ++lex.pos;
                if (lex.pos < lex.text.size() &&
                    std::isdigit(static_cast<unsigned char>(lex.text[lex.pos]))) {
                    while (lex.pos < lex.text.size() &&
                           std::isdigit(static_cast<unsigned char>(lex.text[lex.pos])))
                        ++lex.pos;
                } else {
                    lex.pos = save;
                    break;
                }
            } else {
                break;
            }
        }
        Real v = 0;
        auto res = std::from_chars(lex.text.data() + start, lex.text.data() + lex.pos, v);
        if (res.ec != std::errc{} || res.ptr != lex.text.data() + lex.pos)
            throw ParseError("bad numeric literal", start);
        return constant(Complex(v, 0));
    }

    Expr parse_identifier() {
        std::size_t start = lex.pos;
        while (lex.pos < lex.text.size() &&
               (std::isalnum(static_cast<unsigned char>(lex.text[lex.pos])) || lex.text[lex.pos] == '_'))
            ++lex.pos;
        std::string name(lex.text.substr(start, lex.pos - start));
        if (name == "i") return constant(Complex(0, 1));
        if (name == "exp" || name == "sqrt") {
            lex.expect('(');
            Expr arg = parse_expr();
            lex.expect(')');
            return name == "exp" ? exp_of(std::move(arg)) : sqrt_of(std::move(arg));
        }
        if (params) {
            auto it = params->find(name);
            if (it != params->end()) return constant(it->second);
        }
        return variable(std::move(name));
    }
};

}  // namespace

Expr parse(std::string_view text, const ParamMap& params) {
    Parser p{Lexer{text, 0}, &params};
    Expr e = p.parse_expr();
    if (!p.lex.eof()) throw ParseError("trailing input", p.lex.pos);
    return e;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

int precedence(const Node* n) {
    using K = Node::Kind;
    switch (n->kind) {
        case K::Add:
        case K::Sub:
            return 1;
        case K::Mul:
        case K::Div:
            return 2;
        case K::Neg:
            return 3;
        case K::PowInt:
        case K::PowRational:
            return 4;
        default:
            return 5;
    }
}

std::string fmt_real(Real v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_complex(Complex c) {
    if (c.imag() == 0) {
        if (c.real() < 0) return "(" + fmt_real(c.real()) + ")";
        return fmt_real(c.real());
    }
    if (c.real() == 0) {
        if (c.imag() == 1) return "i";
        return "(" + fmt_real(c.imag()) + "*i)";
    }
    std::string s = "(" + fmt_real(c.real());
    s += (c.imag() >= 0) ? "+" : "-";
    s += fmt_real(std::abs(c.imag()));
    s += "*i)";
    return s;
}

void print_node(const Node* n, std::string& out);

void print_child(const Node* parent, const Node* child, bool tight, std::string& out) {
    const bool parens = precedence(child) < precedence(parent) ||
                        (tight && precedence(child) == precedence(parent));
    if (parens) out += '(';
    print_node(child, out);
    if (parens) out += ')';
}

void print_node(const Node* n, std::string& out) {
    using K = Node::Kind;
    switch (n->kind) {
        case K::Constant:
            out += fmt_complex(n->cval);
            return;
        case K::Variable:
            out += n->var;
            return;
        case K::Add:
            print_child(n, n->a.get(), false, out);
            out += '+';
            print_child(n, n->b.get(), false, out);
            return;
        case K::Sub:
            print_child(n, n->a.get(), false, out);
            out += '-';
            print_child(n, n->b.get(), true, out);
            return;
        case K::Mul:
            print_child(n, n->a.get(), false, out);
            out += '*';
            print_child(n, n->b.get(), false, out);
            return;
        case K::Div:
            print_child(n, n->a.get(), false, out);
            out += '/';
            print_child(n, n->b.get(), true, out);
            return;
        case K::Neg:
            out += '-';
            print_child(n, n->a.get(), true, out);
            return;
        case K::PowInt: {
            const bool parens = precedence(n->a.get()) < 5;
            if (parens) out += '(';
            print_node(n->a.get(), out);
            if (parens) out += ')';
            out += '^';
            if (n->ipow < 0) {
                out += '(' + std::to_string(n->ipow) + ')';
            } else {
                out += std::to_string(n->ipow);
            }
            return;
        }
        case K::PowRational: {
            const bool parens = precedence(n->a.get()) < 5;
            if (parens) out += '(';
            print_node(n->a.get(), out);
            if (parens) out += ')';
            out += "^(" + std::to_string(n->rpow.num) + "/" + std::to_string(n->rpow.den) + ")";
            return;
        }
        case K::Exp:
            out += "exp(";
            print_node(n->a.get(), out);
            out += ')';
            return;
        case K::Sqrt:
            out += "sqrt(";
            print_node(n->a.get(), out);
            out += ')';
            return;
    }
}

}  // namespace

std::string print(const Expr& e) {
    std::string out;
    print_node(e.get(), out);
    return out;
}

}  // namespace minsurf::analytic
