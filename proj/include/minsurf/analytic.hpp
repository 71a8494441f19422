#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "minsurf/types.hpp"

namespace minsurf::analytic {

/// Expression trees for holomorphic functions of one complex variable:
/// rational operations, integer and rational powers, exp and sqrt.
/// Trees are immutable after construction; evaluation is pure.

enum class BranchTag {
    principal,  // argument taken in (-pi, pi]
    tracked,    // branch chosen by continuity along an evaluation path
};

struct Node;
using Expr = std::shared_ptr<const Node>;

struct RationalExp {
    long long num = 0;
    long long den = 1;  // > 0, reduced
    Real value() const { return static_cast<Real>(num) / static_cast<Real>(den); }
};

struct Node {
    enum class Kind {
        Constant,
        Variable,
        Add,
        Sub,
        Mul,
        Div,
        Neg,
        PowInt,
        PowRational,
        Exp,
        Sqrt,
    };
    Kind kind;
    Complex cval{};              // Constant
    std::string var;             // Variable
    Expr a, b;                   // children (b empty for unary nodes)
    long long ipow = 0;          // PowInt
    RationalExp rpow;            // PowRational
    BranchTag branch = BranchTag::principal;
};

// Builders.
Expr constant(Complex c);
Expr variable(std::string name = "z");
Expr add(Expr x, Expr y);
Expr sub(Expr x, Expr y);
Expr mul(Expr x, Expr y);
Expr div(Expr x, Expr y);
Expr neg(Expr x);
Expr pow_int(Expr x, long long k);
Expr pow_rational(Expr x, long long p, long long q, BranchTag tag = BranchTag::principal);
Expr exp_of(Expr x);
Expr sqrt_of(Expr x, BranchTag tag = BranchTag::principal);

/// Sum of c_k z^k for k = 0..deg; zero coefficients are skipped.
Expr polynomial(std::span<const Complex> coeffs, const std::string& var = "z");

struct JetValue {
    Complex value{};
    Complex derivative{};
};

struct ParseError : MinsurfError {
    ParseError(const std::string& what, std::size_t pos)
        : MinsurfError(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
    std::size_t position;
};

struct EvalError : MinsurfError {
    enum class Kind { Pole, BranchPoint, UnboundVariable, NotFinite };
    EvalError(Kind k, const std::string& what) : MinsurfError(what), kind(k) {}
    Kind kind;
};

using ParamMap = std::map<std::string, Complex, std::less<>>;

/// Parses a formula over tokens: a variable name, `i`, decimal literals,
/// + - * /, ^ with integer or rational (p/q) exponents, exp, sqrt and
/// parentheses. Identifiers found in `params` are bound as constants;
/// any other identifier becomes a free variable.
Expr parse(std::string_view text, const ParamMap& params = {});

/// Canonical printer; parse(print(e)) evaluates identically to e.
/// Branch tags are not part of the text format (everything prints as
/// its principal-branch form).
std::string print(const Expr& e);

std::vector<std::string> free_variables(const Expr& e);

/// Symbolic derivative with respect to the unique free variable.
/// Fractional-power and sqrt nodes are reused inside their own
/// derivative so tracked-branch choices stay aligned with the value.
Expr differentiate(const Expr& e);

/// Value and first complex derivative at z, principal branches.
/// Throws if the expression contains tracked-branch nodes.
JetValue eval(const Expr& e, Complex z);

/// Tracked-branch evaluation: walks `path` (which must start at the
/// expression's anchor point and end at the evaluation point), keeping
/// every tracked node on the sheet reached by continuity.
JetValue eval(const Expr& e, std::span<const Complex> path);

/// Multi-variable value-only evaluation (used for explicit coordinate charts).
Complex eval_value(const Expr& e, const ParamMap& bindings);

/// Incremental form of tracked evaluation; feed path points in order.
class BranchTracker {
  public:
    explicit BranchTracker(Expr e);
    JetValue advance(Complex z);

  private:
    Expr expr_;
    std::map<const Node*, Complex> last_;
    bool first_ = true;
    friend JetValue eval(const Expr&, std::span<const Complex>);
};

}  // namespace minsurf::analytic
