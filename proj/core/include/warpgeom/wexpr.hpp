#pragma once

// Small analytic expression language in one variable `r`, used to describe
// warping functions. Expressions are immutable trees; differentiation is
// symbolic and stays inside the grammar.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative, rational exponent
//   primary := number | 'r' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | sinh | cosh | exp | ln | sqrt

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace warpgeom::wexpr {

/// Exact rational p/q with q > 0 and gcd(p, q) = 1.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(std::int64_t p, std::int64_t q);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_integer() const { return den == 1; }
    friend bool operator==(const Rational&, const Rational&) = default;
};

enum class Func { Sin, Cos, Sinh, Cosh, Exp, Ln, Sqrt };
enum class Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

struct Node;

class Expr {
public:
    Expr();  // the constant 0

    static Expr constant(double c);
    static Expr variable();

    Kind kind() const;
    double constant_value() const;  // Kind::Const only
    Func func() const;              // Kind::Call only
    Rational exponent() const;      // Kind::Pow only
    Expr lhs() const;               // first operand (Neg/Call/Pow use lhs only)
    Expr rhs() const;

    bool is_constant() const { return kind() == Kind::Const; }
    bool depends_on_r() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    friend Expr pow(const Expr& base, Rational exponent);
    friend Expr call(Func f, const Expr& arg);

    /// Structural equality after construction-time folding.
    bool same_as(const Expr& other) const;

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, Rational exponent);
Expr call(Func f, const Expr& arg);

/// Parses `source`; throws ParseError carrying the byte offset of the
/// offending token and the set of tokens that would have been accepted.
Expr parse(std::string_view source);

/// d/dr of `e`. Only literal arithmetic is folded.
Expr differentiate(const Expr& e);

/// Value of `e` at `r`. Throws DomainError instead of producing NaN.
double evaluate(const Expr& e, double r);

/// Text that parses back to an expression evaluating identically.
std::string print(const Expr& e);

std::string_view func_name(Func f);

}  // namespace warpgeom::wexpr
