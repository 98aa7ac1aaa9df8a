#include "warpgeom/wexpr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "warpgeom/error.hpp"

namespace warpgeom::wexpr {

struct Node {
    Kind kind = Kind::Const;
    double value = 0.0;
    Func func = Func::Sin;
    Rational exponent{};
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
    bool has_var = false;
};

namespace {

constexpr std::array<std::pair<std::string_view, Func>, 7> kFunctions{{
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"sinh", Func::Sinh},
    {"cosh", Func::Cosh},
    {"exp", Func::Exp},
    {"ln", Func::Ln},
    {"sqrt", Func::Sqrt},
}};

std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
    std::int64_t out = 0;
    if (__builtin_mul_overflow(x, y, &out)) throw DomainError("rational exponent overflow");
    return out;
}

std::int64_t checked_add(std::int64_t x, std::int64_t y) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(x, y, &out)) throw DomainError("rational exponent overflow");
    return out;
}

Rational add(Rational x, Rational y) {
    return Rational::make(checked_add(checked_mul(x.num, y.den), checked_mul(y.num, x.den)),
                          checked_mul(x.den, y.den));
}
Rational sub(Rational x, Rational y) { return add(x, Rational::make(-y.num, y.den)); }
Rational mul(Rational x, Rational y) {
    return Rational::make(checked_mul(x.num, y.num), checked_mul(x.den, y.den));
}
Rational div(Rational x, Rational y) {
    if (y.num == 0) throw DomainError("division by zero in exponent");
    return Rational::make(checked_mul(x.num, y.den), checked_mul(x.den, y.num));
}

double apply(Func f, double x) {
    switch (f) {
        case Func::Sin: return std::sin(x);
        case Func::Cos: return std::cos(x);
        case Func::Sinh: return std::sinh(x);
        case Func::Cosh: return std::cosh(x);
        case Func::Exp: return std::exp(x);
        case Func::Ln:
            if (!(x > 0.0)) throw DomainError("ln of nonpositive argument " + std::to_string(x));
            return std::log(x);
        case Func::Sqrt:
            if (x < 0.0) throw DomainError("sqrt of negative argument " + std::to_string(x));
            return std::sqrt(x);
    }
    return 0.0;
}

double rational_power(double base, Rational e) {
    if (base == 0.0 && e.num < 0) throw DomainError("zero raised to a negative power");
    if (e.is_integer()) return std::pow(base, static_cast<double>(e.num));
    if (base < 0.0) {
        if (e.den % 2 == 0) throw DomainError("even root of negative base " + std::to_string(base));
        double mag = std::pow(-base, e.value());
        return (e.num % 2 != 0) ? -mag : mag;
    }
    return std::pow(base, e.value());
}

std::shared_ptr<const Node> make_node(Node n) {
    n.has_var = n.kind == Kind::Var || (n.a && n.a->has_var) || (n.b && n.b->has_var);
    return std::make_shared<const Node>(std::move(n));
}

}  // namespace

Rational Rational::make(std::int64_t p, std::int64_t q) {
    if (q == 0) throw DomainError("rational with zero denominator");
    if (q < 0) {
        p = -p;
        q = -q;
    }
    std::int64_t g = std::gcd(p < 0 ? -p : p, q);
    if (g > 1) {
        p /= g;
        q /= g;
    }
    return Rational{p, q};
}

Expr::Expr() : node_(make_node(Node{})) {}

Expr Expr::constant(double c) {
    Node n;
    n.kind = Kind::Const;
    n.value = c;
    return Expr(make_node(std::move(n)));
}

Expr Expr::variable() {
    Node n;
    n.kind = Kind::Var;
    return Expr(make_node(std::move(n)));
}

Kind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
Func Expr::func() const { return node_->func; }
Rational Expr::exponent() const { return node_->exponent; }
Expr Expr::lhs() const { return Expr(node_->a); }
Expr Expr::rhs() const { return Expr(node_->b); }
bool Expr::depends_on_r() const { return node_->has_var; }

bool Expr::same_as(const Expr& other) const {
    const Node& x = *node_;
    const Node& y = *other.node_;
    if (x.kind != y.kind) return false;
    switch (x.kind) {
        case Kind::Const: return x.value == y.value;
        case Kind::Var: return true;
        case Kind::Neg: return lhs().same_as(other.lhs());
        case Kind::Pow: return x.exponent == y.exponent && lhs().same_as(other.lhs());
        case Kind::Call: return x.func == y.func && lhs().same_as(other.lhs());
        default: return lhs().same_as(other.lhs()) && rhs().same_as(other.rhs());
    }
}

namespace {

bool is_const(const Expr& e, double v) { return e.is_constant() && e.constant_value() == v; }

}  // namespace

// Node construction needs access to the private constructor, so the folding
// constructors live here as friends.
Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() + b.constant_value());
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    Node n;
    n.kind = Kind::Add;
    n.a = a.node_;
    n.b = b.node_;
    return Expr(make_node(std::move(n)));
}

Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() - b.constant_value());
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return -b;
    Node n;
    n.kind = Kind::Sub;
    n.a = a.node_;
    n.b = b.node_;
    return Expr(make_node(std::move(n)));
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() * b.constant_value());
    if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    Node n;
    n.kind = Kind::Mul;
    n.a = a.node_;
    n.b = b.node_;
    return Expr(make_node(std::move(n)));
}

Expr operator/(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0)
        return Expr::constant(a.constant_value() / b.constant_value());
    if (is_const(b, 1.0)) return a;
    Node n;
    n.kind = Kind::Div;
    n.a = a.node_;
    n.b = b.node_;
    return Expr(make_node(std::move(n)));
}

Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr::constant(-a.constant_value());
    if (a.kind() == Kind::Neg) return a.lhs();
    Node n;
    n.kind = Kind::Neg;
    n.a = a.node_;
    return Expr(make_node(std::move(n)));
}

Expr pow(const Expr& base, Rational exponent) {
    if (exponent.num == 0) return Expr::constant(1.0);
    if (exponent == Rational{1, 1}) return base;
    if (base.is_constant()) {
        try {
            double v = rational_power(base.constant_value(), exponent);
            if (std::isfinite(v)) return Expr::constant(v);
        } catch (const DomainError&) {
            // left unfolded; reported when evaluated
        }
    }
    Node n;
    n.kind = Kind::Pow;
    n.exponent = exponent;
    n.a = base.node_;
    return Expr(make_node(std::move(n)));
}

Expr call(Func f, const Expr& arg) {
    if (arg.is_constant()) {
        try {
            double v = apply(f, arg.constant_value());
            if (std::isfinite(v)) return Expr::constant(v);
        } catch (const DomainError&) {
        }
    }
    Node n;
    n.kind = Kind::Call;
    n.func = f;
    n.a = arg.node_;
    return Expr(make_node(std::move(n)));
}

std::string_view func_name(Func f) {
    for (const auto& [name, fn] : kFunctions)
        if (fn == f) return name;
    return "?";
}

// ---------------------------------------------------------------- evaluate

double evaluate(const Expr& e, double r) {
    switch (e.kind()) {
        case Kind::Const: return e.constant_value();
        case Kind::Var: return r;
        case Kind::Neg: return -evaluate(e.lhs(), r);
        case Kind::Add: return evaluate(e.lhs(), r) + evaluate(e.rhs(), r);
        case Kind::Sub: return evaluate(e.lhs(), r) - evaluate(e.rhs(), r);
        case Kind::Mul: return evaluate(e.lhs(), r) * evaluate(e.rhs(), r);
        case Kind::Div: {
            double num = evaluate(e.lhs(), r);
            double den = evaluate(e.rhs(), r);
            if (den == 0.0) throw DomainError("division by zero at r = " + std::to_string(r));
            return num / den;
        }
        case Kind::Pow: return rational_power(evaluate(e.lhs(), r), e.exponent());
        case Kind::Call: {
            double v = apply(e.func(), evaluate(e.lhs(), r));
            if (std::isnan(v)) throw DomainError("non-numeric result at r = " + std::to_string(r));
            return v;
        }
    }
    return 0.0;
}

// ----------------------------------------------------------- differentiate

Expr differentiate(const Expr& e) {
    switch (e.kind()) {
        case Kind::Const: return Expr::constant(0.0);
        case Kind::Var: return Expr::constant(1.0);
        case Kind::Neg: return -differentiate(e.lhs());
        case Kind::Add: return differentiate(e.lhs()) + differentiate(e.rhs());
        case Kind::Sub: return differentiate(e.lhs()) - differentiate(e.rhs());
        case Kind::Mul: {
            Expr a = e.lhs(), b = e.rhs();
            return differentiate(a) * b + a * differentiate(b);
        }
        case Kind::Div: {
            Expr a = e.lhs(), b = e.rhs();
            if (!b.depends_on_r()) return differentiate(a) / b;
            return (differentiate(a) * b - a * differentiate(b)) / pow(b, Rational{2, 1});
        }
        case Kind::Pow: {
            Rational p = e.exponent();
            Expr u = e.lhs();
            Expr coeff = Expr::constant(p.value());
            return coeff * pow(u, sub(p, Rational{1, 1})) * differentiate(u);
        }
        case Kind::Call: {
            Expr u = e.lhs();
            Expr du = differentiate(u);
            switch (e.func()) {
                case Func::Sin: return call(Func::Cos, u) * du;
                case Func::Cos: return -(call(Func::Sin, u) * du);
                case Func::Sinh: return call(Func::Cosh, u) * du;
                case Func::Cosh: return call(Func::Sinh, u) * du;
                case Func::Exp: return call(Func::Exp, u) * du;
                case Func::Ln: return du / u;
                case Func::Sqrt: return du / (Expr::constant(2.0) * call(Func::Sqrt, u));
            }
        }
    }
    return Expr::constant(0.0);
}

// ------------------------------------------------------------------ print

namespace {

std::string format_number(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    std::string s(buf);
    if (v < 0.0) return "(" + s + ")";
    return s;
}

int precedence(const Expr& e) {
    switch (e.kind()) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default: return 5;
    }
}

std::string wrap(const Expr& e, int min_prec) {
    std::string s = print(e);
    return precedence(e) < min_prec ? "(" + s + ")" : s;
}

}  // namespace

std::string print(const Expr& e) {
    switch (e.kind()) {
        case Kind::Const: return format_number(e.constant_value());
        case Kind::Var: return "r";
        case Kind::Neg: return "-" + wrap(e.lhs(), 3);
        case Kind::Add: return wrap(e.lhs(), 1) + " + " + wrap(e.rhs(), 2);
        case Kind::Sub: return wrap(e.lhs(), 1) + " - " + wrap(e.rhs(), 2);
        case Kind::Mul: return wrap(e.lhs(), 2) + "*" + wrap(e.rhs(), 3);
        case Kind::Div: return wrap(e.lhs(), 2) + "/" + wrap(e.rhs(), 3);
        case Kind::Pow: {
            Rational p = e.exponent();
            std::string ex = p.is_integer() ? std::to_string(p.num)
                                            : std::to_string(p.num) + "/" + std::to_string(p.den);
            if (p.num < 0 || !p.is_integer()) ex = "(" + ex + ")";
            return wrap(e.lhs(), 5) + "^" + ex;
        }
        case Kind::Call: return std::string(func_name(e.func())) + "(" + print(e.lhs()) + ")";
    }
    return "?";
}

// ------------------------------------------------------------------ parse

namespace {

const std::vector<std::string> kOperandStart{"number", "r", "function", "(", "-"};

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr run() {
        Expr e = expression();
        skip_ws();
        if (pos_ < src_.size())
            fail("unexpected '" + std::string(1, src_[pos_]) + "'", {"+", "-", "*", "/", "^", "end of input"});
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) const {
        throw ParseError(pos_, msg, std::move(expected));
    }

    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                      src_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= src_.size()) fail("unexpected end of input", {std::string(1, c)});
            fail("unexpected '" + std::string(1, src_[pos_]) + "'", {std::string(1, c)});
        }
    }

    Expr expression() {
        Expr e = term();
        for (;;) {
            if (accept('+'))
                e = e + term();
            else if (accept('-'))
                e = e - term();
            else
                return e;
        }
    }

    Expr term() {
        Expr e = unary();
        for (;;) {
            if (accept('*'))
                e = e * unary();
            else if (accept('/'))
                e = e / unary();
            else
                return e;
        }
    }

    Expr unary() {
        if (accept('-')) return -unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        skip_ws();
        if (accept('^')) {
            skip_ws();
            Rational ex = rational_unary();
            return pow(base, ex);
        }
        return base;
    }

    Expr primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input", kOperandStart);
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr::constant(number().value);
        if (c == '(') {
            ++pos_;
            Expr e = expression();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            std::string_view id = identifier();
            if (id == "r") return Expr::variable();
            for (const auto& [name, fn] : kFunctions) {
                if (id == name) {
                    expect('(');
                    Expr arg = expression();
                    expect(')');
                    return call(fn, arg);
                }
            }
            pos_ = start;
            std::vector<std::string> names{"r"};
            for (const auto& [name, fn] : kFunctions) names.emplace_back(name);
            fail("unknown identifier '" + std::string(id) + "'", names);
        }
        fail("unexpected '" + std::string(1, c) + "'", kOperandStart);
    }

    std::string_view identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        return src_.substr(start, pos_ - start);
    }

    struct Number {
        double value;
        std::optional<Rational> exact;
    };

    // Decimal literal; `exact` is set when it is representable as a
    // rational with 64-bit numerator and denominator.
    Number number() {
        std::size_t start = pos_;
        std::int64_t num = 0, den = 1;
        bool exact = true;
        auto push_digit = [&](int d) {
            std::int64_t n2 = 0;
            if (__builtin_mul_overflow(num, 10, &n2) || __builtin_add_overflow(n2, d, &num)) exact = false;
        };
        bool digits = false;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            push_digit(src_[pos_] - '0');
            ++pos_;
            digits = true;
        }
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                push_digit(src_[pos_] - '0');
                if (__builtin_mul_overflow(den, 10, &den)) exact = false;
                ++pos_;
                digits = true;
            }
        }
        if (!digits) {
            pos_ = start;
            fail("malformed number", {"digit"});
        }
        int exp10 = 0;
        if (pos_ + 1 < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            int sign = 1;
            if (src_[pos_] == '+' || src_[pos_] == '-') {
                sign = src_[pos_] == '-' ? -1 : 1;
                ++pos_;
            }
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    exp10 = exp10 * 10 + (src_[pos_] - '0');
                    if (exp10 > 400) exact = false;
                    ++pos_;
                }
                exp10 *= sign;
            } else {
                pos_ = save;  // not an exponent; leave 'e' for the next token
            }
        }
        std::string text(src_.substr(start, pos_ - start));
        Number out{std::strtod(text.c_str(), nullptr), std::nullopt};
        if (exact) {
            try {
                Rational q = Rational::make(num, den);
                for (int i = 0; i < std::abs(exp10); ++i)
                    q = exp10 > 0 ? mul(q, Rational{10, 1}) : div(q, Rational{10, 1});
                out.exact = q;
            } catch (const DomainError&) {
            }
        }
        return out;
    }

    // Exponent grammar: same shape as `unary`, but evaluated exactly.
    Rational rational_unary() {
        if (accept('-')) {
            Rational x = rational_unary();
            return Rational::make(-x.num, x.den);
        }
        Rational base = rational_primary();
        if (accept('^')) {
            std::size_t at = pos_;
            Rational ex = rational_unary();
            if (!ex.is_integer()) {
                pos_ = at;
                fail("nested exponent must be an integer", {"integer"});
            }
            Rational out{1, 1};
            for (std::int64_t i = 0; i < (ex.num < 0 ? -ex.num : ex.num); ++i) out = mul(out, base);
            return ex.num < 0 ? div(Rational{1, 1}, out) : out;
        }
        return base;
    }

    Rational rational_expression() {
        Rational x = rational_term();
        for (;;) {
            if (accept('+'))
                x = add(x, rational_term());
            else if (accept('-'))
                x = sub(x, rational_term());
            else
                return x;
        }
    }

    Rational rational_term() {
        Rational x = rational_unary();
        for (;;) {
            if (accept('*')) {
                x = mul(x, rational_unary());
            } else if (accept('/')) {
                std::size_t at = pos_;
                Rational d = rational_unary();
                if (d.num == 0) {
                    pos_ = at;
                    fail("division by zero in exponent", {"nonzero constant"});
                }
                x = div(x, d);
            } else {
                return x;
            }
        }
    }

    Rational rational_primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input", {"number", "("});
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t at = pos_;
            Number n = number();
            if (!n.exact) {
                pos_ = at;
                fail("exponent literal is not an exact rational", {"rational constant"});
            }
            return *n.exact;
        }
        if (c == '(') {
            ++pos_;
            Rational x = rational_expression();
            expect(')');
            return x;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t at = pos_;
            std::string_view id = identifier();
            pos_ = at;
            if (id == "r") fail("non-constant exponent", {"rational constant"});
            fail("exponent must be a rational constant, found '" + std::string(id) + "'", {"rational constant"});
        }
        fail("unexpected '" + std::string(1, c) + "'", {"number", "(", "-"});
    }
};

}  // namespace

Expr parse(std::string_view source) {
    for (std::size_t i = 0; i < source.size(); ++i)
        if (static_cast<unsigned char>(source[i]) >= 0x80)
            throw ParseError(i, "non-ASCII byte in expression", kOperandStart);
    return Parser(source).run();
}

}  // namespace warpgeom::wexpr
