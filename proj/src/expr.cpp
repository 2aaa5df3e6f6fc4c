#include "sofred/expr.hpp"

#include "sofred/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace sofred::expr {

using cd = std::complex<double>;

enum class Kind {
    Const,
    T,        // t = exp(x)
    X,        // log t
    Softplus, // log(1 + t)
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Pow,
    Sin,
    Cos,
    Exp,
    Log,
    Log1p,
    Abs,
    Sqrt,
    Atan,
    Re,
    Conj,
};

struct Node {
    Kind kind;
    cd value{};
    int power = 0;
    NodePtr a, b;
};

namespace {

constexpr double kClamp = 700.0;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr)
{
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr cnst(cd v)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Const;
    n->value = v;
    return n;
}

bool is_const(const NodePtr& n, cd v)
{
    return n->kind == Kind::Const && n->value == v;
}

cd log1p_c(cd z)
{
    if (z.imag() == 0.0 && z.real() > -1.0)
        return std::log1p(z.real());
    return std::log(1.0 + z);
}

cd softplus(double x)
{
    if (x > 0)
        return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

cd apply_fn(Kind k, cd u)
{
    switch (k) {
    case Kind::Sin: return std::sin(u);
    case Kind::Cos: return std::cos(u);
    case Kind::Exp: return std::exp(u);
    case Kind::Log: return std::log(u);
    case Kind::Log1p: return log1p_c(u);
    case Kind::Abs: return std::abs(u);
    case Kind::Sqrt: return std::sqrt(u);
    case Kind::Atan: return std::atan(u);
    case Kind::Re: return u.real();
    case Kind::Conj: return std::conj(u);
    default: return u;
    }
}

cd ipow(cd u, int n)
{
    if (n < 0)
        return 1.0 / ipow(u, -n);
    cd r = 1.0;
    cd base = u;
    while (n) {
        if (n & 1)
            r *= base;
        base *= base;
        n >>= 1;
    }
    return r;
}

cd evaluate(const Node& n, double x)
{
    switch (n.kind) {
    case Kind::Const: return n.value;
    case Kind::T: return std::exp(std::clamp(x, -kClamp, kClamp));
    case Kind::X: return x;
    case Kind::Softplus: return softplus(x);
    case Kind::Add: return evaluate(*n.a, x) + evaluate(*n.b, x);
    case Kind::Sub: return evaluate(*n.a, x) - evaluate(*n.b, x);
    case Kind::Mul: return evaluate(*n.a, x) * evaluate(*n.b, x);
    case Kind::Div: return evaluate(*n.a, x) / evaluate(*n.b, x);
    case Kind::Neg: return -evaluate(*n.a, x);
    case Kind::Pow: return ipow(evaluate(*n.a, x), n.power);
    default: return apply_fn(n.kind, evaluate(*n.a, x));
    }
}

// Constructors with light constant folding; keeps derivative trees small.
NodePtr add(NodePtr a, NodePtr b)
{
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (a->kind == Kind::Const && b->kind == Kind::Const) return cnst(a->value + b->value);
    return make(Kind::Add, a, b);
}

NodePtr sub(NodePtr a, NodePtr b)
{
    if (is_const(b, 0.0)) return a;
    if (a->kind == Kind::Const && b->kind == Kind::Const) return cnst(a->value - b->value);
    if (is_const(a, 0.0)) return make(Kind::Neg, b);
    return make(Kind::Sub, a, b);
}

NodePtr mul(NodePtr a, NodePtr b)
{
    if (is_const(a, 0.0) || is_const(b, 0.0)) return cnst(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (a->kind == Kind::Const && b->kind == Kind::Const) return cnst(a->value * b->value);
    return make(Kind::Mul, a, b);
}

NodePtr div(NodePtr a, NodePtr b)
{
    if (is_const(a, 0.0)) return cnst(0.0);
    if (is_const(b, 1.0)) return a;
    if (a->kind == Kind::Const && b->kind == Kind::Const) return cnst(a->value / b->value);
    return make(Kind::Div, a, b);
}

NodePtr neg(NodePtr a)
{
    if (a->kind == Kind::Const) return cnst(-a->value);
    return make(Kind::Neg, a);
}

NodePtr pow_n(NodePtr a, int n)
{
    if (n == 0) return cnst(1.0);
    if (n == 1) return a;
    if (a->kind == Kind::Const) return cnst(ipow(a->value, n));
    auto r = std::make_shared<Node>();
    r->kind = Kind::Pow;
    r->power = n;
    r->a = std::move(a);
    return r;
}

NodePtr fn(Kind k, NodePtr a)
{
    if (a->kind == Kind::Const) return cnst(apply_fn(k, a->value));
    // log(t) -> x, log1p(t) and log(1+t) -> softplus(x)
    if (k == Kind::Log && a->kind == Kind::T) return make(Kind::X);
    if (k == Kind::Log1p && a->kind == Kind::T) return make(Kind::Softplus);
    if (k == Kind::Log && a->kind == Kind::Add) {
        if ((is_const(a->a, 1.0) && a->b->kind == Kind::T) || (is_const(a->b, 1.0) && a->a->kind == Kind::T))
            return make(Kind::Softplus);
    }
    return make(k, a);
}

NodePtr diff(const NodePtr& n)
{
    const auto& u = n->a;
    switch (n->kind) {
    case Kind::Const: return cnst(0.0);
    case Kind::T: return n;
    case Kind::X: return cnst(1.0);
    case Kind::Softplus: {
        auto t = make(Kind::T);
        return div(t, add(cnst(1.0), t));
    }
    case Kind::Add: return add(diff(n->a), diff(n->b));
    case Kind::Sub: return sub(diff(n->a), diff(n->b));
    case Kind::Neg: return neg(diff(u));
    case Kind::Mul: return add(mul(diff(n->a), n->b), mul(n->a, diff(n->b)));
    case Kind::Div:
        return div(sub(mul(diff(n->a), n->b), mul(n->a, diff(n->b))), pow_n(n->b, 2));
    case Kind::Pow: return mul(mul(cnst(double(n->power)), pow_n(u, n->power - 1)), diff(u));
    case Kind::Sin: return mul(fn(Kind::Cos, u), diff(u));
    case Kind::Cos: return neg(mul(fn(Kind::Sin, u), diff(u)));
    case Kind::Exp: return mul(n, diff(u));
    case Kind::Log: return div(diff(u), u);
    case Kind::Log1p: return div(diff(u), add(cnst(1.0), u));
    case Kind::Abs: return div(fn(Kind::Re, mul(fn(Kind::Conj, u), diff(u))), n);
    case Kind::Sqrt: return div(diff(u), mul(cnst(2.0), n));
    case Kind::Atan: return div(diff(u), add(cnst(1.0), pow_n(u, 2)));
    case Kind::Re: return fn(Kind::Re, diff(u));
    case Kind::Conj: return fn(Kind::Conj, diff(u));
    }
    return cnst(0.0);
}

const char* fn_name(Kind k)
{
    switch (k) {
    case Kind::Sin: return "sin";
    case Kind::Cos: return "cos";
    case Kind::Exp: return "exp";
    case Kind::Log: return "log";
    case Kind::Log1p: return "log1p";
    case Kind::Abs: return "abs";
    case Kind::Sqrt: return "sqrt";
    case Kind::Atan: return "atan";
    case Kind::Re: return "re";
    case Kind::Conj: return "conj";
    default: return "?";
    }
}

void print(std::ostream& os, const Node& n)
{
    switch (n.kind) {
    case Kind::Const:
        if (n.value.imag() == 0.0)
            os << n.value.real();
        else
            os << "(" << n.value.real() << "+" << n.value.imag() << "*i)";
        return;
    case Kind::T: os << "t"; return;
    case Kind::X: os << "log(t)"; return;
    case Kind::Softplus: os << "log1p(t)"; return;
    case Kind::Add: os << "("; print(os, *n.a); os << "+"; print(os, *n.b); os << ")"; return;
    case Kind::Sub: os << "("; print(os, *n.a); os << "-"; print(os, *n.b); os << ")"; return;
    case Kind::Mul: os << "("; print(os, *n.a); os << "*"; print(os, *n.b); os << ")"; return;
    case Kind::Div: os << "("; print(os, *n.a); os << "/"; print(os, *n.b); os << ")"; return;
    case Kind::Neg: os << "(-"; print(os, *n.a); os << ")"; return;
    case Kind::Pow: os << "("; print(os, *n.a); os << ")^" << n.power; return;
    default: os << fn_name(n.kind) << "("; print(os, *n.a); os << ")"; return;
    }
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    NodePtr parse()
    {
        auto e = expr();
        skip();
        if (pos_ != s_.size())
            throw ParseError("unexpected character '" + std::string(1, s_[pos_]) + "'", pos_);
        return e;
    }

private:
    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            skip();
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr expr()
    {
        auto left = term();
        for (;;) {
            if (accept('+'))
                left = add(left, term());
            else if (accept('-'))
                left = sub(left, term());
            else
                return left;
        }
    }

    NodePtr term()
    {
        auto left = factor();
        for (;;) {
            if (accept('*'))
                left = mul(left, factor());
            else if (accept('/'))
                left = div(left, factor());
            else
                return left;
        }
    }

    NodePtr factor()
    {
        if (accept('-'))
            return neg(factor());
        if (accept('+'))
            return factor();
        auto base = atom();
        if (accept('^')) {
            skip();
            std::size_t start = pos_;
            bool negative = false;
            if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
                negative = s_[pos_] == '-';
                ++pos_;
            }
            std::size_t digits = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            if (pos_ == digits)
                throw ParseError("expected integer exponent", start);
            int n = std::stoi(std::string(s_.substr(digits, pos_ - digits)));
            return pow_n(base, negative ? -n : n);
        }
        return base;
    }

    NodePtr atom()
    {
        skip();
        if (pos_ >= s_.size())
            throw ParseError("unexpected end of expression", pos_);
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return number();
        if (c == '(') {
            ++pos_;
            auto e = expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            std::string id(s_.substr(start, pos_ - start));
            if (id == "i") return cnst(cd(0.0, 1.0));
            if (id == "pi") return cnst(std::numbers::pi);
            if (id == "t") return make(Kind::T);
            static const std::pair<const char*, Kind> table[] = {
                {"sin", Kind::Sin}, {"cos", Kind::Cos}, {"exp", Kind::Exp},
                {"log", Kind::Log}, {"log1p", Kind::Log1p}, {"abs", Kind::Abs},
                {"sqrt", Kind::Sqrt}, {"atan", Kind::Atan},
            };
            for (const auto& [name, kind] : table) {
                if (id == name) {
                    expect('(');
                    auto arg = expr();
                    expect(')');
                    return fn(kind, arg);
                }
            }
            throw ParseError("unknown identifier '" + id + "'", start);
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    NodePtr number()
    {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-'))
                ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                    ++pos_;
            } else {
                pos_ = save;
            }
        }
        std::string text(s_.substr(start, pos_ - start));
        if (text == ".")
            throw ParseError("malformed number", start);
        return cnst(std::stod(text));
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace

Expression::Expression() : root_(cnst(0.0)), source_("0") {}

Expression::Expression(NodePtr root, std::string src) : root_(std::move(root)), source_(std::move(src)) {}

Expression Expression::parse(std::string_view text)
{
    Parser p(text);
    return Expression(p.parse(), std::string(text));
}

Expression Expression::constant(cd c)
{
    Expression e(cnst(c), "");
    e.source_ = e.to_string();
    return e;
}

cd Expression::eval_log(double x) const { return evaluate(*root_, x); }

cd Expression::eval(double t) const { return evaluate(*root_, std::log(t)); }

Expression Expression::derivative() const
{
    Expression d(diff(root_), "");
    d.source_ = d.to_string();
    return d;
}

bool Expression::is_constant() const { return root_->kind == Kind::Const; }

std::string Expression::to_string() const
{
    std::ostringstream os;
    os.precision(17);
    print(os, *root_);
    return os.str();
}

} // namespace sofred::expr
