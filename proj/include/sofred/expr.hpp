#pragma once

// Coefficient expressions for instance files.
//
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := ("-"|"+") factor | atom ("^" integer)?
//   atom   := number | "i" | "pi" | "t" | ident "(" expr ")" | "(" expr ")"
//   ident  := sin | cos | exp | log | log1p | abs | sqrt | atan
//
// Evaluation happens in the log variable x = log t. log(t), log1p(t) and
// log(1+t) are rewritten to closed forms in x so slowly oscillating data
// stays accurate far beyond the range where t itself is representable.
// Bare t is evaluated as exp(x) with x clamped to [-700, 700].

#include <complex>
#include <memory>
#include <string>
#include <string_view>

namespace sofred::expr {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

class Expression {
public:
    Expression();
    static Expression parse(std::string_view text);
    static Expression constant(std::complex<double> c);

    std::complex<double> eval_log(double x) const;
    std::complex<double> eval(double t) const;

    // d/dx in x = log t, i.e. t d/dt. Used for psi = t omega'(t).
    Expression derivative() const;

    bool is_constant() const;
    const std::string& source() const { return source_; }
    std::string to_string() const;

private:
    explicit Expression(NodePtr root, std::string src);
    NodePtr root_;
    std::string source_;
};

} // namespace sofred::expr
