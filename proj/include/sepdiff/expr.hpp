#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace sepdiff {

enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sqrt, Abs };

struct ExprNode;

// Immutable expression tree in the single variable x.
class Expr {
public:
    Expr();  // constant 0
    static Expr constant(double v);
    static Expr var();
    static Expr unary(Op op, Expr a);
    static Expr binary(Op op, Expr a, Expr b);
    static Expr pow(Expr base, double exponent);

    Op op() const;
    double value() const;  // constant value or power exponent
    Expr lhs() const;
    Expr rhs() const;
    bool is_constant() const { return op() == Op::Const; }

    // Structural equality.
    bool operator==(const Expr& other) const;
    bool operator!=(const Expr& other) const { return !(*this == other); }

    const ExprNode* node() const { return node_.get(); }

private:
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const ExprNode> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr parse_expression(std::string_view source);
std::string to_string(const Expr& e);

// nullopt means Undefined.
std::optional<double> evaluate(const Expr& e, double x);
// NaN for Undefined; for hot loops.
double evaluate_raw(const Expr& e, double x);

Expr fold_constants(const Expr& e);
Expr derivative(const Expr& e);
// Replace x by g.
Expr substitute(const Expr& e, const Expr& g);
// Depth of the tree (leaf = 1).
int depth(const Expr& e);

enum class Side { Left, Right };

struct LocalExponent {
    double point;
    double p;
    bool log_flag;
};

// Least-squares exponent of |e| near point on the given side; for infinite
// points the distance variable is 1/|x|.
std::optional<LocalExponent> local_exponent(const Expr& e, double point, Side side);

}  // namespace sepdiff
