#include "sepdiff/expr.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include "sepdiff/errors.hpp"
#include "sepdiff/tail.hpp"

namespace sepdiff {

struct ExprNode {
    Op op;
    double value;
    std::shared_ptr<const ExprNode> a;
    std::shared_ptr<const ExprNode> b;
};

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double v) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Const;
    n->value = v;
    // children of leaves stay null
    return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

Expr Expr::var() {
    static const Expr v = [] {
        auto n = std::make_shared<ExprNode>();
        n->op = Op::Var;
        n->value = 0.0;
        return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
    }();
    return v;
}

Expr Expr::unary(Op op, Expr a) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->value = 0.0;
    n->a = a.node_;
    return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

Expr Expr::binary(Op op, Expr a, Expr b) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->value = 0.0;
    n->a = a.node_;
    n->b = b.node_;
    return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

Expr Expr::pow(Expr base, double exponent) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Pow;
    n->value = exponent;
    n->a = base.node_;
    return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
Expr Expr::lhs() const { return node_->a ? Expr(node_->a) : constant(0.0); }
Expr Expr::rhs() const { return node_->b ? Expr(node_->b) : constant(0.0); }

bool Expr::operator==(const Expr& other) const {
    if (node_ == other.node_) return true;
    const ExprNode& x = *node_;
    const ExprNode& y = *other.node_;
    if (x.op != y.op) return false;
    switch (x.op) {
        case Op::Const:
            return x.value == y.value || (std::isnan(x.value) && std::isnan(y.value));
        case Op::Var:
            return true;
        case Op::Pow:
            return x.value == y.value && lhs() == other.lhs();
        case Op::Neg:
        case Op::Exp:
        case Op::Log:
        case Op::Sqrt:
        case Op::Abs:
            return lhs() == other.lhs();
        default:
            return lhs() == other.lhs() && rhs() == other.rhs();
    }
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Op::Neg, a); }

// ---------------------------------------------------------------- parsing

namespace {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Expr parse() {
        Expr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("operator or end of input");
        return e;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& expected) const { throw SyntaxError(pos_, expected); }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("'") + c + "'");
    }

    bool peek_number() {
        skip_ws();
        if (pos_ >= s_.size()) return false;
        char c = s_[pos_];
        if (c >= '0' && c <= '9') return true;
        return c == '.' && pos_ + 1 < s_.size() && s_[pos_ + 1] >= '0' && s_[pos_ + 1] <= '9';
    }

    double number() {
        skip_ws();
        std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_;
        };
        digits();
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') {
                digits();
            } else {
                pos_ = save;
            }
        }
        double v = 0.0;
        auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != s_.data() + pos_) {
            pos_ = start;
            fail("number");
        }
        return v;
    }

    Expr expr() {
        Expr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = lhs + term();
            } else if (accept('-')) {
                lhs = lhs - term();
            } else {
                return lhs;
            }
        }
    }

    // A leading minus negates the whole product.
    Expr term() {
        if (accept('-')) return -term();
        Expr lhs = factor();
        for (;;) {
            if (accept('*')) {
                lhs = lhs * factor();
            } else if (accept('/')) {
                lhs = lhs / factor();
            } else {
                return lhs;
            }
        }
    }

    Expr factor() {
        Expr base = atom();
        if (accept('^')) return Expr::pow(base, exponent());
        return base;
    }

    double exponent() {
        skip_ws();
        std::size_t start = pos_;
        if (accept('(')) {
            Expr inner = fold_constants(expr());
            expect(')');
            if (!inner.is_constant() || !std::isfinite(inner.value())) {
                pos_ = start;
                fail("constant exponent");
            }
            return inner.value();
        }
        double sign = 1.0;
        if (accept('-')) {
            sign = -1.0;
        } else {
            accept('+');
        }
        if (!peek_number()) fail("number");
        return sign * number();
    }

    Expr atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("number, 'x', function or '('");
        char c = s_[pos_];
        if (peek_number()) return Expr::constant(number());
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (c == '-') {
            ++pos_;
            return -atom();
        }
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && ((s_[pos_] >= 'a' && s_[pos_] <= 'z') || (s_[pos_] >= 'A' && s_[pos_] <= 'Z') ||
                                        (s_[pos_] >= '0' && s_[pos_] <= '9') || s_[pos_] == '_'))
                ++pos_;
            std::string name(s_.substr(start, pos_ - start));
            if (name == "x") return Expr::var();
            Op op;
            if (name == "exp") {
                op = Op::Exp;
            } else if (name == "log") {
                op = Op::Log;
            } else if (name == "sqrt") {
                op = Op::Sqrt;
            } else if (name == "abs") {
                op = Op::Abs;
            } else {
                skip_ws();
                if (pos_ < s_.size() && s_[pos_] == '(') throw UnknownFunction(name);
                pos_ = start;
                fail("number, 'x', function or '('");
            }
            expect('(');
            Expr arg = expr();
            expect(')');
            return Expr::unary(op, arg);
        }
        fail("number, 'x', function or '('");
    }
};

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int precedence(const Expr& e) {
    switch (e.op()) {
        case Op::Add:
        case Op::Sub:
        case Op::Neg:
            return 1;
        case Op::Mul:
        case Op::Div:
            return 2;
        case Op::Pow:
            return 3;
        case Op::Const:
            return e.value() < 0 || std::signbit(e.value()) ? 0 : 5;
        default:
            return 5;
    }
}

void print(const Expr& e, int min_prec, std::string& out) {
    bool parens = precedence(e) < min_prec;
    if (parens) out += '(';
    switch (e.op()) {
        case Op::Const:
            out += format_number(e.value());
            break;
        case Op::Var:
            out += 'x';
            break;
        case Op::Add:
        case Op::Sub:
            print(e.lhs(), 1, out);
            out += e.op() == Op::Add ? '+' : '-';
            print(e.rhs(), 2, out);
            break;
        case Op::Mul:
        case Op::Div:
            print(e.lhs(), 2, out);
            out += e.op() == Op::Mul ? '*' : '/';
            print(e.rhs(), 3, out);
            break;
        case Op::Pow:
            print(e.lhs(), 4, out);
            out += '^';
            if (e.value() < 0 || std::signbit(e.value())) {
                out += '(' + format_number(e.value()) + ')';
            } else {
                out += format_number(e.value());
            }
            break;
        case Op::Neg:
            out += '-';
            print(e.lhs(), 2, out);
            break;
        case Op::Exp:
        case Op::Log:
        case Op::Sqrt:
        case Op::Abs: {
            static const char* names[] = {"exp", "log", "sqrt", "abs"};
            out += names[static_cast<int>(e.op()) - static_cast<int>(Op::Exp)];
            out += '(';
            print(e.lhs(), 0, out);
            out += ')';
            break;
        }
    }
    if (parens) out += ')';
}

}  // namespace

Expr parse_expression(std::string_view source) { return Parser(source).parse(); }

std::string to_string(const Expr& e) {
    std::string out;
    print(e, 0, out);
    return out;
}

// ------------------------------------------------------------- evaluation

namespace {

double eval_node(const ExprNode* n, double x) {
    switch (n->op) {
        case Op::Const:
            return n->value;
        case Op::Var:
            return x;
        case Op::Add:
            return eval_node(n->a.get(), x) + eval_node(n->b.get(), x);
        case Op::Sub:
            return eval_node(n->a.get(), x) - eval_node(n->b.get(), x);
        case Op::Mul: {
            double a = eval_node(n->a.get(), x);
            double b = eval_node(n->b.get(), x);
            return a * b;
        }
        case Op::Div: {
            double a = eval_node(n->a.get(), x);
            double b = eval_node(n->b.get(), x);
            if (b == 0.0) return NAN;
            return a / b;
        }
        case Op::Pow: {
            double a = eval_node(n->a.get(), x);
            double p = n->value;
            if (std::isnan(a)) return NAN;
            if (a == 0.0 && p < 0) return NAN;
            if (a < 0 && p != std::floor(p)) return NAN;
            if (p == 1.0) return a;
            if (p == 2.0) return a * a;
            if (p == 0.5) return std::sqrt(a);
            if (p == -1.0) return 1.0 / a;
            return std::pow(a, p);
        }
        case Op::Neg:
            return -eval_node(n->a.get(), x);
        case Op::Exp:
            return std::exp(eval_node(n->a.get(), x));
        case Op::Log: {
            double a = eval_node(n->a.get(), x);
            if (!(a > 0)) return NAN;
            return std::log(a);
        }
        case Op::Sqrt: {
            double a = eval_node(n->a.get(), x);
            if (!(a >= 0)) return NAN;
            return std::sqrt(a);
        }
        case Op::Abs:
            return std::fabs(eval_node(n->a.get(), x));
    }
    return NAN;
}

}  // namespace

double evaluate_raw(const Expr& e, double x) { return eval_node(e.node(), x); }

std::optional<double> evaluate(const Expr& e, double x) {
    double v = eval_node(e.node(), x);
    if (std::isnan(v)) return std::nullopt;
    return v;
}

// -------------------------------------------------------- transformations

Expr fold_constants(const Expr& e) {
    switch (e.op()) {
        case Op::Const:
        case Op::Var:
            return e;
        case Op::Pow: {
            Expr a = fold_constants(e.lhs());
            if (a.is_constant()) {
                auto v = evaluate(Expr::pow(a, e.value()), 0.0);
                if (v) return Expr::constant(*v);
            }
            return Expr::pow(a, e.value());
        }
        case Op::Neg:
        case Op::Exp:
        case Op::Log:
        case Op::Sqrt:
        case Op::Abs: {
            Expr a = fold_constants(e.lhs());
            Expr r = Expr::unary(e.op(), a);
            if (a.is_constant()) {
                auto v = evaluate(r, 0.0);
                if (v) return Expr::constant(*v);
            }
            return r;
        }
        default:
            break;
    }
    Expr a = fold_constants(e.lhs());
    Expr b = fold_constants(e.rhs());
    Expr r = Expr::binary(e.op(), a, b);
    if (a.is_constant() && b.is_constant()) {
        auto v = evaluate(r, 0.0);
        if (v) return Expr::constant(*v);
        return r;
    }
    auto is = [](const Expr& z, double c) { return z.is_constant() && z.value() == c; };
    switch (e.op()) {
        case Op::Add:
            if (is(a, 0)) return b;
            if (is(b, 0)) return a;
            break;
        case Op::Sub:
            if (is(b, 0)) return a;
            if (is(a, 0)) return -b;
            break;
        case Op::Mul:
            if (is(a, 0) || is(b, 0)) return Expr::constant(0.0);
            if (is(a, 1)) return b;
            if (is(b, 1)) return a;
            break;
        case Op::Div:
            if (is(b, 1)) return a;
            if (is(a, 0)) return Expr::constant(0.0);
            break;
        default:
            break;
    }
    return r;
}

namespace {

Expr diff(const Expr& e) {
    const Expr zero = Expr::constant(0.0);
    switch (e.op()) {
        case Op::Const:
            return zero;
        case Op::Var:
            return Expr::constant(1.0);
        case Op::Add:
            return diff(e.lhs()) + diff(e.rhs());
        case Op::Sub:
            return diff(e.lhs()) - diff(e.rhs());
        case Op::Mul:
            return diff(e.lhs()) * e.rhs() + e.lhs() * diff(e.rhs());
        case Op::Div:
            return (diff(e.lhs()) * e.rhs() - e.lhs() * diff(e.rhs())) / Expr::pow(e.rhs(), 2.0);
        case Op::Pow:
            return Expr::constant(e.value()) * Expr::pow(e.lhs(), e.value() - 1.0) * diff(e.lhs());
        case Op::Neg:
            return -diff(e.lhs());
        case Op::Exp:
            return e * diff(e.lhs());
        case Op::Log:
            return diff(e.lhs()) / e.lhs();
        case Op::Sqrt:
            return diff(e.lhs()) / (Expr::constant(2.0) * e);
        case Op::Abs:
            return e.lhs() / e * diff(e.lhs());
    }
    return zero;
}

}  // namespace

Expr derivative(const Expr& e) { return fold_constants(diff(e)); }

Expr substitute(const Expr& e, const Expr& g) {
    switch (e.op()) {
        case Op::Const:
            return e;
        case Op::Var:
            return g;
        case Op::Pow:
            return Expr::pow(substitute(e.lhs(), g), e.value());
        case Op::Neg:
        case Op::Exp:
        case Op::Log:
        case Op::Sqrt:
        case Op::Abs:
            return Expr::unary(e.op(), substitute(e.lhs(), g));
        default:
            return Expr::binary(e.op(), substitute(e.lhs(), g), substitute(e.rhs(), g));
    }
}

int depth(const Expr& e) {
    switch (e.op()) {
        case Op::Const:
        case Op::Var:
            return 1;
        case Op::Pow:
        case Op::Neg:
        case Op::Exp:
        case Op::Log:
        case Op::Sqrt:
        case Op::Abs:
            return 1 + depth(e.lhs());
        default:
            return 1 + std::max(depth(e.lhs()), depth(e.rhs()));
    }
}

std::optional<LocalExponent> local_exponent(const Expr& e, double point, Side side) {
    double scale = std::isfinite(point) ? std::max(1.0, std::fabs(point)) : 1.0;
    ExponentFit fit = fit_exponent([&](double x) { return evaluate_raw(e, x); }, point, side, scale);
    if (fit.kind != ExponentFit::Kind::Power) return std::nullopt;
    return LocalExponent{point, fit.p, fit.log_flag};
}

}  // namespace sepdiff
