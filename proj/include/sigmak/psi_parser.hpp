#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Grammar for the right-hand side psi(x), precedence low to high:
//   expr   := term  (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?            right-associative
//   atom   := number | variable | func '(' expr ')' | '(' expr ')'
// so '^' binds tighter than unary minus: -x^2 == -(x^2), and exponents
// may start with a sign: 2^-3. Variables are x1..xn, with x, y, z as
// aliases when n <= 3. Functions: sin cos exp sqrt abs log.

namespace sigmak {

class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& msg, std::size_t position)
        : std::runtime_error(msg + " (at offset " + std::to_string(position) + ")"),
          position_(position) {}
    [[nodiscard]] std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class eval_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PsiFn { sin, cos, exp, sqrt, abs, log };

struct PsiNode {
    enum class Kind { number, variable, negate, add, sub, mul, div, pow, call };

    Kind kind;
    double number = 0.0;
    int var_index = 0;  // 0-based
    PsiFn fn = PsiFn::sin;
    std::shared_ptr<const PsiNode> lhs;  // unary operand lives here
    std::shared_ptr<const PsiNode> rhs;
};

namespace detail {

using NodePtr = std::shared_ptr<const PsiNode>;

inline const char* fn_name(PsiFn f) {
    switch (f) {
        case PsiFn::sin: return "sin";
        case PsiFn::cos: return "cos";
        case PsiFn::exp: return "exp";
        case PsiFn::sqrt: return "sqrt";
        case PsiFn::abs: return "abs";
        case PsiFn::log: return "log";
    }
    return "?";
}

inline int node_prec(const PsiNode& n) {
    switch (n.kind) {
        case PsiNode::Kind::add:
        case PsiNode::Kind::sub: return 1;
        case PsiNode::Kind::mul:
        case PsiNode::Kind::div: return 2;
        case PsiNode::Kind::negate: return 3;
        case PsiNode::Kind::pow: return 4;
        default: return 5;
    }
}

inline void print_node(const PsiNode& n, int min_prec, std::string& out) {
    const int prec = node_prec(n);
    const bool wrap = prec < min_prec;
    if (wrap) out += '(';
    switch (n.kind) {
        case PsiNode::Kind::number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.number);
            out += buf;
            break;
        }
        case PsiNode::Kind::variable:
            out += 'x';
            out += std::to_string(n.var_index + 1);
            break;
        case PsiNode::Kind::negate:
            out += '-';
            print_node(*n.lhs, 3, out);
            break;
        case PsiNode::Kind::add:
        case PsiNode::Kind::sub:
            print_node(*n.lhs, 1, out);
            out += (n.kind == PsiNode::Kind::add ? " + " : " - ");
            print_node(*n.rhs, 2, out);
            break;
        case PsiNode::Kind::mul:
        case PsiNode::Kind::div:
            print_node(*n.lhs, 2, out);
            out += (n.kind == PsiNode::Kind::mul ? '*' : '/');
            print_node(*n.rhs, 3, out);
            break;
        case PsiNode::Kind::pow:
            print_node(*n.lhs, 5, out);
            out += '^';
            print_node(*n.rhs, 3, out);
            break;
        case PsiNode::Kind::call:
            out += fn_name(n.fn);
            out += '(';
            print_node(*n.lhs, 0, out);
            out += ')';
            break;
    }
    if (wrap) out += ')';
}

inline std::string describe(const PsiNode& n) {
    std::string s;
    print_node(n, 0, s);
    return s;
}

inline double eval_node(const PsiNode& n, std::span<const double> x) {
    double value = 0.0;
    switch (n.kind) {
        case PsiNode::Kind::number: return n.number;
        case PsiNode::Kind::variable: return x[static_cast<std::size_t>(n.var_index)];
        case PsiNode::Kind::negate: return -eval_node(*n.lhs, x);
        case PsiNode::Kind::add: value = eval_node(*n.lhs, x) + eval_node(*n.rhs, x); break;
        case PsiNode::Kind::sub: value = eval_node(*n.lhs, x) - eval_node(*n.rhs, x); break;
        case PsiNode::Kind::mul: value = eval_node(*n.lhs, x) * eval_node(*n.rhs, x); break;
        case PsiNode::Kind::div: {
            const double den = eval_node(*n.rhs, x);
            if (den == 0.0) throw eval_error("division by zero in '" + describe(n) + "'");
            value = eval_node(*n.lhs, x) / den;
            break;
        }
        case PsiNode::Kind::pow:
            value = std::pow(eval_node(*n.lhs, x), eval_node(*n.rhs, x));
            break;
        case PsiNode::Kind::call: {
            const double arg = eval_node(*n.lhs, x);
            switch (n.fn) {
                case PsiFn::sin: value = std::sin(arg); break;
                case PsiFn::cos: value = std::cos(arg); break;
                case PsiFn::exp: value = std::exp(arg); break;
                case PsiFn::sqrt:
                    if (arg < 0.0)
                        throw eval_error("sqrt of a negative value in '" + describe(n) + "'");
                    value = std::sqrt(arg);
                    break;
                case PsiFn::abs: value = std::fabs(arg); break;
                case PsiFn::log:
                    if (arg <= 0.0)
                        throw eval_error("log of a nonpositive value in '" + describe(n) + "'");
                    value = std::log(arg);
                    break;
            }
            break;
        }
    }
    if (!std::isfinite(value))
        throw eval_error("non-finite value in '" + describe(n) + "'");
    return value;
}

inline bool same_structure(const PsiNode& a, const PsiNode& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case PsiNode::Kind::number: return a.number == b.number;
        case PsiNode::Kind::variable: return a.var_index == b.var_index;
        case PsiNode::Kind::negate: return same_structure(*a.lhs, *b.lhs);
        case PsiNode::Kind::call: return a.fn == b.fn && same_structure(*a.lhs, *b.lhs);
        default: return same_structure(*a.lhs, *b.lhs) && same_structure(*a.rhs, *b.rhs);
    }
}

class Parser {
public:
    Parser(std::string_view text, int n_vars) : text_(text), n_vars_(n_vars) {}

    NodePtr run() {
        NodePtr e = parse_expr();
        skip_space();
        if (pos_ < text_.size())
            throw parse_error("unexpected trailing input, expected an operator or end", pos_);
        return e;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    [[nodiscard]] char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr parse_expr() {
        NodePtr left = parse_term();
        while (true) {
            const char c = peek();
            if (c != '+' && c != '-') return left;
            ++pos_;
            NodePtr right = parse_term();
            auto node = std::make_shared<PsiNode>();
            node->kind = (c == '+') ? PsiNode::Kind::add : PsiNode::Kind::sub;
            node->lhs = std::move(left);
            node->rhs = std::move(right);
            left = std::move(node);
        }
    }

    NodePtr parse_term() {
        NodePtr left = parse_unary();
        while (true) {
            const char c = peek();
            if (c != '*' && c != '/') return left;
            ++pos_;
            NodePtr right = parse_unary();
            auto node = std::make_shared<PsiNode>();
            node->kind = (c == '*') ? PsiNode::Kind::mul : PsiNode::Kind::div;
            node->lhs = std::move(left);
            node->rhs = std::move(right);
            left = std::move(node);
        }
    }

    NodePtr parse_unary() {
        if (peek() == '-') {
            ++pos_;
            auto node = std::make_shared<PsiNode>();
            node->kind = PsiNode::Kind::negate;
            node->lhs = parse_unary();
            return node;
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (peek() != '^') return base;
        ++pos_;
        auto node = std::make_shared<PsiNode>();
        node->kind = PsiNode::Kind::pow;
        node->lhs = std::move(base);
        node->rhs = parse_unary();  // right-associative, sign allowed
        return node;
    }

    NodePtr parse_atom() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw parse_error("expected a number, variable, function or '('", pos_);
    }

    void expect(char c) {
        if (peek() != c)
            throw parse_error(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    NodePtr parse_number() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t e = pos_ + 1;
            if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
            if (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) {
                pos_ = e;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            }
        }
        double value = 0.0;
        const auto [ptr, ec] =
            std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc() || ptr != text_.data() + pos_)
            throw parse_error("malformed number literal", start);
        auto node = std::make_shared<PsiNode>();
        node->kind = PsiNode::Kind::number;
        node->number = value;
        return node;
    }

    NodePtr parse_ident() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);

        static constexpr std::pair<std::string_view, PsiFn> fns[] = {
            {"sin", PsiFn::sin}, {"cos", PsiFn::cos},   {"exp", PsiFn::exp},
            {"sqrt", PsiFn::sqrt}, {"abs", PsiFn::abs}, {"log", PsiFn::log}};
        for (const auto& [fname, f] : fns) {
            if (name != fname) continue;
            expect('(');
            auto node = std::make_shared<PsiNode>();
            node->kind = PsiNode::Kind::call;
            node->fn = f;
            node->lhs = parse_expr();
            if (peek() == ',')
                throw parse_error("function '" + std::string(fname) + "' takes one argument",
                                  pos_);
            expect(')');
            return node;
        }

        int index = -1;
        if (name.size() >= 2 && name[0] == 'x') {
            int v = 0;
            const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), v);
            if (ec == std::errc() && ptr == name.data() + name.size()) index = v - 1;
        } else if (name.size() == 1 && n_vars_ <= 3) {
            if (name[0] == 'x') index = 0;
            if (name[0] == 'y') index = 1;
            if (name[0] == 'z') index = 2;
        }
        if (index < 0)
            throw parse_error("unknown identifier '" + std::string(name) + "'", start);
        if (index >= n_vars_)
            throw parse_error("unknown variable '" + std::string(name) + "' (only x1..x" +
                                  std::to_string(n_vars_) + " here)",
                              start);
        auto node = std::make_shared<PsiNode>();
        node->kind = PsiNode::Kind::variable;
        node->var_index = index;
        return node;
    }

    std::string_view text_;
    int n_vars_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Immutable parsed expression for psi. Values are freely copyable and
/// safe to evaluate concurrently.
class PsiExpr {
public:
    static PsiExpr parse(std::string_view text, int n_vars) {
        if (n_vars < 1) throw std::domain_error("PsiExpr: need at least one variable");
        detail::Parser p(text, n_vars);
        return PsiExpr(p.run(), n_vars);
    }

    [[nodiscard]] double eval(std::span<const double> point) const {
        if (static_cast<int>(point.size()) < n_vars_)
            throw std::invalid_argument("PsiExpr::eval: point dimension mismatch");
        return detail::eval_node(*root_, point);
    }

    [[nodiscard]] double eval_origin() const {
        const std::array<double, 3> zero{0.0, 0.0, 0.0};
        if (n_vars_ <= 3) return eval(std::span<const double>(zero.data(), 3));
        const std::vector<double> z(static_cast<std::size_t>(n_vars_), 0.0);
        return eval(z);
    }

    [[nodiscard]] std::string to_string() const { return detail::describe(*root_); }

    [[nodiscard]] int n_vars() const { return n_vars_; }

    [[nodiscard]] bool operator==(const PsiExpr& o) const {
        return n_vars_ == o.n_vars_ && detail::same_structure(*root_, *o.root_);
    }

private:
    PsiExpr(detail::NodePtr root, int n_vars) : root_(std::move(root)), n_vars_(n_vars) {}

    detail::NodePtr root_;
    int n_vars_;
};

}  // namespace sigmak
