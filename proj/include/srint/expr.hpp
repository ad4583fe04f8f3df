#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "srint/region.hpp"

namespace srint {

/// Tiny arithmetic expression language for user-supplied weights and fields.
/// Variables x0..x{d-1} refer to the first argument point, y0..y{d-1} to the
/// optional second one (two-point kernels). Operators + - * / ^ and unary
/// minus with the usual precedence, ^ right-associative and binding tighter
/// than unary minus. Functions: exp, sin, cos, sqrt, abs, min, max.
///
/// No automatic differentiation; callers use finite differences.
class Expr {
  public:
    struct ParseError : std::runtime_error {
        std::size_t offset;
        ParseError(const std::string& what, std::size_t off)
            : std::runtime_error(what + " at offset " + std::to_string(off)), offset(off) {}
    };
    struct EvalError : std::runtime_error {
        using std::runtime_error::runtime_error;
    };

    Expr() { root_ = add_node({Op::num, 0.0, 0, -1, -1}); }

    static Expr constant(double v) {
        Expr e;
        e.nodes_.clear();
        e.root_ = e.add_node({Op::num, v, 0, -1, -1});
        return e;
    }

    static Expr parse(std::string_view text) {
        if (text.size() > 65536) throw ParseError("expression too long", 0);
        std::string owned(text);  // guarantees NUL termination for strtod
        Parser p{owned, 0, 0};
        Expr e;
        e.nodes_.clear();
        e.root_ = e.parse_expr(p);
        p.skip_ws();
        if (p.pos != owned.size()) throw ParseError("unexpected trailing input", p.pos);
        return e;
    }

    double eval(std::span<const double> x, std::span<const double> y = {}) const {
        return eval_node(root_, x, y);
    }

    bool is_constant() const {
        for (const Node& n : nodes_)
            if (n.op == Op::varx || n.op == Op::vary) return false;
        return true;
    }
    double constant_value() const {
        if (!is_constant()) throw EvalError("expression is not constant");
        return eval_node(root_, {}, {});
    }
    bool uses_y() const {
        for (const Node& n : nodes_)
            if (n.op == Op::vary) return true;
        return false;
    }

    /// Diagonal restriction of a two-point kernel: every y_i becomes x_i.
    Expr with_y_as_x() const {
        Expr e = *this;
        for (Node& n : e.nodes_)
            if (n.op == Op::vary) n.op = Op::varx;
        return e;
    }
    int max_var_index() const {
        int mx = -1;
        for (const Node& n : nodes_)
            if (n.op == Op::varx || n.op == Op::vary) mx = std::max(mx, n.var);
        return mx;
    }

    std::string print() const { return print_node(root_, 0); }

  private:
    enum class Op : unsigned char {
        num, varx, vary, add, sub, mul, div, pow, neg,
        fexp, fsin, fcos, fsqrt, fabs, fmin, fmax
    };
    struct Node {
        Op op;
        double value;  // num
        int var;       // varx/vary index
        int a, b;      // children
    };

    std::vector<Node> nodes_;
    int root_ = -1;

    int add_node(Node n) {
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }

    struct Parser {
        std::string_view text;
        std::size_t pos;
        int depth;
        void skip_ws() {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        }
        bool at(char c) {
            skip_ws();
            return pos < text.size() && text[pos] == c;
        }
        bool eat(char c) {
            if (at(c)) { ++pos; return true; }
            return false;
        }
        char peek() {
            skip_ws();
            return pos < text.size() ? text[pos] : '\0';
        }
    };

    // expr := term (('+'|'-') term)*
    int parse_expr(Parser& p) {
        Guard g(p);
        int lhs = parse_term(p);
        for (;;) {
            if (p.eat('+')) lhs = add_node({Op::add, 0, 0, lhs, parse_term(p)});
            else if (p.eat('-')) lhs = add_node({Op::sub, 0, 0, lhs, parse_term(p)});
            else return lhs;
        }
    }
    // term := unary (('*'|'/') unary)*
    int parse_term(Parser& p) {
        Guard g(p);
        int lhs = parse_unary(p);
        for (;;) {
            if (p.eat('*')) lhs = add_node({Op::mul, 0, 0, lhs, parse_unary(p)});
            else if (p.eat('/')) lhs = add_node({Op::div, 0, 0, lhs, parse_unary(p)});
            else return lhs;
        }
    }
    // unary := '-' unary | power
    int parse_unary(Parser& p) {
        Guard g(p);
        if (p.eat('-')) return add_node({Op::neg, 0, 0, parse_unary(p), -1});
        return parse_power(p);
    }
    // power := primary ('^' unary)?   (right-associative, above unary minus)
    int parse_power(Parser& p) {
        Guard g(p);
        int base = parse_primary(p);
        if (p.eat('^')) return add_node({Op::pow, 0, 0, base, parse_unary(p)});
        return base;
    }

    int parse_primary(Parser& p) {
        Guard g(p);
        p.skip_ws();
        if (p.pos >= p.text.size()) throw ParseError("expected expression", p.pos);
        char c = p.text[p.pos];
        if (c == '(') {
            ++p.pos;
            int e = parse_expr(p);
            if (!p.eat(')')) throw ParseError("expected ')'", p.pos);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number(p);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident(p);
        throw ParseError("expected expression", p.pos);
    }

    int parse_number(Parser& p) {
        const char* start = p.text.data() + p.pos;
        char* end = nullptr;
        double v = std::strtod(start, &end);
        if (end == start) throw ParseError("bad number", p.pos);
        p.pos += static_cast<std::size_t>(end - start);
        return add_node({Op::num, v, 0, -1, -1});
    }

    int parse_ident(Parser& p) {
        std::size_t start = p.pos;
        while (p.pos < p.text.size() &&
               (std::isalnum(static_cast<unsigned char>(p.text[p.pos])) || p.text[p.pos] == '_'))
            ++p.pos;
        std::string_view name = p.text.substr(start, p.pos - start);
        if ((name[0] == 'x' || name[0] == 'y') && name.size() > 1) {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) { digits = false; break; }
            if (digits) {
                int idx = std::atoi(std::string(name.substr(1)).c_str());
                return add_node({name[0] == 'x' ? Op::varx : Op::vary, 0, idx, -1, -1});
            }
        }
        Op fn;
        int arity = 1;
        if (name == "exp") fn = Op::fexp;
        else if (name == "sin") fn = Op::fsin;
        else if (name == "cos") fn = Op::fcos;
        else if (name == "sqrt") fn = Op::fsqrt;
        else if (name == "abs") fn = Op::fabs;
        else if (name == "min") { fn = Op::fmin; arity = 2; }
        else if (name == "max") { fn = Op::fmax; arity = 2; }
        else throw ParseError("unknown identifier '" + std::string(name) + "'", start);
        if (!p.eat('(')) throw ParseError("expected '(' after function name", p.pos);
        int a = parse_expr(p);
        int b = -1;
        if (arity == 2) {
            if (!p.eat(',')) throw ParseError("expected ','", p.pos);
            b = parse_expr(p);
        }
        if (!p.eat(')')) throw ParseError("expected ')'", p.pos);
        return add_node({fn, 0, 0, a, b});
    }

    struct Guard {
        Parser& p;
        explicit Guard(Parser& parser) : p(parser) {
            if (++p.depth > 1000) throw ParseError("expression too deeply nested", p.pos);
        }
        ~Guard() { --p.depth; }
    };

    double eval_node(int id, std::span<const double> x, std::span<const double> y) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        switch (n.op) {
            case Op::num: return n.value;
            case Op::varx:
                if (static_cast<std::size_t>(n.var) >= x.size())
                    throw EvalError("unbound variable x" + std::to_string(n.var));
                return x[static_cast<std::size_t>(n.var)];
            case Op::vary:
                if (static_cast<std::size_t>(n.var) >= y.size())
                    throw EvalError("unbound variable y" + std::to_string(n.var));
                return y[static_cast<std::size_t>(n.var)];
            case Op::add: return eval_node(n.a, x, y) + eval_node(n.b, x, y);
            case Op::sub: return eval_node(n.a, x, y) - eval_node(n.b, x, y);
            case Op::mul: return eval_node(n.a, x, y) * eval_node(n.b, x, y);
            case Op::div: {
                double den = eval_node(n.b, x, y);
                if (den == 0.0) throw EvalError("division by zero");
                return eval_node(n.a, x, y) / den;
            }
            case Op::pow: {
                double base = eval_node(n.a, x, y), e = eval_node(n.b, x, y);
                double v = std::pow(base, e);
                if (std::isnan(v)) throw EvalError("domain error in '^'");
                return v;
            }
            case Op::neg: return -eval_node(n.a, x, y);
            case Op::fexp: return std::exp(eval_node(n.a, x, y));
            case Op::fsin: return std::sin(eval_node(n.a, x, y));
            case Op::fcos: return std::cos(eval_node(n.a, x, y));
            case Op::fsqrt: {
                double v = eval_node(n.a, x, y);
                if (v < 0.0) throw EvalError("sqrt of negative value");
                return std::sqrt(v);
            }
            case Op::fabs: return std::fabs(eval_node(n.a, x, y));
            case Op::fmin: return std::min(eval_node(n.a, x, y), eval_node(n.b, x, y));
            case Op::fmax: return std::max(eval_node(n.a, x, y), eval_node(n.b, x, y));
        }
        throw std::logic_error("expr: bad node");
    }

    static int prec_of(Op op) {
        switch (op) {
            case Op::add: case Op::sub: return 1;
            case Op::mul: case Op::div: return 2;
            case Op::neg: return 3;
            case Op::pow: return 4;
            default: return 5;
        }
    }

    std::string print_node(int id, int) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        auto wrap = [this](int child, bool parens) {
            std::string s = print_node(child, 0);
            return parens ? "(" + s + ")" : s;
        };
        int p = prec_of(n.op);
        switch (n.op) {
            case Op::num: {
                char buf[48];
                std::snprintf(buf, sizeof buf, "%.17g", n.value);
                return std::string(buf);
            }
            case Op::varx: return "x" + std::to_string(n.var);
            case Op::vary: return "y" + std::to_string(n.var);
            case Op::add: case Op::sub: case Op::mul: case Op::div: {
                const char* sym = n.op == Op::add ? " + " : n.op == Op::sub ? " - "
                                  : n.op == Op::mul ? "*" : "/";
                bool rp = prec_of(nodes_[static_cast<std::size_t>(n.b)].op) < p ||
                          ((n.op == Op::sub || n.op == Op::div) &&
                           prec_of(nodes_[static_cast<std::size_t>(n.b)].op) == p);
                return wrap(n.a, prec_of(nodes_[static_cast<std::size_t>(n.a)].op) < p) + sym +
                       wrap(n.b, rp);
            }
            case Op::pow:
                // Left operand of '^' must be a primary; the right side is a
                // unary and may itself be a power or negation.
                return wrap(n.a, prec_of(nodes_[static_cast<std::size_t>(n.a)].op) < 5) + "^" +
                       wrap(n.b, prec_of(nodes_[static_cast<std::size_t>(n.b)].op) < 3);
            case Op::neg:
                return "-" + wrap(n.a, prec_of(nodes_[static_cast<std::size_t>(n.a)].op) < 3);
            case Op::fexp: return "exp(" + print_node(n.a, 0) + ")";
            case Op::fsin: return "sin(" + print_node(n.a, 0) + ")";
            case Op::fcos: return "cos(" + print_node(n.a, 0) + ")";
            case Op::fsqrt: return "sqrt(" + print_node(n.a, 0) + ")";
            case Op::fabs: return "abs(" + print_node(n.a, 0) + ")";
            case Op::fmin: return "min(" + print_node(n.a, 0) + ", " + print_node(n.b, 0) + ")";
            case Op::fmax: return "max(" + print_node(n.a, 0) + ", " + print_node(n.b, 0) + ")";
        }
        throw std::logic_error("expr: bad node");
    }
};

/// Minimum of an expression over 1000 sampled region points (two-point
/// kernels are probed on the diagonal). Used to validate positivity of
/// weights at load time.
inline double sampled_min(const Expr& e, const Region& region, std::uint64_t seed = 12345,
                          std::size_t samples = 1000) {
    PointConfig pts = region.sample_uniform(samples, seed);
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto x = pts.point(i);
        mn = std::min(mn, e.uses_y() ? e.eval(x, x) : e.eval(x));
    }
    return mn;
}

}  // namespace srint
