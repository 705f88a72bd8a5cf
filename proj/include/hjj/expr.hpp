// SPDX-License-Identifier: MIT
/**
    \file
    \brief scalar arithmetic expressions over named variables

    Grammar, loosest to tightest binding:

        expr    := term (('+' | '-') term)*
        term    := unary (('*' | '/') unary)*
        unary   := ('-' | '+') unary | power
        power   := primary ('^' integer)*
        primary := number | variable | function '(' expr ')' | '(' expr ')'

    Functions: sin cos tanh exp log abs sqrt. The exponent of `^` must be a
    (possibly signed) integer literal. There is no implicit multiplication.

    A parsed expression is immutable. Evaluation runs a postfix program over a
    small stack, either in doubles or in Dual numbers seeded on one variable.
*/

#pragma once

#include <hjj/dual.hpp>
#include <hjj/errors.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace hjj {

enum class Op : std::uint8_t {
    Const,
    Var,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Sin,
    Cos,
    Tanh,
    Exp,
    Log,
    Abs,
    Sqrt,
};

struct ExprNode {
    Op op = Op::Const;
    double value = 0.0;    // Const
    std::uint32_t var = 0; // Var: index into the variable list
    int exponent = 0;      // Pow
    int lhs = -1;          // unary operand / left operand
    int rhs = -1;
    std::size_t pos = 0;   // source offset
};

namespace detail {

struct FunctionName {
    std::string_view name;
    Op op;
};

inline constexpr std::array<FunctionName, 7> kFunctions{{
    {"sin", Op::Sin},
    {"cos", Op::Cos},
    {"tanh", Op::Tanh},
    {"exp", Op::Exp},
    {"log", Op::Log},
    {"abs", Op::Abs},
    {"sqrt", Op::Sqrt},
}};

inline std::string_view function_name(Op op) {
    for (const auto& f : kFunctions)
        if (f.op == op) return f.name;
    return {};
}

inline bool is_unary(Op op) { return op == Op::Neg || op >= Op::Sin; }
inline bool is_binary(Op op) { return op >= Op::Add && op <= Op::Div; }

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

class Expr {
public:
    /// The constant 0 over no variables.
    Expr() : nodes_{ExprNode{}}, root_{0}, program_{0}, max_stack_{1} {}

    static Expr parse(std::string_view source, std::vector<std::string> variables);

    static Expr constant(double v) {
        Expr e;
        e.nodes_[0].value = v;
        return e;
    }

    const std::vector<std::string>& variables() const noexcept { return variables_; }
    const std::string& source() const noexcept { return source_; }
    const ExprNode& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
    int root() const noexcept { return root_; }

    /// Index of `name` in the variable list, or -1.
    int variable_index(std::string_view name) const {
        for (std::size_t i = 0; i < variables_.size(); ++i)
            if (variables_[i] == name) return static_cast<int>(i);
        return -1;
    }

    bool uses(std::string_view name) const {
        const int idx = variable_index(name);
        if (idx < 0) return false;
        for (const auto& n : nodes_)
            if (n.op == Op::Var && n.var == static_cast<std::uint32_t>(idx)) return true;
        return false;
    }

    /// `values[i]` binds variables()[i].
    double eval(std::span<const double> values) const {
        return run<double>([&](std::uint32_t i) { return values[i]; });
    }

    /// Value and derivative with respect to variables()[seed].
    Dual eval_d(std::span<const double> values, std::size_t seed) const {
        return run<Dual>([&](std::uint32_t i) { return Dual{values[i], i == seed ? 1.0 : 0.0}; });
    }

    double eval(const std::map<std::string, double>& bindings) const {
        return eval(std::span<const double>(bind(bindings)));
    }

    std::pair<double, double> eval_d(const std::map<std::string, double>& bindings,
                                     std::string_view seed) const {
        const int idx = variable_index(seed);
        if (idx < 0) throw Error("seed variable '" + std::string(seed) + "' is not declared");
        const auto values = bind(bindings);
        const Dual d = eval_d(std::span<const double>(values), static_cast<std::size_t>(idx));
        return {d.value, d.deriv};
    }

    /// Fully parenthesized text that parses back to an equal tree.
    std::string to_string() const { return print(root_); }

    friend bool operator==(const Expr& a, const Expr& b) {
        return a.variables_ == b.variables_ && a.same_tree(a.root_, b, b.root_);
    }

private:
    std::vector<double> bind(const std::map<std::string, double>& bindings) const {
        std::vector<double> values(variables_.size(), 0.0);
        for (std::size_t i = 0; i < variables_.size(); ++i) {
            const auto it = bindings.find(variables_[i]);
            if (it != bindings.end()) {
                values[i] = it->second;
            } else if (uses(variables_[i])) {
                throw Error("variable '" + variables_[i] + "' is not bound");
            }
        }
        return values;
    }

    template <typename T, typename Leaf>
    T run(Leaf&& leaf) const {
        constexpr std::size_t kInline = 48;
        std::array<T, kInline> inline_stack{};
        std::vector<T> heap_stack;
        T* stack = inline_stack.data();
        if (max_stack_ > kInline) {
            heap_stack.resize(max_stack_);
            stack = heap_stack.data();
        }
        std::size_t top = 0;
        for (const std::uint32_t idx : program_) {
            const ExprNode& n = nodes_[idx];
            switch (n.op) {
            case Op::Const: stack[top++] = T(n.value); break;
            case Op::Var: stack[top++] = leaf(n.var); break;
            case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
            case Op::Add: --top; stack[top - 1] = stack[top - 1] + stack[top]; break;
            case Op::Sub: --top; stack[top - 1] = stack[top - 1] - stack[top]; break;
            case Op::Mul: --top; stack[top - 1] = stack[top - 1] * stack[top]; break;
            case Op::Div:
                --top;
                if (value_of(stack[top]) == 0.0) throw DomainError("division by zero", n.pos);
                stack[top - 1] = stack[top - 1] / stack[top];
                break;
            case Op::Pow: {
                using std::pow;
                if (n.exponent < 0 && value_of(stack[top - 1]) == 0.0)
                    throw DomainError("zero raised to a negative power", n.pos);
                stack[top - 1] = pow(stack[top - 1], n.exponent);
                break;
            }
            case Op::Sin: { using std::sin; stack[top - 1] = sin(stack[top - 1]); break; }
            case Op::Cos: { using std::cos; stack[top - 1] = cos(stack[top - 1]); break; }
            case Op::Tanh: { using std::tanh; stack[top - 1] = tanh(stack[top - 1]); break; }
            case Op::Exp: { using std::exp; stack[top - 1] = exp(stack[top - 1]); break; }
            case Op::Abs: { using std::abs; stack[top - 1] = abs(stack[top - 1]); break; }
            case Op::Log: {
                using std::log;
                if (!(value_of(stack[top - 1]) > 0.0))
                    throw DomainError("log of nonpositive value", n.pos);
                stack[top - 1] = log(stack[top - 1]);
                break;
            }
            case Op::Sqrt: {
                using std::sqrt;
                const double v = value_of(stack[top - 1]);
                if (v < 0.0) throw DomainError("sqrt of negative value", n.pos);
                if constexpr (std::is_same_v<T, Dual>) {
                    if (v == 0.0 && stack[top - 1].deriv != 0.0)
                        throw DomainError("derivative of sqrt at 0", n.pos);
                }
                stack[top - 1] = sqrt(stack[top - 1]);
                break;
            }
            }
        }
        return stack[0];
    }

    static double value_of(double v) { return v; }
    static double value_of(const Dual& d) { return d.value; }

    std::string print(int i) const {
        const ExprNode& n = nodes_[static_cast<std::size_t>(i)];
        switch (n.op) {
        case Op::Const: return detail::format_double(n.value);
        case Op::Var: return variables_[n.var];
        case Op::Neg: return "(-" + print(n.lhs) + ")";
        case Op::Add: return "(" + print(n.lhs) + " + " + print(n.rhs) + ")";
        case Op::Sub: return "(" + print(n.lhs) + " - " + print(n.rhs) + ")";
        case Op::Mul: return "(" + print(n.lhs) + " * " + print(n.rhs) + ")";
        case Op::Div: return "(" + print(n.lhs) + " / " + print(n.rhs) + ")";
        case Op::Pow: return "(" + print(n.lhs) + "^" + std::to_string(n.exponent) + ")";
        default: return std::string(detail::function_name(n.op)) + "(" + print(n.lhs) + ")";
        }
    }

    bool same_tree(int i, const Expr& other, int j) const {
        const ExprNode& a = nodes_[static_cast<std::size_t>(i)];
        const ExprNode& b = other.nodes_[static_cast<std::size_t>(j)];
        if (a.op != b.op) return false;
        switch (a.op) {
        case Op::Const: return a.value == b.value;
        case Op::Var: return variables_[a.var] == other.variables_[b.var];
        case Op::Pow: return a.exponent == b.exponent && same_tree(a.lhs, other, b.lhs);
        default:
            if (!same_tree(a.lhs, other, b.lhs)) return false;
            return !detail::is_binary(a.op) || same_tree(a.rhs, other, b.rhs);
        }
    }

    void compile() {
        program_.clear();
        max_stack_ = 0;
        std::size_t depth = 0;
        emit(root_, depth);
    }

    void emit(int i, std::size_t& depth) {
        const ExprNode& n = nodes_[static_cast<std::size_t>(i)];
        if (n.lhs >= 0) emit(n.lhs, depth);
        if (n.rhs >= 0) emit(n.rhs, depth);
        if (n.op == Op::Const || n.op == Op::Var) {
            ++depth;
        } else if (detail::is_binary(n.op)) {
            --depth;
        }
        max_stack_ = std::max(max_stack_, depth);
        program_.push_back(static_cast<std::uint32_t>(i));
    }

    friend class ExprParser;

    std::vector<std::string> variables_;
    std::string source_;
    std::vector<ExprNode> nodes_;
    int root_ = 0;
    std::vector<std::uint32_t> program_;
    std::size_t max_stack_ = 0;
};

class ExprParser {
public:
    ExprParser(std::string_view src, std::vector<std::string> variables) : src_{src} {
        expr_.variables_ = std::move(variables);
        expr_.source_ = std::string(src);
        expr_.nodes_.clear();
    }

    Expr run() {
        skip_space();
        if (pos_ >= src_.size()) {
            throw ParseError(ParseError::Kind::Syntax, "empty expression", pos_,
                             "number, variable, function or '('");
        }
        expr_.root_ = parse_sum();
        skip_space();
        if (pos_ < src_.size()) {
            throw ParseError(ParseError::Kind::Syntax,
                             "unexpected '" + std::string(1, src_[pos_]) + "'", pos_,
                             "operator or end of input");
        }
        expr_.compile();
        return std::move(expr_);
    }

private:
    static constexpr const char* kOperand = "number, variable, function or '('";

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int add(ExprNode n) {
        expr_.nodes_.push_back(n);
        return static_cast<int>(expr_.nodes_.size() - 1);
    }

    int binary(Op op, int lhs, int rhs, std::size_t at) {
        ExprNode n;
        n.op = op;
        n.lhs = lhs;
        n.rhs = rhs;
        n.pos = at;
        return add(n);
    }

    int parse_sum() {
        int lhs = parse_product();
        for (;;) {
            skip_space();
            const std::size_t at = pos_;
            if (accept('+')) {
                lhs = binary(Op::Add, lhs, parse_product(), at);
            } else if (accept('-')) {
                lhs = binary(Op::Sub, lhs, parse_product(), at);
            } else {
                return lhs;
            }
        }
    }

    int parse_product() {
        int lhs = parse_unary();
        for (;;) {
            skip_space();
            const std::size_t at = pos_;
            if (accept('*')) {
                lhs = binary(Op::Mul, lhs, parse_unary(), at);
            } else if (accept('/')) {
                lhs = binary(Op::Div, lhs, parse_unary(), at);
            } else {
                return lhs;
            }
        }
    }

    int parse_unary() {
        skip_space();
        const std::size_t at = pos_;
        if (accept('-')) {
            ExprNode n;
            n.op = Op::Neg;
            n.lhs = parse_unary();
            n.pos = at;
            return add(n);
        }
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    int parse_power() {
        int base = parse_primary();
        for (;;) {
            skip_space();
            const std::size_t at = pos_;
            if (!accept('^')) return base;
            skip_space();
            const std::size_t exp_at = pos_;
            int sign = 1;
            if (accept('-')) {
                sign = -1;
            } else {
                accept('+');
            }
            skip_space();
            if (pos_ >= src_.size() || !(std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
                throw ParseError(ParseError::Kind::Syntax, "missing exponent", pos_, "integer literal");
            }
            const double v = read_number();
            if (v != std::floor(v) || v > 1024.0) {
                throw ParseError(ParseError::Kind::Syntax, "exponent must be an integer", exp_at,
                                 "integer literal");
            }
            ExprNode n;
            n.op = Op::Pow;
            n.lhs = base;
            n.exponent = sign * static_cast<int>(v);
            n.pos = at;
            base = add(n);
        }
    }

    double read_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t count = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++count;
            }
            return count;
        };
        std::size_t mantissa = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) throw ParseError(ParseError::Kind::Syntax, "malformed number", start, "digit");
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;  // "2e" is the number 2 followed by identifier e
        }
        const std::string text(src_.substr(start, pos_ - start));
        const double v = std::strtod(text.c_str(), nullptr);
        if (!std::isfinite(v)) throw ParseError(ParseError::Kind::Syntax, "number out of range", start);
        return v;
    }

    int parse_primary() {
        skip_space();
        const std::size_t at = pos_;
        if (pos_ >= src_.size()) throw ParseError(ParseError::Kind::Syntax, "unexpected end of input", at, kOperand);
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            ExprNode n;
            n.op = Op::Const;
            n.value = read_number();
            n.pos = at;
            return add(n);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            const std::string_view name = src_.substr(at, pos_ - at);
            skip_space();
            if (pos_ < src_.size() && src_[pos_] == '(') {
                Op op = Op::Const;
                bool known = false;
                for (const auto& f : detail::kFunctions) {
                    if (f.name == name) {
                        op = f.op;
                        known = true;
                    }
                }
                if (!known) {
                    throw ParseError(ParseError::Kind::UnknownFunction,
                                     "unknown function '" + std::string(name) + "'", at);
                }
                ++pos_;
                ExprNode n;
                n.op = op;
                n.lhs = parse_sum();
                n.pos = at;
                if (!accept(')')) throw ParseError(ParseError::Kind::Syntax, "unclosed call", pos_, "')'");
                return add(n);
            }
            const int idx = expr_.variable_index(name);
            if (idx < 0) {
                throw ParseError(ParseError::Kind::UnknownVariable,
                                 "unknown variable '" + std::string(name) + "'", at);
            }
            ExprNode n;
            n.op = Op::Var;
            n.var = static_cast<std::uint32_t>(idx);
            n.pos = at;
            return add(n);
        }
        if (accept('(')) {
            const int inner = parse_sum();
            if (!accept(')')) throw ParseError(ParseError::Kind::Syntax, "unclosed parenthesis", pos_, "')'");
            return inner;
        }
        throw ParseError(ParseError::Kind::Syntax, "unexpected '" + std::string(1, c) + "'", at, kOperand);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Expr expr_;
};

inline Expr Expr::parse(std::string_view source, std::vector<std::string> variables) {
    return ExprParser(source, std::move(variables)).run();
}

/// Convenience wrapper matching parse(source, variables).
inline Expr parse(std::string_view source, std::vector<std::string> variables) {
    return Expr::parse(source, std::move(variables));
}

}  // namespace hjj
