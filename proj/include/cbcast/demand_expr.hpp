#pragma once

// Demand expressions: a small modular-arithmetic language over X1..XN.
//
//   or    := add ( '|' add )*
//   add   := mul ( ('+' | '-' | '^') mul )*
//   mul   := unary ( ('*' | '&') unary | <implicit: constant followed by X or '('> )*
//   unary := ('!' | '~' | '-') unary | primary
//   primary := 'X' digits | digits | '(' or ')'
//
// '+', '-', '*' and unary '-' are arithmetic mod q. '&', '|', '^', '!' and '~'
// are Boolean and only accepted when q = 2. All binary operators are
// left-associative. "2X2" is read as 2 * X2.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "instance.hpp"

namespace cbcast {

struct DemandExpr {
    enum class Op { variable, constant, negate, logical_not, add, subtract, multiply, logical_and, logical_or, logical_xor };

    Op op = Op::constant;
    int value = 0;                  // variable index (1-based) or constant
    std::vector<DemandExpr> args;

    static DemandExpr var(int j) { return {Op::variable, j, {}}; }
    static DemandExpr constant(int c) { return {Op::constant, c, {}}; }
    static DemandExpr unary(Op op, DemandExpr a) { return {op, 0, {std::move(a)}}; }
    static DemandExpr binary(Op op, DemandExpr a, DemandExpr b) { return {op, 0, {std::move(a), std::move(b)}}; }

    bool operator==(const DemandExpr&) const = default;
};

class ParseError : public std::invalid_argument {
public:
    enum class Kind { syntax, variable_out_of_range, constant_out_of_range, boolean_operator };

    ParseError(Kind kind, std::size_t position, const std::string& what)
        : std::invalid_argument(what + " at position " + std::to_string(position)), kind_(kind), position_(position) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t position() const noexcept { return position_; }

private:
    Kind kind_;
    std::size_t position_;
};

namespace detail {

class DemandParser {
public:
    DemandParser(std::string_view text, int q, int n) : text_(text), q_(q), n_(n) {}

    DemandExpr parse() {
        skip();
        if (pos_ == text_.size()) fail(ParseError::Kind::syntax, "empty expression");
        auto e = parse_or();
        skip();
        if (pos_ != text_.size()) fail(ParseError::Kind::syntax, std::string("unexpected '") + text_[pos_] + "'");
        return e;
    }

private:
    using Op = DemandExpr::Op;

    [[noreturn]] void fail(ParseError::Kind k, const std::string& msg) const { throw ParseError(k, pos_, msg); }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void require_boolean(char op) {
        if (q_ != 2) fail(ParseError::Kind::boolean_operator, std::string("Boolean operator '") + op + "' needs q = 2");
    }

    DemandExpr parse_or() {
        auto lhs = parse_add();
        while (peek() == '|') {
            require_boolean('|');
            ++pos_;
            lhs = DemandExpr::binary(Op::logical_or, std::move(lhs), parse_add());
        }
        return lhs;
    }

    DemandExpr parse_add() {
        auto lhs = parse_mul();
        for (;;) {
            const char c = peek();
            Op op;
            if (c == '+') op = Op::add;
            else if (c == '-') op = Op::subtract;
            else if (c == '^') { require_boolean(c); op = Op::logical_xor; }
            else return lhs;
            ++pos_;
            lhs = DemandExpr::binary(op, std::move(lhs), parse_mul());
        }
    }

    DemandExpr parse_mul() {
        auto lhs = parse_unary();
        for (;;) {
            const char c = peek();
            if (c == '*' || c == '&') {
                if (c == '&') require_boolean(c);
                ++pos_;
                lhs = DemandExpr::binary(c == '*' ? Op::multiply : Op::logical_and, std::move(lhs), parse_unary());
            } else if (lhs.op == Op::constant && lhs.args.empty() && (c == 'X' || c == 'x' || c == '(')) {
                lhs = DemandExpr::binary(Op::multiply, std::move(lhs), parse_unary());
            } else {
                return lhs;
            }
        }
    }

    DemandExpr parse_unary() {
        const char c = peek();
        if (c == '!' || c == '~') {
            require_boolean(c);
            ++pos_;
            return DemandExpr::unary(Op::logical_not, parse_unary());
        }
        if (c == '-') {
            ++pos_;
            return DemandExpr::unary(Op::negate, parse_unary());
        }
        return parse_primary();
    }

    int parse_number() {
        const std::size_t start = pos_;
        long long v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + (text_[pos_] - '0');
            if (v > 1'000'000'000) { pos_ = start; fail(ParseError::Kind::constant_out_of_range, "number too large"); }
            ++pos_;
        }
        if (pos_ == start) fail(ParseError::Kind::syntax, "expected a number");
        return static_cast<int>(v);
    }

    DemandExpr parse_primary() {
        const char c = peek();
        const std::size_t start = pos_;
        if (c == 'X' || c == 'x') {
            ++pos_;
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                fail(ParseError::Kind::syntax, "expected a dataset index after 'X'");
            const int j = parse_number();
            if (j < 1 || j > n_) {
                pos_ = start;
                fail(ParseError::Kind::variable_out_of_range,
                     "variable X" + std::to_string(j) + " outside X1..X" + std::to_string(n_));
            }
            return DemandExpr::var(j);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            const int v = parse_number();
            if (v >= q_) {
                pos_ = start;
                fail(ParseError::Kind::constant_out_of_range,
                     "constant " + std::to_string(v) + " outside F_" + std::to_string(q_));
            }
            return DemandExpr::constant(v);
        }
        if (c == '(') {
            ++pos_;
            auto e = parse_or();
            if (peek() != ')') fail(ParseError::Kind::syntax, "expected ')'");
            ++pos_;
            return e;
        }
        if (c == '\0') fail(ParseError::Kind::syntax, "unexpected end of expression");
        fail(ParseError::Kind::syntax, std::string("unexpected '") + c + "'");
    }

    std::string_view text_;
    int q_;
    int n_;
    std::size_t pos_ = 0;
};

inline int precedence(DemandExpr::Op op) {
    using Op = DemandExpr::Op;
    switch (op) {
    case Op::logical_or: return 1;
    case Op::add: case Op::subtract: case Op::logical_xor: return 2;
    case Op::multiply: case Op::logical_and: return 3;
    case Op::negate: case Op::logical_not: return 4;
    default: return 5;
    }
}

inline const char* symbol(DemandExpr::Op op) {
    using Op = DemandExpr::Op;
    switch (op) {
    case Op::negate: return "-";
    case Op::logical_not: return "!";
    case Op::add: return " + ";
    case Op::subtract: return " - ";
    case Op::multiply: return " * ";
    case Op::logical_and: return " & ";
    case Op::logical_or: return " | ";
    case Op::logical_xor: return " ^ ";
    default: return "";
    }
}

} // namespace detail

inline DemandExpr parse_demand(std::string_view text, int q, int n_datasets) {
    return detail::DemandParser(text, q, n_datasets).parse();
}

/// Canonical text with the minimum parentheses needed for parse_demand to
/// rebuild the same tree.
inline std::string to_string(const DemandExpr& e) {
    using Op = DemandExpr::Op;
    switch (e.op) {
    case Op::variable: return "X" + std::to_string(e.value);
    case Op::constant: return std::to_string(e.value);
    case Op::negate:
    case Op::logical_not: {
        auto inner = to_string(e.args[0]);
        if (detail::precedence(e.args[0].op) < 4) inner = "(" + inner + ")";
        return detail::symbol(e.op) + inner;
    }
    default: {
        const int p = detail::precedence(e.op);
        auto lhs = to_string(e.args[0]);
        auto rhs = to_string(e.args[1]);
        if (detail::precedence(e.args[0].op) < p) lhs = "(" + lhs + ")";
        if (detail::precedence(e.args[1].op) <= p) rhs = "(" + rhs + ")";
        return lhs + detail::symbol(e.op) + rhs;
    }
    }
}

inline int evaluate(const DemandExpr& e, const std::vector<int>& x, int q) {
    using Op = DemandExpr::Op;
    switch (e.op) {
    case Op::variable: return x[static_cast<std::size_t>(e.value - 1)];
    case Op::constant: return e.value % q;
    case Op::negate: return (q - evaluate(e.args[0], x, q)) % q;
    case Op::logical_not: return 1 - evaluate(e.args[0], x, q);
    default: break;
    }
    const int a = evaluate(e.args[0], x, q);
    const int b = evaluate(e.args[1], x, q);
    switch (e.op) {
    case Op::add: return (a + b) % q;
    case Op::subtract: return (a - b + q) % q;
    case Op::multiply:
    case Op::logical_and: return (a * b) % q;
    case Op::logical_or: return (a | b) & 1;
    case Op::logical_xor: return (a + b) % 2;
    default: return 0;
    }
}

/// Tabulates `e` on every tuple of F_q^N.
inline DemandTable expand_demand(const DemandExpr& e, const TupleSpace& space) {
    DemandTable t;
    const auto size = space.size();
    t.values.resize(static_cast<std::size_t>(size));
    for (std::uint64_t x = 0; x < size; ++x)
        t.values[x] = evaluate(e, space.digits(static_cast<TupleId>(x)), space.q);
    return t;
}

inline DemandTable expand_demand(std::string_view text, const TupleSpace& space) {
    return expand_demand(parse_demand(text, space.q, space.n), space);
}

} // namespace cbcast
