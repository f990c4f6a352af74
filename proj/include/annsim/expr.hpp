#ifndef ANNSIM_EXPR_HPP
#define ANNSIM_EXPR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace annsim::expr {

class Error : public std::runtime_error {
public:
    enum class Kind {
        parse,             // malformed expression text
        unknown_function,  // call of a name that is not in the function set
        depth_limit,       // expression nesting exceeds the parser bound
        not_constant,      // constant context but the expression uses x
        domain,            // evaluation produced a non-finite value
    };

    Error(Kind kind, std::string msg, std::size_t offset = 0)
        : std::runtime_error(std::move(msg)), kind_(kind), offset_(offset) {}

    Kind kind() const { return kind_; }
    // Byte offset into the source text where the problem was detected
    // (meaningful for the parse-time kinds).
    std::size_t offset() const { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

enum class BinOp { add, sub, mul, div, pow };
enum class Call { exp, ln, tanh, sigmoid, relu, step, abs };

// Flat expression tree; children are indices into the node vector.
struct ExprNode {
    enum class Kind { number, variable, negate, binary, call };
    Kind kind = Kind::number;
    double number = 0.0;
    BinOp op = BinOp::add;
    Call call = Call::exp;
    int lhs = -1;
    int rhs = -1;

    bool operator==(const ExprNode&) const = default;
};

// Parsed `f(x)=...` transfer function. Immutable; evaluation is pure, so a
// single instance may be shared across any number of threads.
class TransferExpr {
public:
    TransferExpr() = default;

    // Deterministic double-precision evaluation. Every operation that yields
    // a non-finite intermediate (division by zero, ln of a non-positive
    // value, overflow in exp or ^) raises Error{domain}.
    double eval(double x) const;

    bool uses_variable() const;
    const std::string& source() const { return source_; }

    bool operator==(const TransferExpr& other) const {
        return nodes_ == other.nodes_ && root_ == other.root_;
    }

private:
    friend TransferExpr parse_function(std::string_view);
    friend double eval_const(std::string_view);
    friend class ParserImpl;

    std::vector<ExprNode> nodes_;
    int root_ = -1;
    std::string source_;
};

// Parses the `f(x)=EXPR` grammar. EXPR supports decimal literals, x, the
// named constants e and pi, parentheses, + - * / ^ (right-associative ^,
// binding above a minus applied to its base), unary minus, and the calls
// exp, ln, tanh, sigmoid, relu, step, abs.
TransferExpr parse_function(std::string_view text);

// Parses and evaluates a bare constant expression (same grammar without the
// `f(x)=` head, and with x forbidden).
double eval_const(std::string_view text);

}  // namespace annsim::expr

#endif
