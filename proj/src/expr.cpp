#include "annsim/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace annsim::expr {

namespace {

constexpr int kMaxDepth = 64;
constexpr double kEuler = 2.718281828459045;
constexpr double kPi = 3.141592653589793;

bool is_ident_char(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

}  // namespace

class ParserImpl {
public:
    explicit ParserImpl(std::string_view text) : s_(text) {}

    // EXPR only (constant context).
    TransferExpr parse_expression() {
        TransferExpr out;
        out.source_ = std::string(s_);
        expr_ = &out;
        out.root_ = parse_expr(0);
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return out;
    }

    // Full `f(x)=EXPR` form.
    TransferExpr parse_function_text() {
        TransferExpr out;
        out.source_ = std::string(s_);
        expr_ = &out;
        skip_ws();
        expect_word("f");
        expect_char('(');
        expect_word("x");
        expect_char(')');
        expect_char('=');
        out.root_ = parse_expr(0);
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return out;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    TransferExpr* expr_ = nullptr;

    [[noreturn]] void fail(const std::string& msg, Error::Kind kind = Error::Kind::parse) const {
        throw Error(kind, msg + " at offset " + std::to_string(pos_), pos_);
    }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

    void expect_char(char c) {
        skip_ws();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void expect_word(std::string_view w) {
        skip_ws();
        if (s_.compare(pos_, w.size(), w) != 0 ||
            (pos_ + w.size() < s_.size() && is_ident_char(s_[pos_ + w.size()])))
            fail("expected '" + std::string(w) + "'");
        pos_ += w.size();
    }

    int add_node(ExprNode node) {
        expr_->nodes_.push_back(node);
        return static_cast<int>(expr_->nodes_.size()) - 1;
    }

    void check_depth(int depth) {
        if (depth > kMaxDepth)
            fail("expression nesting exceeds depth limit", Error::Kind::depth_limit);
    }

    // expr  := term (('+'|'-') term)*
    int parse_expr(int depth) {
        check_depth(depth);
        int lhs = parse_term(depth + 1);
        for (;;) {
            skip_ws();
            char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            int rhs = parse_term(depth + 1);
            ExprNode n;
            n.kind = ExprNode::Kind::binary;
            n.op = c == '+' ? BinOp::add : BinOp::sub;
            n.lhs = lhs;
            n.rhs = rhs;
            lhs = add_node(n);
        }
    }

    // term := unary (('*'|'/') unary)*
    int parse_term(int depth) {
        check_depth(depth);
        int lhs = parse_unary(depth + 1);
        for (;;) {
            skip_ws();
            char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            int rhs = parse_unary(depth + 1);
            ExprNode n;
            n.kind = ExprNode::Kind::binary;
            n.op = c == '*' ? BinOp::mul : BinOp::div;
            n.lhs = lhs;
            n.rhs = rhs;
            lhs = add_node(n);
        }
    }

    // unary := '-' unary | power
    // '^' binds tighter than a minus applied to its base: -x^2 == -(x^2).
    int parse_unary(int depth) {
        check_depth(depth);
        skip_ws();
        if (peek() == '-') {
            ++pos_;
            int child = parse_unary(depth + 1);
            ExprNode n;
            n.kind = ExprNode::Kind::negate;
            n.lhs = child;
            return add_node(n);
        }
        return parse_power(depth + 1);
    }

    // power := atom ('^' unary)?   (right-associative)
    int parse_power(int depth) {
        check_depth(depth);
        int base = parse_atom(depth + 1);
        skip_ws();
        if (peek() != '^') return base;
        ++pos_;
        int exponent = parse_unary(depth + 1);
        ExprNode n;
        n.kind = ExprNode::Kind::binary;
        n.op = BinOp::pow;
        n.lhs = base;
        n.rhs = exponent;
        return add_node(n);
    }

    int parse_atom(int depth) {
        check_depth(depth);
        skip_ws();
        char c = peek();
        if (c == '(') {
            ++pos_;
            int inner = parse_expr(depth + 1);
            expect_char(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (is_ident_char(c)) return parse_identifier(depth);
        fail(pos_ >= s_.size() ? "unexpected end of expression"
                               : std::string("unexpected character '") + c + "'");
    }

    int parse_number() {
        double value = 0.0;
        const char* begin = s_.data() + pos_;
        const char* end = s_.data() + s_.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - begin);
        ExprNode n;
        n.kind = ExprNode::Kind::number;
        n.number = value;
        return add_node(n);
    }

    int parse_identifier(int depth) {
        std::size_t start = pos_;
        while (pos_ < s_.size() && is_ident_char(s_[pos_])) ++pos_;
        std::string_view name = s_.substr(start, pos_ - start);
        skip_ws();
        if (peek() == '(') {
            Call call;
            if (name == "exp") call = Call::exp;
            else if (name == "ln") call = Call::ln;
            else if (name == "tanh") call = Call::tanh;
            else if (name == "sigmoid") call = Call::sigmoid;
            else if (name == "relu") call = Call::relu;
            else if (name == "step") call = Call::step;
            else if (name == "abs") call = Call::abs;
            else {
                pos_ = start;
                fail("unknown function '" + std::string(name) + "'",
                     Error::Kind::unknown_function);
            }
            ++pos_;
            int arg = parse_expr(depth + 1);
            expect_char(')');
            ExprNode n;
            n.kind = ExprNode::Kind::call;
            n.call = call;
            n.lhs = arg;
            return add_node(n);
        }
        ExprNode n;
        if (name == "x") {
            n.kind = ExprNode::Kind::variable;
        } else if (name == "e") {
            n.kind = ExprNode::Kind::number;
            n.number = kEuler;
        } else if (name == "pi") {
            n.kind = ExprNode::Kind::number;
            n.number = kPi;
        } else {
            pos_ = start;
            fail("unknown identifier '" + std::string(name) + "'");
        }
        return add_node(n);
    }
};

namespace {

[[noreturn]] void domain_error(const std::string& what) {
    throw Error(Error::Kind::domain, what);
}

double checked(double v, const char* op) {
    if (!std::isfinite(v)) domain_error(std::string("non-finite result of ") + op);
    return v;
}

double eval_node(const std::vector<ExprNode>& nodes, int index, double x) {
    const ExprNode& n = nodes[static_cast<std::size_t>(index)];
    switch (n.kind) {
        case ExprNode::Kind::number:
            return n.number;
        case ExprNode::Kind::variable:
            return x;
        case ExprNode::Kind::negate:
            return -eval_node(nodes, n.lhs, x);
        case ExprNode::Kind::binary: {
            double a = eval_node(nodes, n.lhs, x);
            double b = eval_node(nodes, n.rhs, x);
            switch (n.op) {
                case BinOp::add: return checked(a + b, "'+'");
                case BinOp::sub: return checked(a - b, "'-'");
                case BinOp::mul: return checked(a * b, "'*'");
                case BinOp::div:
                    if (b == 0.0) domain_error("division by zero");
                    return checked(a / b, "'/'");
                case BinOp::pow: return checked(std::pow(a, b), "'^'");
            }
            break;
        }
        case ExprNode::Kind::call: {
            double a = eval_node(nodes, n.lhs, x);
            switch (n.call) {
                case Call::exp: return checked(std::exp(a), "exp");
                case Call::ln:
                    if (a <= 0.0) domain_error("ln of a non-positive value");
                    return checked(std::log(a), "ln");
                case Call::tanh: return std::tanh(a);
                case Call::sigmoid:
                    // Same arithmetic as the spelled-out logistic expression
                    // so both forms stay bit-identical.
                    return checked(1.0 / (1.0 + checked(std::exp(-a), "exp")), "sigmoid");
                case Call::relu: return a > 0.0 ? a : 0.0;
                case Call::step: return a > 0.0 ? 1.0 : 0.0;
                case Call::abs: return std::fabs(a);
            }
            break;
        }
    }
    domain_error("malformed expression tree");
}

}  // namespace

double TransferExpr::eval(double x) const {
    if (root_ < 0) domain_error("empty expression");
    return eval_node(nodes_, root_, x);
}

bool TransferExpr::uses_variable() const {
    for (const ExprNode& n : nodes_)
        if (n.kind == ExprNode::Kind::variable) return true;
    return false;
}

TransferExpr parse_function(std::string_view text) {
    return ParserImpl(text).parse_function_text();
}

double eval_const(std::string_view text) {
    TransferExpr e = ParserImpl(text).parse_expression();
    if (e.uses_variable())
        throw Error(Error::Kind::not_constant,
                    "expression '" + std::string(text) + "' is not constant: it uses x");
    return e.eval(0.0);
}

}  // namespace annsim::expr
