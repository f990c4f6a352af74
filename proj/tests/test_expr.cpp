#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cstdint>

#include "annsim/expr.hpp"
#include "support/random_network.hpp"

using namespace annsim;
using expr::Error;

namespace {

bool bits_equal(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

Error::Kind kind_of(const char* text, bool constant = false) {
    try {
        if (constant)
            expr::eval_const(text);
        else
            expr::parse_function(text);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected expr::Error for: ", text);
    return Error::Kind::parse;
}

}  // namespace

TEST_CASE("identity") {
    auto f = expr::parse_function("f(x)=x");
    CHECK(f.eval(-1.5) == -1.5);
    CHECK(f.eval(0.0) == 0.0);
    CHECK(f.eval(42.25) == 42.25);
}

TEST_CASE("named constants and powers") {
    CHECK(expr::parse_function("f(x)=e^x").eval(1.0) ==
          doctest::Approx(2.718281828459045).epsilon(1e-12));
    CHECK(expr::eval_const("e") == doctest::Approx(2.718281828459045).epsilon(1e-15));
    CHECK(expr::eval_const("pi") == doctest::Approx(3.141592653589793).epsilon(1e-15));
    CHECK(expr::eval_const("0") == 0.0);
    CHECK(expr::eval_const("2*3+1") == 7.0);
    CHECK(expr::eval_const("(1+2)*3") == 9.0);
}

TEST_CASE("operator precedence and associativity") {
    // ^ binds above a minus applied to its base, and is right-associative.
    CHECK(expr::eval_const("-2^2") == -4.0);
    CHECK(expr::eval_const("2^3^2") == 512.0);
    CHECK(expr::eval_const("2^-2") == 0.25);
    CHECK(expr::eval_const("2*-3") == -6.0);
    CHECK(expr::eval_const("1-2-3") == -4.0);
    CHECK(expr::eval_const("8/4/2") == 1.0);
    CHECK(expr::eval_const("--1") == 1.0);
}

TEST_CASE("builtin calls") {
    CHECK(expr::parse_function("f(x)=sigmoid(x)").eval(0.0) == 0.5);
    CHECK(expr::parse_function("f(x)=relu(2*x-1)").eval(1.0) == 1.0);
    CHECK(expr::parse_function("f(x)=relu(2*x-1)").eval(0.0) == 0.0);
    CHECK(expr::parse_function("f(x)=step(x)").eval(0.0) == 0.0);
    CHECK(expr::parse_function("f(x)=step(x)").eval(0.1) == 1.0);
    CHECK(expr::parse_function("f(x)=abs(x)").eval(-3.0) == 3.0);
    CHECK(expr::parse_function("f(x)=tanh(x)").eval(0.0) == 0.0);
    CHECK(expr::parse_function("f(x)=ln(exp(x))").eval(2.0) == doctest::Approx(2.0));
}

TEST_CASE("whitespace tolerated") {
    CHECK(expr::parse_function("f(x) = 2 * x + 1").eval(3.0) == 7.0);
}

TEST_CASE("domain errors") {
    CHECK_NOTHROW(expr::parse_function("f(x)=ln(x)"));  // parse is fine
    CHECK_THROWS_AS(expr::parse_function("f(x)=ln(x)").eval(-1.0), Error);
    CHECK_THROWS_AS(expr::parse_function("f(x)=ln(x)").eval(0.0), Error);
    CHECK_THROWS_AS(expr::parse_function("f(x)=1/x").eval(0.0), Error);
    CHECK_THROWS_AS(expr::parse_function("f(x)=exp(x)").eval(1000.0), Error);
    CHECK_THROWS_AS(expr::parse_function("f(x)=x^x").eval(-0.5), Error);
    try {
        expr::parse_function("f(x)=1/x").eval(0.0);
    } catch (const Error& e) {
        CHECK(e.kind() == Error::Kind::domain);
    }
}

TEST_CASE("parse errors") {
    CHECK(kind_of("f(x)=") == Error::Kind::parse);
    CHECK(kind_of("g(x)=x") == Error::Kind::parse);
    CHECK(kind_of("f(y)=1") == Error::Kind::parse);
    CHECK(kind_of("f(x)=1+") == Error::Kind::parse);
    CHECK(kind_of("f(x)=(x") == Error::Kind::parse);
    CHECK(kind_of("f(x)=y") == Error::Kind::parse);
    CHECK(kind_of("f(x)=1 2") == Error::Kind::parse);
    CHECK(kind_of("f(x)=foo(x)") == Error::Kind::unknown_function);
    CHECK(kind_of("x+1", true) == Error::Kind::not_constant);

    std::string deep = "f(x)=";
    for (int i = 0; i < 100; ++i) deep += "(";
    deep += "x";
    for (int i = 0; i < 100; ++i) deep += ")";
    CHECK(kind_of(deep.c_str()) == Error::Kind::depth_limit);

    try {
        expr::parse_function("f(x)=1+!");
    } catch (const Error& e) {
        CHECK(e.offset() == 7);
        CHECK(std::string(e.what()).find("offset") != std::string::npos);
    }
}

TEST_CASE("spelled-out logistic matches the sigmoid builtin pointwise") {
    auto spelled = expr::parse_function("f(x)=1/(1+exp(-x))");
    auto builtin = expr::parse_function("f(x)=sigmoid(x)");
    testsupport::Rng rng(2024);
    for (int i = 0; i < 1000; ++i) {
        double x = rng.range(-20.0, 20.0);
        double a = spelled.eval(x);
        double b = builtin.eval(x);
        REQUIRE(std::abs(a - b) <= 1e-12);
    }
}

TEST_CASE("evaluation is deterministic") {
    auto f = expr::parse_function("f(x)=tanh(x/3)+sigmoid(x)*0.25-abs(x)^2");
    auto g = expr::parse_function("f(x)=tanh(x/3)+sigmoid(x)*0.25-abs(x)^2");
    testsupport::Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        double x = rng.range(-8.0, 8.0);
        REQUIRE(bits_equal(f.eval(x), f.eval(x)));
        REQUIRE(bits_equal(f.eval(x), g.eval(x)));
    }
}

TEST_CASE("parser is total under fuzzing") {
    testsupport::Rng rng(77);
    const char alphabet[] = "fx()=+-*/^0123456789.eabstghlnoiprd ";
    int survived = 0;
    for (int i = 0; i < 2000; ++i) {
        std::string text;
        std::size_t len = rng.below(48);
        for (std::size_t k = 0; k < len; ++k) {
            if (rng.below(10) == 0)
                text.push_back(static_cast<char>(rng.below(256)));
            else
                text.push_back(alphabet[rng.below(sizeof alphabet - 1)]);
        }
        try {
            expr::parse_function(text);
        } catch (const Error&) {
        }
        ++survived;
    }
    CHECK(survived == 2000);
}
