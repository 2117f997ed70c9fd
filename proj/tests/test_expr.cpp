#include <cmath>

#include "doctest.h"
#include "finsler/error.hpp"
#include "finsler/expr.hpp"

using namespace finsler;

namespace {

double eval(const std::string& src, std::vector<double> x, std::vector<double> y) {
    auto e = MetricExpr::parse(src, static_cast<int>(x.size()));
    return e.evaluate<double>(std::span<const double>(x), std::span<const double>(y));
}

}  // namespace

TEST_CASE("precedence and unary minus") {
    CHECK(eval("1 + 2*3", {0, 0}, {0, 0}) == 7.0);
    CHECK(eval("-x1^2", {3, 0}, {0, 0}) == -9.0);
    CHECK(eval("(1 + x1)^2", {2, 0}, {0, 0}) == 9.0);
    CHECK(eval("y1^-2", {0, 0}, {2, 0}) == 0.25);
    CHECK(eval("8 / 2 / 2", {0, 0}, {0, 0}) == 2.0);
    CHECK(eval("2 - 3 - 4", {0, 0}, {0, 0}) == -5.0);
    CHECK(eval("1.5e1 * x2", {0, 2}, {0, 0}) == 30.0);
}

TEST_CASE("functions") {
    CHECK(eval("exp(0)", {0, 0}, {0, 0}) == 1.0);
    CHECK(eval("sqrt(y1^2 + y2^2)", {0, 0}, {3, 4}) == doctest::Approx(5.0));
    CHECK(eval("sin(x1)^2 + cos(x1)^2", {0.7, 0}, {0, 0}) == doctest::Approx(1.0));
    CHECK(eval("log(exp(x2))", {0, 1.25}, {0, 0}) == doctest::Approx(1.25));
}

TEST_CASE("variable usage") {
    auto a = MetricExpr::parse("y1^2 + y2^2", 2);
    CHECK_FALSE(a.uses_x());
    CHECK(a.uses_y());
    auto b = MetricExpr::parse("exp(x1) * y2^2", 2);
    CHECK(b.uses_x());
    CHECK(MetricExpr::parse("x1 + x2", 2).uses_y() == false);
}

TEST_CASE("parse errors carry a position") {
    CHECK_THROWS_AS(MetricExpr::parse("x1 + * 2", 2), ParseError);
    CHECK_THROWS_AS(MetricExpr::parse("x3", 2), ParseError);
    CHECK_THROWS_AS(MetricExpr::parse("y0", 2), ParseError);
    CHECK_THROWS_AS(MetricExpr::parse("tan(x1)", 2), ParseError);
    CHECK_THROWS_AS(MetricExpr::parse("(x1 + 1", 2), ParseError);
    CHECK_THROWS_AS(MetricExpr::parse("x1 ^ 0.5", 2), ParseError);
    CHECK_THROWS_AS(MetricExpr::parse("", 2), ParseError);
    try {
        MetricExpr::parse("x1 + $", 2);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position() == 5);
    }
}

TEST_CASE("evaluation domain errors") {
    CHECK_THROWS_AS(eval("1 / x1", {0, 0}, {0, 0}), ArithmeticDomainError);
    CHECK_THROWS_AS(eval("sqrt(x1)", {-1, 0}, {0, 0}), ArithmeticDomainError);
    CHECK_THROWS_AS(eval("log(x1)", {0, 0}, {0, 0}), ArithmeticDomainError);
}

TEST_CASE("jet and double evaluation agree") {
    auto e = MetricExpr::parse("exp(0.5*x1) * (y1^2 + x2*y1*y2) / (2 + sin(x2)) + sqrt(1 + y2^2)", 2);
    std::vector<double> p{0.2, -0.4, 0.9, 1.1};
    auto ctx = JetContext::get(2, 3);
    auto v = seed(*ctx, p);
    std::span<const Jet> all(v);
    Jet j = e.evaluate<Jet>(all.subspan(0, 2), all.subspan(2));
    std::span<const double> d(p);
    CHECK(j.value() == doctest::Approx(e.evaluate<double>(d.subspan(0, 2), d.subspan(2))).epsilon(1e-15));
    // d/dy1 by central difference
    auto at = [&](double t) {
        std::vector<double> q(p);
        q[2] += t;
        std::span<const double> s(q);
        return e.evaluate<double>(s.subspan(0, 2), s.subspan(2));
    };
    const double h = 1e-4;
    CHECK(j.partial_vars({2}) == doctest::Approx((at(h) - at(-h)) / (2 * h)).epsilon(1e-7));
}
