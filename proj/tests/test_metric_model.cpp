#include <cmath>
#include <fstream>

#include "doctest.h"
#include "finsler/error.hpp"
#include "finsler/metric_model.hpp"
#include "support/models.hpp"

using namespace finsler;

namespace {

double L_at(const MetricModel& m, std::vector<double> x, std::vector<double> y) {
    return m.L(std::span<const double>(x), std::span<const double>(y));
}

}  // namespace

TEST_CASE("built-in families carry their flags") {
    auto e = euclidean(3);
    CHECK(e.flags().positive_definite);
    CHECK(e.flags().riemannian);
    CHECK(e.flags().x_independent);
    auto s = sphere_round(3, 2.0);
    CHECK(s.flags().riemannian);
    CHECK_FALSE(s.flags().x_independent);
    auto f = funk(2);
    CHECK(f.flags().positive_definite);
    CHECK_FALSE(f.flags().riemannian);
    auto t = torus_conformal(2, 0.1);
    CHECK(t.flags().periodic);
    auto mr = minkowski_randers({0.2, 0.1, 0.0});
    CHECK(mr.flags().x_independent);
    CHECK_FALSE(mr.flags().riemannian);
    CHECK(testing_models::warped_riemannian().flags().riemannian);
}

TEST_CASE("closed-form values") {
    CHECK(L_at(euclidean(2), {0.3, 0.4}, {3, 4}) == doctest::Approx(25.0));
    // sphere_round: 4 R^4 |y|^2 / (R^2 + |x|^2)^2
    CHECK(L_at(sphere_round(2, 1.0), {1.0, 0.0}, {1, 0}) == doctest::Approx(1.0));
    // Funk at the origin is the Euclidean norm.
    CHECK(L_at(funk(3), {0, 0, 0}, {0.0, 0.6, 0.8}) == doctest::Approx(1.0));
    // Minkowski Randers F = |y| + b.y
    CHECK(L_at(minkowski_randers({0.5, 0.0}), {0, 0}, {1, 0}) == doctest::Approx(2.25));
    CHECK(L_at(minkowski_randers({0.5, 0.0}), {0, 0}, {-1, 0}) == doctest::Approx(0.25));
}

TEST_CASE("admission checks reject bad metrics") {
    try {
        parse_metric_dsl("y1^2 + x1*y2", 2, "broken");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("homogeneity") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_metric_dsl("y1^2", 2, "degenerate"), ValidationError);
    CHECK_THROWS_AS(minkowski_randers({0.8, 0.8}), ValidationError);
    CHECK_THROWS_AS(torus_conformal(2, 0.3), ValidationError);
    CHECK_THROWS_AS(sphere_round(3, -1.0), ValidationError);
    CHECK_THROWS_AS(randers(2, {}, {"0.9", "0.9"}), ValidationError);
    CHECK_THROWS_AS(euclidean(5), ValidationError);
    CHECK_THROWS_AS(riemannian(2, {{"1", "y1"}, {"y1", "1"}}), ValidationError);
    MetricFlags claimed{true, false, true, true};
    CHECK_THROWS_AS(parse_metric_dsl("y1^2 - y2^2", 2, "lorentz", std::nullopt, claimed), ValidationError);
}

TEST_CASE("DSL metrics infer their flags") {
    auto flat = parse_metric_dsl("y1^2 + 2*y2^2", 2, "flat");
    CHECK(flat.flags().positive_definite);
    CHECK(flat.flags().riemannian);
    CHECK(flat.flags().x_independent);
    auto lorentz = parse_metric_dsl("y1^2 - y2^2", 2, "lorentz");
    CHECK_FALSE(lorentz.flags().positive_definite);
    auto randers = parse_metric_dsl("(sqrt(y1^2 + y2^2) + 0.3*y1)^2", 2, "mr");
    CHECK(randers.flags().positive_definite);
    CHECK_FALSE(randers.flags().riemannian);
    auto conformal = parse_metric_dsl("exp(x1) * (y1^2 + y2^2)", 2, "conf");
    CHECK(conformal.flags().riemannian);
    CHECK_FALSE(conformal.flags().x_independent);
}

TEST_CASE("metric declarations") {
    const std::string text =
        "# comment line\n"
        "name: warped\n"
        "dim: 2\n"
        "L: (2 + cos(x1))^2 * y2^2 + y1^2   # trailing comment\n"
        "flags: positive_definite, riemannian, periodic\n"
        "box: 0 6.283185307179586\n";
    auto m = parse_metric_declaration(text);
    CHECK(m.name() == "warped");
    CHECK(m.dim() == 2);
    CHECK(m.flags().periodic);
    CHECK(m.box().hi[1] == doctest::Approx(6.283185307179586));
    CHECK_THROWS_AS(parse_metric_declaration("dim: 2\n"), ParseError);
    CHECK_THROWS_AS(parse_metric_declaration("L: y1^2 + y2^2\n"), ParseError);
    CHECK_THROWS_AS(parse_metric_declaration("dim: 2\nL: y1^2 + y2^2\ncolour: red\n"), ParseError);
    CHECK_THROWS_AS(parse_metric_declaration("dim: 2\nL: y1^2 + y2^2\nflags: shiny\n"), ParseError);
    CHECK_THROWS_AS(load_metric_declaration("/nonexistent/file.metric"), ParseError);
}

TEST_CASE("references") {
    CHECK(metric_from_reference("funk(3)").dim() == 3);
    CHECK(metric_from_reference("sphere_round(4, 2)").dim() == 4);
    CHECK(metric_from_reference("torus_conformal(3,0.1)").flags().periodic);
    CHECK(metric_from_reference("minkowski_randers(2,0.1,0.2)").dim() == 2);
    CHECK(metric_from_reference("randers(3)").dim() == 3);
    CHECK_THROWS_AS(metric_from_reference("nosuch(3)"), ValidationError);
    CHECK_THROWS_AS(metric_from_reference("funk(abc)"), ParseError);
    CHECK_FALSE(builtin_catalog().empty());
}

TEST_CASE("samples are deterministic and inside the domain") {
    auto f = funk(3);
    auto a = domain_sample(f, 25, 42);
    auto b = domain_sample(f, 25, 42);
    REQUIRE(a.size() == 25);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
        CHECK(f.in_domain(std::span<const double>(a[i].x), std::span<const double>(a[i].y)));
        double r = 0.0;
        for (double v : a[i].y) r += v * v;
        CHECK(r == doctest::Approx(1.0));
    }
    auto c = domain_sample(f, 25, 43);
    CHECK(c[0].x != a[0].x);
    for (const auto& d : random_directions(4, 10, 1)) {
        double r = 0.0;
        for (double v : d) r += v * v;
        CHECK(r == doctest::Approx(1.0));
    }
}

TEST_CASE("Euler relation y.dL/dy = 2L on random samples") {
    for (const auto& m : testing_models::builtin_family_representatives()) {
        for (const auto& s : domain_sample(m, 10, 3)) {
            const double L = m.L(std::span<const double>(s.x), std::span<const double>(s.y));
            std::vector<double> y2(s.y);
            for (auto& v : y2) v *= 1.9;
            const double L2 = m.L(std::span<const double>(s.x), std::span<const double>(y2));
            CHECK(L2 == doctest::Approx(1.9 * 1.9 * L).epsilon(1e-12));
        }
    }
}
