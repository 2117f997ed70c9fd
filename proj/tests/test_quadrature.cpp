#include <cmath>
#include <numbers>

#include "doctest.h"
#include "finsler/error.hpp"
#include "finsler/parallel.hpp"
#include "finsler/quadrature.hpp"

using namespace finsler;

namespace {

double integrate(const SphereRule& rule, const std::function<double(const std::vector<double>&)>& f) {
    return fiber_integrate(rule, 1, [&](const std::vector<double>& u) { return std::vector<double>{f(u)}; })[0];
}

}  // namespace

TEST_CASE("sphere rules integrate low-degree polynomials") {
    for (int n : {2, 3, 4}) {
        CAPTURE(n);
        const auto rule = sphere_rule(n, default_resolution(n));
        const double area = sphere_area(n);
        CHECK(integrate(rule, [](const auto&) { return 1.0; }) == doctest::Approx(area).epsilon(1e-13));
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(integrate(rule, [i](const auto& u) { return u[static_cast<std::size_t>(i)]; })) < 1e-13);
            for (int j = 0; j < n; ++j) {
                const double v = integrate(rule, [i, j](const auto& u) {
                    return u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)];
                });
                CHECK(v == doctest::Approx(i == j ? area / n : 0.0).epsilon(1e-12));
            }
        }
        const double quartic = integrate(rule, [](const auto& u) { return std::pow(u[0], 4); });
        CHECK(quartic == doctest::Approx(3.0 * area / (n * (n + 2))).epsilon(1e-12));
        for (const auto& u : rule.nodes) {
            double r = 0.0;
            for (double e : u) r += e * e;
            CHECK(r == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("sphere rule sizes and limits") {
    CHECK(sphere_rule(2, 16).size() == 16);
    CHECK(sphere_rule(3, 8).size() == 8 * 16);
    CHECK(sphere_rule(4, 8).size() == 8 * 8 * 16);
    CHECK_THROWS_AS(sphere_rule(3, 7), DimensionError);
    CHECK_THROWS_AS(sphere_rule(5, 16), DimensionError);
    CHECK_THROWS_AS(sphere_area(1), DimensionError);
    CHECK(sphere_area(4) == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("fiber volume of a constant Riemannian metric is sqrt(det g) times the sphere area") {
    const auto m = riemannian(3, {{"2", "0.3", "0"}, {"0.3", "1", "0.1"}, {"0", "0.1", "0.5"}});
    const double det = 2.0 * (0.5 - 0.01) - 0.3 * (0.15);
    const auto rule = sphere_rule(3, 32);
    CHECK(fiber_volume(m, {0, 0, 0}, rule) == doctest::Approx(std::sqrt(det) * sphere_area(3)).epsilon(1e-10));
    const auto e2 = euclidean(2);
    CHECK(fiber_volume(e2, {0, 0}, sphere_rule(2, 128)) == doctest::Approx(2.0 * std::numbers::pi));
}

TEST_CASE("fiber averages") {
    const auto m = euclidean(3);
    const auto rule = sphere_rule(3, 16);
    const auto avg = fiber_average_scalar(
        m, {0, 0, 0}, [](const auto&, const auto& y) { return y[2] * y[2] / (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]); },
        rule);
    CHECK(avg.value[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(avg.volume == doctest::Approx(4.0 * std::numbers::pi));
    // <F^-2 y_i y_2> = delta_i2 / 3.
    const auto one = fiber_average_oneform(
        m, {0, 0, 0},
        [](const auto&, const auto& y) { return std::vector<double>{y[0] * y[1], y[1] * y[1], y[2] * y[1]}; }, 2.0,
        rule);
    CHECK(std::abs(one.value[0]) < 1e-13);
    CHECK(one.value[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("homogeneity spot-check rejects bad integrands") {
    const auto m = euclidean(2);
    const auto rule = sphere_rule(2, 32);
    CHECK_THROWS_AS(fiber_average_scalar(m, {0, 0}, [](const auto&, const auto& y) { return y[0]; }, rule),
                    ValidationError);
    CHECK_THROWS_AS(fiber_average_oneform(
                        m, {0, 0}, [](const auto&, const auto& y) { return std::vector<double>{y[0], y[1]}; }, 2.0,
                        rule),
                    ValidationError);
}

TEST_CASE("section invariance") {
    const auto f = funk(3);
    const auto rule = sphere_rule(3, 16);
    CHECK(section_invariance_check(f, {0.1, 0.2, -0.3}, rule, 1.0) == 0.0);
    CHECK(section_invariance_check(f, {0.1, 0.2, -0.3}, rule, 2.5) < 1e-13);
    CHECK_THROWS(section_invariance_check(f, {0.1, 0.2, -0.3}, rule, -1.0));
}

TEST_CASE("integration does not depend on the worker count") {
    const auto m = funk(3);
    const auto rule = sphere_rule(3, 16);
    const std::vector<double> x{0.2, -0.1, 0.3};
    set_default_jobs(1);
    const double serial = fiber_volume(m, x, rule);
    set_default_jobs(3);
    const double threaded = fiber_volume(m, x, rule);
    set_default_jobs(1);
    CHECK(serial == threaded);
    const auto t = torus_conformal(2, 0.1);
    auto one = [](const auto&, const auto&) { return 1.0; };
    set_default_jobs(4);
    const double a = base_integral_torus(t, one, 8, sphere_rule(2, 32));
    set_default_jobs(1);
    const double b = base_integral_torus(t, one, 8, sphere_rule(2, 32));
    CHECK(a == b);
    CHECK_THROWS(base_integral_torus(m, one, 8, rule));
}

TEST_CASE("compensated summation") {
    CompensatedSum s;
    s.add(1e16);
    s.add(1.0);
    s.add(-1e16);
    CHECK(s.value() == 1.0);
    CompensatedSum t;
    for (int i = 0; i < 10; ++i) t.add(0.1);
    CHECK(t.value() == 1.0);
}
