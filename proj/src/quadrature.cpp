#include "finsler/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "finsler/error.hpp"
#include "finsler/parallel.hpp"

namespace finsler {

namespace {

constexpr double kPi = std::numbers::pi;

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Golub-Welsch for Gauss-Legendre on [-1, 1].
Rule1D gauss_legendre(int m) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int k = 1; k < m; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Rule1D r;
    for (int i = 0; i < m; ++i) {
        r.nodes.push_back(es.eigenvalues()(i));
        const double v = es.eigenvectors()(0, i);
        r.weights.push_back(2.0 * v * v);
    }
    return r;
}

// Gauss-Chebyshev of the second kind: weight sqrt(1 - s^2) on [-1, 1].
Rule1D gauss_chebyshev2(int m) {
    Rule1D r;
    for (int k = 1; k <= m; ++k) {
        const double t = k * kPi / (m + 1);
        r.nodes.push_back(std::cos(t));
        const double s = std::sin(t);
        r.weights.push_back(kPi / (m + 1) * s * s);
    }
    return r;
}

void append_s2(SphereRule& rule, int R, double lead, double lead_weight) {
    const double radial = std::sqrt(std::max(0.0, 1.0 - lead * lead));
    const auto gl = gauss_legendre(R);
    const int az = 2 * R;
    const double dphi = 2.0 * kPi / az;
    for (int i = 0; i < R; ++i) {
        const double t = gl.nodes[static_cast<std::size_t>(i)];
        const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
        for (int j = 0; j < az; ++j) {
            const double phi = dphi * j;
            std::vector<double> u;
            if (rule.dim == 4) u.push_back(lead);
            u.push_back(radial * st * std::cos(phi));
            u.push_back(radial * st * std::sin(phi));
            u.push_back(radial * t);
            rule.nodes.push_back(std::move(u));
            rule.weights.push_back(lead_weight * gl.weights[static_cast<std::size_t>(i)] * dphi);
        }
    }
}

void check_homogeneity(const std::vector<double>& a, const std::vector<double>& b, double r) {
    const double factor = std::pow(2.0, r);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double expect = factor * a[i];
        if (std::abs(b[i] - expect) > 1e-8 * (1.0 + std::abs(expect))) {
            throw ValidationError("integrand fails the homogeneity spot-check: f(x,2u) = " + std::to_string(b[i]) +
                                  " but 2^r f(x,u) = " + std::to_string(expect) + " (r = " + std::to_string(r) + ")");
        }
    }
}

std::vector<double> scaled(const std::vector<double>& u, double s) {
    std::vector<double> v(u);
    for (auto& e : v) e *= s;
    return v;
}

}  // namespace

void CompensatedSum::add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
        comp_ += (sum_ - t) + v;
    else
        comp_ += (v - t) + sum_;
    sum_ = t;
}

double sphere_area(int n) {
    switch (n) {
        case 2: return 2.0 * kPi;
        case 3: return 4.0 * kPi;
        case 4: return 2.0 * kPi * kPi;
        default: throw DimensionError("sphere rules support n in {2, 3, 4}, got " + std::to_string(n));
    }
}

int default_resolution(int n) {
    switch (n) {
        case 2: return 128;
        case 3: return 32;
        case 4: return 24;
        default: throw DimensionError("sphere rules support n in {2, 3, 4}, got " + std::to_string(n));
    }
}

SphereRule sphere_rule(int n, int resolution) {
    if (n < 2 || n > 4) throw DimensionError("sphere rules support n in {2, 3, 4}, got " + std::to_string(n));
    if (resolution < 8) throw DimensionError("sphere rule resolution must be >= 8, got " + std::to_string(resolution));
    SphereRule rule;
    rule.dim = n;
    rule.resolution = resolution;
    if (n == 2) {
        const double w = 2.0 * kPi / resolution;
        for (int k = 0; k < resolution; ++k) {
            const double t = w * k;
            rule.nodes.push_back({std::cos(t), std::sin(t)});
            rule.weights.push_back(w);
        }
    } else if (n == 3) {
        append_s2(rule, resolution, 0.0, 1.0);
    } else {
        const auto gc = gauss_chebyshev2(resolution);
        for (int k = 0; k < resolution; ++k)
            append_s2(rule, resolution, gc.nodes[static_cast<std::size_t>(k)], gc.weights[static_cast<std::size_t>(k)]);
    }
    return rule;
}

double fiber_weight(const JetGeometry& geo) {
    const int n = geo.dim();
    const auto gv = geo.g().values();
    Eigen::Map<const Eigen::MatrixXd> g(gv.data(), n, n);
    const double det = g.determinant();
    const double L = geo.L().value();
    if (!(det > 0.0) || !(L > 0.0)) {
        throw DomainError(geo.model().name() +
                          ": fundamental tensor is not positive definite on the fiber; integration refused");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) {
        throw DomainError(geo.model().name() +
                          ": fundamental tensor is not positive definite on the fiber; integration refused");
    }
    return det / std::pow(L, 0.5 * n);
}

double fiber_weight(const MetricModel& model, const std::vector<double>& x, const std::vector<double>& u) {
    JetGeometry geo(model, TangentSample{x, u}, min_order::fundamental);
    return fiber_weight(geo);
}

std::vector<double> fiber_integrate(const SphereRule& rule, std::size_t width, const NodeValues& values,
                                    std::vector<double>* abs_out) {
    std::vector<std::vector<double>> per_node(rule.size());
    parallel_for(rule.size(), [&](std::size_t k) { per_node[k] = values(rule.nodes[k]); });
    std::vector<CompensatedSum> sums(width), abs_sums(width);
    for (std::size_t k = 0; k < rule.size(); ++k) {
        const auto& v = per_node[k];
        if (v.empty()) continue;
        if (v.size() != width) throw DimensionError("integrand returned the wrong number of components");
        for (std::size_t c = 0; c < width; ++c) {
            sums[c].add(rule.weights[k] * v[c]);
            abs_sums[c].add(rule.weights[k] * std::abs(v[c]));
        }
    }
    std::vector<double> out(width);
    for (std::size_t c = 0; c < width; ++c) out[c] = sums[c].value();
    if (abs_out) {
        abs_out->resize(width);
        for (std::size_t c = 0; c < width; ++c) (*abs_out)[c] = abs_sums[c].value();
    }
    return out;
}

double fiber_volume(const MetricModel& model, const std::vector<double>& x, const SphereRule& rule) {
    if (rule.dim != model.dim()) throw DimensionError("sphere rule dimension does not match the model");
    return fiber_integrate(rule, 1, [&](const std::vector<double>& u) {
        return std::vector<double>{fiber_weight(model, x, u)};
    })[0];
}

FiberAverage fiber_average_scalar(const MetricModel& model, const std::vector<double>& x, const ScalarIntegrand& f,
                                  const SphereRule& rule) {
    if (rule.dim != model.dim()) throw DimensionError("sphere rule dimension does not match the model");
    for (std::size_t k = 0; k < 3 && k < rule.size(); ++k) {
        const auto& u = rule.nodes[k * (rule.size() / 3)];
        check_homogeneity({f(x, u)}, {f(x, scaled(u, 2.0))}, 0.0);
    }
    auto r = fiber_integrate(rule, 2, [&](const std::vector<double>& u) {
        const double w = fiber_weight(model, x, u);
        return std::vector<double>{w, w * f(x, u)};
    });
    return FiberAverage{x, {r[1] / r[0]}, 0.0, r[0]};
}

FiberAverage fiber_average_oneform(const MetricModel& model, const std::vector<double>& x,
                                   const OneFormIntegrand& theta, double r, const SphereRule& rule) {
    if (rule.dim != model.dim()) throw DimensionError("sphere rule dimension does not match the model");
    const auto n = static_cast<std::size_t>(model.dim());
    for (std::size_t k = 0; k < 3 && k < rule.size(); ++k) {
        const auto& u = rule.nodes[k * (rule.size() / 3)];
        check_homogeneity(theta(x, u), theta(x, scaled(u, 2.0)), r);
    }
    auto s = fiber_integrate(rule, n + 1, [&](const std::vector<double>& u) {
        const double w = fiber_weight(model, x, u);
        const double Fr = std::pow(model.L(std::span<const double>(x), std::span<const double>(u)), -0.5 * r);
        auto t = theta(x, u);
        if (t.size() != n) throw DimensionError("1-form integrand must have n components");
        std::vector<double> out{w};
        for (double v : t) out.push_back(w * Fr * v);
        return out;
    });
    FiberAverage avg{x, {}, r, s[0]};
    for (std::size_t i = 0; i < n; ++i) avg.value.push_back(s[i + 1] / s[0]);
    return avg;
}

double section_invariance_check(const MetricModel& model, const std::vector<double>& x, const SphereRule& rule,
                                double lambda) {
    if (!(lambda > 0.0)) throw Error("section scale must be positive");
    const int n = model.dim();
    auto r = fiber_integrate(rule, 2, [&](const std::vector<double>& u) {
        const double unit = fiber_weight(model, x, u);
        if (lambda == 1.0) return std::vector<double>{unit, unit};
        // Contracted form on y = lambda u picks up lambda^n.
        const double sec = std::pow(lambda, n) * fiber_weight(model, x, scaled(u, lambda));
        return std::vector<double>{unit, sec};
    });
    return std::abs(r[1] - r[0]) / r[0];
}

double base_integral_torus(const MetricModel& model, const ScalarIntegrand& f, int base_resolution,
                           const SphereRule& rule) {
    if (!model.flags().periodic)
        throw Error(model.name() + ": torus integration needs a 2pi-periodic model");
    if (base_resolution < 2) throw Error("base resolution must be >= 2");
    const int n = model.dim();
    std::size_t count = 1;
    for (int i = 0; i < n; ++i) count *= static_cast<std::size_t>(base_resolution);
    const double h = 2.0 * kPi / base_resolution;
    std::vector<double> fiber(count);
    parallel_for(count, [&](std::size_t p) {
        std::vector<double> x(static_cast<std::size_t>(n));
        std::size_t q = p;
        for (int i = 0; i < n; ++i) {
            x[static_cast<std::size_t>(i)] = h * static_cast<double>(q % static_cast<std::size_t>(base_resolution));
            q /= static_cast<std::size_t>(base_resolution);
        }
        fiber[p] = fiber_integrate(rule, 1, [&](const std::vector<double>& u) {
            return std::vector<double>{fiber_weight(model, x, u) * f(x, u)};
        })[0];
    });
    CompensatedSum s;
    for (double v : fiber) s.add(v);
    return s.value() * std::pow(h, n);
}

}  // namespace finsler
