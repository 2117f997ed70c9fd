#pragma once

// Built-in models exercised by the tests and the acceptance run.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "finsler/metric_model.hpp"

namespace testing_models {

/// Non-diagonal Riemannian metric with x-dependent entries.
inline finsler::MetricModel warped_riemannian() {
    return finsler::riemannian(3, {{"1 + x1^2", "0.1*x3", "0"},
                                   {"0.1*x3", "2 + sin(x2)", "0.2*x1"},
                                   {"0", "0.2*x1", "exp(0.5*x1)"}});
}

inline Eigen::MatrixXd warped_riemannian_matrix(const std::vector<double>& x) {
    Eigen::MatrixXd g(3, 3);
    g << 1 + x[0] * x[0], 0.1 * x[2], 0, 0.1 * x[2], 2 + std::sin(x[1]), 0.2 * x[0], 0, 0.2 * x[0],
        std::exp(0.5 * x[0]);
    return g;
}

/// 4 R^4 / (R^2 + |x|^2)^2 times the identity.
inline Eigen::MatrixXd sphere_matrix(const std::vector<double>& x, double R = 1.0) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const auto n = static_cast<long>(x.size());
    return Eigen::MatrixXd::Identity(n, n) * (4.0 * std::pow(R, 4) / std::pow(R * R + r2, 2));
}

/// exp(2 eps sum sin x^i) times the identity.
inline Eigen::MatrixXd torus_matrix(const std::vector<double>& x, double eps) {
    double s = 0.0;
    for (double v : x) s += std::sin(v);
    const auto n = static_cast<long>(x.size());
    return Eigen::MatrixXd::Identity(n, n) * std::exp(2.0 * eps * s);
}

/// One representative of every built-in family, all in dimension 3.
inline std::vector<finsler::MetricModel> builtin_family_representatives() {
    std::vector<finsler::MetricModel> v;
    v.push_back(finsler::euclidean(3));
    v.push_back(finsler::minkowski_randers({0.5, 0.0, 0.0}));
    v.push_back(warped_riemannian());
    v.push_back(finsler::sphere_round(3, 1.0));
    v.push_back(finsler::torus_conformal(3, 0.1));
    v.push_back(finsler::metric_from_reference("randers(3)"));
    v.push_back(finsler::funk(3));
    return v;
}

}  // namespace testing_models
