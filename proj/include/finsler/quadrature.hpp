#pragma once

// Fiber integration over the positively projectivized tangent spaces.
//
// Each fiber is parametrized by the Euclidean unit sphere; on it the
// contracted volume form is the standard sphere measure and the fiber weight
// is det g / F^n.

#include <functional>
#include <vector>

#include "finsler/geometry.hpp"
#include "finsler/metric_model.hpp"

namespace finsler {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct SphereRule {
    int dim = 0;
    int resolution = 0;
    std::vector<std::vector<double>> nodes;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
};

/// Euclidean area of S^{n-1}.
double sphere_area(int n);

/// Resolution used when a caller passes 0: 128 (n=2), 32 (n=3), 24 (n=4).
int default_resolution(int n);

/// n=2: R equispaced nodes. n=3: R Gauss-Legendre nodes in the polar cosine
/// times 2R azimuthal nodes. n=4: R Gauss-Chebyshev (second kind) nodes in
/// the first coordinate times the n=3 rule at resolution R.
SphereRule sphere_rule(int n, int resolution);

/// det g(x,u) / F(x,u)^n. Throws DomainError when g is not positive definite.
double fiber_weight(const MetricModel& model, const std::vector<double>& x, const std::vector<double>& u);

double fiber_volume(const MetricModel& model, const std::vector<double>& x, const SphereRule& rule);

/// Integrand evaluated at (x, y); y is a sphere node or a rescaled copy.
using ScalarIntegrand = std::function<double(const std::vector<double>& x, const std::vector<double>& y)>;
using OneFormIntegrand =
    std::function<std::vector<double>(const std::vector<double>& x, const std::vector<double>& y)>;

struct FiberAverage {
    std::vector<double> x;
    std::vector<double> value;  // one entry for scalars, n for 1-forms
    double homogeneity = 0.0;
    double volume = 0.0;
};

/// <f>(x) for a 0-homogeneous f. The homogeneity is spot-checked at 3 nodes.
FiberAverage fiber_average_scalar(const MetricModel& model, const std::vector<double>& x, const ScalarIntegrand& f,
                                  const SphereRule& rule);

/// <F^{-r} theta>(x) for an r-homogeneous 1-form, spot-checked at 3 nodes.
FiberAverage fiber_average_oneform(const MetricModel& model, const std::vector<double>& x,
                                   const OneFormIntegrand& theta, double r, const SphereRule& rule);

/// Relative difference between the fiber volume computed on the section
/// y = lambda u and on the unit sphere.
double section_invariance_check(const MetricModel& model, const std::vector<double>& x, const SphereRule& rule,
                                double lambda);

/// Weight det g / F^n read off an existing geometry at (x, u).
double fiber_weight(const JetGeometry& geo);

/// Per-node integrand values, already multiplied by the fiber weight.
using NodeValues = std::function<std::vector<double>(const std::vector<double>& u)>;

/// sum_k w_k values(u_k), componentwise, with a fixed summation order so the
/// result does not depend on the worker count. When `abs_out` is given it
/// receives sum_k w_k |values(u_k)|.
std::vector<double> fiber_integrate(const SphereRule& rule, std::size_t width, const NodeValues& values,
                                    std::vector<double>* abs_out = nullptr);

/// Integral over the 2pi-periodic torus base (trapezoid with base_resolution
/// points per axis) of the fiber integrals of a 0-homogeneous f.
double base_integral_torus(const MetricModel& model, const ScalarIntegrand& f, int base_resolution,
                           const SphereRule& rule);

}  // namespace finsler
