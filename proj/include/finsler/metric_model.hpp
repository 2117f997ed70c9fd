#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finsler/expr.hpp"
#include "finsler/jet.hpp"

namespace finsler {

/// A point (x, y) of the slit tangent bundle, in chart coordinates.
struct TangentSample {
    std::vector<double> x;
    std::vector<double> y;
};

struct MetricFlags {
    bool positive_definite = false;
    bool riemannian = false;
    bool x_independent = false;
    /// Base is 2*pi-periodic in every coordinate (a torus chart).
    bool periodic = false;
};

/// Axis-aligned box of chart points used for base-point sampling and grids.
struct BaseBox {
    std::vector<double> lo;
    std::vector<double> hi;
};

/// A pseudo-Finsler function L(x, y), 2-homogeneous in y, on a conic domain.
/// Immutable once built; evaluators are pure.
class MetricModel {
public:
    using JetEval = std::function<Jet(std::span<const Jet>, std::span<const Jet>)>;
    using ValueEval = std::function<double(std::span<const double>, std::span<const double>)>;
    using DomainPredicate = std::function<bool(std::span<const double>, std::span<const double>)>;

    MetricModel(std::string name, int dim, JetEval jet_eval, ValueEval value_eval, DomainPredicate domain,
                MetricFlags flags, BaseBox box);

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    const MetricFlags& flags() const { return flags_; }
    const BaseBox& box() const { return box_; }

    Jet L(std::span<const Jet> x, std::span<const Jet> y) const { return jet_eval_(x, y); }
    double L(std::span<const double> x, std::span<const double> y) const { return value_eval_(x, y); }
    bool in_domain(std::span<const double> x, std::span<const double> y) const;

    MetricModel with_flags(MetricFlags flags) const;
    MetricModel renamed(std::string name) const;

private:
    std::string name_;
    int dim_;
    JetEval jet_eval_;
    ValueEval value_eval_;
    DomainPredicate domain_;
    MetricFlags flags_;
    BaseBox box_;
};

/// Parameters of the built-in families. Only the fields relevant to the
/// requested family are read.
struct BuiltinParams {
    int n = 3;
    std::vector<double> b;                        // minkowski_randers
    double radius = 1.0;                          // sphere_round
    double epsilon = 0.1;                         // torus_conformal
    std::vector<std::vector<std::string>> g;      // riemannian; randers alpha (default identity)
    std::vector<std::string> beta;                // randers
};

struct ValidationOptions {
    int samples = 50;
    double tolerance = 1e-9;
    double max_condition = 1e12;
    std::uint64_t seed = 20240611;
};

/// Builds and validates a built-in family: euclidean, minkowski_randers,
/// riemannian, sphere_round, torus_conformal, randers, funk.
MetricModel builtin(const std::string& name, const BuiltinParams& params,
                    const ValidationOptions& options = {});

MetricModel euclidean(int n);
MetricModel minkowski_randers(std::vector<double> b);
MetricModel riemannian(int n, std::vector<std::vector<std::string>> g);
MetricModel sphere_round(int n, double radius = 1.0);
MetricModel torus_conformal(int n, double epsilon);
MetricModel randers(int n, std::vector<std::vector<std::string>> alpha, std::vector<std::string> beta);
MetricModel funk(int n);

/// Names of the built-in families with their parameter schemas, one per line.
std::vector<std::string> builtin_catalog();

/// Metric from a DSL source for L. `domain` (optional) is an expression whose
/// positive region is the domain; `flags` overrides inferred flags.
MetricModel parse_metric_dsl(const std::string& source, int n, const std::string& name = "dsl",
                             const std::optional<std::string>& domain = std::nullopt,
                             const std::optional<MetricFlags>& flags = std::nullopt,
                             const std::optional<BaseBox>& box = std::nullopt,
                             const ValidationOptions& options = {});

/// Reads a metric declaration ("key: value" lines: name, dim, L, domain,
/// flags, box) and builds the validated model.
MetricModel parse_metric_declaration(const std::string& text, const ValidationOptions& options = {});
MetricModel load_metric_declaration(const std::string& path, const ValidationOptions& options = {});

/// Parses "funk(3)", "torus_conformal(3,0.1)", "minkowski_randers(3,0.5,0,0)", ...
MetricModel metric_from_reference(const std::string& ref, const ValidationOptions& options = {});

/// Runs the admission checks (homogeneity, nondegeneracy, definiteness when
/// claimed). Throws ValidationError.
void validate(const MetricModel& model, const ValidationOptions& options = {});

/// Deterministic samples: x uniform in the model box, y uniform on the unit
/// Euclidean sphere, all inside the domain.
std::vector<TangentSample> domain_sample(const MetricModel& model, int count, std::uint64_t seed);

/// Uniform random unit vectors in R^n.
std::vector<std::vector<double>> random_directions(int n, int count, std::uint64_t seed);

}  // namespace finsler
