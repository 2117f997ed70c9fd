#pragma once

// Checkers for the integral identities and theorems, plus model
// classification. Every checker returns an IdentityReport; unmet theorem
// hypotheses produce Verdict::Refused rather than an exception.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "finsler/expr.hpp"
#include "finsler/geometry.hpp"
#include "finsler/metric_model.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

enum class Verdict { Pass, Fail, Refused };
std::string to_string(Verdict v);

struct IdentityReport {
    std::string identity;
    std::string model;
    std::vector<double> point;
    std::vector<double> lhs;
    std::vector<double> rhs;
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    double tolerance = 0.0;
    /// Denominator used for rel_residual.
    double scale = 0.0;
    Verdict verdict = Verdict::Fail;
    int resolution = 0;
    int order = 0;
    std::string note;
    std::vector<std::pair<std::string, double>> details;

    double detail(const std::string& key) const;
};

struct CheckOptions {
    int resolution = 0;  // sphere rule resolution; 0 picks the default for n
    int order = kDefaultJetOrder;
    double tolerance = 0.0;  // 0 picks the check's default
    double einstein_tolerance = 1e-6;
    int einstein_directions = 12;
    double stencil_step = 0.05;
    int grid_points = 5;       // per axis, for base grids
    int base_resolution = 16;  // per axis, torus trapezoid
    double classify_tolerance = 1e-6;
    std::uint64_t seed = 20240611;
};

/// Default tolerance of a check: 1e-9 for exact algebraic checks, 1e-6 / 1e-5
/// for quadrature checks in n = 2 / n >= 3.
double default_tolerance(const std::string& check, int n);

/// Lattice of points per axis inside the model box (cell centres; periodic
/// boxes use the trapezoid points 2 pi k / m).
std::vector<std::vector<double>> base_grid(const MetricModel& model, int points_per_axis);

struct RhoSample {
    double rho = 0.0;        // direction mean of Ric / F^2
    double deviation = 0.0;  // max |Ric / F^2 - rho| over directions
};
RhoSample ricci_ratio(const MetricModel& model, const std::vector<double>& x,
                      const std::vector<std::vector<double>>& directions);

IdentityReport check_lemma2(const MetricModel& model, const MetricExpr& rho, const std::vector<double>& x,
                            const CheckOptions& opts = {});
IdentityReport check_lemma1(const MetricModel& model, const std::vector<double>& x, const CheckOptions& opts = {});
IdentityReport check_main_theorem(const MetricModel& model, const std::vector<double>& x,
                                  const CheckOptions& opts = {});
IdentityReport check_schur_corollary(const MetricModel& model, const CheckOptions& opts = {});
IdentityReport check_berwald_theorem(const MetricModel& model, const CheckOptions& opts = {});
IdentityReport check_bianchi(const MetricModel& model, const std::vector<double>& x, const CheckOptions& opts = {});
IdentityReport check_stokes_torus(const MetricModel& model, const CheckOptions& opts = {});
IdentityReport check_section_invariance(const MetricModel& model, const std::vector<double>& x,
                                        const CheckOptions& opts = {}, double lambda = 2.0);

/// Named pointwise residuals of the exact algebraic identities (homogeneity
/// ladder, metric compatibility, y-contractions), each scaled by the size of
/// the terms involved.
std::vector<std::pair<std::string, double>> algebraic_invariants(const MetricModel& model, const TangentSample& s);
IdentityReport check_invariants(const MetricModel& model, const TangentSample& s, const CheckOptions& opts = {});

struct ClassificationReport {
    std::string model;
    struct {
        bool verdict = false;
        std::vector<double> rho;  // per grid point
        double max_deviation = 0.0;
        double rho_spread = 0.0;
    } einstein;
    struct {
        bool verdict = false;
        double max_mean_landsberg = 0.0;
    } weakly_landsberg;
    struct {
        bool verdict = false;
        double max_deviation = 0.0;
    } berwald_quadratic;
    struct {
        bool verdict = false;
        double max_cartan = 0.0;
    } riemannian;
};

ClassificationReport classify(const MetricModel& model, const CheckOptions& opts = {});
/// The classification as a report (always passes unless the coherence
/// implications riemannian => weakly Landsberg => quadratic are violated).
IdentityReport classification_report(const MetricModel& model, const CheckOptions& opts = {});

}  // namespace finsler
