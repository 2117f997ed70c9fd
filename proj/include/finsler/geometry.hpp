#pragma once

// Pointwise Finsler geometry on jets.
//
// JetGeometry expands L at one tangent sample and derives every object
// lazily. Each stage keeps the highest jet order its inputs allow, so one
// expansion of order K yields g at order K-2, the spray at K-2, N and the
// Chern symbols at K-3, the Landsberg tensors and Ric at K-4, and so on.
// The free functions below wrap it for single-object queries and return
// plain numbers (TensorValue).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "finsler/jet.hpp"
#include "finsler/metric_model.hpp"

namespace finsler {

enum class Slot { Covariant, Contravariant };
using Variance = std::vector<Slot>;

/// Minimal jet order for each quantity computed here.
namespace min_order {
inline constexpr int fundamental = 2;
inline constexpr int hilbert = 2;
inline constexpr int spray = 2;
inline constexpr int cartan = 3;
inline constexpr int nonlinear_connection = 3;
inline constexpr int christoffel = 3;
inline constexpr int landsberg = 4;
inline constexpr int ricci = 4;
inline constexpr int ricci_hessian = 6;
inline constexpr int pfrak = 6;
inline constexpr int pfrak_dyn = 7;
inline constexpr int schur = 7;
inline constexpr int lemma1_integrand = 7;
inline constexpr int bianchi = 7;
}  // namespace min_order

void require_order(const std::string& what, int required, int available);

/// Dense rank-r array of jets, row-major; slot r-1 varies fastest.
class JetTensor {
public:
    JetTensor() = default;
    JetTensor(int dim, int rank);

    int dim() const { return n_; }
    int rank() const { return rank_; }
    std::size_t size() const { return c_.size(); }
    Jet& operator[](std::size_t flat) { return c_[flat]; }
    const Jet& operator[](std::size_t flat) const { return c_[flat]; }
    Jet& at(std::initializer_list<int> idx) { return c_[flat(idx)]; }
    const Jet& at(std::initializer_list<int> idx) const { return c_[flat(idx)]; }
    std::size_t flat(std::initializer_list<int> idx) const;
    /// Smallest order over components.
    int order() const;
    std::vector<double> values() const;

    static JetTensor scalar(Jet j);

private:
    int n_ = 0;
    int rank_ = 0;
    std::vector<Jet> c_;
};

class JetGeometry;
/// A tensor field evaluated on the jets of a geometry, e.g. the user side of
/// chern_derivative.
using TensorField = std::function<JetTensor(const JetGeometry&)>;

class JetGeometry {
public:
    /// Throws DomainError when (x, y) lies outside the model domain.
    JetGeometry(const MetricModel& model, const TangentSample& sample, int order);

    int dim() const { return n_; }
    int order() const { return order_; }
    const MetricModel& model() const { return *model_; }
    const TangentSample& sample() const { return sample_; }
    const JetContext& context() const { return *ctx_; }

    const Jet& x(int i) const { return vars_[static_cast<std::size_t>(i)]; }
    const Jet& y(int i) const { return vars_[static_cast<std::size_t>(n_ + i)]; }

    const Jet& L() const { return L_; }
    const Jet& F() const;
    const JetTensor& g() const;            // g_ij
    const JetTensor& ginv() const;         // g^ij
    const JetTensor& hilbert() const;      // omega_i
    const JetTensor& cartan() const;       // C_ijk
    const JetTensor& mean_cartan() const;  // C_i
    const JetTensor& spray() const;        // G^i
    const JetTensor& N() const;            // N^i_j
    const JetTensor& gamma() const;        // Gamma^i_jk
    const JetTensor& landsberg() const;    // P_ijk
    const JetTensor& mean_landsberg() const;  // P_i
    const Jet& ricci() const;
    const JetTensor& ricci_hessian() const;  // Ric_{.i.j}
    const Jet& pfrak() const;
    const Jet& pfrak_dyn() const;
    /// g^ij (P_i|j|0 - 2 P_i P_j|0 - P_i|0.j|0).
    const Jet& schur_printed() const;
    /// {g^ab Ric_.a.b - (n+2) Ric / L}_|0.
    const Jet& lemma1_ricci_term() const;
    /// g^ab (P_a|b - P_a P_b + P_a|0.b)_|0, the unfolded right-hand integrand.
    const Jet& lemma1_pfrak_unfolded() const;

    /// Appends a slot j holding d/dy^j.
    JetTensor vertical(const JetTensor& t) const;
    /// Appends a slot j holding delta_j = d/dx^j - N^a_j d/dy^a.
    JetTensor delta(const JetTensor& t) const;
    /// Chern horizontal derivative, appended slot j.
    JetTensor chern(const JetTensor& t, const Variance& variance) const;
    /// Dynamical derivative t_|0 = y^j t_|j (same rank).
    JetTensor dynamical(const JetTensor& t, const Variance& variance) const;
    /// Full contraction g^ij t_ij of a rank-2 covariant tensor.
    Jet trace(const JetTensor& t) const;

private:
    void require(const char* what, int needed) const;

    const MetricModel* model_;
    TangentSample sample_;
    int n_;
    int order_;
    std::shared_ptr<const JetContext> ctx_;
    std::vector<Jet> vars_;
    Jet L_;

    mutable std::optional<Jet> F_;
    mutable std::optional<JetTensor> dL_, g_, ginv_, omega_, C_, Cm_, G_, N_, gamma_, P_, Pm_, ric_hess_;
    mutable std::optional<JetTensor> Pm_chern_, Pm_dyn_, Pm_dyn_vert_;
    mutable std::optional<Jet> ric_, pfrak_, pfrak_dyn_, schur_, l1_ric_, l1_unfolded_;
};

/// Numeric components of a tensor at one sample.
struct TensorValue {
    Variance variance;
    int dim = 0;
    std::vector<double> components;
    TangentSample sample;

    int rank() const { return static_cast<int>(variance.size()); }
    double at(std::initializer_list<int> idx) const;
    double scalar() const { return components.at(0); }
    double max_abs() const;
};

TensorValue to_value(const JetTensor& t, const Variance& variance, const TangentSample& s);

/// A tensor with its vertical, horizontal and dynamical derivatives; the
/// derivative slot is the last one.
struct DerivativeBundle {
    TensorValue value;
    TensorValue vertical;
    TensorValue horizontal;
    TensorValue dynamical;
};

// Single-object kernels. `order` is the caller's jet budget; each kernel
// throws OrderBudgetError when it is below the kernel's requirement.
TensorValue fundamental_tensor(const MetricModel& m, const TangentSample& s, int order = kDefaultJetOrder);
TensorValue inverse_fundamental(const MetricModel& m, const TangentSample& s, int order = kDefaultJetOrder);
TensorValue cartan(const MetricModel& m, const TangentSample& s, int order = kDefaultJetOrder);
TensorValue mean_cartan(const MetricModel& m, const TangentSample& s, int order = kDefaultJetOrder);
TensorValue hilbert_form(const MetricModel& m, const TangentSample& s, int order = kDefaultJetOrder);
TensorValue spray(const MetricModel& m, const TangentSample& s, int order = kDefaultJetOrder);
TensorValue nonlinear_connection(const MetricModel& m, const TangentSample& s, int order = kDefaultJetOrder);
TensorValue chern_christoffel(const MetricModel& m, const TangentSample& s, int order = kDefaultJetOrder);
TensorValue landsberg(const MetricModel& m, const TangentSample& s, int order = kDefaultJetOrder);
TensorValue mean_landsberg(const MetricModel& m, const TangentSample& s, int order = kDefaultJetOrder);
double ricci_scalar(const MetricModel& m, const TangentSample& s, int order = kDefaultJetOrder);
TensorValue ricci_vertical_hessian(const MetricModel& m, const TangentSample& s, int order = kDefaultJetOrder);
double pfrak(const MetricModel& m, const TangentSample& s, int order = kDefaultJetOrder);
double pfrak_dyn(const MetricModel& m, const TangentSample& s, int order = kDefaultJetOrder);

enum class SchurVariant { AsPrinted, AsExpanded };
double schur_corollary_scalar(const MetricModel& m, const TangentSample& s, SchurVariant variant,
                              int order = kDefaultJetOrder);

/// Derivatives of a user tensor field. `consumed` is the number of derivative
/// orders the field itself uses; the budget must cover consumed + 1.
DerivativeBundle chern_derivative(const MetricModel& m, const TangentSample& s, const TensorField& field,
                                  const Variance& variance, int consumed = 0, int order = kDefaultJetOrder);

struct QuadraticRicResult {
    bool is_quadratic = false;
    std::vector<double> h;  // n x n, mean of 1/2 Ric_.i.j over directions
    double max_deviation = 0.0;
};

/// Direction-independence of 1/2 Ric_.i.j at a base point. Deviation is the
/// largest entrywise difference between any two directions.
QuadraticRicResult quadratic_ric_test(const MetricModel& m, const std::vector<double>& x,
                                      const std::vector<std::vector<double>>& directions, double tolerance = 1e-7,
                                      int order = kDefaultJetOrder);

/// nabla_j (ric^ji - S/2 g^ji) at x for a Riemannian model.
std::vector<double> contracted_bianchi_riemannian(const MetricModel& m, const std::vector<double>& x,
                                                  int order = kDefaultJetOrder);

}  // namespace finsler
