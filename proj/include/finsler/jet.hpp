#pragma once

// Truncated multivariate Taylor series ("jets") over the 2n chart variables
// (x^1..x^n, y^1..y^n) of a tangent bundle chart.
//
// A Jet stores Taylor coefficients, i.e. partial derivatives divided by the
// multi-index factorial, for every monomial of total degree <= its order.
// Monomials are kept in graded order (all degree-0, then all degree-1, ...),
// so a jet of order k is a prefix of one of order K > k and truncation is a
// resize. Variable v < n is x^{v+1}; variable n + v is y^{v+1}.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace finsler {

inline constexpr int kDefaultJetOrder = 7;
inline constexpr int kMaxDim = 4;
inline constexpr int kMaxOrder = 12;

/// Exponent vector over the 2n chart variables.
using MultiIndex = std::vector<int>;

/// Immutable monomial bookkeeping for a given (n, K). Shared by every jet built
/// on it; obtain instances through `JetContext::get`, which caches them.
class JetContext {
public:
    static std::shared_ptr<const JetContext> get(int dim, int order = kDefaultJetOrder);

    int dim() const noexcept { return dim_; }
    int num_vars() const noexcept { return 2 * dim_; }
    int order() const noexcept { return order_; }

    /// Number of monomials of total degree <= k.
    std::size_t size(int k) const { return block_begin_[static_cast<std::size_t>(k) + 1]; }
    std::size_t block_begin(int d) const { return block_begin_[static_cast<std::size_t>(d)]; }
    std::size_t block_end(int d) const { return block_begin_[static_cast<std::size_t>(d) + 1]; }

    int degree(std::size_t m) const { return degree_[m]; }
    std::span<const std::uint8_t> exponents(std::size_t m) const {
        return {exps_.data() + m * static_cast<std::size_t>(num_vars()),
                static_cast<std::size_t>(num_vars())};
    }
    /// Product of factorials of the exponents of monomial m.
    double multi_factorial(std::size_t m) const { return mfact_[m]; }

    /// Position of a monomial; throws DimensionError / OrderBudgetError.
    std::size_t index_of(const MultiIndex& alpha) const;

    /// Monomial m + e_v, or npos when that exceeds the context order.
    std::size_t raise(std::size_t m, int v) const { return raise_[static_cast<std::size_t>(v) * exps_count() + m]; }

    /// Output indices of the product of block da with block db (da <= db,
    /// da + db <= K), row-major over (i in block da, j in block db).
    std::span<const std::uint32_t> product_block(int da, int db) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    JetContext(int dim, int order);
    std::size_t exps_count() const { return degree_.size(); }
    std::uint64_t key(std::span<const std::uint8_t> e) const;

    int dim_;
    int order_;
    std::vector<std::size_t> block_begin_;
    std::vector<std::uint8_t> exps_;
    std::vector<int> degree_;
    std::vector<double> mfact_;
    std::vector<std::size_t> raise_;
    std::vector<std::uint32_t> prod_;
    std::vector<std::size_t> prod_offset_;  // (da, db) -> start in prod_
    std::vector<std::uint64_t> sorted_keys_;
    std::vector<std::size_t> sorted_index_;
};

/// Truncated Taylor expansion of a scalar at a point of the chart.
class Jet {
public:
    Jet() = default;
    /// Zero jet of the given order (defaults to the context order).
    explicit Jet(const JetContext& ctx, int order = -1);

    static Jet constant(const JetContext& ctx, double value, int order = -1);
    /// The coordinate function of variable `var` expanded at `value`.
    static Jet variable(const JetContext& ctx, int var, double value, int order = -1);

    const JetContext& context() const { return *ctx_; }
    bool valid() const noexcept { return ctx_ != nullptr; }
    int order() const noexcept { return order_; }
    double value() const { return c_[0]; }
    std::span<const double> coefficients() const { return c_; }
    std::span<double> coefficients() { return c_; }

    /// Raw partial derivative: Taylor coefficient times multi-index factorial.
    double partial(const MultiIndex& alpha) const;
    /// Partial derivative along the listed variables, e.g. {0, n+1, n+1}.
    double partial_vars(std::initializer_list<int> vars) const;

    /// d/dz_var as a jet of one order less.
    Jet derivative(int var) const;
    Jet truncated(int order) const;

    /// this * (value + z_var) without a full convolution.
    Jet times_linear(int var, double value) const;

    Jet& operator+=(const Jet& rhs);
    Jet& operator-=(const Jet& rhs);
    Jet& operator*=(double s);
    Jet& operator+=(double s);
    Jet& operator-=(double s) { return *this += -s; }

    /// this += s * rhs (truncated to this jet's order).
    Jet& axpy(double s, const Jet& rhs);

    friend Jet operator*(const Jet& a, const Jet& b);

private:
    const JetContext* ctx_ = nullptr;
    int order_ = 0;
    std::vector<double> c_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator-(Jet a);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, double s);
Jet operator+(double s, Jet a);
Jet operator-(Jet a, double s);
Jet operator-(double s, const Jet& a);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);
Jet operator/(Jet a, double s);
Jet operator/(double s, const Jet& a);

Jet reciprocal(const Jet& a);
Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet pow(const Jet& a, double r);
/// Integer power by repeated multiplication; exact for polynomials.
Jet powi(const Jet& a, int k);

/// One jet per chart variable at `point` (length 2n: x then y).
std::vector<Jet> seed(const JetContext& ctx, std::span<const double> point);

/// Value-compatible constant for generic code templated on double / Jet.
inline double constant_like(double, double v) { return v; }
inline Jet constant_like(const Jet& proto, double v) {
    return Jet::constant(proto.context(), v, proto.order());
}

}  // namespace finsler
