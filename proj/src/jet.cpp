#include "finsler/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "finsler/error.hpp"

namespace finsler {

namespace {

// All exponent vectors of `vars` variables with total degree exactly d, in
// lexicographically decreasing order.
void enumerate_degree(int vars, int d, std::vector<std::uint8_t>& out) {
    std::vector<std::uint8_t> e(static_cast<std::size_t>(vars), 0);
    // Recursive fill over positions.
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == vars - 1) {
            e[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(remaining);
            out.insert(out.end(), e.begin(), e.end());
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            e[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(k);
            self(self, pos + 1, remaining - k);
        }
    };
    rec(rec, 0, d);
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

std::shared_ptr<const JetContext> JetContext::get(int dim, int order) {
    if (dim < 2 || dim > kMaxDim) {
        throw DimensionError("jet context dimension must be in [2, " + std::to_string(kMaxDim) +
                             "], got " + std::to_string(dim));
    }
    if (order < 1 || order > kMaxOrder) {
        throw DimensionError("jet order must be in [1, " + std::to_string(kMaxOrder) + "], got " +
                             std::to_string(order));
    }
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetContext>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{dim, order}];
    if (!slot) slot = std::shared_ptr<const JetContext>(new JetContext(dim, order));
    return slot;
}

std::uint64_t JetContext::key(std::span<const std::uint8_t> e) const {
    std::uint64_t k = 0;
    for (auto v : e) k = (k << 8) | v;
    return k;
}

JetContext::JetContext(int dim, int order) : dim_(dim), order_(order) {
    const int nv = num_vars();
    block_begin_.push_back(0);
    for (int d = 0; d <= order; ++d) {
        enumerate_degree(nv, d, exps_);
        block_begin_.push_back(exps_.size() / static_cast<std::size_t>(nv));
    }
    const std::size_t count = block_begin_.back();
    degree_.resize(count);
    mfact_.resize(count);
    for (int d = 0; d <= order; ++d) {
        for (std::size_t m = block_begin(d); m < block_end(d); ++m) {
            degree_[m] = d;
            double f = 1.0;
            for (auto v : exponents(m)) f *= factorial(v);
            mfact_[m] = f;
        }
    }

    sorted_keys_.resize(count);
    sorted_index_.resize(count);
    std::vector<std::size_t> perm(count);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<std::uint64_t> keys(count);
    for (std::size_t m = 0; m < count; ++m) keys[m] = key(exponents(m));
    std::sort(perm.begin(), perm.end(), [&](auto a, auto b) { return keys[a] < keys[b]; });
    for (std::size_t i = 0; i < count; ++i) {
        sorted_keys_[i] = keys[perm[i]];
        sorted_index_[i] = perm[i];
    }
    auto lookup = [&](std::uint64_t k) {
        auto it = std::lower_bound(sorted_keys_.begin(), sorted_keys_.end(), k);
        return sorted_index_[static_cast<std::size_t>(it - sorted_keys_.begin())];
    };

    raise_.assign(static_cast<std::size_t>(nv) * count, npos);
    std::vector<std::uint8_t> e(static_cast<std::size_t>(nv));
    for (int v = 0; v < nv; ++v) {
        for (std::size_t m = 0; m < count; ++m) {
            if (degree_[m] >= order) continue;
            auto src = exponents(m);
            std::copy(src.begin(), src.end(), e.begin());
            ++e[static_cast<std::size_t>(v)];
            raise_[static_cast<std::size_t>(v) * count + m] = lookup(key(e));
        }
    }

    prod_offset_.assign(static_cast<std::size_t>((order + 1) * (order + 1)) + 1, 0);
    for (int da = 0; da <= order; ++da) {
        for (int db = da; da + db <= order; ++db) {
            prod_offset_[static_cast<std::size_t>(da * (order + 1) + db)] = prod_.size();
            for (std::size_t i = block_begin(da); i < block_end(da); ++i) {
                auto ei = exponents(i);
                for (std::size_t j = block_begin(db); j < block_end(db); ++j) {
                    auto ej = exponents(j);
                    for (int v = 0; v < nv; ++v)
                        e[static_cast<std::size_t>(v)] =
                            static_cast<std::uint8_t>(ei[static_cast<std::size_t>(v)] + ej[static_cast<std::size_t>(v)]);
                    prod_.push_back(static_cast<std::uint32_t>(lookup(key(e))));
                }
            }
        }
    }
}

std::span<const std::uint32_t> JetContext::product_block(int da, int db) const {
    const std::size_t start = prod_offset_[static_cast<std::size_t>(da * (order_ + 1) + db)];
    const std::size_t len = (block_end(da) - block_begin(da)) * (block_end(db) - block_begin(db));
    return {prod_.data() + start, len};
}

std::size_t JetContext::index_of(const MultiIndex& alpha) const {
    if (alpha.size() != static_cast<std::size_t>(num_vars())) {
        throw DimensionError("multi-index has " + std::to_string(alpha.size()) + " entries, expected " +
                             std::to_string(num_vars()));
    }
    int total = 0;
    std::vector<std::uint8_t> e(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] < 0) throw DimensionError("negative exponent in multi-index");
        total += alpha[i];
        e[i] = static_cast<std::uint8_t>(std::min(alpha[i], 255));
    }
    if (total > order_) throw OrderBudgetError("partial derivative", total, order_);
    auto k = key(e);
    auto it = std::lower_bound(sorted_keys_.begin(), sorted_keys_.end(), k);
    return sorted_index_[static_cast<std::size_t>(it - sorted_keys_.begin())];
}

// ---------------------------------------------------------------------------

Jet::Jet(const JetContext& ctx, int order)
    : ctx_(&ctx), order_(order < 0 ? ctx.order() : order), c_(ctx.size(order_), 0.0) {
    if (order_ > ctx.order()) throw OrderBudgetError("jet", order_, ctx.order());
}

Jet Jet::constant(const JetContext& ctx, double value, int order) {
    Jet j(ctx, order);
    j.c_[0] = value;
    return j;
}

Jet Jet::variable(const JetContext& ctx, int var, double value, int order) {
    if (var < 0 || var >= ctx.num_vars()) throw DimensionError("variable index out of range");
    Jet j(ctx, order);
    j.c_[0] = value;
    if (j.order_ >= 1) j.c_[1 + static_cast<std::size_t>(var)] = 1.0;
    return j;
}

double Jet::partial(const MultiIndex& alpha) const {
    std::size_t m = ctx_->index_of(alpha);
    if (ctx_->degree(m) > order_) throw OrderBudgetError("partial derivative", ctx_->degree(m), order_);
    return c_[m] * ctx_->multi_factorial(m);
}

double Jet::partial_vars(std::initializer_list<int> vars) const {
    MultiIndex alpha(static_cast<std::size_t>(ctx_->num_vars()), 0);
    for (int v : vars) {
        if (v < 0 || v >= ctx_->num_vars()) throw DimensionError("variable index out of range");
        ++alpha[static_cast<std::size_t>(v)];
    }
    return partial(alpha);
}

Jet Jet::derivative(int var) const {
    if (order_ < 1) throw OrderBudgetError("derivative of jet", 1, order_);
    Jet r(*ctx_, order_ - 1);
    const auto nv = static_cast<std::size_t>(var);
    for (std::size_t m = 0; m < r.c_.size(); ++m) {
        std::size_t up = ctx_->raise(m, var);
        r.c_[m] = c_[up] * (ctx_->exponents(m)[nv] + 1);
    }
    return r;
}

Jet Jet::truncated(int order) const {
    if (order >= order_) return *this;
    Jet r = *this;
    r.order_ = std::max(order, 0);
    r.c_.resize(ctx_->size(r.order_));
    return r;
}

Jet Jet::times_linear(int var, double value) const {
    Jet r = *this;
    r *= value;
    if (order_ == 0) return r;
    for (std::size_t m = 0; m < ctx_->size(order_ - 1); ++m) {
        const double a = c_[m];
        if (a != 0.0) r.c_[ctx_->raise(m, var)] += a;
    }
    return r;
}

Jet& Jet::operator+=(const Jet& rhs) { return axpy(1.0, rhs); }
Jet& Jet::operator-=(const Jet& rhs) { return axpy(-1.0, rhs); }

Jet& Jet::axpy(double s, const Jet& rhs) {
    if (rhs.order_ < order_) {
        order_ = rhs.order_;
        c_.resize(rhs.c_.size());
    }
    for (std::size_t m = 0; m < c_.size(); ++m) c_[m] += s * rhs.c_[m];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
}

Jet& Jet::operator+=(double s) {
    c_[0] += s;
    return *this;
}

namespace {

// Flags for blocks holding at least one nonzero coefficient.
std::vector<char> nonzero_blocks(const JetContext& ctx, std::span<const double> c, int order) {
    std::vector<char> nz(static_cast<std::size_t>(order) + 1, 0);
    for (int d = 0; d <= order; ++d) {
        for (std::size_t m = ctx.block_begin(d); m < ctx.block_end(d); ++m) {
            if (c[m] != 0.0) {
                nz[static_cast<std::size_t>(d)] = 1;
                break;
            }
        }
    }
    return nz;
}

}  // namespace

Jet operator*(const Jet& a, const Jet& b) {
    const JetContext& ctx = *a.ctx_;
    const int o = std::min(a.order_, b.order_);
    Jet r(ctx, o);
    const auto nza = nonzero_blocks(ctx, a.c_, o);
    const auto nzb = nonzero_blocks(ctx, b.c_, o);
    double* out = r.c_.data();
    for (int da = 0; da <= o; ++da) {
        for (int db = 0; da + db <= o; ++db) {
            if (!nza[static_cast<std::size_t>(da)] || !nzb[static_cast<std::size_t>(db)]) continue;
            // The table only holds da <= db; swap operands otherwise.
            const bool swap = da > db;
            const int lo = swap ? db : da;
            const int hi = swap ? da : db;
            const double* p = swap ? b.c_.data() : a.c_.data();
            const double* q = swap ? a.c_.data() : b.c_.data();
            auto table = ctx.product_block(lo, hi);
            const std::size_t qb = ctx.block_begin(hi);
            const std::size_t qn = ctx.block_end(hi) - qb;
            const std::uint32_t* idx = table.data();
            for (std::size_t i = ctx.block_begin(lo); i < ctx.block_end(lo); ++i, idx += qn) {
                const double pi = p[i];
                if (pi == 0.0) continue;
                const double* qq = q + qb;
                for (std::size_t j = 0; j < qn; ++j) out[idx[j]] += pi * qq[j];
            }
        }
    }
    return r;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator-(Jet a) { return a *= -1.0; }
Jet operator+(Jet a, double s) { return a += s; }
Jet operator+(double s, Jet a) { return a += s; }
Jet operator-(Jet a, double s) { return a += -s; }
Jet operator-(double s, const Jet& a) { return (-a) += s; }
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }
Jet operator/(Jet a, double s) {
    if (s == 0.0) throw ArithmeticDomainError("division of a jet by zero");
    return a *= 1.0 / s;
}

namespace {

// f(a) = sum_k coeffs[k] (a - a0)^k, coeffs[k] = f^{(k)}(a0) / k!.
Jet compose(const Jet& a, std::span<const double> coeffs) {
    const int o = a.order();
    Jet h = a;
    h.coefficients()[0] = 0.0;
    Jet r = Jet::constant(a.context(), coeffs[0], o);
    if (o == 0) return r;
    r.axpy(coeffs[1], h);
    Jet p = h;
    for (int k = 2; k <= o; ++k) {
        p = p * h;
        r.axpy(coeffs[static_cast<std::size_t>(k)], p);
    }
    return r;
}

std::vector<double> power_coefficients(double a0, double r, int order) {
    // binom(r, k) a0^(r-k)
    std::vector<double> c(static_cast<std::size_t>(order) + 1);
    c[0] = std::pow(a0, r);
    for (int k = 1; k <= order; ++k)
        c[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k) - 1] * (r - (k - 1)) / (k * a0);
    return c;
}

}  // namespace

Jet reciprocal(const Jet& a) {
    const double a0 = a.value();
    if (a0 == 0.0) throw ArithmeticDomainError("division by a jet with zero value");
    std::vector<double> c(static_cast<std::size_t>(a.order()) + 1);
    double t = 1.0 / a0;
    for (auto& v : c) {
        v = t;
        t *= -1.0 / a0;
    }
    return compose(a, c);
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator/(double s, const Jet& a) { return reciprocal(a) *= s; }

Jet sqrt(const Jet& a) {
    const double a0 = a.value();
    if (!(a0 > 0.0)) throw ArithmeticDomainError("sqrt of a jet with nonpositive value");
    std::vector<double> c(static_cast<std::size_t>(a.order()) + 1);
    c[0] = std::sqrt(a0);
    for (std::size_t k = 1; k < c.size(); ++k) c[k] = c[k - 1] * (0.5 - static_cast<double>(k - 1)) / (static_cast<double>(k) * a0);
    return compose(a, c);
}

Jet pow(const Jet& a, double r) {
    if (r == std::floor(r) && std::abs(r) <= 64) return powi(a, static_cast<int>(r));
    const double a0 = a.value();
    if (!(a0 > 0.0)) throw ArithmeticDomainError("non-integer power of a jet with nonpositive value");
    return compose(a, power_coefficients(a0, r, a.order()));
}

Jet powi(const Jet& a, int k) {
    if (k < 0) return reciprocal(powi(a, -k));
    Jet result = Jet::constant(a.context(), 1.0, a.order());
    Jet base = a;
    bool first = true;
    while (k > 0) {
        if (k & 1) {
            result = first ? base : result * base;
            first = false;
        }
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return result;
}

Jet exp(const Jet& a) {
    std::vector<double> c(static_cast<std::size_t>(a.order()) + 1);
    double t = std::exp(a.value());
    for (std::size_t k = 0; k < c.size(); ++k) {
        c[k] = t;
        t /= static_cast<double>(k + 1);
    }
    return compose(a, c);
}

Jet log(const Jet& a) {
    const double a0 = a.value();
    if (!(a0 > 0.0)) throw ArithmeticDomainError("log of a jet with nonpositive value");
    std::vector<double> c(static_cast<std::size_t>(a.order()) + 1);
    c[0] = std::log(a0);
    double t = 1.0 / a0;
    for (std::size_t k = 1; k < c.size(); ++k) {
        c[k] = ((k % 2) ? 1.0 : -1.0) * t / static_cast<double>(k);
        t /= a0;
    }
    return compose(a, c);
}

namespace {

Jet trig(const Jet& a, int phase) {
    // phase 0: sin, 1: cos. Derivatives cycle sin, cos, -sin, -cos.
    const double s = std::sin(a.value());
    const double co = std::cos(a.value());
    const double cycle[4] = {s, co, -s, -co};
    std::vector<double> c(static_cast<std::size_t>(a.order()) + 1);
    double inv_fact = 1.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (k > 0) inv_fact /= static_cast<double>(k);
        c[k] = cycle[(k + static_cast<std::size_t>(phase)) % 4] * inv_fact;
    }
    return compose(a, c);
}

}  // namespace

Jet sin(const Jet& a) { return trig(a, 0); }
Jet cos(const Jet& a) { return trig(a, 1); }

std::vector<Jet> seed(const JetContext& ctx, std::span<const double> point) {
    if (point.size() != static_cast<std::size_t>(ctx.num_vars())) {
        throw DimensionError("seed point has " + std::to_string(point.size()) + " entries, expected " +
                             std::to_string(ctx.num_vars()));
    }
    std::vector<Jet> out;
    out.reserve(point.size());
    for (std::size_t v = 0; v < point.size(); ++v)
        out.push_back(Jet::variable(ctx, static_cast<int>(v), point[v]));
    return out;
}

}  // namespace finsler
