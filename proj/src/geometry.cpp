#include "finsler/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "finsler/error.hpp"

namespace finsler {

namespace {

constexpr double kMaxCondition = 1e12;

std::size_t ipow(int n, int r) {
    std::size_t p = 1;
    for (int i = 0; i < r; ++i) p *= static_cast<std::size_t>(n);
    return p;
}

std::vector<int> decode(std::size_t flat, int n, int rank) {
    std::vector<int> idx(static_cast<std::size_t>(rank));
    for (int s = rank - 1; s >= 0; --s) {
        idx[static_cast<std::size_t>(s)] = static_cast<int>(flat % static_cast<std::size_t>(n));
        flat /= static_cast<std::size_t>(n);
    }
    return idx;
}

std::size_t encode(const std::vector<int>& idx, int n) {
    std::size_t f = 0;
    for (int v : idx) f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(v);
    return f;
}

// sum_k a_k * b_k over jets, starting from the first product.
Jet dot(const std::vector<const Jet*>& a, const std::vector<const Jet*>& b) {
    Jet s = (*a[0]) * (*b[0]);
    for (std::size_t k = 1; k < a.size(); ++k) s += (*a[k]) * (*b[k]);
    return s;
}

}  // namespace

void require_order(const std::string& what, int required, int available) {
    if (available < required) {
        throw OrderBudgetError(what, required, available);
    }
}

// ---------------------------------------------------------------------------
// JetTensor

JetTensor::JetTensor(int dim, int rank) : n_(dim), rank_(rank), c_(ipow(dim, rank)) {}

std::size_t JetTensor::flat(std::initializer_list<int> idx) const {
    if (static_cast<int>(idx.size()) != rank_) throw DimensionError("tensor index has wrong rank");
    std::size_t f = 0;
    for (int v : idx) {
        if (v < 0 || v >= n_) throw DimensionError("tensor index out of range");
        f = f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v);
    }
    return f;
}

int JetTensor::order() const {
    int o = c_.empty() ? 0 : c_[0].order();
    for (const auto& j : c_) o = std::min(o, j.order());
    return o;
}

std::vector<double> JetTensor::values() const {
    std::vector<double> v;
    v.reserve(c_.size());
    for (const auto& j : c_) v.push_back(j.value());
    return v;
}

JetTensor JetTensor::scalar(Jet j) {
    JetTensor t(j.valid() ? j.context().dim() : 0, 0);
    t.c_[0] = std::move(j);
    return t;
}

// ---------------------------------------------------------------------------
// JetGeometry

JetGeometry::JetGeometry(const MetricModel& model, const TangentSample& sample, int order)
    : model_(&model), sample_(sample), n_(model.dim()), order_(order) {
    if (static_cast<int>(sample.x.size()) != n_ || static_cast<int>(sample.y.size()) != n_)
        throw DimensionError("tangent sample does not match the model dimension");
    if (!model.in_domain(sample.x, sample.y))
        throw DomainError(model.name() + ": sample lies outside the metric domain");
    ctx_ = JetContext::get(n_, order);
    std::vector<double> point(sample.x);
    point.insert(point.end(), sample.y.begin(), sample.y.end());
    vars_ = seed(*ctx_, point);
    std::span<const Jet> all(vars_);
    L_ = model.L(all.subspan(0, static_cast<std::size_t>(n_)), all.subspan(static_cast<std::size_t>(n_)));
}

void JetGeometry::require(const char* what, int needed) const { require_order(what, needed, order_); }

const Jet& JetGeometry::F() const {
    if (!F_) {
        if (!(L_.value() > 0.0)) throw DomainError(model_->name() + ": L <= 0 at sample, F undefined");
        F_ = sqrt(L_);
    }
    return *F_;
}

const JetTensor& JetGeometry::g() const {
    if (g_) return *g_;
    require("fundamental tensor", min_order::fundamental);
    JetTensor dL(n_, 1);
    for (int i = 0; i < n_; ++i) dL[static_cast<std::size_t>(i)] = L_.derivative(n_ + i);
    JetTensor g(n_, 2);
    Eigen::MatrixXd gv(n_, n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = i; j < n_; ++j) {
            Jet gij = dL[static_cast<std::size_t>(i)].derivative(n_ + j) * 0.5;
            gv(i, j) = gv(j, i) = gij.value();
            g.at({j, i}) = gij;
            g.at({i, j}) = std::move(gij);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gv, Eigen::EigenvaluesOnly);
    const double amax = es.eigenvalues().cwiseAbs().maxCoeff();
    const double amin = es.eigenvalues().cwiseAbs().minCoeff();
    if (!(amin > 0.0) || amax / amin > kMaxCondition) {
        throw DomainError(model_->name() + ": fundamental tensor is singular at the sample (condition number " +
                          std::to_string(amin > 0.0 ? amax / amin : INFINITY) + ")");
    }
    dL_ = std::move(dL);
    g_ = std::move(g);
    return *g_;
}

const JetTensor& JetGeometry::ginv() const {
    if (ginv_) return *ginv_;
    const JetTensor& G = g();
    const int n = n_;
    // Gauss-Jordan with partial pivoting on the values.
    std::vector<std::vector<Jet>> A(static_cast<std::size_t>(n)), B(static_cast<std::size_t>(n));
    const int o = G.order();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            A[static_cast<std::size_t>(i)].push_back(G.at({i, j}));
            B[static_cast<std::size_t>(i)].push_back(Jet::constant(*ctx_, i == j ? 1.0 : 0.0, o));
        }
    }
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].value()) >
                std::abs(A[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)].value()))
                p = r;
        std::swap(A[static_cast<std::size_t>(c)], A[static_cast<std::size_t>(p)]);
        std::swap(B[static_cast<std::size_t>(c)], B[static_cast<std::size_t>(p)]);
        auto& Ac = A[static_cast<std::size_t>(c)];
        auto& Bc = B[static_cast<std::size_t>(c)];
        const Jet inv = reciprocal(Ac[static_cast<std::size_t>(c)]);
        for (int k = c + 1; k < n; ++k) Ac[static_cast<std::size_t>(k)] = Ac[static_cast<std::size_t>(k)] * inv;
        for (int k = 0; k < n; ++k) Bc[static_cast<std::size_t>(k)] = Bc[static_cast<std::size_t>(k)] * inv;
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            auto& Ar = A[static_cast<std::size_t>(r)];
            auto& Br = B[static_cast<std::size_t>(r)];
            const Jet f = Ar[static_cast<std::size_t>(c)];
            for (int k = c + 1; k < n; ++k) Ar[static_cast<std::size_t>(k)] -= f * Ac[static_cast<std::size_t>(k)];
            for (int k = 0; k < n; ++k) Br[static_cast<std::size_t>(k)] -= f * Bc[static_cast<std::size_t>(k)];
        }
    }
    JetTensor inv(n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv.at({i, j}) = B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    ginv_ = std::move(inv);
    return *ginv_;
}

const JetTensor& JetGeometry::hilbert() const {
    if (omega_) return *omega_;
    require("hilbert form", min_order::hilbert);
    g();
    const Jet& f = F();
    const Jet invF = reciprocal(f);
    JetTensor w(n_, 1);
    for (int i = 0; i < n_; ++i) {
        // g_ia y^a = dL/dy^i / 2 by Euler's theorem.
        w[static_cast<std::size_t>(i)] = (*dL_)[static_cast<std::size_t>(i)] * invF * 0.5;
    }
    omega_ = std::move(w);
    return *omega_;
}

const JetTensor& JetGeometry::cartan() const {
    if (C_) return *C_;
    require("cartan tensor", min_order::cartan);
    const JetTensor& G = g();
    JetTensor C(n_, 3);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j)
            for (int k = j; k < n_; ++k) {
                Jet c = G.at({i, j}).derivative(n_ + k) * 0.5;
                const int p[6][3] = {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}};
                for (const auto& q : p) C.at({q[0], q[1], q[2]}) = c;
            }
    C_ = std::move(C);
    return *C_;
}

const JetTensor& JetGeometry::mean_cartan() const {
    if (Cm_) return *Cm_;
    const JetTensor& C = cartan();
    const JetTensor& gi = ginv();
    JetTensor Cm(n_, 1);
    for (int i = 0; i < n_; ++i) {
        std::vector<const Jet*> a, b;
        for (int p = 0; p < n_; ++p)
            for (int q = 0; q < n_; ++q) {
                a.push_back(&gi.at({p, q}));
                b.push_back(&C.at({i, p, q}));
            }
        Cm[static_cast<std::size_t>(i)] = dot(a, b);
    }
    Cm_ = std::move(Cm);
    return *Cm_;
}

const JetTensor& JetGeometry::spray() const {
    if (G_) return *G_;
    require("spray", min_order::spray);
    const JetTensor& gi = ginv();
    // w_c = y^a d_a (dL/dy^c) - dL/dx^c; G^i = g^ic w_c / 4.
    JetTensor w(n_, 1);
    for (int c = 0; c < n_; ++c) {
        const Jet& dLc = (*dL_)[static_cast<std::size_t>(c)];
        Jet s = L_.derivative(c) * -1.0;
        for (int a = 0; a < n_; ++a) s += dLc.derivative(a).times_linear(n_ + a, sample_.y[static_cast<std::size_t>(a)]);
        w[static_cast<std::size_t>(c)] = std::move(s);
    }
    JetTensor G(n_, 1);
    for (int i = 0; i < n_; ++i) {
        std::vector<const Jet*> a, b;
        for (int c = 0; c < n_; ++c) {
            a.push_back(&gi.at({i, c}));
            b.push_back(&w[static_cast<std::size_t>(c)]);
        }
        G[static_cast<std::size_t>(i)] = dot(a, b) * 0.25;
    }
    G_ = std::move(G);
    return *G_;
}

const JetTensor& JetGeometry::N() const {
    if (N_) return *N_;
    require("nonlinear connection", min_order::nonlinear_connection);
    N_ = vertical(spray());
    return *N_;
}

JetTensor JetGeometry::vertical(const JetTensor& t) const {
    JetTensor r(n_, t.rank() + 1);
    for (std::size_t f = 0; f < t.size(); ++f)
        for (int j = 0; j < n_; ++j) r[f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)] = t[f].derivative(n_ + j);
    return r;
}

JetTensor JetGeometry::delta(const JetTensor& t) const {
    const JetTensor& Nt = N();
    JetTensor r(n_, t.rank() + 1);
    std::vector<Jet> dv(static_cast<std::size_t>(n_));
    for (std::size_t f = 0; f < t.size(); ++f) {
        for (int a = 0; a < n_; ++a) dv[static_cast<std::size_t>(a)] = t[f].derivative(n_ + a);
        for (int j = 0; j < n_; ++j) {
            Jet s = t[f].derivative(j);
            for (int a = 0; a < n_; ++a) s -= Nt.at({a, j}) * dv[static_cast<std::size_t>(a)];
            r[f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)] = std::move(s);
        }
    }
    return r;
}

const JetTensor& JetGeometry::gamma() const {
    if (gamma_) return *gamma_;
    require("chern christoffel symbols", min_order::christoffel);
    const JetTensor& gi = ginv();
    const JetTensor dg = delta(g());  // dg(s,k,j) = delta_j g_sk
    JetTensor low(n_, 3);             // Gamma_sjk
    for (int s = 0; s < n_; ++s)
        for (int j = 0; j < n_; ++j)
            for (int k = j; k < n_; ++k) {
                Jet v = (dg.at({s, k, j}) + dg.at({j, s, k}) - dg.at({j, k, s})) * 0.5;
                low.at({s, k, j}) = v;
                low.at({s, j, k}) = std::move(v);
            }
    JetTensor Gm(n_, 3);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = j; k < n_; ++k) {
                std::vector<const Jet*> a, b;
                for (int s = 0; s < n_; ++s) {
                    a.push_back(&gi.at({i, s}));
                    b.push_back(&low.at({s, j, k}));
                }
                Jet v = dot(a, b);
                Gm.at({i, k, j}) = v;
                Gm.at({i, j, k}) = std::move(v);
            }
    gamma_ = std::move(Gm);
    return *gamma_;
}

JetTensor JetGeometry::chern(const JetTensor& t, const Variance& variance) const {
    if (static_cast<int>(variance.size()) != t.rank()) throw DimensionError("variance does not match tensor rank");
    const JetTensor& Gm = gamma();
    JetTensor r = delta(t);
    const int rank = t.rank();
    for (std::size_t f = 0; f < r.size(); ++f) {
        auto idx = decode(f, n_, rank + 1);
        const int j = idx.back();
        std::vector<int> base(idx.begin(), idx.end() - 1);
        for (int s = 0; s < rank; ++s) {
            const int is = base[static_cast<std::size_t>(s)];
            auto other = base;
            for (int k = 0; k < n_; ++k) {
                other[static_cast<std::size_t>(s)] = k;
                const Jet& tk = t[encode(other, n_)];
                if (variance[static_cast<std::size_t>(s)] == Slot::Covariant)
                    r[f] -= Gm.at({k, j, is}) * tk;
                else
                    r[f] += Gm.at({is, j, k}) * tk;
            }
        }
    }
    return r;
}

JetTensor JetGeometry::dynamical(const JetTensor& t, const Variance& variance) const {
    if (static_cast<int>(variance.size()) != t.rank()) throw DimensionError("variance does not match tensor rank");
    // y^j delta_j = y^j d_j - 2 G^a d/dy^a, and y^j Gamma^k_ji = N^k_i.
    const JetTensor& Gs = spray();
    const JetTensor& Nt = N();
    const int rank = t.rank();
    JetTensor r(n_, rank);
    for (std::size_t f = 0; f < t.size(); ++f) {
        Jet s = t[f].derivative(0).times_linear(n_, sample_.y[0]);
        for (int j = 1; j < n_; ++j) s += t[f].derivative(j).times_linear(n_ + j, sample_.y[static_cast<std::size_t>(j)]);
        for (int a = 0; a < n_; ++a) s -= Gs[static_cast<std::size_t>(a)] * t[f].derivative(n_ + a) * 2.0;
        auto idx = decode(f, n_, rank);
        for (int sl = 0; sl < rank; ++sl) {
            const int is = idx[static_cast<std::size_t>(sl)];
            auto other = idx;
            for (int k = 0; k < n_; ++k) {
                other[static_cast<std::size_t>(sl)] = k;
                const Jet& tk = t[encode(other, n_)];
                if (variance[static_cast<std::size_t>(sl)] == Slot::Covariant)
                    s -= Nt.at({k, is}) * tk;
                else
                    s += Nt.at({is, k}) * tk;
            }
        }
        r[f] = std::move(s);
    }
    return r;
}

Jet JetGeometry::trace(const JetTensor& t) const {
    if (t.rank() != 2) throw DimensionError("trace expects a rank-2 tensor");
    const JetTensor& gi = ginv();
    std::vector<const Jet*> a, b;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            a.push_back(&gi.at({i, j}));
            b.push_back(&t.at({i, j}));
        }
    return dot(a, b);
}

const JetTensor& JetGeometry::landsberg() const {
    if (P_) return *P_;
    require("landsberg tensor", min_order::landsberg);
    const JetTensor& G = g();
    const JetTensor& Nt = N();
    const JetTensor& Gm = gamma();
    JetTensor B(n_, 3);  // G^a_.j.k - Gamma^a_jk
    for (int a = 0; a < n_; ++a)
        for (int j = 0; j < n_; ++j)
            for (int k = j; k < n_; ++k) {
                Jet v = Nt.at({a, j}).derivative(n_ + k) - Gm.at({a, j, k});
                B.at({a, k, j}) = v;
                B.at({a, j, k}) = std::move(v);
            }
    JetTensor P(n_, 3);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = j; k < n_; ++k) {
                std::vector<const Jet*> a, b;
                for (int s = 0; s < n_; ++s) {
                    a.push_back(&G.at({i, s}));
                    b.push_back(&B.at({s, j, k}));
                }
                Jet v = dot(a, b);
                P.at({i, k, j}) = v;
                P.at({i, j, k}) = std::move(v);
            }
    P_ = std::move(P);
    return *P_;
}

const JetTensor& JetGeometry::mean_landsberg() const {
    if (Pm_) return *Pm_;
    require("mean landsberg tensor", min_order::landsberg);
    const JetTensor& Nt = N();
    const JetTensor& Gm = gamma();
    JetTensor P(n_, 1);
    for (int i = 0; i < n_; ++i) {
        Jet s = Nt.at({0, 0}).derivative(n_ + i) - Gm.at({0, 0, i});
        for (int a = 1; a < n_; ++a) s += Nt.at({a, a}).derivative(n_ + i) - Gm.at({a, a, i});
        P[static_cast<std::size_t>(i)] = std::move(s);
    }
    Pm_ = std::move(P);
    return *Pm_;
}

const Jet& JetGeometry::ricci() const {
    if (ric_) return *ric_;
    require("ricci scalar", min_order::ricci);
    const JetTensor& Gs = spray();
    const JetTensor& Nt = N();
    // Ric = 2 d_i G^i - y^j d_j T + 2 G^j d/dy^j T - N^i_j N^j_i, T = N^i_i.
    Jet trN = Nt.at({0, 0});
    for (int i = 1; i < n_; ++i) trN += Nt.at({i, i});
    Jet ric = Gs[0].derivative(0) * 2.0;
    for (int i = 1; i < n_; ++i) ric.axpy(2.0, Gs[static_cast<std::size_t>(i)].derivative(i));
    for (int j = 0; j < n_; ++j) {
        ric -= trN.derivative(j).times_linear(n_ + j, sample_.y[static_cast<std::size_t>(j)]);
        ric.axpy(2.0, Gs[static_cast<std::size_t>(j)] * trN.derivative(n_ + j));
    }
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) ric -= Nt.at({i, j}) * Nt.at({j, i});
    ric_ = std::move(ric);
    return *ric_;
}

const JetTensor& JetGeometry::ricci_hessian() const {
    if (ric_hess_) return *ric_hess_;
    require("vertical hessian of ricci", min_order::ricci_hessian);
    ric_hess_ = vertical(vertical(JetTensor::scalar(ricci())));
    return *ric_hess_;
}

const Jet& JetGeometry::pfrak() const {
    if (pfrak_) return *pfrak_;
    require("pfrak", min_order::pfrak);
    const JetTensor& P = mean_landsberg();
    Pm_chern_ = chern(P, {Slot::Covariant});
    Pm_dyn_ = dynamical(P, {Slot::Covariant});
    Pm_dyn_vert_ = vertical(*Pm_dyn_);
    JetTensor M(n_, 2);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            M.at({i, j}) = Pm_chern_->at({i, j}) - P[static_cast<std::size_t>(i)] * P[static_cast<std::size_t>(j)] +
                           Pm_dyn_vert_->at({i, j});
    pfrak_ = trace(M);
    return *pfrak_;
}

const Jet& JetGeometry::pfrak_dyn() const {
    if (pfrak_dyn_) return *pfrak_dyn_;
    require("dynamical derivative of pfrak", min_order::pfrak_dyn);
    pfrak_dyn_ = dynamical(JetTensor::scalar(pfrak()), {})[0];
    return *pfrak_dyn_;
}

const Jet& JetGeometry::schur_printed() const {
    if (schur_) return *schur_;
    require("schur scalar", min_order::schur);
    pfrak();
    const JetTensor& P = mean_landsberg();
    const JetTensor A = dynamical(*Pm_chern_, {Slot::Covariant, Slot::Covariant});
    const JetTensor B = dynamical(*Pm_dyn_vert_, {Slot::Covariant, Slot::Covariant});
    JetTensor M(n_, 2);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            M.at({i, j}) = A.at({i, j}) - P[static_cast<std::size_t>(i)] * (*Pm_dyn_)[static_cast<std::size_t>(j)] * 2.0 -
                           B.at({i, j});
    schur_ = trace(M);
    return *schur_;
}

const Jet& JetGeometry::lemma1_ricci_term() const {
    if (l1_ric_) return *l1_ric_;
    require("ricci term", min_order::lemma1_integrand);
    Jet q = trace(ricci_hessian()) - ricci() * reciprocal(L_) * static_cast<double>(n_ + 2);
    l1_ric_ = dynamical(JetTensor::scalar(std::move(q)), {})[0];
    return *l1_ric_;
}

const Jet& JetGeometry::lemma1_pfrak_unfolded() const {
    if (l1_unfolded_) return *l1_unfolded_;
    require("unfolded pfrak term", min_order::lemma1_integrand);
    pfrak();
    const JetTensor& P = mean_landsberg();
    JetTensor M(n_, 2);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            M.at({i, j}) = Pm_chern_->at({i, j}) - P[static_cast<std::size_t>(i)] * P[static_cast<std::size_t>(j)] +
                           Pm_dyn_vert_->at({i, j});
    l1_unfolded_ = trace(dynamical(M, {Slot::Covariant, Slot::Covariant}));
    return *l1_unfolded_;
}

// ---------------------------------------------------------------------------
// Numeric wrappers

double TensorValue::at(std::initializer_list<int> idx) const {
    if (static_cast<int>(idx.size()) != rank()) throw DimensionError("tensor index has wrong rank");
    std::size_t f = 0;
    for (int v : idx) f = f * static_cast<std::size_t>(dim) + static_cast<std::size_t>(v);
    return components.at(f);
}

double TensorValue::max_abs() const {
    double m = 0.0;
    for (double v : components) m = std::max(m, std::abs(v));
    return m;
}

TensorValue to_value(const JetTensor& t, const Variance& variance, const TangentSample& s) {
    return TensorValue{variance, t.dim(), t.values(), s};
}

namespace {

template <class Fn>
TensorValue kernel(const char* what, int need, int order, const MetricModel& m, const TangentSample& s,
                   const Variance& variance, Fn fn) {
    require_order(what, need, order);
    JetGeometry geo(m, s, need);
    return to_value(fn(geo), variance, s);
}

const Variance kCo{Slot::Covariant};
const Variance kCo2{Slot::Covariant, Slot::Covariant};
const Variance kCo3{Slot::Covariant, Slot::Covariant, Slot::Covariant};
const Variance kContra{Slot::Contravariant};
const Variance kContra2{Slot::Contravariant, Slot::Contravariant};
const Variance kChris{Slot::Contravariant, Slot::Covariant, Slot::Covariant};
const Variance kMixed{Slot::Contravariant, Slot::Covariant};

}  // namespace

TensorValue fundamental_tensor(const MetricModel& m, const TangentSample& s, int order) {
    return kernel("fundamental_tensor", min_order::fundamental, order, m, s, kCo2,
                  [](const JetGeometry& g) { return g.g(); });
}

TensorValue inverse_fundamental(const MetricModel& m, const TangentSample& s, int order) {
    return kernel("inverse_fundamental", min_order::fundamental, order, m, s, kContra2,
                  [](const JetGeometry& g) { return g.ginv(); });
}

TensorValue cartan(const MetricModel& m, const TangentSample& s, int order) {
    return kernel("cartan", min_order::cartan, order, m, s, kCo3, [](const JetGeometry& g) { return g.cartan(); });
}

TensorValue mean_cartan(const MetricModel& m, const TangentSample& s, int order) {
    return kernel("mean_cartan", min_order::cartan, order, m, s, kCo,
                  [](const JetGeometry& g) { return g.mean_cartan(); });
}

TensorValue hilbert_form(const MetricModel& m, const TangentSample& s, int order) {
    return kernel("hilbert_form", min_order::hilbert, order, m, s, kCo,
                  [](const JetGeometry& g) { return g.hilbert(); });
}

TensorValue spray(const MetricModel& m, const TangentSample& s, int order) {
    return kernel("spray", min_order::spray, order, m, s, kContra, [](const JetGeometry& g) { return g.spray(); });
}

TensorValue nonlinear_connection(const MetricModel& m, const TangentSample& s, int order) {
    return kernel("nonlinear_connection", min_order::nonlinear_connection, order, m, s, kMixed,
                  [](const JetGeometry& g) { return g.N(); });
}

TensorValue chern_christoffel(const MetricModel& m, const TangentSample& s, int order) {
    return kernel("chern_christoffel", min_order::christoffel, order, m, s, kChris,
                  [](const JetGeometry& g) { return g.gamma(); });
}

TensorValue landsberg(const MetricModel& m, const TangentSample& s, int order) {
    return kernel("landsberg", min_order::landsberg, order, m, s, kCo3,
                  [](const JetGeometry& g) { return g.landsberg(); });
}

TensorValue mean_landsberg(const MetricModel& m, const TangentSample& s, int order) {
    return kernel("mean_landsberg", min_order::landsberg, order, m, s, kCo,
                  [](const JetGeometry& g) { return g.mean_landsberg(); });
}

double ricci_scalar(const MetricModel& m, const TangentSample& s, int order) {
    require_order("ricci_scalar", min_order::ricci, order);
    return JetGeometry(m, s, min_order::ricci).ricci().value();
}

TensorValue ricci_vertical_hessian(const MetricModel& m, const TangentSample& s, int order) {
    return kernel("ricci_vertical_hessian", min_order::ricci_hessian, order, m, s, kCo2,
                  [](const JetGeometry& g) { return g.ricci_hessian(); });
}

double pfrak(const MetricModel& m, const TangentSample& s, int order) {
    require_order("pfrak", min_order::pfrak, order);
    return JetGeometry(m, s, min_order::pfrak).pfrak().value();
}

double pfrak_dyn(const MetricModel& m, const TangentSample& s, int order) {
    require_order("pfrak_dyn", min_order::pfrak_dyn, order);
    return JetGeometry(m, s, min_order::pfrak_dyn).pfrak_dyn().value();
}

double schur_corollary_scalar(const MetricModel& m, const TangentSample& s, SchurVariant variant, int order) {
    require_order("schur_corollary_scalar", min_order::schur, order);
    JetGeometry geo(m, s, min_order::schur);
    return variant == SchurVariant::AsPrinted ? geo.schur_printed().value() : geo.pfrak_dyn().value();
}

DerivativeBundle chern_derivative(const MetricModel& m, const TangentSample& s, const TensorField& field,
                                  const Variance& variance, int consumed, int order) {
    const int need = std::max(consumed + 1, min_order::christoffel);
    require_order("chern_derivative", need, order);
    JetGeometry geo(m, s, need);
    JetTensor t = field(geo);
    if (t.rank() != static_cast<int>(variance.size())) throw DimensionError("variance does not match field rank");
    if (t.order() < 1)
        throw OrderBudgetError("chern_derivative: field leaves no derivative order; declare its consumption",
                               need + 1 - t.order(), need);
    Variance with_slot = variance;
    with_slot.push_back(Slot::Covariant);
    return DerivativeBundle{to_value(t, variance, s), to_value(geo.vertical(t), with_slot, s),
                            to_value(geo.chern(t, variance), with_slot, s),
                            to_value(geo.dynamical(t, variance), variance, s)};
}

QuadraticRicResult quadratic_ric_test(const MetricModel& m, const std::vector<double>& x,
                                      const std::vector<std::vector<double>>& directions, double tolerance,
                                      int order) {
    if (directions.size() < 2) throw Error("quadratic_ric_test needs at least 2 directions");
    require_order("quadratic_ric_test", min_order::ricci_hessian, order);
    const int n = m.dim();
    const auto nn = static_cast<std::size_t>(n * n);
    std::vector<std::vector<double>> H;
    for (const auto& d : directions) {
        JetGeometry geo(m, TangentSample{x, d}, min_order::ricci_hessian);
        auto v = geo.ricci_hessian().values();
        for (auto& e : v) e *= 0.5;
        H.push_back(std::move(v));
    }
    QuadraticRicResult r;
    r.h.assign(nn, 0.0);
    for (const auto& h : H)
        for (std::size_t k = 0; k < nn; ++k) r.h[k] += h[k] / static_cast<double>(H.size());
    double scale = 1.0;
    for (double v : r.h) scale = std::max(scale, std::abs(v));
    for (std::size_t a = 0; a < H.size(); ++a)
        for (std::size_t b = a + 1; b < H.size(); ++b)
            for (std::size_t k = 0; k < nn; ++k) r.max_deviation = std::max(r.max_deviation, std::abs(H[a][k] - H[b][k]));
    r.is_quadratic = r.max_deviation < tolerance * scale;
    return r;
}

std::vector<double> contracted_bianchi_riemannian(const MetricModel& m, const std::vector<double>& x, int order) {
    if (!m.flags().riemannian)
        throw Error(m.name() + ": contracted Bianchi check needs a Riemannian model");
    require_order("contracted_bianchi_riemannian", min_order::bianchi, order);
    const int n = m.dim();
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    y[0] = 1.0;
    JetGeometry geo(m, TangentSample{x, y}, min_order::bianchi);
    const JetTensor& gi = geo.ginv();
    JetTensor ric = geo.ricci_hessian();
    for (std::size_t k = 0; k < ric.size(); ++k) ric[k] *= 0.5;
    const Jet S = geo.trace(ric);
    JetTensor E(n, 2);  // ric^ji - S/2 g^ji
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            std::vector<const Jet*> a, b;
            std::vector<Jet> tmp;
            tmp.reserve(static_cast<std::size_t>(n * n));
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) tmp.push_back(gi.at({j, p}) * gi.at({i, q}));
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) {
                    a.push_back(&tmp[static_cast<std::size_t>(p * n + q)]);
                    b.push_back(&ric.at({p, q}));
                }
            E.at({j, i}) = dot(a, b) - S * gi.at({j, i}) * 0.5;
        }
    const JetTensor dE = geo.chern(E, {Slot::Contravariant, Slot::Contravariant});
    std::vector<double> res(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) res[static_cast<std::size_t>(i)] += dE.at({j, i, j}).value();
    return res;
}

}  // namespace finsler
