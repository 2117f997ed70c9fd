#include "finsler/metric_model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "finsler/error.hpp"

namespace finsler {

namespace {

template <class T>
T dot(std::span<const T> a, std::span<const T> b) {
    T s = a[0] * b[0];
    for (std::size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

template <class T>
T sq_norm(std::span<const T> v) {
    return dot(v, v);
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

BaseBox uniform_box(int n, double lo, double hi) {
    return BaseBox{std::vector<double>(static_cast<std::size_t>(n), lo),
                   std::vector<double>(static_cast<std::size_t>(n), hi)};
}

void require_dim(int n) {
    if (n < 2 || n > kMaxDim)
        throw ValidationError("dimension must be in [2, " + std::to_string(kMaxDim) + "], got " + std::to_string(n));
}

std::vector<std::vector<MetricExpr>> parse_matrix(const std::vector<std::vector<std::string>>& src, int n,
                                                  const std::string& what) {
    if (src.size() != static_cast<std::size_t>(n))
        throw ValidationError(what + " must be an " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    std::vector<std::vector<MetricExpr>> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (src[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(n))
            throw ValidationError(what + " must be an " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
        for (int j = 0; j < n; ++j) {
            auto e = MetricExpr::parse(src[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], n);
            if (e.uses_y()) throw ValidationError(what + " entries may depend on x only");
            out[static_cast<std::size_t>(i)].push_back(std::move(e));
        }
    }
    return out;
}

// a_ij(x) y^i y^j with symmetrized coefficients.
template <class T>
T quadratic_form(const std::vector<std::vector<MetricExpr>>& a, std::span<const T> x, std::span<const T> y) {
    const std::size_t n = y.size();
    std::vector<T> row;
    row.reserve(n);
    T total = constant_like(y[0], 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            T aij = a[i][j].evaluate<T>(x, y);
            total += aij * (y[i] * y[j]);
        }
    }
    return total;
}

}  // namespace

MetricModel::MetricModel(std::string name, int dim, JetEval jet_eval, ValueEval value_eval,
                         DomainPredicate domain, MetricFlags flags, BaseBox box)
    : name_(std::move(name)),
      dim_(dim),
      jet_eval_(std::move(jet_eval)),
      value_eval_(std::move(value_eval)),
      domain_(std::move(domain)),
      flags_(flags),
      box_(std::move(box)) {
    require_dim(dim_);
}

bool MetricModel::in_domain(std::span<const double> x, std::span<const double> y) const {
    bool nonzero = false;
    for (double v : y) nonzero |= (v != 0.0);
    if (!nonzero) return false;
    return domain_ ? domain_(x, y) : true;
}

MetricModel MetricModel::with_flags(MetricFlags flags) const {
    MetricModel m = *this;
    m.flags_ = flags;
    return m;
}

MetricModel MetricModel::renamed(std::string name) const {
    MetricModel m = *this;
    m.name_ = std::move(name);
    return m;
}

// ---------------------------------------------------------------------------
// Built-in families

MetricModel euclidean(int n) {
    require_dim(n);
    auto jet = [](std::span<const Jet>, std::span<const Jet> y) { return sq_norm(y); };
    auto val = [](std::span<const double>, std::span<const double> y) { return sq_norm(y); };
    MetricFlags f{true, true, true, true};
    MetricModel m("euclidean(" + std::to_string(n) + ")", n, jet, val, nullptr, f, uniform_box(n, -1.0, 1.0));
    validate(m);
    return m;
}

namespace {
template <class T>
T minkowski_randers_L(const std::vector<double>& b, std::span<const T> y) {
    T by = y[0] * b[0];
    for (std::size_t i = 1; i < y.size(); ++i) by += y[i] * b[i];
    using std::sqrt;
    T F = sqrt(sq_norm(y)) + by;
    return F * F;
}
}  // namespace

MetricModel minkowski_randers(std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    require_dim(n);
    double nb = 0.0;
    for (double v : b) nb += v * v;
    if (!(std::sqrt(nb) < 1.0))
        throw ValidationError("minkowski_randers: Randers condition |b| < 1 violated (|b| = " +
                              fmt_double(std::sqrt(nb)) + ")");
    auto jet = [b](std::span<const Jet>, std::span<const Jet> y) { return minkowski_randers_L(b, y); };
    auto val = [b](std::span<const double>, std::span<const double> y) { return minkowski_randers_L(b, y); };
    std::string name = "minkowski_randers(" + std::to_string(n);
    for (double v : b) name += "," + fmt_double(v);
    name += ")";
    MetricFlags f{true, false, true, true};
    MetricModel m(name, n, jet, val, nullptr, f, uniform_box(n, -1.0, 1.0));
    validate(m);
    return m;
}

MetricModel riemannian(int n, std::vector<std::vector<std::string>> g) {
    require_dim(n);
    auto a = parse_matrix(g, n, "riemannian g");
    bool depends_on_x = false;
    for (auto& row : a)
        for (auto& e : row) depends_on_x |= e.uses_x();
    auto jet = [a](std::span<const Jet> x, std::span<const Jet> y) { return quadratic_form(a, x, y); };
    auto val = [a](std::span<const double> x, std::span<const double> y) { return quadratic_form(a, x, y); };
    MetricFlags f{true, true, !depends_on_x, !depends_on_x};
    MetricModel m("riemannian(" + std::to_string(n) + ")", n, jet, val, nullptr, f, uniform_box(n, -1.0, 1.0));
    validate(m);
    return m;
}

namespace {
template <class T>
T sphere_L(double R, std::span<const T> x, std::span<const T> y) {
    // Stereographic chart: g = 4 R^4 / (R^2 + |x|^2)^2 * delta.
    T denom = sq_norm(x) + R * R;
    T conf = (4.0 * R * R * R * R) / (denom * denom);
    return conf * sq_norm(y);
}
}  // namespace

MetricModel sphere_round(int n, double radius) {
    require_dim(n);
    if (!(radius > 0.0)) throw ValidationError("sphere_round: radius must be positive");
    auto jet = [radius](std::span<const Jet> x, std::span<const Jet> y) { return sphere_L(radius, x, y); };
    auto val = [radius](std::span<const double> x, std::span<const double> y) { return sphere_L(radius, x, y); };
    MetricFlags f{true, true, false, false};
    MetricModel m("sphere_round(" + std::to_string(n) + "," + fmt_double(radius) + ")", n, jet, val, nullptr, f,
                  uniform_box(n, -0.5 * radius, 0.5 * radius));
    validate(m);
    return m;
}

namespace {
template <class T>
T torus_L(double eps, std::span<const T> x, std::span<const T> y) {
    using std::exp;
    using std::sin;
    T s = sin(x[0]);
    for (std::size_t i = 1; i < x.size(); ++i) s += sin(x[i]);
    return exp(s * (2.0 * eps)) * sq_norm(y);
}
}  // namespace

MetricModel torus_conformal(int n, double epsilon) {
    require_dim(n);
    if (!(epsilon >= 0.0 && epsilon < 0.3))
        throw ValidationError("torus_conformal: amplitude must satisfy 0 <= epsilon < 0.3, got " +
                              fmt_double(epsilon));
    auto jet = [epsilon](std::span<const Jet> x, std::span<const Jet> y) { return torus_L(epsilon, x, y); };
    auto val = [epsilon](std::span<const double> x, std::span<const double> y) { return torus_L(epsilon, x, y); };
    MetricFlags f{true, true, epsilon == 0.0, true};
    MetricModel m("torus_conformal(" + std::to_string(n) + "," + fmt_double(epsilon) + ")", n, jet, val, nullptr, f,
                  uniform_box(n, 0.0, 2.0 * std::numbers::pi));
    validate(m);
    return m;
}

namespace {
template <class T>
T randers_L(const std::vector<std::vector<MetricExpr>>& a, const std::vector<MetricExpr>& beta,
            std::span<const T> x, std::span<const T> y) {
    using std::sqrt;
    T alpha = sqrt(quadratic_form(a, x, y));
    T by = beta[0].evaluate<T>(x, y) * y[0];
    for (std::size_t i = 1; i < y.size(); ++i) by += beta[i].evaluate<T>(x, y) * y[i];
    T F = alpha + by;
    return F * F;
}
}  // namespace

MetricModel randers(int n, std::vector<std::vector<std::string>> alpha, std::vector<std::string> beta) {
    require_dim(n);
    if (alpha.empty()) {
        alpha.assign(static_cast<std::size_t>(n), std::vector<std::string>(static_cast<std::size_t>(n), "0"));
        for (int i = 0; i < n; ++i) alpha[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = "1";
    }
    auto a = parse_matrix(alpha, n, "randers alpha");
    if (beta.size() != static_cast<std::size_t>(n))
        throw ValidationError("randers: beta must have " + std::to_string(n) + " components");
    std::vector<MetricExpr> b;
    bool depends_on_x = false;
    for (auto& s : beta) {
        b.push_back(MetricExpr::parse(s, n));
        if (b.back().uses_y()) throw ValidationError("randers: beta components may depend on x only");
        depends_on_x |= b.back().uses_x();
    }
    for (auto& row : a)
        for (auto& e : row) depends_on_x |= e.uses_x();
    auto jet = [a, b](std::span<const Jet> x, std::span<const Jet> y) { return randers_L(a, b, x, y); };
    auto val = [a, b](std::span<const double> x, std::span<const double> y) { return randers_L(a, b, x, y); };
    MetricFlags f{true, false, !depends_on_x, !depends_on_x};
    MetricModel m("randers(" + std::to_string(n) + ")", n, jet, val, nullptr, f, uniform_box(n, -1.0, 1.0));

    // Randers condition |beta|_alpha < 1 on the validation samples.
    ValidationOptions opts;
    for (const auto& s : domain_sample(m, opts.samples, opts.seed)) {
        Eigen::MatrixXd A(n, n);
        Eigen::VectorXd bv(n);
        for (int i = 0; i < n; ++i) {
            bv(i) = b[static_cast<std::size_t>(i)].evaluate<double>(s.x, s.y);
            for (int j = 0; j < n; ++j)
                A(i, j) = 0.5 * (a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].evaluate<double>(s.x, s.y) +
                                 a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)].evaluate<double>(s.x, s.y));
        }
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() != Eigen::Success) throw ValidationError("randers: alpha is not positive definite");
        double norm2 = bv.dot(llt.solve(bv));
        if (!(norm2 < 1.0))
            throw ValidationError("randers: Randers condition |beta|_alpha < 1 violated (|beta|^2 = " +
                                  fmt_double(norm2) + ")");
    }
    validate(m);
    return m;
}

namespace {
template <class T>
T funk_L(std::span<const T> x, std::span<const T> y) {
    using std::sqrt;
    T xy = dot(x, y);
    T one_minus = 1.0 - sq_norm(x);
    T F = (sqrt(one_minus * sq_norm(y) + xy * xy) + xy) / one_minus;
    return F * F;
}
}  // namespace

MetricModel funk(int n) {
    require_dim(n);
    auto jet = [](std::span<const Jet> x, std::span<const Jet> y) { return funk_L(x, y); };
    auto val = [](std::span<const double> x, std::span<const double> y) { return funk_L(x, y); };
    auto domain = [](std::span<const double> x, std::span<const double>) { return sq_norm(x) < 1.0; };
    MetricFlags f{true, false, false, false};
    MetricModel m("funk(" + std::to_string(n) + ")", n, jet, val, domain, f, uniform_box(n, -0.5, 0.5));
    validate(m);
    return m;
}

MetricModel builtin(const std::string& name, const BuiltinParams& p, const ValidationOptions& options) {
    (void)options;
    if (name == "euclidean") return euclidean(p.n);
    if (name == "minkowski_randers") {
        if (p.b.size() != static_cast<std::size_t>(p.n))
            throw ValidationError("minkowski_randers: b must have n = " + std::to_string(p.n) + " components");
        return minkowski_randers(p.b);
    }
    if (name == "riemannian") return riemannian(p.n, p.g);
    if (name == "sphere_round") return sphere_round(p.n, p.radius);
    if (name == "torus_conformal") return torus_conformal(p.n, p.epsilon);
    if (name == "randers") {
        auto beta = p.beta;
        if (beta.empty()) {
            beta.assign(static_cast<std::size_t>(p.n), "0");
            beta[0] = "0.3*sin(x2)";
        }
        return randers(p.n, p.g, beta);
    }
    if (name == "funk") return funk(p.n);
    throw ValidationError("unknown built-in metric '" + name + "'");
}

std::vector<std::string> builtin_catalog() {
    return {
        "euclidean(n)                      L = |y|^2",
        "minkowski_randers(n, b1..bn)      F = |y| + b.y, |b| < 1",
        "riemannian(n, g)                  L = g_ij(x) y^i y^j, g an n x n matrix of x-expressions (config only)",
        "sphere_round(n, radius=1)         round sphere in a stereographic chart",
        "torus_conformal(n, epsilon=0.1)   L = exp(2 eps sum_i sin x^i) |y|^2 on the 2pi-periodic torus, eps < 0.3",
        "randers(n)                        F = alpha + beta; default alpha = |y|, beta = 0.3 sin(x2) dx1",
        "funk(n)                           Funk metric of the open unit ball",
    };
}

// ---------------------------------------------------------------------------
// Validation and sampling

void validate(const MetricModel& model, const ValidationOptions& options) {
    const int n = model.dim();
    auto ctx = JetContext::get(n, 2);
    std::vector<TangentSample> samples;
    try {
        samples = domain_sample(model, options.samples, options.seed);
    } catch (const Error& e) {
        throw ValidationError(model.name() + ": " + e.what());
    }
    for (const auto& s : samples) {
        std::vector<double> point(s.x);
        point.insert(point.end(), s.y.begin(), s.y.end());
        Jet L;
        try {
            auto vars = seed(*ctx, point);
            std::span<const Jet> all(vars);
            L = model.L(all.subspan(0, static_cast<std::size_t>(n)), all.subspan(static_cast<std::size_t>(n)));
        } catch (const ArithmeticDomainError& e) {
            throw ValidationError(model.name() + ": evaluation failed inside the domain: " + e.what());
        }
        const double L0 = L.value();
        double euler = -2.0 * L0;
        for (int i = 0; i < n; ++i) euler += s.y[static_cast<std::size_t>(i)] * L.derivative(n + i).value();
        if (!(std::abs(euler) <= options.tolerance * (1.0 + std::abs(L0)))) {
            throw ValidationError(model.name() + ": homogeneity check failed, Euler residual y.dL/dy - 2L = " +
                                  fmt_double(euler) + " at a sample (L is not 2-homogeneous in y)");
        }
        Eigen::MatrixXd g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = 0.5 * L.derivative(n + i).derivative(n + j).value();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        const double amax = ev.cwiseAbs().maxCoeff();
        const double amin = ev.cwiseAbs().minCoeff();
        if (!(amin > 0.0) || amax / amin > options.max_condition) {
            throw ValidationError(model.name() + ": nondegeneracy check failed, fundamental tensor is singular "
                                  "(condition number " + fmt_double(amin > 0 ? amax / amin : INFINITY) + ")");
        }
        if (model.flags().positive_definite && !(ev.minCoeff() > 0.0)) {
            throw ValidationError(model.name() + ": fundamental tensor is not positive definite at a sample");
        }
    }
}

std::vector<std::vector<double>> random_directions(int n, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> out;
    while (static_cast<int>(out.size()) < count) {
        std::vector<double> u(static_cast<std::size_t>(n));
        double s = 0.0;
        for (auto& v : u) {
            v = normal(rng);
            s += v * v;
        }
        if (s < 1e-12) continue;
        s = std::sqrt(s);
        for (auto& v : u) v /= s;
        out.push_back(std::move(u));
    }
    return out;
}

std::vector<TangentSample> domain_sample(const MetricModel& model, int count, std::uint64_t seed) {
    if (count < 1) throw Error("domain_sample: count must be >= 1");
    const int n = model.dim();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<TangentSample> out;
    const long max_attempts = 1000L * count;
    for (long attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < count; ++attempt) {
        TangentSample s;
        s.x.resize(static_cast<std::size_t>(n));
        s.y.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            s.x[k] = model.box().lo[k] + (model.box().hi[k] - model.box().lo[k]) * unit(rng);
        }
        double norm = 0.0;
        for (auto& v : s.y) {
            v = normal(rng);
            norm += v * v;
        }
        if (norm < 1e-12) continue;
        norm = std::sqrt(norm);
        for (auto& v : s.y) v /= norm;
        if (model.in_domain(s.x, s.y)) out.push_back(std::move(s));
    }
    if (out.empty()) throw DomainError(model.name() + ": domain predicate rejected every sampled point");
    if (static_cast<int>(out.size()) < count)
        throw DomainError(model.name() + ": could only place " + std::to_string(out.size()) + " of " +
                          std::to_string(count) + " samples inside the domain");
    return out;
}

// ---------------------------------------------------------------------------
// DSL models

MetricModel parse_metric_dsl(const std::string& source, int n, const std::string& name,
                             const std::optional<std::string>& domain, const std::optional<MetricFlags>& flags,
                             const std::optional<BaseBox>& box, const ValidationOptions& options) {
    require_dim(n);
    auto expr = MetricExpr::parse(source, n);
    MetricModel::DomainPredicate pred = nullptr;
    if (domain && !domain->empty()) {
        auto dexpr = MetricExpr::parse(*domain, n);
        pred = [dexpr](std::span<const double> x, std::span<const double> y) {
            try {
                return dexpr.evaluate<double>(x, y) > 0.0;
            } catch (const ArithmeticDomainError&) {
                return false;
            }
        };
    }
    auto jet = [expr](std::span<const Jet> x, std::span<const Jet> y) { return expr.evaluate<Jet>(x, y); };
    auto val = [expr](std::span<const double> x, std::span<const double> y) { return expr.evaluate<double>(x, y); };
    BaseBox b = box.value_or(uniform_box(n, -1.0, 1.0));
    MetricFlags f{false, false, !expr.uses_x(), !expr.uses_x()};
    MetricModel m(name, n, jet, val, pred, flags.value_or(f), b);
    validate(m, options);
    if (flags) return m;

    // Infer definiteness and quadraticity from the validation samples.
    auto ctx = JetContext::get(n, 2);
    auto hessian = [&](const std::vector<double>& x, const std::vector<double>& y) {
        std::vector<double> point(x);
        point.insert(point.end(), y.begin(), y.end());
        auto vars = seed(*ctx, point);
        std::span<const Jet> all(vars);
        Jet L = m.L(all.subspan(0, static_cast<std::size_t>(n)), all.subspan(static_cast<std::size_t>(n)));
        Eigen::MatrixXd g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = 0.5 * L.derivative(n + i).derivative(n + j).value();
        return g;
    };
    bool pd = true;
    bool quad = true;
    auto dirs = random_directions(n, 4, options.seed + 1);
    for (const auto& s : domain_sample(m, std::min(options.samples, 20), options.seed)) {
        Eigen::MatrixXd g = hessian(s.x, s.y);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
        pd &= es.eigenvalues().minCoeff() > 0.0;
        for (const auto& d : dirs) {
            if (!m.in_domain(s.x, d)) continue;
            Eigen::MatrixXd g2 = hessian(s.x, d);
            quad &= (g2 - g).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + g.cwiseAbs().maxCoeff());
        }
    }
    // Indicatrix integration needs the whole slit tangent space.
    f.positive_definite = pd && !pred;
    f.riemannian = quad;
    return m.with_flags(f);
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

MetricModel parse_metric_declaration(const std::string& text, const ValidationOptions& options) {
    std::istringstream in(text);
    std::string line;
    std::string name = "dsl";
    std::string L;
    std::optional<std::string> domain;
    std::optional<MetricFlags> flags;
    std::optional<std::pair<double, double>> box;
    int dim = 0;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError("metric declaration line " + std::to_string(lineno) + ": expected 'key: value'");
        std::string key = trim(line.substr(0, colon));
        std::string value = trim(line.substr(colon + 1));
        if (key == "name") {
            name = value;
        } else if (key == "dim" || key == "dimension") {
            try {
                dim = std::stoi(value);
            } catch (const std::exception&) {
                throw ParseError("metric declaration line " + std::to_string(lineno) + ": dimension must be an integer");
            }
        } else if (key == "L") {
            L = value;
        } else if (key == "domain") {
            domain = value;
        } else if (key == "flags") {
            MetricFlags f;
            std::istringstream fs(value);
            std::string tok;
            while (std::getline(fs, tok, ',')) {
                tok = trim(tok);
                if (tok == "positive_definite") f.positive_definite = true;
                else if (tok == "riemannian") f.riemannian = true;
                else if (tok == "x_independent") f.x_independent = true;
                else if (tok == "periodic") f.periodic = true;
                else if (!tok.empty()) throw ParseError("metric declaration: unknown flag '" + tok + "'");
            }
            flags = f;
        } else if (key == "box") {
            std::istringstream bs(value);
            double lo = 0, hi = 0;
            if (!(bs >> lo >> hi) || !(lo < hi)) throw ParseError("metric declaration: box expects 'lo hi' with lo < hi");
            box = std::make_pair(lo, hi);
        } else {
            throw ParseError("metric declaration line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (dim == 0) throw ParseError("metric declaration: missing 'dim'");
    if (L.empty()) throw ParseError("metric declaration: missing 'L'");
    std::optional<BaseBox> b;
    if (box) b = uniform_box(dim, box->first, box->second);
    return parse_metric_dsl(L, dim, name, domain, flags, b, options);
}

MetricModel load_metric_declaration(const std::string& path, const ValidationOptions& options) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open metric declaration '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_metric_declaration(ss.str(), options);
}

MetricModel metric_from_reference(const std::string& ref, const ValidationOptions& options) {
    auto open = ref.find('(');
    if (open == std::string::npos || ref.back() != ')') return load_metric_declaration(ref, options);
    std::string name = trim(ref.substr(0, open));
    std::string inner = ref.substr(open + 1, ref.size() - open - 2);
    std::vector<double> args;
    std::istringstream is(inner);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            std::size_t used = 0;
            args.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError("metric reference '" + ref + "': argument '" + tok + "' is not a number");
        }
    }
    if (args.empty()) throw ParseError("metric reference '" + ref + "': missing dimension");
    BuiltinParams p;
    p.n = static_cast<int>(args[0]);
    if (name == "minkowski_randers") {
        p.b.assign(args.begin() + 1, args.end());
        if (p.b.empty()) {
            p.b.assign(static_cast<std::size_t>(p.n), 0.0);
            p.b[0] = 0.5;
        }
    } else if (name == "sphere_round" && args.size() > 1) {
        p.radius = args[1];
    } else if (name == "torus_conformal" && args.size() > 1) {
        p.epsilon = args[1];
    }
    return builtin(name, p, options);
}

}  // namespace finsler
