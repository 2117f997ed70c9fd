#include "finsler/identities.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "finsler/error.hpp"
#include "finsler/parallel.hpp"

namespace finsler {

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::string fmt_point(const std::vector<double>& x) {
    std::ostringstream os;
    os.precision(6);
    os << "(";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

int resolution_for(const MetricModel& m, const CheckOptions& o) {
    return o.resolution > 0 ? o.resolution : default_resolution(m.dim());
}

double tolerance_for(const std::string& check, const MetricModel& m, const CheckOptions& o) {
    return o.tolerance > 0.0 ? o.tolerance : default_tolerance(check, m.dim());
}

IdentityReport make_report(const std::string& identity, const MetricModel& m, std::vector<double> point,
                           double tolerance, int resolution, int order) {
    IdentityReport r;
    r.identity = identity;
    r.model = m.name();
    r.point = std::move(point);
    r.tolerance = tolerance;
    r.resolution = resolution;
    r.order = order;
    return r;
}

// Fills residuals and the verdict from lhs, rhs and scale.
void finish(IdentityReport& r, double scale) {
    double abs_res = 0.0;
    for (std::size_t i = 0; i < r.lhs.size(); ++i) abs_res = std::max(abs_res, std::abs(r.lhs[i] - r.rhs[i]));
    r.abs_residual = abs_res;
    r.scale = scale;
    r.rel_residual = scale > 0.0 ? abs_res / scale : abs_res;
    r.verdict = r.rel_residual <= r.tolerance ? Verdict::Pass : Verdict::Fail;
}

void refuse(IdentityReport& r, std::string why) {
    r.verdict = Verdict::Refused;
    r.note = std::move(why);
}

std::vector<double> lowered(const std::vector<double>& g, const std::vector<double>& u) {
    const std::size_t n = u.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) out[i] += g[i * n + k] * u[k];
    return out;
}

std::vector<double> gradient(const MetricExpr& rho, const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    auto ctx = JetContext::get(n, 1);
    std::vector<double> point(x);
    point.resize(2 * x.size(), 1.0);
    auto vars = seed(*ctx, point);
    std::span<const Jet> all(vars);
    Jet v = rho.evaluate<Jet>(all.subspan(0, x.size()), all.subspan(x.size()));
    std::vector<double> g(x.size());
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = v.derivative(i).value();
    return g;
}

std::vector<std::vector<double>> directions_for(const MetricModel& m, const CheckOptions& o) {
    return random_directions(m.dim(), std::max(2, o.einstein_directions), o.seed);
}

bool is_einstein(const RhoSample& s, const CheckOptions& o) {
    return s.deviation < o.einstein_tolerance * (1.0 + std::abs(s.rho));
}

// Per-point survey over a base grid.
struct PointSurvey {
    RhoSample rho;
    double max_mean_landsberg = 0.0;
    double max_cartan = 0.0;
    double hessian_deviation = 0.0;
    double schur_printed = 0.0;
    double schur_expanded = 0.0;
    double schur_difference = 0.0;
};

struct SurveyFlags {
    bool hessian = false;
    bool schur = false;
};

std::vector<PointSurvey> survey(const MetricModel& m, const std::vector<std::vector<double>>& grid,
                                const std::vector<std::vector<double>>& dirs, SurveyFlags flags, double quad_tol) {
    std::vector<PointSurvey> out(grid.size());
    const int order = flags.schur ? min_order::schur : (flags.hessian ? min_order::ricci_hessian : min_order::ricci);
    parallel_for(grid.size(), [&](std::size_t p) {
        PointSurvey& ps = out[p];
        std::vector<double> ratios;
        for (std::size_t d = 0; d < dirs.size(); ++d) {
            JetGeometry geo(m, TangentSample{grid[p], dirs[d]}, order);
            ratios.push_back(geo.ricci().value() / geo.L().value());
            ps.max_mean_landsberg = std::max(ps.max_mean_landsberg, max_abs(geo.mean_landsberg().values()));
            ps.max_cartan = std::max(ps.max_cartan, max_abs(geo.cartan().values()));
            if (flags.schur && d < 3) {
                const double pr = geo.schur_printed().value();
                const double ex = geo.pfrak_dyn().value();
                ps.schur_printed = std::max(ps.schur_printed, std::abs(pr));
                ps.schur_expanded = std::max(ps.schur_expanded, std::abs(ex));
                ps.schur_difference = std::max(ps.schur_difference, std::abs(pr - ex));
            }
        }
        double mean = 0.0;
        for (double r : ratios) mean += r / static_cast<double>(ratios.size());
        ps.rho.rho = mean;
        for (double r : ratios) ps.rho.deviation = std::max(ps.rho.deviation, std::abs(r - mean));
        if (flags.hessian) ps.hessian_deviation = quadratic_ric_test(m, grid[p], dirs, quad_tol).max_deviation;
    });
    return out;
}

double spread(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double mean = 0.0;
    for (double e : v) mean += e / static_cast<double>(v.size());
    double s = 0.0;
    for (double e : v) s = std::max(s, std::abs(e - mean));
    return s;
}

double mean_of(const std::vector<double>& v) {
    double mean = 0.0;
    for (double e : v) mean += e / static_cast<double>(v.size());
    return mean;
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Refused: return "refused";
    }
    return "fail";
}

double IdentityReport::detail(const std::string& key) const {
    for (const auto& [k, v] : details)
        if (k == key) return v;
    throw Error("report has no detail '" + key + "'");
}

double default_tolerance(const std::string& check, int n) {
    if (check == "lemma2") return 1e-6;
    if (check == "lemma1" || check == "main") return n == 2 ? 1e-6 : 1e-5;
    if (check == "schur") return 1e-7;
    if (check == "berwald" || check == "classify") return 1e-6;
    if (check == "bianchi" || check == "stokes") return 1e-6;
    if (check == "section") return 1e-12;
    return 1e-9;  // invariants and other exact algebraic checks
}

std::vector<std::vector<double>> base_grid(const MetricModel& model, int m) {
    if (m < 1) throw Error("base grid needs at least one point per axis");
    const int n = model.dim();
    const auto& box = model.box();
    std::size_t count = 1;
    for (int i = 0; i < n; ++i) count *= static_cast<std::size_t>(m);
    std::vector<std::vector<double>> grid;
    for (std::size_t p = 0; p < count; ++p) {
        std::vector<double> x(static_cast<std::size_t>(n));
        std::size_t q = p;
        for (int i = 0; i < n; ++i) {
            const auto k = static_cast<double>(q % static_cast<std::size_t>(m));
            q /= static_cast<std::size_t>(m);
            const auto ui = static_cast<std::size_t>(i);
            if (model.flags().periodic && !model.flags().x_independent)
                x[ui] = 2.0 * std::numbers::pi * k / m;
            else
                x[ui] = box.lo[ui] + (box.hi[ui] - box.lo[ui]) * (k + 0.5) / m;
        }
        grid.push_back(std::move(x));
    }
    return grid;
}

RhoSample ricci_ratio(const MetricModel& model, const std::vector<double>& x,
                      const std::vector<std::vector<double>>& directions) {
    std::vector<double> r;
    for (const auto& d : directions) {
        JetGeometry geo(model, TangentSample{x, d}, min_order::ricci);
        r.push_back(geo.ricci().value() / geo.L().value());
    }
    RhoSample s;
    s.rho = mean_of(r);
    s.deviation = spread(r);
    return s;
}

// ---------------------------------------------------------------------------

IdentityReport check_lemma2(const MetricModel& model, const MetricExpr& rho, const std::vector<double>& x,
                            const CheckOptions& opts) {
    const int n = model.dim();
    const int R = resolution_for(model, opts);
    require_order("lemma2", min_order::fundamental, opts.order);
    auto r = make_report("lemma2", model, x, tolerance_for("lemma2", model, opts), R, min_order::fundamental);
    if (rho.uses_y()) throw ValidationError("lemma2: rho must be a function of x only");
    if (!model.flags().positive_definite) {
        refuse(r, "fiber integration needs a positive definite model");
        return r;
    }
    const auto grad = gradient(rho, x);
    const auto rule = sphere_rule(n, R);
    const auto nn = static_cast<std::size_t>(n);
    auto s = fiber_integrate(rule, nn + 1, [&](const std::vector<double>& u) {
        JetGeometry geo(model, TangentSample{x, u}, min_order::fundamental);
        const double w = fiber_weight(geo);
        const double L = geo.L().value();
        const auto yl = lowered(geo.g().values(), u);
        double drho = 0.0;
        for (std::size_t a = 0; a < nn; ++a) drho += u[a] * grad[a];
        std::vector<double> out{w};
        for (std::size_t i = 0; i < nn; ++i) out.push_back(w * drho * yl[i] / L);
        return out;
    });
    const double vol = s[0];
    for (std::size_t i = 0; i < nn; ++i) {
        r.lhs.push_back(grad[i] * vol);
        r.rhs.push_back(n * s[i + 1]);
    }
    r.details = {{"fiber_volume", vol}};
    finish(r, std::max({max_abs(r.lhs), max_abs(r.rhs), vol}));
    return r;
}

IdentityReport check_lemma1(const MetricModel& model, const std::vector<double>& x, const CheckOptions& opts) {
    const int n = model.dim();
    const int R = resolution_for(model, opts);
    require_order("lemma1", min_order::lemma1_integrand, opts.order);
    auto r = make_report("lemma1", model, x, tolerance_for("lemma1", model, opts), R, min_order::lemma1_integrand);
    if (!model.flags().positive_definite) {
        refuse(r, "fiber integration needs a positive definite model");
        return r;
    }
    const auto rule = sphere_rule(n, R);
    const auto nn = static_cast<std::size_t>(n);
    std::vector<double> abs_int;
    auto s = fiber_integrate(
        rule, 3 * nn,
        [&](const std::vector<double>& u) {
            JetGeometry geo(model, TangentSample{x, u}, min_order::lemma1_integrand);
            const double w = fiber_weight(geo);
            const double L = geo.L().value();
            const auto yl = lowered(geo.g().values(), u);
            const double a = geo.lemma1_ricci_term().value();
            const double b = -2.0 * geo.pfrak_dyn().value();
            const double c = -2.0 * geo.lemma1_pfrak_unfolded().value();
            std::vector<double> out;
            for (std::size_t i = 0; i < nn; ++i) {
                out.push_back(w * a * yl[i] / L);
                out.push_back(w * b * yl[i] / L);
                out.push_back(w * c * yl[i] / L);
            }
            return out;
        },
        &abs_int);
    double magnitude = 0.0;
    double unfolded_gap = 0.0;
    for (std::size_t i = 0; i < nn; ++i) {
        r.lhs.push_back(s[3 * i]);
        r.rhs.push_back(s[3 * i + 1]);
        magnitude = std::max({magnitude, abs_int[3 * i], abs_int[3 * i + 1]});
        unfolded_gap = std::max(unfolded_gap, std::abs(s[3 * i + 2] - s[3 * i + 1]));
        r.details.emplace_back("rhs_unfolded_" + std::to_string(i + 1), s[3 * i + 2]);
    }
    r.details.emplace_back("integrand_magnitude", magnitude);
    r.details.emplace_back("unfolded_minus_folded", unfolded_gap);
    finish(r, std::max({1.0, max_abs(r.lhs), max_abs(r.rhs), magnitude}));
    if (unfolded_gap / r.scale > r.tolerance)
        r.note = "folded and unfolded right-hand sides differ by " + fmt(unfolded_gap);
    return r;
}

IdentityReport check_main_theorem(const MetricModel& model, const std::vector<double>& x, const CheckOptions& opts) {
    const int n = model.dim();
    const int R = resolution_for(model, opts);
    require_order("main", min_order::pfrak_dyn, opts.order);
    auto r = make_report("main", model, x, tolerance_for("main", model, opts), R, min_order::pfrak_dyn);
    if (!model.flags().positive_definite) {
        refuse(r, "fiber integration needs a positive definite model");
        return r;
    }
    const auto nn = static_cast<std::size_t>(n);
    const double h = opts.stencil_step;
    const auto dirs = directions_for(model, opts);

    // rho on the 5-point stencil along every axis.
    std::vector<std::vector<double>> pts{x};
    for (std::size_t i = 0; i < nn; ++i)
        for (int k : {-2, -1, 1, 2}) {
            auto p = x;
            p[i] += k * h;
            pts.push_back(std::move(p));
        }
    std::vector<RhoSample> rs(pts.size());
    parallel_for(pts.size(), [&](std::size_t p) { rs[p] = ricci_ratio(model, pts[p], dirs); });
    double worst = 0.0;
    std::size_t worst_at = 0;
    for (std::size_t p = 0; p < rs.size(); ++p) {
        const double rel = rs[p].deviation / (1.0 + std::abs(rs[p].rho));
        if (rel > worst) {
            worst = rel;
            worst_at = p;
        }
    }
    std::vector<double> rho_values;
    for (const auto& s : rs) rho_values.push_back(s.rho);
    r.details = {{"rho", rs[0].rho}, {"rho_spread", spread(rho_values)}, {"einstein_deviation", worst}};
    if (worst >= opts.einstein_tolerance) {
        refuse(r, "model is not Einstein: Ric/F^2 varies by " + fmt(rs[worst_at].deviation) +
                      " across directions at x = " + fmt_point(pts[worst_at]));
        return r;
    }
    for (std::size_t i = 0; i < nn; ++i) {
        const double* q = &rho_values[1 + 4 * i];  // x-2h, x-h, x+h, x+2h
        const double d = (q[0] - 8.0 * q[1] + 8.0 * q[2] - q[3]) / (12.0 * h);
        r.lhs.push_back((n - 2) * d);
    }
    const auto rule = sphere_rule(n, R);
    auto s = fiber_integrate(rule, nn + 1, [&](const std::vector<double>& u) {
        JetGeometry geo(model, TangentSample{x, u}, min_order::pfrak_dyn);
        const double w = fiber_weight(geo);
        const double L = geo.L().value();
        const auto yl = lowered(geo.g().values(), u);
        const double pd = geo.pfrak_dyn().value();
        std::vector<double> out{w};
        for (std::size_t i = 0; i < nn; ++i) out.push_back(w * pd * yl[i] / L);
        return out;
    });
    for (std::size_t i = 0; i < nn; ++i) r.rhs.push_back(-2.0 * n * s[i + 1] / s[0]);
    r.details.emplace_back("fiber_volume", s[0]);
    finish(r, std::max({1.0, max_abs(r.lhs), max_abs(r.rhs)}));
    return r;
}

IdentityReport check_schur_corollary(const MetricModel& model, const CheckOptions& opts) {
    const int n = model.dim();
    require_order("schur", min_order::schur, opts.order);
    auto r = make_report("schur", model, {}, tolerance_for("schur", model, opts), 0, min_order::schur);
    if (n < 3) {
        refuse(r, "the corollary needs n >= 3");
        return r;
    }
    const auto grid = base_grid(model, opts.grid_points);
    const auto dirs = directions_for(model, opts);
    const auto sv = survey(model, grid, dirs, SurveyFlags{false, true}, opts.classify_tolerance);
    std::vector<double> rho;
    double dev = 0.0, maxP = 0.0, printed = 0.0, expanded = 0.0, diff = 0.0;
    bool einstein = true;
    for (const auto& p : sv) {
        rho.push_back(p.rho.rho);
        einstein &= is_einstein(p.rho, opts);
        dev = std::max(dev, p.rho.deviation);
        maxP = std::max(maxP, p.max_mean_landsberg);
        printed = std::max(printed, p.schur_printed);
        expanded = std::max(expanded, p.schur_expanded);
        diff = std::max(diff, p.schur_difference);
    }
    const double rho_spread = spread(rho);
    r.details = {{"rho_mean", mean_of(rho)},          {"rho_spread", rho_spread},
                 {"einstein_deviation", dev},         {"max_mean_landsberg", maxP},
                 {"schur_printed_max", printed},      {"schur_expanded_max", expanded},
                 {"schur_variant_difference", diff},  {"grid_points", static_cast<double>(grid.size())}};
    if (!einstein) {
        refuse(r, "model is not Einstein on the base grid (direction deviation " + fmt(dev) + ")");
        return r;
    }
    const bool weakly_landsberg = maxP < opts.classify_tolerance;
    if (!weakly_landsberg && !(expanded < r.tolerance)) {
        refuse(r, "hypothesis unmet: max |P_i| = " + fmt(maxP) + ", expanded Schur scalar up to " + fmt(expanded));
        return r;
    }
    r.lhs = {rho_spread};
    r.rhs = {0.0};
    finish(r, 1.0);
    if (!weakly_landsberg)
        r.note = "hypothesis met through the expanded scalar; printed variant up to " + fmt(printed);
    return r;
}

IdentityReport check_berwald_theorem(const MetricModel& model, const CheckOptions& opts) {
    const int n = model.dim();
    require_order("berwald", min_order::ricci_hessian, opts.order);
    auto r = make_report("berwald", model, {}, tolerance_for("berwald", model, opts), 0, min_order::ricci_hessian);
    if (n < 3) {
        refuse(r, "the theorem needs n >= 3");
        return r;
    }
    const auto grid = base_grid(model, opts.grid_points);
    const auto dirs = directions_for(model, opts);
    const auto sv = survey(model, grid, dirs, SurveyFlags{true, false}, opts.classify_tolerance);
    std::vector<double> rho;
    double hdev = 0.0, dev = 0.0, max_rho = 0.0;
    bool einstein = true;
    for (const auto& p : sv) {
        rho.push_back(p.rho.rho);
        einstein &= is_einstein(p.rho, opts);
        dev = std::max(dev, p.rho.deviation);
        hdev = std::max(hdev, p.hessian_deviation);
        max_rho = std::max(max_rho, std::abs(p.rho.rho));
    }
    const double rho_spread = spread(rho);
    r.details = {{"hessian_deviation", hdev}, {"einstein_deviation", dev}, {"rho_mean", mean_of(rho)},
                 {"rho_spread", rho_spread}};
    if (!(hdev < opts.classify_tolerance)) {
        refuse(r, "Ricci scalar is not quadratic (vertical Hessian deviation " + fmt(hdev) +
                      "); theorem not applicable");
        return r;
    }
    if (!einstein) {
        refuse(r, "quadratic Ricci scalar but not Einstein; theorem not applicable");
        return r;
    }
    r.lhs = {rho_spread};
    r.rhs = {0.0};
    finish(r, 1.0);
    const bool flat = max_rho < r.tolerance;
    r.details.emplace_back("branch_ricci_flat", flat ? 1.0 : 0.0);
    r.details.emplace_back("branch_constant_rho", (!flat && r.verdict == Verdict::Pass) ? 1.0 : 0.0);
    r.note = flat ? "Ricci-flat branch" : (r.verdict == Verdict::Pass ? "constant-rho branch" : "neither branch");
    return r;
}

IdentityReport check_bianchi(const MetricModel& model, const std::vector<double>& x, const CheckOptions& opts) {
    require_order("bianchi", min_order::bianchi, opts.order);
    auto r = make_report("bianchi", model, x, tolerance_for("bianchi", model, opts), 0, min_order::bianchi);
    if (!model.flags().riemannian) {
        refuse(r, "the contracted Bianchi identity is checked on Riemannian models only");
        return r;
    }
    r.lhs = contracted_bianchi_riemannian(model, x, opts.order);
    r.rhs.assign(r.lhs.size(), 0.0);
    finish(r, 1.0);
    return r;
}

IdentityReport check_stokes_torus(const MetricModel& model, const CheckOptions& opts) {
    const int n = model.dim();
    const int R = resolution_for(model, opts);
    require_order("stokes", min_order::cartan, opts.order);
    auto r = make_report("stokes", model, {}, tolerance_for("stokes", model, opts), R, min_order::cartan);
    if (!model.flags().periodic) {
        refuse(r, "needs a 2pi-periodic model");
        return r;
    }
    if (!model.flags().positive_definite) {
        refuse(r, "fiber integration needs a positive definite model");
        return r;
    }
    const auto rule = sphere_rule(n, R);
    const int B = opts.base_resolution;
    const double volume = base_integral_torus(
        model, [](const std::vector<double>&, const std::vector<double>&) { return 1.0; }, B, rule);
    // u = sin(x1) y1 / L, integrand u_|0.
    const double horizontal = base_integral_torus(
        model,
        [&](const std::vector<double>& x, const std::vector<double>& y) {
            JetGeometry geo(model, TangentSample{x, y}, min_order::nonlinear_connection);
            Jet u = sin(geo.x(0)) * geo.y(0) * reciprocal(geo.L());
            return geo.dynamical(JetTensor::scalar(std::move(u)), {})[0].value();
        },
        B, rule);
    // div(Y d/dy) for Y^i = sin(x1) F delta^i_1.
    const double vertical = base_integral_torus(
        model,
        [&](const std::vector<double>& x, const std::vector<double>& y) {
            JetGeometry geo(model, TangentSample{x, y}, min_order::cartan);
            const Jet Y1 = sin(geo.x(0)) * geo.F();
            const double y1 = lowered(geo.g().values(), y)[0];
            return Y1.derivative(n).value() + 2.0 * geo.mean_cartan()[0].value() * Y1.value() -
                   n * y1 * Y1.value() / geo.L().value();
        },
        B, rule);
    r.lhs = {horizontal / volume, vertical / volume};
    r.rhs = {0.0, 0.0};
    r.details = {{"torus_volume", volume}, {"horizontal_integral", horizontal}, {"vertical_integral", vertical},
                 {"base_resolution", static_cast<double>(B)}};
    finish(r, 1.0);
    return r;
}

IdentityReport check_section_invariance(const MetricModel& model, const std::vector<double>& x,
                                        const CheckOptions& opts, double lambda) {
    const int R = resolution_for(model, opts);
    require_order("section", min_order::fundamental, opts.order);
    auto r = make_report("section", model, x, tolerance_for("section", model, opts), R, min_order::fundamental);
    if (!model.flags().positive_definite) {
        refuse(r, "fiber integration needs a positive definite model");
        return r;
    }
    const auto rule = sphere_rule(model.dim(), R);
    const double res = section_invariance_check(model, x, rule, lambda);
    r.lhs = {res};
    r.rhs = {0.0};
    r.details = {{"lambda", lambda}};
    finish(r, 1.0);
    return r;
}

// ---------------------------------------------------------------------------
// Algebraic invariants

std::vector<std::pair<std::string, double>> algebraic_invariants(const MetricModel& model, const TangentSample& s) {
    const int n = model.dim();
    const auto nn = static_cast<std::size_t>(n);
    constexpr int K = min_order::landsberg;
    TangentSample s2{s.x, s.y};
    constexpr double lambda = 1.7;
    for (auto& v : s2.y) v *= lambda;
    JetGeometry a(model, s, K), b(model, s2, K);
    std::vector<std::pair<std::string, double>> out;

    auto hom = [&](const std::string& name, const std::vector<double>& f1, const std::vector<double>& f2, int r) {
        const double factor = std::pow(lambda, r);
        double diff = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < f1.size(); ++i) {
            diff = std::max(diff, std::abs(f2[i] - factor * f1[i]));
            scale = std::max(scale, std::abs(factor * f1[i]));
        }
        out.emplace_back("homogeneity_" + name, diff / scale);
    };
    hom("g", a.g().values(), b.g().values(), 0);
    hom("omega", a.hilbert().values(), b.hilbert().values(), 0);
    hom("C", a.cartan().values(), b.cartan().values(), -1);
    hom("C_mean", a.mean_cartan().values(), b.mean_cartan().values(), -1);
    hom("G", a.spray().values(), b.spray().values(), 2);
    hom("N", a.N().values(), b.N().values(), 1);
    hom("Gamma", a.gamma().values(), b.gamma().values(), 0);
    hom("P", a.landsberg().values(), b.landsberg().values(), 0);
    hom("P_mean", a.mean_landsberg().values(), b.mean_landsberg().values(), 0);
    hom("Ric", {a.ricci().value()}, {b.ricci().value()}, 2);

    const Variance co2{Slot::Covariant, Slot::Covariant};
    const Variance contra2{Slot::Contravariant, Slot::Contravariant};
    {
        auto d = a.chern(a.g(), co2).values();
        auto dg = a.delta(a.g()).values();
        out.emplace_back("g_ij|k", max_abs(d) / std::max(1.0, max_abs(dg)));
    }
    {
        auto d = a.chern(a.ginv(), contra2).values();
        auto dg = a.delta(a.ginv()).values();
        out.emplace_back("g^ij|k", max_abs(d) / std::max(1.0, max_abs(dg)));
    }
    {
        const double L0 = a.dynamical(JetTensor::scalar(a.L()), {})[0].value();
        out.emplace_back("L|0", std::abs(L0) / std::max(1.0, a.L().value()));
    }
    const auto C = a.cartan().values();
    const auto P = a.mean_landsberg().values();
    const auto Pt = a.landsberg().values();
    const auto gi = a.ginv().values();
    const auto Gs = a.spray().values();
    const auto Gm = a.gamma().values();
    const auto Nv = a.N().values();
    const auto Cm = a.mean_cartan().values();
    double ynorm = 0.0;
    for (double v : s.y) ynorm = std::max(ynorm, std::abs(v));
    {
        double m = 0.0;
        for (std::size_t i = 0; i < nn; ++i)
            for (std::size_t j = 0; j < nn; ++j) {
                double t = 0.0;
                for (std::size_t k = 0; k < nn; ++k) t += s.y[k] * C[(i * nn + j) * nn + k];
                m = std::max(m, std::abs(t));
            }
        out.emplace_back("y^k C_ijk", m / std::max(1.0, max_abs(C) * ynorm));
    }
    {
        double t = 0.0;
        for (std::size_t i = 0; i < nn; ++i) t += s.y[i] * P[i];
        out.emplace_back("y^i P_i", std::abs(t) / std::max(1.0, max_abs(P) * ynorm));
    }
    {
        // g^ij_.i + 2 C^j with C^j = g^jk C_k.
        const auto gv = a.vertical(a.ginv()).values();
        double m = 0.0, scale = 1.0;
        for (std::size_t j = 0; j < nn; ++j) {
            double div = 0.0, Cj = 0.0;
            for (std::size_t i = 0; i < nn; ++i) div += gv[(i * nn + j) * nn + i];
            for (std::size_t k = 0; k < nn; ++k) Cj += gi[j * nn + k] * Cm[k];
            m = std::max(m, std::abs(div + 2.0 * Cj));
            scale = std::max(scale, std::abs(2.0 * Cj));
        }
        out.emplace_back("g^ij_.i + 2C^j", m / scale);
    }
    {
        double m = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < nn; ++i) {
            double t = 0.0;
            for (std::size_t j = 0; j < nn; ++j)
                for (std::size_t k = 0; k < nn; ++k) t += s.y[j] * s.y[k] * Gm[(i * nn + j) * nn + k];
            m = std::max(m, std::abs(t - 2.0 * Gs[i]));
            scale = std::max(scale, std::abs(2.0 * Gs[i]));
        }
        out.emplace_back("y^j y^k Gamma^i_jk - 2G^i", m / scale);
    }
    {
        double m = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < nn; ++i) {
            double t = 0.0;
            for (std::size_t j = 0; j < nn; ++j) t += Nv[i * nn + j] * s.y[j];
            m = std::max(m, std::abs(t - 2.0 * Gs[i]));
            scale = std::max(scale, std::abs(2.0 * Gs[i]));
        }
        out.emplace_back("N^i_j y^j - 2G^i", m / scale);
    }
    {
        double m = 0.0;
        for (std::size_t i = 0; i < nn; ++i) {
            double t = 0.0;
            for (std::size_t j = 0; j < nn; ++j)
                for (std::size_t k = 0; k < nn; ++k) t += gi[j * nn + k] * Pt[(i * nn + j) * nn + k];
            m = std::max(m, std::abs(t - P[i]));
        }
        out.emplace_back("g^jk P_ijk - P_i", m / std::max(1.0, max_abs(P)));
    }
    {
        const auto w = a.hilbert().values();
        double yw = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < nn; ++i) {
            yw += s.y[i] * w[i];
            for (std::size_t j = 0; j < nn; ++j) norm += gi[i * nn + j] * w[i] * w[j];
        }
        const double F = std::sqrt(a.L().value());
        out.emplace_back("y^i omega_i - F", std::abs(yw - F) / std::max(1.0, F));
        out.emplace_back("g^ij omega_i omega_j - 1", std::abs(norm - 1.0));
    }
    return out;
}

IdentityReport check_invariants(const MetricModel& model, const TangentSample& s, const CheckOptions& opts) {
    require_order("invariants", min_order::landsberg, opts.order);
    auto r = make_report("invariants", model, s.x, tolerance_for("invariants", model, opts), 0, min_order::landsberg);
    for (const auto& [name, v] : algebraic_invariants(model, s)) {
        r.lhs.push_back(v);
        r.rhs.push_back(0.0);
        r.details.emplace_back(name, v);
    }
    finish(r, 1.0);
    return r;
}

// ---------------------------------------------------------------------------
// Classification

ClassificationReport classify(const MetricModel& model, const CheckOptions& opts) {
    require_order("classify", min_order::ricci_hessian, opts.order);
    const auto grid = base_grid(model, opts.grid_points);
    const auto dirs = directions_for(model, opts);
    const auto sv = survey(model, grid, dirs, SurveyFlags{true, false}, opts.classify_tolerance);
    ClassificationReport c;
    c.model = model.name();
    c.einstein.verdict = true;
    for (const auto& p : sv) {
        c.einstein.rho.push_back(p.rho.rho);
        c.einstein.verdict = c.einstein.verdict && is_einstein(p.rho, opts);
        c.einstein.max_deviation = std::max(c.einstein.max_deviation, p.rho.deviation);
        c.weakly_landsberg.max_mean_landsberg = std::max(c.weakly_landsberg.max_mean_landsberg, p.max_mean_landsberg);
        c.berwald_quadratic.max_deviation = std::max(c.berwald_quadratic.max_deviation, p.hessian_deviation);
        c.riemannian.max_cartan = std::max(c.riemannian.max_cartan, p.max_cartan);
    }
    c.einstein.rho_spread = spread(c.einstein.rho);
    c.weakly_landsberg.verdict = c.weakly_landsberg.max_mean_landsberg < opts.classify_tolerance;
    c.berwald_quadratic.verdict = c.berwald_quadratic.max_deviation < opts.classify_tolerance;
    c.riemannian.verdict = c.riemannian.max_cartan < opts.classify_tolerance;
    return c;
}

IdentityReport classification_report(const MetricModel& model, const CheckOptions& opts) {
    const auto c = classify(model, opts);
    auto r = make_report("classify", model, {}, tolerance_for("classify", model, opts), 0, min_order::ricci_hessian);
    r.details = {{"einstein", c.einstein.verdict ? 1.0 : 0.0},
                 {"einstein_deviation", c.einstein.max_deviation},
                 {"rho_mean", c.einstein.rho.empty() ? 0.0 : mean_of(c.einstein.rho)},
                 {"rho_spread", c.einstein.rho_spread},
                 {"weakly_landsberg", c.weakly_landsberg.verdict ? 1.0 : 0.0},
                 {"max_mean_landsberg", c.weakly_landsberg.max_mean_landsberg},
                 {"quadratic_ricci", c.berwald_quadratic.verdict ? 1.0 : 0.0},
                 {"hessian_deviation", c.berwald_quadratic.max_deviation},
                 {"riemannian", c.riemannian.verdict ? 1.0 : 0.0},
                 {"max_cartan", c.riemannian.max_cartan}};
    // Coherence: riemannian implies weakly Landsberg and quadratic Ricci.
    const bool coherent =
        !c.riemannian.verdict || (c.weakly_landsberg.verdict && c.berwald_quadratic.verdict);
    r.lhs = {coherent ? 0.0 : 1.0};
    r.rhs = {0.0};
    finish(r, 1.0);
    if (!coherent) r.note = "classification is incoherent: riemannian without weakly Landsberg / quadratic Ricci";
    return r;
}

}  // namespace finsler
