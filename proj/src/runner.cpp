#include "finsler/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "finsler/error.hpp"
#include "finsler/parallel.hpp"

namespace finsler {

using nlohmann::json;

namespace {

struct CheckInfo {
    const char* name;
    int order;
    bool pointwise;
    const char* text;
};

const std::vector<CheckInfo>& check_table() {
    static const std::vector<CheckInfo> table = {
        {"lemma2", min_order::fundamental, true,
         "lemma2: for any base function rho, the gradient d_i rho(x) times the fiber volume equals\n"
         "n times the fiber integral of (y^a d_a rho) y_i / F^2. Holds for every positive definite\n"
         "metric and every rho; a failure points at quadrature or implementation error.\n"
         "Parameters: rho (expression in x1..xn), point, resolution."},
        {"lemma1", min_order::lemma1_integrand, true,
         "lemma1: the fiber integral of {g^ab Ric_.a.b - (n+2) Ric / F^2}_|0 y_i / F^2 equals\n"
         "-2 times the fiber integral of P_|0 y_i / F^2, where P = g^ij (P_i|j - P_i P_j + P_i|0.j)\n"
         "is built from the mean Landsberg tensor. Holds pointwise in x for every Finsler metric,\n"
         "Einstein or not. The unfolded right-hand side g^ab (...)_|0 is reported alongside.\n"
         "Needs jet order 7."},
        {"main", min_order::pfrak_dyn, true,
         "main: for an Einstein metric Ric = rho(x) L, (n-2) d_i rho = -2n <P_|0 omega>_i, the\n"
         "fiber average of P_|0 times the Hilbert form. d rho comes from a 5-point stencil on\n"
         "direction-averaged Ric / F^2. Non-Einstein models are refused. Needs jet order 7."},
        {"schur", min_order::schur, false,
         "schur: in dimension n >= 3 an Einstein metric that is weakly Landsberg (P_i = 0), or\n"
         "whose Schur scalar P_|0 vanishes, has constant rho. Checked as the spread of rho over\n"
         "the base grid. Both forms of the Schur scalar are evaluated and logged; the verdict\n"
         "uses P_|0. Models outside the hypothesis are refused. Needs jet order 7."},
        {"berwald", min_order::ricci_hessian, false,
         "berwald: in dimension n >= 3 an Einstein metric with quadratic Ricci scalar (vertical\n"
         "Hessian of Ric independent of direction) is either Ricci-flat or has constant rho.\n"
         "Reports the branch; non-quadratic models are refused. Needs jet order 6."},
        {"bianchi", min_order::bianchi, true,
         "bianchi: contracted second Bianchi identity nabla_j (ric^ji - S g^ji / 2) = 0 for\n"
         "Riemannian models, through the full jet pipeline. Needs jet order 7."},
        {"stokes", min_order::cartan, false,
         "stokes: on a 2pi-periodic model the torus integrals of u_|0 (u = sin(x1) y1 / L) and of\n"
         "the vertical divergence of Y = sin(x1) F d/dy1 vanish, normalized by the torus volume."},
        {"invariants", min_order::landsberg, true,
         "invariants: exact pointwise identities: homogeneity degrees of every object, g_ij|k = 0,\n"
         "g^ij|k = 0, L_|0 = 0, y^k C_ijk = 0, y^i P_i = 0, g^ij_.i = -2 C^j, y^j y^k Gamma^i_jk = 2 G^i,\n"
         "N^i_j y^j = 2 G^i, g^jk P_ijk = P_i and the unit norm of the Hilbert form."},
        {"section", min_order::fundamental, true,
         "section: the fiber volume computed on the section y = 2u agrees with the unit-sphere\n"
         "value (the contracted volume form is scale invariant)."},
        {"classify", min_order::ricci_hessian, false,
         "classify: Einstein (direction spread of Ric / F^2 below tolerance at every grid point),\n"
         "weakly Landsberg, quadratic Ricci scalar and Riemannian flags over the base grid.\n"
         "Passes unless the flags are incoherent (Riemannian without the other two)."},
    };
    return table;
}

const CheckInfo& info(const std::string& name) {
    for (const auto& c : check_table())
        if (name == c.name) return c;
    throw Error("unknown check '" + name + "'; known checks: lemma2, lemma1, main, schur, berwald, bianchi, "
                "stokes, invariants, section, classify");
}

double round12(double v) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

json rounded(const std::vector<double>& v) {
    json a = json::array();
    for (double e : v) a.push_back(round12(e));
    return a;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("config key '") + key + "': " + e.what());
    }
}

MetricEntry parse_metric(const json& j) {
    MetricEntry m;
    if (j.is_string()) {
        m.ref = j.get<std::string>();
        return m;
    }
    if (!j.is_object()) throw ParseError("metric entries are strings or objects");
    if (j.contains("ref")) {
        m.ref = j.at("ref").get<std::string>();
    } else if (j.contains("dsl")) {
        m.kind = MetricEntry::Kind::Dsl;
        m.ref = j.at("dsl").get<std::string>();
        m.dim = get_or<int>(j, "dim", 0);
        m.name = get_or<std::string>(j, "name", "dsl");
        if (j.contains("domain")) m.domain = j.at("domain").get<std::string>();
        if (m.dim < 2 || m.dim > 4) throw ValidationError("DSL metric '" + m.name + "' needs dim in {2, 3, 4}");
    } else if (j.contains("file")) {
        m.kind = MetricEntry::Kind::File;
        m.ref = j.at("file").get<std::string>();
    } else {
        throw ParseError("metric entry needs one of 'ref', 'dsl' or 'file'");
    }
    if (j.contains("resolution")) m.resolution = j.at("resolution").get<int>();
    if (j.contains("grid_points")) m.grid_points = j.at("grid_points").get<int>();
    if (j.contains("base_resolution")) m.base_resolution = j.at("base_resolution").get<int>();
    return m;
}

MetricModel build(const MetricEntry& e) {
    switch (e.kind) {
        case MetricEntry::Kind::Dsl: return parse_metric_dsl(e.ref, e.dim, e.name, e.domain);
        case MetricEntry::Kind::File: return load_metric_declaration(e.path.empty() ? e.ref : e.path);
        case MetricEntry::Kind::Reference: break;
    }
    return metric_from_reference(e.ref);
}

std::vector<double> box_centre(const MetricModel& m) {
    std::vector<double> x;
    for (std::size_t i = 0; i < m.box().lo.size(); ++i) x.push_back(0.5 * (m.box().lo[i] + m.box().hi[i]));
    return x;
}

struct Unit {
    std::size_t model;
    std::string check;
    std::size_t point;
    std::size_t rho;
};

}  // namespace

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& c : check_table()) v.emplace_back(c.name);
        return v;
    }();
    return names;
}

int required_order(const std::string& check) { return info(check).order; }

RunConfig parse_config(const json& j, const std::string& base_dir) {
    if (!j.is_object()) throw ParseError("config must be a JSON object");
    RunConfig c;
    if (!j.contains("metrics") || !j.at("metrics").is_array() || j.at("metrics").empty())
        throw ValidationError("config needs a non-empty 'metrics' array");
    for (const auto& m : j.at("metrics")) {
        auto e = parse_metric(m);
        if (e.kind == MetricEntry::Kind::File) {
            std::filesystem::path p(e.ref);
            e.path = (p.is_relative() && !base_dir.empty()) ? (std::filesystem::path(base_dir) / p).string() : e.ref;
        }
        c.metrics.push_back(std::move(e));
    }
    if (!j.contains("checks") || !j.at("checks").is_array() || j.at("checks").empty())
        throw ValidationError("config needs a non-empty 'checks' array");
    for (const auto& e : j.at("checks")) {
        CheckEntry ce;
        if (e.is_string()) {
            ce.name = e.get<std::string>();
        } else if (e.is_object()) {
            ce.name = get_or<std::string>(e, "name", "");
            if (e.contains("points")) ce.points = e.at("points").get<int>();
            if (e.contains("rho")) ce.rho = e.at("rho").get<std::vector<std::string>>();
        } else {
            throw ParseError("check entries are strings or objects");
        }
        try {
            info(ce.name);
        } catch (const Error& err) {
            throw ValidationError(err.what());
        }
        c.checks.push_back(std::move(ce));
    }
    c.order = get_or<int>(j, "order", c.order);
    c.resolution = get_or<int>(j, "resolution", c.resolution);
    c.grid_points = get_or<int>(j, "grid_points", c.grid_points);
    c.base_resolution = get_or<int>(j, "base_resolution", c.base_resolution);
    c.points = get_or<int>(j, "points", c.points);
    c.einstein_tolerance = get_or<double>(j, "einstein_tolerance", c.einstein_tolerance);
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.jobs = get_or<int>(j, "jobs", c.jobs);
    if (j.contains("tolerances")) {
        for (const auto& [k, v] : j.at("tolerances").items()) {
            if (std::find(check_names().begin(), check_names().end(), k) == check_names().end())
                throw ValidationError("tolerance given for unknown check '" + k + "'");
            if (!v.is_number()) throw ParseError("tolerance for '" + k + "' must be a number");
            c.tolerances.emplace_back(k, v.get<double>());
        }
    }
    if (j.contains("output")) {
        c.json_path = get_or<std::string>(j.at("output"), "json", "");
        c.csv_path = get_or<std::string>(j.at("output"), "csv", "");
    }

    if (c.order < 2 || c.order > kMaxOrder)
        throw ValidationError("jet order must be in [2, " + std::to_string(kMaxOrder) + "]");
    for (const auto& ce : c.checks) {
        const int need = info(ce.name).order;
        if (c.order < need)
            throw ValidationError("jet order " + std::to_string(c.order) + " cannot support check '" + ce.name +
                                  "': it needs order " + std::to_string(need) +
                                  " (every derivative of the Landsberg chain costs one order)");
    }
    for (const auto& [k, v] : c.tolerances)
        if (!(v > 0.0)) throw ValidationError("tolerance for '" + k + "' must be positive");
    if (!(c.einstein_tolerance > 0.0)) throw ValidationError("einstein_tolerance must be positive");
    if (c.points < 1) throw ValidationError("points must be >= 1");
    if (c.grid_points < 1) throw ValidationError("grid_points must be >= 1");
    if (c.jobs < 1) throw ValidationError("jobs must be >= 1");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ParseError("config '" + path + "': " + e.what(), e.byte);
    }
    return parse_config(j, std::filesystem::path(path).parent_path().string());
}

json config_echo(const RunConfig& c) {
    json metrics = json::array();
    for (const auto& m : c.metrics) {
        json e;
        switch (m.kind) {
            case MetricEntry::Kind::Reference: e["ref"] = m.ref; break;
            case MetricEntry::Kind::File: e["file"] = m.ref; break;
            case MetricEntry::Kind::Dsl:
                e["dsl"] = m.ref;
                e["dim"] = m.dim;
                e["name"] = m.name;
                if (m.domain) e["domain"] = *m.domain;
                break;
        }
        if (m.resolution) e["resolution"] = *m.resolution;
        if (m.grid_points) e["grid_points"] = *m.grid_points;
        if (m.base_resolution) e["base_resolution"] = *m.base_resolution;
        metrics.push_back(e);
    }
    json checks = json::array();
    for (const auto& ce : c.checks) {
        json e{{"name", ce.name}};
        if (ce.points) e["points"] = *ce.points;
        if (!ce.rho.empty()) e["rho"] = ce.rho;
        checks.push_back(e);
    }
    json tol = json::object();
    for (const auto& [k, v] : c.tolerances) tol[k] = v;
    return json{{"metrics", metrics},
                {"checks", checks},
                {"order", c.order},
                {"resolution", c.resolution},
                {"grid_points", c.grid_points},
                {"base_resolution", c.base_resolution},
                {"points", c.points},
                {"tolerances", tol},
                {"einstein_tolerance", c.einstein_tolerance},
                {"seed", c.seed}};
}

RunReport run(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<MetricModel> models;
    for (const auto& e : config.metrics) {
        try {
            models.push_back(build(e));
        } catch (const ValidationError&) {
            throw;
        } catch (const Error& err) {
            throw ValidationError("metric '" + e.ref + "': " + err.what());
        }
    }

    // Base points are drawn once per model so every pointwise check sees the same ones.
    std::vector<std::vector<TangentSample>> samples(models.size());
    int max_points = 1;
    for (const auto& ce : config.checks) max_points = std::max(max_points, ce.points.value_or(config.points));
    for (std::size_t m = 0; m < models.size(); ++m) samples[m] = domain_sample(models[m], max_points, config.seed);

    std::vector<Unit> units;
    for (std::size_t m = 0; m < models.size(); ++m) {
        for (const auto& ce : config.checks) {
            const auto& ci = info(ce.name);
            const std::size_t npts = ci.pointwise ? static_cast<std::size_t>(ce.points.value_or(config.points)) : 1;
            const std::size_t nrho = ce.name == "lemma2" ? std::max<std::size_t>(1, ce.rho.size()) : 1;
            for (std::size_t p = 0; p < npts; ++p)
                for (std::size_t r = 0; r < nrho; ++r) units.push_back({m, ce.name, p, r});
        }
    }

    std::map<std::string, std::vector<std::string>> rho_lists;
    for (const auto& ce : config.checks)
        if (ce.name == "lemma2") rho_lists[ce.name] = ce.rho.empty() ? std::vector<std::string>{"x1"} : ce.rho;

    std::vector<IdentityReport> reports(units.size());
    parallel_for(
        units.size(),
        [&](std::size_t k) {
            const Unit& u = units[k];
            const MetricModel& model = models[u.model];
            const MetricEntry& entry = config.metrics[u.model];
            CheckOptions o;
            o.order = config.order;
            o.resolution = entry.resolution.value_or(config.resolution);
            o.grid_points = entry.grid_points.value_or(config.grid_points);
            o.base_resolution = entry.base_resolution.value_or(config.base_resolution);
            o.einstein_tolerance = config.einstein_tolerance;
            o.seed = config.seed;
            for (const auto& [name, v] : config.tolerances)
                if (name == u.check) o.tolerance = v;
            const TangentSample& s = samples[u.model][u.point];
            IdentityReport r;
            try {
                if (u.check == "lemma2") {
                    const auto& src = rho_lists.at("lemma2")[u.rho];
                    r = check_lemma2(model, MetricExpr::parse(src, model.dim()), s.x, o);
                    r.note = "rho = " + src + (r.note.empty() ? "" : "; " + r.note);
                } else if (u.check == "lemma1") {
                    r = check_lemma1(model, s.x, o);
                } else if (u.check == "main") {
                    r = check_main_theorem(model, s.x, o);
                } else if (u.check == "schur") {
                    r = check_schur_corollary(model, o);
                } else if (u.check == "berwald") {
                    r = check_berwald_theorem(model, o);
                } else if (u.check == "bianchi") {
                    r = check_bianchi(model, s.x, o);
                } else if (u.check == "stokes") {
                    r = check_stokes_torus(model, o);
                } else if (u.check == "invariants") {
                    r = check_invariants(model, s, o);
                } else if (u.check == "section") {
                    r = check_section_invariance(model, s.x, o);
                } else {
                    r = classification_report(model, o);
                }
            } catch (const DomainError& e) {
                r.identity = u.check;
                r.model = model.name();
                r.point = info(u.check).pointwise ? s.x : std::vector<double>{};
                r.order = config.order;
                r.verdict = Verdict::Refused;
                r.note = e.what();
            }
            reports[k] = std::move(r);
        },
        config.jobs);

    // Units are already in (model, check, point, rho) config order; the stable
    // sort below only reorders by name.
    std::vector<std::size_t> idx(units.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = reports[a];
        const auto& rb = reports[b];
        if (ra.model != rb.model) return ra.model < rb.model;
        if (ra.identity != rb.identity) return ra.identity < rb.identity;
        if (units[a].point != units[b].point) return units[a].point < units[b].point;
        return units[a].rho < units[b].rho;
    });

    RunReport out;
    out.config = config_echo(config);
    for (std::size_t i : idx) {
        switch (reports[i].verdict) {
            case Verdict::Pass: ++out.summary.pass; break;
            case Verdict::Fail: ++out.summary.fail; break;
            case Verdict::Refused: ++out.summary.refused; break;
        }
        out.reports.push_back(std::move(reports[i]));
    }
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

int exit_status(const RunReport& report) { return report.summary.fail == 0 ? 0 : 1; }

json report_json(const IdentityReport& r) {
    json d = json::object();
    for (const auto& [k, v] : r.details) d[k] = round12(v);
    return json{{"identity", r.identity},
                {"model", r.model},
                {"point", rounded(r.point)},
                {"lhs", rounded(r.lhs)},
                {"rhs", rounded(r.rhs)},
                {"abs_residual", round12(r.abs_residual)},
                {"rel_residual", round12(r.rel_residual)},
                {"tolerance", r.tolerance},
                {"verdict", to_string(r.verdict)},
                {"resolution", r.resolution},
                {"order", r.order},
                {"note", r.note},
                {"details", d}};
}

json report_json(const RunReport& report, bool with_timing) {
    json reports = json::array();
    for (const auto& r : report.reports) reports.push_back(report_json(r));
    json summary{{"pass", report.summary.pass}, {"fail", report.summary.fail}, {"refused", report.summary.refused}};
    if (with_timing) summary["wall_time_s"] = round12(report.wall_time);
    return json{{"version", FINSLER_VERSION}, {"config", report.config}, {"reports", reports}, {"summary", summary}};
}

std::string report_csv(const RunReport& report) {
    auto join = [](const std::vector<double>& v) {
        std::string s;
        char buf[32];
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.12g", v[i]);
            s += (i ? ";" : "");
            s += buf;
        }
        return s;
    };
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    };
    std::ostringstream os;
    os << "identity,model,point,lhs,rhs,abs_residual,rel_residual,tolerance,verdict,resolution,order\n";
    char buf[96];
    for (const auto& r : report.reports) {
        os << r.identity << ',' << quote(r.model) << ',' << quote(join(r.point)) << ',' << quote(join(r.lhs)) << ','
           << quote(join(r.rhs)) << ',';
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g", r.abs_residual, r.rel_residual, r.tolerance);
        os << buf << ',' << to_string(r.verdict) << ',' << r.resolution << ',' << r.order << '\n';
    }
    return os.str();
}

std::string list_metrics() {
    std::string out;
    for (const auto& line : builtin_catalog()) out += line + "\n";
    out += "Custom metrics: a metric file with 'name:', 'dim:', 'L:' and optional 'domain:', 'flags:', 'box:' lines.\n";
    return out;
}

std::string describe_check(const std::string& name) {
    const auto& c = info(name);
    return std::string(c.text) + "\n";
}

IdentityReport single(const std::string& metric_ref, const std::string& check, const SingleOptions& so) {
    const auto& ci = info(check);
    require_order(check, ci.order, so.order);
    const MetricModel model = metric_from_reference(metric_ref);
    CheckOptions o;
    o.resolution = so.resolution;
    o.order = so.order;
    o.tolerance = so.tolerance;
    o.seed = so.seed;
    std::vector<double> x = so.point.empty() ? box_centre(model) : so.point;
    if (static_cast<int>(x.size()) != model.dim())
        throw DimensionError("point has " + std::to_string(x.size()) + " coordinates, model dimension is " +
                             std::to_string(model.dim()));
    if (check == "lemma2") {
        auto r = check_lemma2(model, MetricExpr::parse(so.rho, model.dim()), x, o);
        r.note = "rho = " + so.rho + (r.note.empty() ? "" : "; " + r.note);
        return r;
    }
    if (check == "lemma1") return check_lemma1(model, x, o);
    if (check == "main") return check_main_theorem(model, x, o);
    if (check == "schur") return check_schur_corollary(model, o);
    if (check == "berwald") return check_berwald_theorem(model, o);
    if (check == "bianchi") return check_bianchi(model, x, o);
    if (check == "stokes") return check_stokes_torus(model, o);
    if (check == "section") return check_section_invariance(model, x, o);
    if (check == "invariants") {
        auto y = random_directions(model.dim(), 1, so.seed)[0];
        return check_invariants(model, TangentSample{x, y}, o);
    }
    return classification_report(model, o);
}

std::string format_report(const IdentityReport& r) {
    std::ostringstream os;
    os.precision(12);
    os << r.identity << " on " << r.model << ": " << to_string(r.verdict) << "\n";
    if (!r.point.empty()) {
        os << "  point        ";
        for (double v : r.point) os << ' ' << v;
        os << "\n";
    }
    for (std::size_t i = 0; i < r.lhs.size(); ++i)
        os << "  [" << i << "] lhs " << r.lhs[i] << "  rhs " << r.rhs[i] << "  diff " << r.lhs[i] - r.rhs[i] << "\n";
    if (r.verdict != Verdict::Refused) {
        os << "  abs residual " << r.abs_residual << "\n";
        os << "  rel residual " << r.rel_residual << " (scale " << r.scale << ", tolerance " << r.tolerance << ")\n";
    }
    if (r.resolution > 0) os << "  resolution   " << r.resolution << "\n";
    os << "  jet order    " << r.order << "\n";
    for (const auto& [k, v] : r.details) os << "  " << k << " = " << v << "\n";
    if (!r.note.empty()) os << "  note: " << r.note << "\n";
    return os.str();
}

}  // namespace finsler
