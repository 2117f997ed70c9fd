#pragma once

// Config-driven batteries of identity checks and their reports.
//
// Config (JSON):
//   {
//     "metrics": [ "funk(3)" | {"ref": "sphere_round(4,1)", "resolution": 12, "grid_points": 3}
//                | {"dsl": "y1^2 + y2^2", "dim": 2, "name": "flat"} | {"file": "../metrics/x.metric"} ],
//     "checks":  [ "lemma1" | {"name": "lemma2", "points": 5, "rho": ["x1", "sin(x1)"]} ],
//     "order": 7, "resolution": 0, "grid_points": 5, "base_resolution": 16, "points": 3,
//     "tolerances": {"lemma1": 1e-5}, "einstein_tolerance": 1e-6, "seed": 20240611,
//     "jobs": 1, "output": {"json": "report.json", "csv": "report.csv"}
//   }

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finsler/identities.hpp"
#include "json.hpp"

namespace finsler {

struct MetricEntry {
    std::string ref;  // builtin reference, DSL source or file path as written
    std::string path;  // file path resolved against the config directory
    enum class Kind { Reference, Dsl, File } kind = Kind::Reference;
    int dim = 0;      // DSL only
    std::string name;
    std::optional<std::string> domain;
    std::optional<int> resolution;
    std::optional<int> grid_points;
    std::optional<int> base_resolution;
};

struct CheckEntry {
    std::string name;
    std::optional<int> points;
    std::vector<std::string> rho;
};

struct RunConfig {
    std::vector<MetricEntry> metrics;
    std::vector<CheckEntry> checks;
    int order = kDefaultJetOrder;
    int resolution = 0;
    int grid_points = 5;
    int base_resolution = 16;
    int points = 3;
    std::vector<std::pair<std::string, double>> tolerances;
    double einstein_tolerance = 1e-6;
    std::uint64_t seed = 20240611;
    int jobs = 1;
    std::string json_path;
    std::string csv_path;
};

/// Names accepted in "checks".
const std::vector<std::string>& check_names();
/// Jet order a check needs.
int required_order(const std::string& check);

/// Parses and validates a config (ParseError / ValidationError). Relative
/// metric file paths are resolved against `base_dir`.
RunConfig parse_config(const nlohmann::json& j, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);
/// The config as JSON without execution settings (jobs, output paths).
nlohmann::json config_echo(const RunConfig& c);

struct RunSummary {
    int pass = 0;
    int fail = 0;
    int refused = 0;
};

struct RunReport {
    nlohmann::json config;
    std::vector<IdentityReport> reports;
    RunSummary summary;
    double wall_time = 0.0;
};

/// Builds every model (ValidationError on bad metrics), runs the battery and
/// sorts reports by model, identity and point index.
RunReport run(const RunConfig& config);

/// Exit status of a finished run: 0 when nothing failed, 1 otherwise.
int exit_status(const RunReport& report);

/// Report JSON with numbers rounded to 12 significant digits. The wall time
/// is included only when `with_timing` is set.
nlohmann::json report_json(const RunReport& report, bool with_timing = true);
nlohmann::json report_json(const IdentityReport& r);
std::string report_csv(const RunReport& report);

/// Catalog of built-in metric families.
std::string list_metrics();
/// Description of a check; throws Error for unknown names.
std::string describe_check(const std::string& name);

struct SingleOptions {
    std::vector<double> point;
    std::string rho = "x1";
    int resolution = 0;
    int order = kDefaultJetOrder;
    double tolerance = 0.0;
    std::uint64_t seed = 20240611;
};

/// One check on one model; the point defaults to the centre of the model box.
IdentityReport single(const std::string& metric_ref, const std::string& check, const SingleOptions& opts);
/// Human-readable residual breakdown.
std::string format_report(const IdentityReport& r);

}  // namespace finsler
