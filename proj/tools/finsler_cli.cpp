// Command-line front end: run a config battery, run one check, or inspect
// the catalog.
//
//   finsler-cli run configs/identity_battery.json --jobs 4 --json out.json --csv out.csv
//   finsler-cli single "funk(3)" main --point 0.2,0,0
//   finsler-cli list-metrics
//   finsler-cli describe-check lemma1
//
// Exit status: 0 all checks passed or were refused, 1 a check failed,
// 2 bad input (config, metric, arguments).

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "finsler/error.hpp"
#include "finsler/parallel.hpp"
#include "finsler/runner.hpp"

namespace {

std::vector<double> parse_point(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos)
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw finsler::ParseError("bad coordinate '" + item + "' in --point");
        }
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw finsler::Error("cannot write '" + path + "'");
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks of Finsler integral identities"};
    app.require_subcommand(1);
    app.set_version_flag("--version", FINSLER_VERSION);

    auto* run_cmd = app.add_subcommand("run", "Run the checks listed in a JSON config");
    std::string config_path, json_path, csv_path;
    int jobs = 0;
    std::uint64_t seed = 0;
    bool quiet = false;
    run_cmd->add_option("config", config_path, "Config file")->required();
    run_cmd->add_option("--jobs,-j", jobs, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
    run_cmd->add_option("--json", json_path, "JSON report path (overrides the config)");
    run_cmd->add_option("--csv", csv_path, "CSV summary path (overrides the config)");
    run_cmd->add_option("--seed", seed, "Random seed (overrides the config)");
    run_cmd->add_flag("--quiet,-q", quiet, "Only print the summary line");

    auto* single_cmd = app.add_subcommand("single", "Run one check on one metric");
    std::string metric_ref, check_name, point_text;
    finsler::SingleOptions so;
    single_cmd->add_option("metric", metric_ref, "Built-in reference such as funk(3), or a metric file")->required();
    single_cmd->add_option("check", check_name, "Check name (see describe-check)")->required();
    single_cmd->add_option("--point", point_text, "Base point, comma separated");
    single_cmd->add_option("--rho", so.rho, "Base function for lemma2");
    single_cmd->add_option("--resolution", so.resolution, "Sphere rule resolution (0: default)");
    single_cmd->add_option("--order", so.order, "Jet order budget");
    single_cmd->add_option("--tolerance", so.tolerance, "Relative tolerance (0: check default)");
    single_cmd->add_option("--seed", so.seed, "Random seed");

    app.add_subcommand("list-metrics", "List the built-in metric families");

    auto* describe_cmd = app.add_subcommand("describe-check", "Describe an identity check");
    std::string describe_name;
    describe_cmd->add_option("name", describe_name, "Check name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*run_cmd) {
            auto config = finsler::load_config(config_path);
            if (jobs > 0) config.jobs = jobs;
            if (run_cmd->count("--seed")) config.seed = seed;
            if (!json_path.empty()) config.json_path = json_path;
            if (!csv_path.empty()) config.csv_path = csv_path;
            finsler::set_default_jobs(config.jobs);
            const auto report = finsler::run(config);
            if (!config.json_path.empty()) write_file(config.json_path, finsler::report_json(report).dump(2) + "\n");
            if (!config.csv_path.empty()) write_file(config.csv_path, finsler::report_csv(report));
            if (!quiet) {
                for (const auto& r : report.reports) {
                    if (r.verdict == finsler::Verdict::Pass) continue;
                    std::cout << finsler::to_string(r.verdict) << ": " << r.identity << " on " << r.model;
                    if (!r.note.empty()) std::cout << " (" << r.note << ")";
                    std::cout << "\n";
                }
            }
            std::cout << "pass " << report.summary.pass << ", fail " << report.summary.fail << ", refused "
                      << report.summary.refused << " in " << report.wall_time << " s\n";
            return finsler::exit_status(report);
        }
        if (*single_cmd) {
            if (!point_text.empty()) so.point = parse_point(point_text);
            const auto r = finsler::single(metric_ref, check_name, so);
            std::cout << finsler::format_report(r);
            return r.verdict == finsler::Verdict::Fail ? 1 : 0;
        }
        if (*describe_cmd) {
            std::cout << finsler::describe_check(describe_name);
            return 0;
        }
        std::cout << finsler::list_metrics();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
