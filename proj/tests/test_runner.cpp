#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "finsler/error.hpp"
#include "finsler/runner.hpp"

using namespace finsler;
using nlohmann::json;

namespace {

json small_config() {
    return json::parse(R"cfg({
        "metrics": ["funk(2)", {"ref": "sphere_round(3,1)", "resolution": 8}, "euclidean(2)"],
        "checks": ["invariants", {"name": "lemma2", "points": 2, "rho": ["x1", "x1*x2"]}, "section",
                   {"name": "main", "points": 1}, "classify"],
        "resolution": 16, "grid_points": 2, "points": 2
    })cfg");
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("check table") {
    CHECK(check_names().size() == 10);
    CHECK(required_order("lemma2") == 2);
    CHECK(required_order("main") == 7);
    CHECK(required_order("stokes") == 3);
    CHECK_THROWS_AS(required_order("nope"), Error);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(parse_config(json::array()), ParseError);
    CHECK_THROWS_AS(parse_config(json{{"checks", {"lemma2"}}}), ValidationError);
    CHECK_THROWS_AS(parse_config(json{{"metrics", {"funk(2)"}}, {"checks", json::array()}}), ValidationError);
    CHECK_THROWS_AS(parse_config(json{{"metrics", {"funk(2)"}}, {"checks", {"lemma9"}}}), ValidationError);
    CHECK_THROWS_AS(parse_config(json{{"metrics", {42}}, {"checks", {"lemma2"}}}), ParseError);
    CHECK_THROWS_AS(parse_config(json{{"metrics", {"funk(2)"}}, {"checks", {"lemma2"}}, {"order", "seven"}}),
                    ParseError);
    CHECK_THROWS_AS(
        parse_config(json{{"metrics", {"funk(2)"}}, {"checks", {"lemma2"}}, {"tolerances", {{"lemma7", 1e-3}}}}),
        ValidationError);
    CHECK_THROWS_AS(
        parse_config(json{{"metrics", {"funk(2)"}}, {"checks", {"lemma2"}}, {"tolerances", {{"lemma2", -1.0}}}}),
        ValidationError);
    CHECK_THROWS_AS(parse_config(json{{"metrics", {"funk(2)"}}, {"checks", {"lemma2"}}, {"jobs", 0}}),
                    ValidationError);
}

TEST_CASE("order budget is checked before running") {
    try {
        parse_config(json{{"metrics", {"funk(3)"}}, {"checks", {"lemma2", "main"}}, {"order", 4}});
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("main") != std::string::npos);
        CHECK(msg.find("7") != std::string::npos);
    }
    CHECK_NOTHROW(parse_config(json{{"metrics", {"funk(3)"}}, {"checks", {"lemma2", "stokes"}}, {"order", 4}}));
}

TEST_CASE("invalid metrics abort the run") {
    auto c = parse_config(json{{"metrics", {{{"file", "metrics/broken.metric"}}}}, {"checks", {"lemma2"}}},
                          FINSLER_SOURCE_DIR);
    CHECK(c.metrics[0].path == std::string(FINSLER_SOURCE_DIR) + "/metrics/broken.metric");
    CHECK_THROWS_AS(run(c), ValidationError);
    auto d = parse_config(json{{"metrics", {"minkowski_randers(2,0.9,0.9)"}}, {"checks", {"lemma2"}}});
    CHECK_THROWS_AS(run(d), ValidationError);
    auto e = parse_config(json{{"metrics", {{{"dsl", "y1^2 + y2^2"}, {"dim", 2}, {"name", "flat"}}}},
                                {"checks", {"section"}}});
    CHECK(run(e).summary.pass == 3);
}

TEST_CASE("runs are deterministic and independent of the worker count") {
    auto c = parse_config(small_config());
    c.jobs = 1;
    const auto a = run(c);
    c.jobs = 4;
    const auto b = run(c);
    CHECK(report_json(a, false).dump() == report_json(b, false).dump());
    CHECK(report_csv(a) == report_csv(b));
    CHECK(exit_status(a) == 0);
    CHECK(a.summary.fail == 0);
    CHECK(a.summary.pass + a.summary.fail + a.summary.refused == static_cast<int>(a.reports.size()));
    int refused = 0;
    for (const auto& r : a.reports) refused += r.verdict == Verdict::Refused;
    CHECK(refused == a.summary.refused);
}

TEST_CASE("reports are sorted by model, identity and point") {
    const auto rep = run(parse_config(small_config()));
    for (std::size_t i = 1; i < rep.reports.size(); ++i) {
        const auto& p = rep.reports[i - 1];
        const auto& q = rep.reports[i];
        if (p.model == q.model) CHECK(p.identity <= q.identity);
    }
    // 3 models x (2 invariants + 4 lemma2 + 2 section + 1 main + 1 classify)
    CHECK(rep.reports.size() == 30);
}

TEST_CASE("JSON and CSV reports") {
    const auto rep = run(parse_config(small_config()));
    const auto j = json::parse(report_json(rep).dump());
    CHECK(j.at("summary").at("pass").get<int>() == rep.summary.pass);
    CHECK(j.at("summary").contains("wall_time_s"));
    CHECK_FALSE(report_json(rep, false).at("summary").contains("wall_time_s"));
    CHECK(j.at("reports").size() == rep.reports.size());
    const auto& first = j.at("reports").at(0);
    for (const char* key : {"identity", "model", "point", "lhs", "rhs", "abs_residual", "rel_residual", "tolerance",
                            "verdict", "resolution", "order"})
        CHECK(first.contains(key));
    CHECK(j.at("config").at("metrics").size() == 3);
    CHECK_FALSE(j.at("config").contains("jobs"));
    const auto csv = report_csv(rep);
    CHECK(csv.rfind("identity,model,point,lhs,rhs,abs_residual,rel_residual,tolerance,verdict,resolution,order\n", 0) ==
          0);
    CHECK(count_lines(csv) == static_cast<int>(rep.reports.size()) + 1);
}

TEST_CASE("config files") {
    const auto dir = std::filesystem::temp_directory_path() / "finsler_runner_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "c.json";
    {
        std::ofstream out(path);
        out << "// comment\n{\"metrics\": [{\"file\": \"plane.metric\"}], \"checks\": [\"section\"]}\n";
    }
    {
        std::ofstream out(dir / "plane.metric");
        out << "name: plane\ndim: 2\nL: y1^2 + 3*y2^2\n";
    }
    const auto c = load_config(path.string());
    CHECK(c.metrics[0].path == (dir / "plane.metric").string());
    const auto rep = run(c);
    CHECK(rep.reports.at(0).model == "plane");
    CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ParseError);
    {
        std::ofstream out(dir / "bad.json");
        out << "{\"metrics\": [\n";
    }
    CHECK_THROWS_AS(load_config((dir / "bad.json").string()), ParseError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("catalog and descriptions") {
    const auto cat = list_metrics();
    for (const char* name : {"euclidean", "minkowski_randers", "riemannian", "sphere_round", "torus_conformal",
                             "randers", "funk"})
        CHECK(cat.find(name) != std::string::npos);
    for (const auto& name : check_names()) CHECK_FALSE(describe_check(name).empty());
    CHECK_THROWS_AS(describe_check("nope"), Error);
}

TEST_CASE("single checks") {
    SingleOptions o;
    o.resolution = 16;
    const auto r = single("funk(2)", "lemma2", o);
    CHECK(r.verdict == Verdict::Pass);
    REQUIRE(r.point.size() == 2);
    CHECK(r.point[0] == doctest::Approx(0.0));
    o.point = {0.1, 0.2, 0.3};
    CHECK_THROWS_AS(single("funk(2)", "lemma2", o), DimensionError);
    o.point = {0.1, 0.2};
    o.order = 4;
    CHECK_THROWS_AS(single("funk(2)", "main", o), OrderBudgetError);
    CHECK_THROWS_AS(single("funk(2)", "nope", SingleOptions{}), Error);
    const auto text = format_report(r);
    CHECK(text.find("lemma2") != std::string::npos);
    CHECK(text.find("pass") != std::string::npos);
}
