#include "fracbesov/config.hpp"
#include "fracbesov/corpus.hpp"
#include "fracbesov/errors.hpp"
#include "fracbesov/suites.hpp"
#include "fracbesov/svg.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

using namespace fracbesov;

TEST_CASE("config round trip and validation") {
    ExperimentConfig cfg;
    cfg.suites = {"hardy", "roundtrip"};
    const ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
    CHECK(back.to_json() == cfg.to_json());

    nlohmann::json j = cfg.to_json();
    j["suites"] = {"hardy", "no_such_suite"};
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);

    j = cfg.to_json();
    j["colour"] = "blue";
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);

    // alpha below (n - d) / p = 0.369 with a trace suite selected.
    j = cfg.to_json();
    j["params"]["alpha"] = 0.2;
    j["roundtrip_params"] = nlohmann::json::array();
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
    j["suites"] = {"hardy"};
    CHECK_NOTHROW(ExperimentConfig::from_json(j));

    j = cfg.to_json();
    j["ifs"]["depth"] = 0;
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
}

TEST_CASE("config file loading") {
    const auto path = std::filesystem::temp_directory_path() / "fracbesov_cfg.json";
    {
        std::ofstream out(path);
        out << R"({"ifs": {"ratio": 0.25, "depth": 3}, "seed": 9, "suites": []})";
    }
    const ExperimentConfig cfg = ExperimentConfig::load(path.string());
    CHECK(cfg.ifs.ratio == 0.25);
    CHECK(cfg.ifs.depth == 3);
    CHECK(cfg.seed == 9);
    CHECK(cfg.ifs.translations.size() == 4);
    CHECK(cfg.ifs.translations[3][0] == doctest::Approx(0.75));
    CHECK_THROWS_AS(ExperimentConfig::load((path.string() + ".missing")), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("corpus composition and determinism") {
    const IfsSpec ifs = IfsSpec::four_corner_cantor(5);
    const auto a = make_corpus(20, 3, ifs);
    const auto b = make_corpus(20, 3, ifs);
    REQUIRE(a.size() == 20);
    const Point x = (Point(2) << 0.3, 0.7).finished();
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].name == b[i].name);
        CHECK(a[i].eval(x) == b[i].eval(x));
    }
    CHECK(a[0].kind == "constant");
    CHECK(a[0].eval(x) == a[0].eval(Point::Zero(2)));
    // Affine maps have zero second differences.
    const Point h = (Point(2) << 0.01, -0.02).finished();
    CHECK(a[1].eval(x + h) - 2 * a[1].eval(x) + a[1].eval(x - h) == doctest::Approx(0.0).epsilon(1e-12));
    int tents = 0;
    for (const auto& f : a) {
        if (f.kind != "tent") continue;
        ++tents;
        CHECK(f.lipschitz == 1.0);
        CHECK(std::abs(f.eval(x + h) - f.eval(x)) <= 0.02 + 1e-12);
    }
    CHECK(tents == 6);
    const auto lip = lipschitz_subset(a);
    CHECK(lip.size() == 10);
    for (const auto& f : lip) {
        // Difference quotients never exceed the claimed bound.
        const Point y = (Point(2) << 0.61, 0.05).finished();
        CHECK(std::abs(f.eval(x) - f.eval(y)) <= f.lipschitz * sup_dist(x, y) + 1e-12);
    }
    CHECK(make_corpus(3, 3, ifs).size() == 3);
    CHECK(make_corpus(20, 4, ifs)[1].eval(x) != a[1].eval(x));

    // Tent centres do not move with the depth of the atom cloud.
    const auto deep = make_corpus(20, 3, IfsSpec::four_corner_cantor(6));
    CHECK(deep[5].eval(x) == a[5].eval(x));
}

TEST_CASE("empty suite list") {
    ExperimentConfig cfg;
    const SuiteReport rep = run(cfg);
    CHECK(rep.records.empty());
    CHECK(rep.ok());
}

TEST_CASE("hardy suite: two passing records") {
    ExperimentConfig cfg;
    cfg.suites = {"hardy"};
    const SuiteReport rep = run(cfg);
    REQUIRE(rep.records.size() == 2);
    CHECK(rep.records[0].name == "hardy_prefix");
    CHECK(rep.records[1].name == "hardy_tail");
    CHECK(rep.records[0].details["sigma"] == -1.0);
    CHECK(rep.records[1].details["sigma"] == 1.0);
    for (const auto& r : rep.records) {
        CHECK(r.status == Status::pass);
        CHECK(std::isfinite(r.measured_constant));
        CHECK(r.measured_constant >= 1.0);
    }
    CHECK(rep.ok());

    // Report determinism apart from runtimes.
    const SuiteReport again = run(cfg);
    CHECK(again.to_json(false).dump() == rep.to_json(false).dump());
}

TEST_CASE("unknown suite fails before computation") {
    ExperimentConfig cfg;
    cfg.suites = {"hardy", "bogus"};
    CHECK_THROWS_AS(run(cfg), ConfigError);
    CHECK_THROWS_AS(run_suite("bogus", cfg), ConfigError);
}

TEST_CASE("report status and criteria mapping") {
    SuiteReport rep;
    rep.records.push_back({"a", Status::pass});
    rep.records.push_back({"b", Status::report_only});
    rep.records.push_back({"c", Status::vacuous});
    CHECK(rep.ok());
    rep.records.push_back({"d", Status::fail});
    CHECK_FALSE(rep.ok());
    CHECK(rep.find("b")->status == Status::report_only);
    CHECK(rep.find("zz") == nullptr);
    CHECK(to_string(Status::report_only) == "report-only");

    std::set<std::string> names;
    const auto& crit = acceptance_criteria();
    CHECK(crit.size() == 10);
    for (const auto& c : crit) {
        for (const auto& n : c.records) CHECK(names.insert(n).second);
    }
}

TEST_CASE("reference suite") {
    ExperimentConfig cfg;
    cfg.ifs.depth = 3;
    const SuiteReport rep = run_suite("reference", cfg);
    REQUIRE(rep.records.size() == 1);
    CHECK(rep.records[0].status == Status::pass);
    CHECK(rep.records[0].measured_constant <= 1e-9);
}

TEST_CASE("report files") {
    ExperimentConfig cfg;
    cfg.suites = {"hardy"};
    const auto dir = std::filesystem::temp_directory_path() / "fracbesov_report_test";
    std::filesystem::remove_all(dir);
    write_report(run(cfg), dir.string());
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "hardy_prefix_ratios.svg"));
    std::ifstream in(dir / "report.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j["records"].size() == 2);
    CHECK(j["records"][0].contains("runtime"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("svg writers") {
    const std::string line = line_plot_svg("t <x>", "j", "v", {{"a", {{0, 1.0}, {1, 0.5}, {2, 0.0}}}}, true);
    CHECK(line.find("<svg") == 0);
    CHECK(line.find("t &lt;x&gt;") != std::string::npos);
    CHECK(line.find("<polyline") != std::string::npos);
    const std::string hist = histogram_svg("h", "x", {1.0, 2.0, 2.0, INFINITY});
    CHECK(hist.find("<rect") != std::string::npos);
    CHECK(hist.find("</svg>") != std::string::npos);
    CHECK(histogram_svg("empty", "x", {}).find("</svg>") != std::string::npos);
}
