#pragma once

#include "fracbesov/config.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace fracbesov {

enum class Status { pass, fail, vacuous, report_only };

std::string to_string(Status s);

struct SuiteRecord {
    std::string name;
    Status status = Status::report_only;
    double measured_constant = 0.0;
    nlohmann::json witnesses = nlohmann::json::array();
    double runtime = 0.0;  // seconds, excluded from the deterministic form
    nlohmann::json details = nlohmann::json::object();

    nlohmann::json to_json(bool with_runtime = true) const;
};

// A file the runner writes next to the JSON report.
struct Artifact {
    std::string file;
    std::string content;
};

struct SuiteReport {
    std::vector<SuiteRecord> records;
    std::vector<Artifact> artifacts;

    bool ok() const;  // no record has status fail
    const SuiteRecord* find(const std::string& name) const;
    void merge(SuiteReport other);
    nlohmann::json to_json(bool with_runtime = true) const;
};

// Acceptance criterion and the records that decide it.
struct Criterion {
    int id = 0;
    std::string title;
    std::vector<std::string> records;
};

const std::vector<Criterion>& acceptance_criteria();

// Runs one named suite. Module errors are rethrown with the suite name prefixed.
SuiteReport run_suite(const std::string& name, const ExperimentConfig& cfg);

// Runs cfg.suites in order (validating first).
SuiteReport run(const ExperimentConfig& cfg);

// report.json (with runtimes) plus the artifacts, under `dir`.
void write_report(const SuiteReport& report, const std::string& dir);

// The roundtrip record for a single parameter set.
SuiteReport roundtrip(const ExperimentConfig& cfg, const std::vector<NormParams>& sets);

}  // namespace fracbesov
