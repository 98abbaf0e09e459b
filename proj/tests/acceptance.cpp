// Runs every acceptance check at desk scale and prints one line per criterion.
// Exit status is non-zero when any criterion fails.

#include "fracbesov/config.hpp"
#include "fracbesov/suites.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>

using namespace fracbesov;

int main(int argc, char** argv) {
    ExperimentConfig cfg;
    cfg.suites = {"whitney", "disjointness", "hardy",          "porous",    "remez",
                  "projection", "norm_equivalence", "trace_identity", "roundtrip", "reference"};
    cfg.output_dir = argc > 1 ? argv[1] : "acceptance_out";
    cfg.validate();

    SuiteReport rep;
    for (const auto& name : cfg.suites) {
        const auto t0 = std::chrono::steady_clock::now();
        rep.merge(run_suite(name, cfg));
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cerr << "suite " << name << " finished in " << std::fixed << std::setprecision(1) << dt << " s\n";
    }
    write_report(rep, cfg.output_dir);

    int failed = 0;
    for (const auto& c : acceptance_criteria()) {
        bool ok = true;
        std::string note;
        for (const auto& name : c.records) {
            const SuiteRecord* r = rep.find(name);
            if (!r) {
                ok = false;
                note += " missing " + name;
                continue;
            }
            if (r->status == Status::fail) ok = false;
            if (name == "remez_line_expected_failure" && !r->details.value("observed_failure", false)) {
                ok = false;
                note += " degenerate line did not fail";
            }
            note += " " + name + "=" + r->to_json(false)["measured_constant"].dump();
        }
        if (!ok) ++failed;
        std::cout << "criterion " << std::setw(2) << c.id << " " << (ok ? "PASS" : "FAIL") << "  " << c.title << " |"
                  << note << '\n';
    }
    std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << '\n';
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
