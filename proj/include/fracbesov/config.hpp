#pragma once

#include "fracbesov/cube.hpp"
#include "fracbesov/dset.hpp"
#include "fracbesov/extension.hpp"
#include "fracbesov/grid.hpp"
#include "fracbesov/norms.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fracbesov {

// Suite names in the order `verify` runs them by default.
const std::vector<std::string>& known_suites();
// Suites that evaluate the trace-side norm and need alpha > (n - d) / p.
bool is_trace_suite(const std::string& name);

struct GridSpec {
    int resolution = 256;
    Cube region{(Point(2) << 0.5, 0.5).finished(), 0.5};

    Grid make() const { return Grid(region, resolution); }
};

struct ExperimentConfig {
    IfsSpec ifs = IfsSpec::four_corner_cantor(5);
    NormParams params{0.9, 2.0, 2.0, 1, 1, 0, 4, false};
    GridSpec grid;
    double delta = kDefaultDelta;
    std::uint64_t seed = 1;
    std::vector<std::string> suites;
    std::string output_dir = "out";
    int corpus_size = 20;
    // Parameter sets swept by the roundtrip suite; the `roundtrip` verb uses `params` alone.
    std::vector<NormParams> roundtrip_params = default_roundtrip_params();

    static std::vector<NormParams> default_roundtrip_params();

    // Throws ConfigError.
    void validate() const;

    nlohmann::json to_json() const;
    // Missing keys keep their defaults; unknown keys are rejected.
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
};

}  // namespace fracbesov
