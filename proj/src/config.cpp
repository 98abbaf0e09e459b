#include "fracbesov/config.hpp"

#include "fracbesov/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace fracbesov {

const std::vector<std::string>& known_suites() {
    static const std::vector<std::string> names = {
        "whitney",  "disjointness",     "hardy",          "porous",    "remez",
        "projection", "norm_equivalence", "trace_identity", "roundtrip", "reference",
        "local_transfer",
    };
    return names;
}

bool is_trace_suite(const std::string& name) { return name == "roundtrip"; }

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

Point point_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a non-empty array");
    Point p(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) p[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return p;
}

nlohmann::json point_to_json(const Point& p) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p[i]);
    return a;
}

}  // namespace

std::vector<NormParams> ExperimentConfig::default_roundtrip_params() {
    return {
        {0.9, 2.0, 2.0, 1, 1, 0, 4, false},
        {1.4, 2.0, 2.0, 1, 2, 0, 4, false},
        {0.9, 1.5, 1.5, 1, 1, 0, 4, false},
    };
}

void ExperimentConfig::validate() const {
    std::set<std::string> seen;
    for (const auto& name : suites) {
        const auto& all = known_suites();
        if (std::find(all.begin(), all.end(), name) == all.end()) {
            throw ConfigError("unknown suite '" + name + "'");
        }
        if (!seen.insert(name).second) throw ConfigError("suite '" + name + "' listed twice");
    }
    if (ifs.depth < 1 || ifs.depth > 8) throw ConfigError("ifs.depth must lie in [1, 8]");
    if (!(ifs.ratio > 0.0 && ifs.ratio < 1.0)) throw ConfigError("ifs.ratio must lie in (0, 1)");
    if (ifs.translations.empty()) throw ConfigError("ifs.maps must not be empty");
    if (ifs.n != 2) throw ConfigError("only planar sets are supported");
    for (const auto& t : ifs.translations) {
        if (t.size() != ifs.n) throw ConfigError("ifs.maps entries must have two coordinates");
    }
    if (grid.resolution < 8) throw ConfigError("grid.resolution must be at least 8");
    if (grid.region.dim() != 2 || !(grid.region.half_side > 0.0)) {
        throw ConfigError("grid.region needs a 2-d center and a positive half_side");
    }
    if (!(delta > 0.0)) throw ConfigError("delta must be positive");
    if (corpus_size < 1) throw ConfigError("corpus_size must be positive");
    try {
        params.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
    const bool traced = std::any_of(suites.begin(), suites.end(), is_trace_suite);
    if (traced) {
        const double d = ifs.similarity_dimension();
        std::vector<NormParams> all = roundtrip_params;
        all.push_back(params);
        for (const auto& np : all) {
            try {
                np.validate();
            } catch (const ParameterError& e) {
                throw ConfigError(std::string("roundtrip_params: ") + e.what());
            }
            const double floor = (ifs.n - d) / np.p;
            if (!(np.alpha > floor && np.alpha < np.k)) {
                std::ostringstream os;
                os << "trace suites need (n - d) / p = " << floor << " < alpha < k, got alpha = " << np.alpha
                   << ", k = " << np.k;
                throw ConfigError(os.str());
            }
        }
    }
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json maps = nlohmann::json::array();
    for (const auto& t : ifs.translations) maps.push_back(point_to_json(t));
    nlohmann::json rt = nlohmann::json::array();
    for (const auto& np : roundtrip_params) rt.push_back(np.to_json());
    return {
        {"ifs", {{"ratio", ifs.ratio}, {"maps", maps}, {"depth", ifs.depth}}},
        {"params", params.to_json()},
        {"grid", {{"resolution", grid.resolution},
                  {"region", {{"center", point_to_json(grid.region.center)}, {"half_side", grid.region.half_side}}}}},
        {"delta", delta},
        {"seed", seed},
        {"suites", suites},
        {"output_dir", output_dir},
        {"corpus_size", corpus_size},
        {"roundtrip_params", rt},
    };
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
        reject_unknown(j, {"ifs", "params", "grid", "delta", "seed", "suites", "output_dir", "corpus_size",
                          "roundtrip_params"}, "config");
        if (j.contains("ifs")) {
            const auto& f = j["ifs"];
            // seed is accepted for IFS files shared with randomized generators; the
            // deterministic attractor ignores it.
            reject_unknown(f, {"ratio", "maps", "depth", "seed"}, "ifs");
            const double ratio = f.value("ratio", c.ifs.ratio);
            const int depth = f.value("depth", c.ifs.depth);
            c.ifs = IfsSpec::four_corner_cantor(depth, ratio);
            if (f.contains("maps")) {
                c.ifs.translations.clear();
                for (const auto& m : f["maps"]) c.ifs.translations.push_back(point_from_json(m, "ifs.maps[]"));
            }
        }
        if (j.contains("params")) {
            reject_unknown(j["params"], {"alpha", "p", "q", "u", "k", "j_min", "j_max", "trace_side"}, "params");
            c.params = NormParams::from_json(j["params"]);
        }
        if (j.contains("grid")) {
            const auto& g = j["grid"];
            reject_unknown(g, {"resolution", "region"}, "grid");
            c.grid.resolution = g.value("resolution", c.grid.resolution);
            if (g.contains("region")) {
                reject_unknown(g["region"], {"center", "half_side"}, "grid.region");
                if (g["region"].contains("center")) {
                    c.grid.region.center = point_from_json(g["region"]["center"], "grid.region.center");
                }
                c.grid.region.half_side = g["region"].value("half_side", c.grid.region.half_side);
            }
        }
        c.delta = j.value("delta", c.delta);
        c.seed = j.value("seed", c.seed);
        if (j.contains("suites")) c.suites = j["suites"].get<std::vector<std::string>>();
        c.output_dir = j.value("output_dir", c.output_dir);
        c.corpus_size = j.value("corpus_size", c.corpus_size);
        if (j.contains("roundtrip_params")) {
            c.roundtrip_params.clear();
            for (const auto& np : j["roundtrip_params"]) {
                reject_unknown(np, {"alpha", "p", "q", "u", "k", "j_min", "j_max", "trace_side"}, "roundtrip_params[]");
                c.roundtrip_params.push_back(NormParams::from_json(np));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    return from_json(j);
}

}  // namespace fracbesov
