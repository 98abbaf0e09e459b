#pragma once

#include "fracbesov/cube.hpp"
#include "fracbesov/dset.hpp"
#include "fracbesov/grid.hpp"
#include "fracbesov/porosity.hpp"

#include <Eigen/Dense>
#include "json.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fracbesov {

struct NormParams {
    double alpha = 0.5;
    double p = 2.0;
    double q = 2.0;
    int u = 1;
    int k = 1;
    int j_min = 0;
    int j_max = 6;
    // Weight 2^{j(alpha - (n - d)/p)} instead of 2^{j alpha}.
    bool trace_side = false;

    // Throws ParameterError. `n` and `d` are needed only for trace_side.
    void validate(int n = 0, double d = 0.0) const;
    double scale_exponent(int n, double d) const;

    nlohmann::json to_json() const;
    static NormParams from_json(const nlohmann::json& j);
};

struct NormReport {
    double total = 0.0;
    double lp_part = 0.0;
    double seminorm_part = 0.0;
    std::vector<std::pair<int, double>> per_scale;
    int j_min = 0;
    int j_max = 0;  // after the resolution cutoff

    nlohmann::json to_json() const;
    std::string per_scale_csv() const;
};

// Largest j with 2^-j >= 4 * step.
int resolution_cutoff(double step);

NormReport besov_norm_on_set(const Eigen::VectorXd& f, const DSet& s, const NormParams& params);
// Direct double loop over atoms, no spatial index and no caching.
NormReport besov_norm_on_set_reference(const Eigen::VectorXd& f, const DSet& s, const NormParams& params);

// How the grid integrals are discretized. The local sample of Q(x, t) takes
// every s-th grid point with s chosen so that at least inner_per_side points
// fall along each axis; the outer L^p integral runs over every stride-th
// grid point with stride = max(1, per_side / outer_per_side).
struct GridSampling {
    int inner_per_side = 16;
    int outer_per_side = 128;
};

NormReport besov_norm_on_grid(const GridFunction& f, const Cube& region, const NormParams& params,
                              const GridSampling& sampling = {});
NormReport tl_norm_on_grid(const GridFunction& f, const Cube& region, const NormParams& params,
                           const GridSampling& sampling = {});
// Both norms from one table of local approximations (u is forced to 1).
std::pair<NormReport, NormReport> besov_and_tl_on_grid(const GridFunction& f, const Cube& region,
                                                       const NormParams& params, const GridSampling& sampling = {});
NormReport besov_norm_on_grid_reference(const GridFunction& f, const Cube& region,
                                        const NormParams& params, const GridSampling& sampling = {});
NormReport tl_norm_on_grid_reference(const GridFunction& f, const Cube& region,
                                     const NormParams& params, const GridSampling& sampling = {});

// E_k(f, Q)_{L^u} over the grid midpoints inside the closed cube Q, thinned
// to about inner_per_side points per axis. Throws EmptySupportError when Q
// holds no midpoint.
double grid_cube_approx(const GridFunction& f, const Cube& q, int k, int u, int inner_per_side = 16);

// sup over the dyadic ladder j_min..j_max (clamped to the grid resolution)
// of 2^{j alpha} E_k(f, Q(x, 2^-j))_{L^1}, with k = floor(alpha) + 1 and x
// moved to the nearest grid point.
double sharp_maximal(const GridFunction& f, const PointRef& x, const NormParams& params,
                     const GridSampling& sampling = {});

enum class HardyDirection { prefix, tail };

struct HardyResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

// prefix: sum_j 2^{sigma j} (sum_{i<=j} a_i)^p against sum_j 2^{sigma j} a_j^p, sigma < 0.
// tail:   sum_j 2^{sigma j} (sum_{i>=j} a_i)^p, sigma > 0. Indices start at 0.
HardyResult hardy_check(const std::vector<double>& a, double sigma, double p, HardyDirection dir);

struct PorousSummationResult {
    double lhs = 0.0;  // ||sum chi_Q a_Q||_p
    double rhs = 0.0;  // ||(sum (chi_Q a_Q)^q)^{1/q}||_p
    double ratio = 0.0;
    bool vacuous = false;
    // ||sum chi_{r(Q)} a_Q||_p and lhs over it, when a selection is supplied.
    std::optional<double> selected_norm;
    std::optional<double> selected_ratio;

    nlohmann::json to_json() const;
};

// Both sides integrate piecewise-constant functions exactly on the dyadic
// grid refined down to the finest cube involved.
PorousSummationResult porous_summation_check(const DSet& s, const NearSetFamily& family,
                                             const std::map<DyadicCube, double>& a, double p, double q,
                                             const PorousSelection* selection = nullptr);

}  // namespace fracbesov
