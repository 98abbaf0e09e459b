#pragma once

#include "fracbesov/approx.hpp"
#include "fracbesov/cube.hpp"
#include "fracbesov/dset.hpp"
#include "fracbesov/grid.hpp"
#include "fracbesov/whitney.hpp"

#include <Eigen/Dense>
#include "json.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fracbesov {

inline constexpr double kDefaultDelta = 16000.0;

// exp(-1/(1 - s^2)) on (-1, 1), zero outside.
double bump_profile(double s);
// Tensor bump of Q rescaled to (9/8)Q, not normalized.
double cube_bump(const DyadicCube& q, const PointRef& x);

// Finest Whitney level whose cubes the grid still resolves: step <= 2^{-level-2}.
int extension_min_level(const Grid& g);

// Normalized bumps of the Whitney cubes, plus the residual cubes left at
// min_level so that no grid point off S is uncovered. Stored row-wise per
// grid point (CSR).
struct PartitionOfUnity {
    std::shared_ptr<const WhitneyCover> cover;
    std::vector<DyadicCube> cubes;  // kept Whitney cubes, then residual ones
    std::size_t kept = 0;           // cubes[i] is residual iff i >= kept
    Grid grid;
    std::vector<Eigen::Index> offsets;  // size grid.size() + 1
    std::vector<Eigen::Index> cube_ids;
    std::vector<double> weights;
    Eigen::VectorXd raw_sum;  // bump sum before normalization
    std::vector<bool> on_set;  // grid point coincides with an atom
    int max_overlap = 0;

    Eigen::Index contributors(Eigen::Index point) const { return offsets[point + 1] - offsets[point]; }
};

PartitionOfUnity build_partition(std::shared_ptr<const WhitneyCover> cover, const Grid& grid, const DSet& s);

struct ReflectedCube {
    DyadicCube whitney;
    Eigen::Index atom = 0;  // a_Q, nearest atom to the centre, lowest index on ties
    Cube cube;              // Q(a_Q, r_Q / 2)
    double mass = 0.0;
    bool residual = false;
    bool truncated = false;  // diam Q > delta, projection replaced by 0
    int degree = -1;         // degree actually used; below k - 1 when degraded
};

ReflectedCube reflect(const DyadicCube& q, const DSet& s);

struct ExtensionField {
    int k = 1;
    double delta = kDefaultDelta;
    GridFunction field;
    std::shared_ptr<const PartitionOfUnity> partition;  // per-point provenance
    // Some contributing cube fell back to a lower projection degree.
    std::vector<bool> degraded;

    std::vector<Eigen::Index> provenance(Eigen::Index point) const;
    std::string to_csv() const;
    nlohmann::json sidecar() const;  // {nx, ny, origin, step}
    // Raw little-endian doubles in grid order plus path + ".json".
    void write_binary(const std::string& path) const;
};

// Ext_{k,S} on a fixed grid. Projections depend only on S, so one operator
// serves any number of functions.
class ExtensionOperator {
public:
    ExtensionOperator(const DSet& s, const Grid& grid, int k, double delta = kDefaultDelta);

    ExtensionField apply(const Eigen::VectorXd& f) const;

    const PartitionOfUnity& partition() const { return *partition_; }
    const std::vector<ReflectedCube>& reflected() const { return reflected_; }
    std::size_t degraded_cubes() const;
    int k() const { return k_; }
    double delta() const { return delta_; }

private:
    const DSet* s_;
    int k_;
    double delta_;
    std::shared_ptr<const PartitionOfUnity> partition_;
    std::vector<ReflectedCube> reflected_;
    std::vector<std::optional<Projection>> projections_;
    // Per CSR entry: weight times the monomial row of its cube's basis.
    std::vector<Eigen::Index> row_offsets_;
    std::vector<double> rows_;
    std::vector<bool> degraded_points_;
};

ExtensionField extend(const Eigen::VectorXd& f, const DSet& s, int k, double delta, const Grid& grid);

struct TraceResult {
    std::vector<double> ladder;
    Eigen::MatrixXd steps;  // atoms x ladder
    Eigen::VectorXd values;       // finest step
    Eigen::VectorXd convergence;  // |last - previous|, zero for a one-step ladder
};

// Decreasing radii 2^{steps-1} * 2h, ..., 2h.
std::vector<double> default_trace_ladder(const Grid& g, int steps = 4);

// Cube averages of the field around every atom.
TraceResult trace(const GridFunction& field, const DSet& s, const std::vector<double>& ladder);

struct LocalTransferReport {
    int j = 0;
    int k = 1;
    int u = 1;
    double near_max_ratio = 0.0;
    long near_points = 0;
    long near_vacuous = 0;  // both sides zero
    double far_max_ratio = 0.0;
    long far_points = 0;
    long far_beyond_nonzero = 0;  // i < -10 but the left side is positive
    double cubetrans_max_ratio = 0.0;
    long cubetrans_points = 0;
    nlohmann::json witnesses = nlohmann::json::array();

    bool vacuous() const { return near_max_ratio == 0.0 && far_max_ratio == 0.0 && cubetrans_max_ratio == 0.0; }
    nlohmann::json to_json() const;
};

// Pointwise comparison of the near-cube and far-cube sums of E_k(f~, 4Q)
// against the cover sums of E_k(f, 2K), plus the cube-transfer bound, on
// every stride-th grid point.
LocalTransferReport local_transfer_check(const ExtensionField& ext, const Eigen::VectorXd& f, const DSet& s,
                                         int u, int j, double cover_delta = kDefaultDelta, int stride = 8);

struct DecayReport {
    double t = 0.0;
    double max_ratio = 0.0;
    long points = 0;
    long vacuous = 0;
    long second_regime = 0;  // points where 50 max(80 t, dist) exceeds delta
    nlohmann::json witnesses = nlohmann::json::array();

    nlohmann::json to_json() const;
};

// E_k(f~, Q(x, t)) against t^k / (t^k + dist(x,S)^k) E_k(f, K(x,t))_{L^u(S)},
// K(x,t) = Q(a_x, 50 max(80 t, dist(x, S))), at grid points with dist >= t.
DecayReport decay_check(const ExtensionField& ext, const Eigen::VectorXd& f, const DSet& s, int u, double t,
                        int stride = 8);

}  // namespace fracbesov
