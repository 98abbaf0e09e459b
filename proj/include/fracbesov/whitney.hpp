#pragma once

#include "fracbesov/cube.hpp"
#include "fracbesov/dset.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace fracbesov {

// Whitney decomposition of region \ S with the point-location index used
// by the partition of unity.
class WhitneyCover {
public:
    const std::vector<DyadicCube>& cubes() const { return cubes_; }
    const Cube& bounding_region() const { return region_; }
    // Upper bound on how many dilates (9/8)Q' meet a given (9/8)Q; bounds
    // the number of cubes (and bumps) covering any point.
    int overlap_bound() const { return overlap_bound_; }
    int min_level() const { return min_level_; }
    // Cubes at min_level that were too close to S to keep.
    const std::vector<DyadicCube>& residual() const { return residual_; }
    double residual_volume() const;

    std::optional<Eigen::Index> locate(const PointRef& x) const;
    bool in_residual(const PointRef& x) const;
    // Cubes Q with x in the open dilate int(factor * Q), ascending.
    std::vector<Eigen::Index> dilate_hits(const PointRef& x, double factor) const;
    // Cubes Q' whose closed dilate factor*Q' meets factor*Q.
    std::vector<Eigen::Index> dilate_neighbours(Eigen::Index q, double factor) const;

    friend WhitneyCover whitney_decompose(const DSet& s, const Cube& region, int min_level,
                                          std::size_t max_cubes);
    // Assemble from an explicit cube list (used by tests and loaders).
    static WhitneyCover from_cubes(std::vector<DyadicCube> cubes, const Cube& region,
                                   int min_level);

private:
    void build_index();

    std::vector<DyadicCube> cubes_;
    std::vector<DyadicCube> residual_;
    Cube region_;
    int overlap_bound_ = 0;
    int min_level_ = 0;
    int lo_level_ = 0, hi_level_ = -1;
    std::unordered_map<DyadicCube, Eigen::Index, DyadicCubeHash> index_;
    std::unordered_set<DyadicCube, DyadicCubeHash> residual_index_;
};

inline constexpr double kBumpDilation = 9.0 / 8.0;
inline constexpr std::size_t kDefaultMaxCubes = std::size_t{1} << 23;

// Top-down dyadic Whitney decomposition: keep Q when
// diam Q <= dist(Q, S) <= 4 diam Q, split when dist(Q, S) < diam Q, and
// record cubes that would need splitting below min_level as residual.
// The region must be a union of dyadic cubes and contain every atom.
WhitneyCover whitney_decompose(const DSet& s, const Cube& region, int min_level,
                               std::size_t max_cubes = kDefaultMaxCubes);

// Coarsest level at which `region` is a union of dyadic cubes.
int aligned_level(const Cube& region);

// One JSON object per line: {"level": j, "coords": [...]}.
std::string to_json_lines(const std::vector<DyadicCube>& cubes);

}  // namespace fracbesov
