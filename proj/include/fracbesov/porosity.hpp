#pragma once

#include "fracbesov/cube.hpp"
#include "fracbesov/dset.hpp"
#include "fracbesov/whitney.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace fracbesov {

// Dyadic cubes Q with dist(x_Q, S) / gamma <= l(Q) <= 1.
struct NearSetFamily {
    double gamma = 1.0;
    std::vector<DyadicCube> cubes;  // canonical (level, coords) order
};

// Every dyadic cube of levels 0..max_level contained in `region` (defaults
// to the bounding cube of S) satisfying the defining inequality.
NearSetFamily near_set_family(const DSet& s, double gamma, int max_level,
                              std::optional<Cube> region = std::nullopt);

inline constexpr int kMaxPorosityLadderExponent = 16;

// Smallest kappa in {2, 4, ..., 2^16} such that every sampled cube Q(x, r)
// contains a point y with Q(y, r / kappa) free of atoms. Holes narrower
// than half the atom spacing are not resolvable and do not count.
double estimate_porosity(const DSet& s, int trials, std::uint64_t rng_seed);

// Search the (2 kappa)-refined subgrid of `search` for a point y whose
// closed cube Q(y, hole) contains no atom. Canonical (lowest) grid order.
std::optional<Point> find_hole(const DSet& s, const Cube& search, double hole, double kappa);

struct PorousSelection {
    double gamma = 1.0;
    double kappa = 1.0;
    double sigma = 0.0;  // (1 + gamma) * 16 * kappa
    int r0 = 1;          // smallest integer with sigma^2 < 2^r0
    std::map<DyadicCube, DyadicCube> assignment;  // Q -> r(Q)

    int residue(const DyadicCube& q) const;
};

PorousSelection porous_selection(const NearSetFamily& family, const DSet& s, double kappa);

struct SelectionAudit {
    std::size_t checked = 0;
    std::size_t violations = 0;  // per-cube size/location/distance failures
    std::size_t intersections = 0;  // r(Q) meeting r(R) in a residue class
};

// Checks every per-cube invariant and, by a sort-and-sweep over each
// residue class, pairwise disjointness of the selected cubes.
SelectionAudit audit_selection(const PorousSelection& sel, const DSet& s);

// Whitney cube Q inside Q(x, 2^-i) with 2^-(i+1) / (5 kappa) <= diam Q <= 2^-(i+1).
DyadicCube cop_check(const DSet& s, Eigen::Index atom, int i, const WhitneyCover& cover,
                     double kappa);

}  // namespace fracbesov
