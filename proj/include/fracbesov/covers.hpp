#pragma once

#include "fracbesov/cube.hpp"
#include "fracbesov/dset.hpp"

#include <vector>

namespace fracbesov {

// Bounded-overlap cover of the atoms by cubes Q(x, 2^-i * delta).
struct CoverFamily {
    int level = 0;
    double delta = 0.0;
    std::vector<Cube> cubes;
    std::vector<Eigen::Index> centers;  // atom index of each cube center
    int overlap_bound = 0;              // q0
    // Indices into `cubes`; the doubled cubes of one class are pairwise disjoint.
    std::vector<std::vector<int>> color_classes;

    // Cubes R with 2R meeting 2Q (Q itself included), ascending.
    std::vector<int> doubled_neighbours(int q) const;
};

// Greedy 5r covering: atoms in index order, keeping a centre when its
// cube scaled by 1/5 misses every kept one; then greedy colouring of the
// intersection graph of the doubled cubes.
CoverFamily build_covers(const DSet& s, int level, double delta);

struct CoverAudit {
    Eigen::Index uncovered_atoms = 0;
    int max_overlap = 0;             // measured card{R : 2R meets 2Q}
    std::size_t class_intersections = 0;
};

// All-pairs check of coverage, overlap and colour-class disjointness.
CoverAudit audit_covers(const CoverFamily& cover, const DSet& s);

inline constexpr double kShellInner = 80.0;
inline constexpr double kShellOuter = 16000.0;

// Distance band 80 * 2^-i <= dist(y, S) <= 16000 * 2^-i.
struct Shell {
    int level = 0;
    double inner = 0.0;
    double outer = 0.0;

    bool contains(double dist_to_set) const { return inner <= dist_to_set && dist_to_set <= outer; }
};

// Smallest m with 2^-m < inner / outer, so equal-residue bands never meet.
int shell_period();

std::vector<Shell> build_shells(int i_min, int i_max);

// Pairs of distinct shells with equal level residue mod m0 whose bands meet.
std::size_t shell_intersections(const std::vector<Shell>& shells, int m0);

}  // namespace fracbesov
