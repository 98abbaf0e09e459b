#pragma once

#include "fracbesov/atom_tree.hpp"
#include "fracbesov/cube.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace fracbesov {

// Atom coordinates are snapped to this dyadic lattice, so sums and
// differences of coordinates against dyadic cube faces are exact in double.
inline constexpr int kLatticeBits = 40;

double snap_to_lattice(double x);

// Self-similar iterated function system x -> ratio * x + translation with
// equal ratios and equal weights.
struct IfsSpec {
    int n = 2;
    double ratio = 1.0 / 3.0;
    std::vector<Point> translations;
    int depth = 5;

    double similarity_dimension() const;

    // Four-corner Cantor set in the unit square.
    static IfsSpec four_corner_cantor(int depth, double ratio = 1.0 / 3.0);
};

// Discretized Ahlfors-regular set: an atom cloud carrying the uniform
// self-similar measure (total mass 1).
class DSet {
public:
    static DSet from_ifs(const IfsSpec& spec);
    // Raw atoms (columns). `cell_radius` bounds the sup distance from the
    // underlying set to the nearest atom.
    static DSet from_atoms(Eigen::MatrixXd atoms, double d, double cell_radius);

    int dim() const { return tree_->dim(); }
    Eigen::Index size() const { return tree_->size(); }
    const Eigen::MatrixXd& atoms() const { return tree_->atoms(); }
    auto atom(Eigen::Index i) const { return tree_->atoms().col(i); }
    double weight() const { return weight_; }
    Eigen::VectorXd weights() const { return Eigen::VectorXd::Constant(size(), weight_); }
    double dimension() const { return d_; }
    // Minimal sup-metric gap between distinct atoms (0 for a single atom).
    double spacing() const { return spacing_; }
    double cell_radius() const { return cell_radius_; }
    const Cube& bounding() const { return bounding_; }
    const AtomTree& tree() const { return *tree_; }

    // Smallest scale at which the discrete measure is trusted: 4 * spacing.
    double resolution_floor() const;

    // Mass of a closed cube (sup metric).
    double measure(const Cube& q) const;
    // Mass of the half-open box [lo, hi); partitions are exactly additive.
    double measure_half_open(const Cube& q) const;

    double dist(const PointRef& x) const;
    Eigen::Index nearest(const PointRef& x) const;
    // dist(Q, S) for a closed cube.
    double dist(const Cube& q) const;
    std::vector<Eigen::Index> atoms_in(const Cube& q) const;

    // CSV with columns x,y(,z...),weight.
    std::string to_csv() const;

private:
    DSet() = default;
    void finish();

    std::shared_ptr<const AtomTree> tree_;
    double weight_ = 1.0;
    double d_ = 0.0;
    double spacing_ = 0.0;
    double cell_radius_ = 0.0;
    Cube bounding_;
};

struct RegularityWitness {
    Eigen::Index atom = -1;
    double r = 0.0;
    double ratio = 0.0;
};

struct RegularityReport {
    double c1 = 0.0;
    double c2 = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    int samples = 0;
    RegularityWitness c1_witness;
    RegularityWitness c2_witness;
    // c2 / c1 within the flagging threshold.
    bool regular = false;
};

inline constexpr double kRegularityRatioThreshold = 1.0e3;

// Number of radii in the log-spaced audit ladder over [resolution_floor, 1].
inline constexpr int kAuditLadderSize = 16;

RegularityReport audit_regularity(const DSet& s, int samples, std::uint64_t seed,
                                  int ladder_size = kAuditLadderSize);

}  // namespace fracbesov
