#pragma once

#include "fracbesov/cube.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fracbesov {

// Orthant tree (quadtree for n = 2) over a fixed point cloud, answering
// sup-metric nearest-neighbour, box-distance and box-range queries.
// Immutable after construction; concurrent reads are safe.
class AtomTree {
public:
    struct Hit {
        Eigen::Index index = -1;
        double dist = 0.0;
    };

    explicit AtomTree(Eigen::MatrixXd atoms, int leaf_size = 16);

    const Eigen::MatrixXd& atoms() const { return atoms_; }
    Eigen::Index size() const { return atoms_.cols(); }
    int dim() const { return static_cast<int>(atoms_.rows()); }

    // Nearest atom in the sup metric; ties go to the lowest atom index.
    Hit nearest(const PointRef& x, Eigen::Index exclude = -1) const;

    // min over atoms of the sup distance from the closed box [lo, hi].
    double dist_to_box(const PointRef& lo, const PointRef& hi) const;

    // Atoms with lo <= a <= hi componentwise.
    Eigen::Index count_in_box(const PointRef& lo, const PointRef& hi) const;
    // Atoms with lo <= a < hi componentwise.
    Eigen::Index count_in_half_open(const PointRef& lo, const PointRef& hi) const;
    // Indices (ascending) of atoms with lo <= a <= hi.
    std::vector<Eigen::Index> collect_in_box(const PointRef& lo, const PointRef& hi) const;

private:
    struct Node {
        Eigen::VectorXd lo, hi;  // tight bounding box of contained atoms
        Eigen::Index begin = 0, end = 0;
        int first_child = -1;
        int child_count = 0;
    };

    int build(Eigen::Index begin, Eigen::Index end, int leaf_size);
    void nearest_rec(int node, const PointRef& x, Eigen::Index exclude, Hit& best) const;
    double box_rec(int node, const PointRef& lo, const PointRef& hi, double best) const;
    template <typename Visit>
    void range_rec(int node, const PointRef& lo, const PointRef& hi, bool half_open,
                   Visit&& visit) const;

    Eigen::MatrixXd atoms_;
    std::vector<Eigen::Index> perm_;
    std::vector<Node> nodes_;
    std::vector<int> child_index_;
};

}  // namespace fracbesov
