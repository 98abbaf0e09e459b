#pragma once

#include "fracbesov/cube.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace fracbesov {

// Uniform grid of cell midpoints over a cube, per_side cells along each axis.
// Flat index i = i_0 + per_side * (i_1 + per_side * (...)).
struct Grid {
    Cube region;
    int per_side = 0;

    Grid() = default;
    Grid(Cube r, int m);

    int dim() const { return region.dim(); }
    double step() const { return region.side() / per_side; }
    double cell_volume() const;
    Eigen::Index size() const;
    Point point(Eigen::Index flat) const;
    double coord(int axis, Eigen::Index i) const { return region.lower(axis) + (static_cast<double>(i) + 0.5) * step(); }
    std::vector<Eigen::Index> unflatten(Eigen::Index flat) const;
    Eigen::Index flatten(const std::vector<Eigen::Index>& idx) const;
    // Nearest grid index along each axis (clamped).
    std::vector<Eigen::Index> nearest(const PointRef& x) const;
    Eigen::MatrixXd points() const;
};

struct GridFunction {
    Grid grid;
    Eigen::VectorXd values;

    static GridFunction sample(const Grid& g, const std::function<double(const PointRef&)>& f);
};

}  // namespace fracbesov
