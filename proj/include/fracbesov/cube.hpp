#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

namespace fracbesov {

using Point = Eigen::VectorXd;
using PointRef = Eigen::Ref<const Eigen::VectorXd>;

// Sup-metric distance between two points.
inline double sup_dist(const PointRef& a, const PointRef& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// Closed axis-parallel cube Q(center, half_side) in the sup metric.
struct Cube {
    Point center;
    double half_side = 0.0;

    Cube() = default;
    Cube(Point c, double r) : center(std::move(c)), half_side(r) {}

    int dim() const { return static_cast<int>(center.size()); }
    double side() const { return 2.0 * half_side; }
    // Sup-metric diameter equals the side length.
    double diam() const { return side(); }
    double volume() const;
    double lower(int i) const { return center[i] - half_side; }
    double upper(int i) const { return center[i] + half_side; }

    Cube scaled(double t) const { return {center, t * half_side}; }

    bool contains(const PointRef& x) const;
    bool contains(const Cube& other) const;
    bool intersects(const Cube& other) const;
    bool interior_contains(const Cube& other) const;
};

// Sup-metric distance from a point to a closed cube (0 inside).
double dist(const Cube& q, const PointRef& x);

// Sup-metric distance between two closed cubes.
double dist(const Cube& a, const Cube& b);

// Closed dyadic cube prod_i [c_i 2^-j, (c_i + 1) 2^-j].
struct DyadicCube {
    int level = 0;
    std::vector<std::int64_t> coords;

    int dim() const { return static_cast<int>(coords.size()); }
    double side() const;
    double lower(int i) const;
    double upper(int i) const;
    Point center() const;
    Cube to_cube() const;

    DyadicCube parent() const;
    // Child by orthant bitmask (bit i set = upper half along axis i).
    DyadicCube child(unsigned mask) const;

    // Dyadic cube of the given level containing x. On shared faces the
    // lowest-index cube is chosen.
    static DyadicCube containing(const PointRef& x, int level);

    auto operator<=>(const DyadicCube&) const = default;
    bool operator==(const DyadicCube&) const = default;
};

struct DyadicCubeHash {
    std::size_t operator()(const DyadicCube& q) const noexcept;
};

// Exact integer predicates on dyadic cubes of arbitrary levels.
bool interiors_disjoint(const DyadicCube& a, const DyadicCube& b);
bool closed_intersect(const DyadicCube& a, const DyadicCube& b);
// a is contained in b.
bool contained_in(const DyadicCube& a, const DyadicCube& b);

}  // namespace fracbesov
