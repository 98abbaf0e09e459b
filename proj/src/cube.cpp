#include "fracbesov/cube.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace fracbesov {

double Cube::volume() const {
    return std::pow(side(), dim());
}

bool Cube::contains(const PointRef& x) const {
    return sup_dist(x, center) <= half_side;
}

bool Cube::contains(const Cube& other) const {
    for (int i = 0; i < dim(); ++i) {
        if (other.lower(i) < lower(i) || other.upper(i) > upper(i)) return false;
    }
    return true;
}

bool Cube::interior_contains(const Cube& other) const {
    for (int i = 0; i < dim(); ++i) {
        if (other.lower(i) <= lower(i) || other.upper(i) >= upper(i)) return false;
    }
    return true;
}

bool Cube::intersects(const Cube& other) const {
    return sup_dist(center, other.center) <= half_side + other.half_side;
}

double dist(const Cube& q, const PointRef& x) {
    double d = 0.0;
    for (int i = 0; i < q.dim(); ++i) {
        d = std::max({d, q.lower(i) - x[i], x[i] - q.upper(i)});
    }
    return d;
}

double dist(const Cube& a, const Cube& b) {
    double d = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        d = std::max({d, a.lower(i) - b.upper(i), b.lower(i) - a.upper(i)});
    }
    return d;
}

double DyadicCube::side() const {
    return std::ldexp(1.0, -level);
}

double DyadicCube::lower(int i) const {
    return std::ldexp(static_cast<double>(coords[i]), -level);
}

double DyadicCube::upper(int i) const {
    return std::ldexp(static_cast<double>(coords[i] + 1), -level);
}

Point DyadicCube::center() const {
    Point c(dim());
    for (int i = 0; i < dim(); ++i) {
        c[i] = std::ldexp(static_cast<double>(coords[i]) + 0.5, -level);
    }
    return c;
}

Cube DyadicCube::to_cube() const {
    return {center(), 0.5 * side()};
}

DyadicCube DyadicCube::parent() const {
    DyadicCube p{level - 1, coords};
    for (auto& c : p.coords) c = c >> 1;  // arithmetic shift floors negatives
    return p;
}

DyadicCube DyadicCube::child(unsigned mask) const {
    DyadicCube c{level + 1, coords};
    for (int i = 0; i < dim(); ++i) {
        c.coords[i] = 2 * coords[i] + ((mask >> i) & 1u);
    }
    return c;
}

DyadicCube DyadicCube::containing(const PointRef& x, int level) {
    DyadicCube q{level, std::vector<std::int64_t>(x.size())};
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double s = std::ldexp(x[i], level);
        q.coords[i] = static_cast<std::int64_t>(std::ceil(s)) - 1;
    }
    return q;
}

std::size_t DyadicCubeHash::operator()(const DyadicCube& q) const noexcept {
    std::size_t h = std::hash<int>{}(q.level);
    for (auto c : q.coords) {
        h ^= std::hash<std::int64_t>{}(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

namespace {

// Integer interval [lo, hi] of a along axis i, expressed at `level` >= a.level.
std::pair<std::int64_t, std::int64_t> span_at(const DyadicCube& a, int i, int level) {
    const int shift = level - a.level;
    assert(shift >= 0);
    const std::int64_t lo = a.coords[i] * (std::int64_t{1} << shift);
    return {lo, lo + (std::int64_t{1} << shift)};
}

}  // namespace

bool interiors_disjoint(const DyadicCube& a, const DyadicCube& b) {
    const int level = std::max(a.level, b.level);
    for (int i = 0; i < a.dim(); ++i) {
        auto [alo, ahi] = span_at(a, i, level);
        auto [blo, bhi] = span_at(b, i, level);
        if (ahi <= blo || bhi <= alo) return true;
    }
    return false;
}

bool closed_intersect(const DyadicCube& a, const DyadicCube& b) {
    const int level = std::max(a.level, b.level);
    for (int i = 0; i < a.dim(); ++i) {
        auto [alo, ahi] = span_at(a, i, level);
        auto [blo, bhi] = span_at(b, i, level);
        if (ahi < blo || bhi < alo) return false;
    }
    return true;
}

bool contained_in(const DyadicCube& a, const DyadicCube& b) {
    if (a.level < b.level) return false;
    for (int i = 0; i < a.dim(); ++i) {
        auto [alo, ahi] = span_at(a, i, a.level);
        auto [blo, bhi] = span_at(b, i, a.level);
        if (alo < blo || ahi > bhi) return false;
    }
    return true;
}

}  // namespace fracbesov
