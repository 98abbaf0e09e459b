#include "fracbesov/whitney.hpp"

#include "fracbesov/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fracbesov {

namespace {

bool is_integer(double v) {
    return std::isfinite(v) && v == std::floor(v);
}

// Integers strictly (open) or weakly (closed) inside (lo, hi).
std::pair<std::int64_t, std::int64_t> integer_range(double lo, double hi, bool open) {
    std::int64_t a = static_cast<std::int64_t>(std::ceil(lo));
    std::int64_t b = static_cast<std::int64_t>(std::floor(hi));
    if (open) {
        if (static_cast<double>(a) == lo) ++a;
        if (static_cast<double>(b) == hi) --b;
    }
    return {a, b};
}

// Visit every integer vector in the box prod [lo_i, hi_i].
template <typename Visit>
void for_each_in_box(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi,
                     Visit&& visit) {
    const auto n = lo.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (lo[i] > hi[i]) return;
    }
    std::vector<std::int64_t> c = lo;
    while (true) {
        visit(c);
        std::size_t i = 0;
        while (i < n) {
            if (c[i] < hi[i]) {
                ++c[i];
                break;
            }
            c[i] = lo[i];
            ++i;
        }
        if (i == n) return;
    }
}

}  // namespace

int aligned_level(const Cube& region) {
    for (int level = -30; level <= kLatticeBits; ++level) {
        bool ok = is_integer(std::ldexp(region.side(), level));
        for (int i = 0; ok && i < region.dim(); ++i) {
            ok = is_integer(std::ldexp(region.lower(i), level));
        }
        if (ok) return level;
    }
    throw GeometryError("region is not a union of dyadic cubes");
}

double WhitneyCover::residual_volume() const {
    double v = 0.0;
    for (const auto& q : residual_) v += std::pow(q.side(), q.dim());
    return v;
}

void WhitneyCover::build_index() {
    index_.clear();
    index_.reserve(cubes_.size());
    lo_level_ = 0;
    hi_level_ = -1;
    for (std::size_t k = 0; k < cubes_.size(); ++k) {
        index_.emplace(cubes_[k], static_cast<Eigen::Index>(k));
        if (k == 0) {
            lo_level_ = hi_level_ = cubes_[k].level;
        } else {
            lo_level_ = std::min(lo_level_, cubes_[k].level);
            hi_level_ = std::max(hi_level_, cubes_[k].level);
        }
    }
    residual_index_ = {residual_.begin(), residual_.end()};

    overlap_bound_ = 0;
    for (std::size_t k = 0; k < cubes_.size(); ++k) {
        overlap_bound_ = std::max(
            overlap_bound_,
            static_cast<int>(dilate_neighbours(static_cast<Eigen::Index>(k), kBumpDilation).size()));
    }
}

WhitneyCover WhitneyCover::from_cubes(std::vector<DyadicCube> cubes, const Cube& region,
                                      int min_level) {
    WhitneyCover w;
    std::sort(cubes.begin(), cubes.end());
    w.cubes_ = std::move(cubes);
    w.region_ = region;
    w.min_level_ = min_level;
    w.build_index();
    return w;
}

std::optional<Eigen::Index> WhitneyCover::locate(const PointRef& x) const {
    std::optional<Eigen::Index> best;
    const auto n = static_cast<std::size_t>(x.size());
    std::vector<std::int64_t> lo(n), hi(n);
    for (int level = lo_level_; level <= hi_level_; ++level) {
        for (std::size_t i = 0; i < n; ++i) {
            const double s = std::ldexp(x[static_cast<Eigen::Index>(i)], level);
            std::tie(lo[i], hi[i]) = integer_range(s - 1.0, s, false);
        }
        for_each_in_box(lo, hi, [&](const std::vector<std::int64_t>& c) {
            auto it = index_.find(DyadicCube{level, c});
            if (it != index_.end() && (!best || it->second < *best)) best = it->second;
        });
    }
    return best;
}

bool WhitneyCover::in_residual(const PointRef& x) const {
    if (residual_index_.empty()) return false;
    const auto n = static_cast<std::size_t>(x.size());
    std::vector<std::int64_t> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::ldexp(x[static_cast<Eigen::Index>(i)], min_level_);
        std::tie(lo[i], hi[i]) = integer_range(s - 1.0, s, false);
    }
    bool found = false;
    for_each_in_box(lo, hi, [&](const std::vector<std::int64_t>& c) {
        if (residual_index_.count(DyadicCube{min_level_, c})) found = true;
    });
    return found;
}

std::vector<Eigen::Index> WhitneyCover::dilate_hits(const PointRef& x, double factor) const {
    std::vector<Eigen::Index> out;
    const auto n = static_cast<std::size_t>(x.size());
    const double half = 0.5 * factor;
    std::vector<std::int64_t> lo(n), hi(n);
    for (int level = lo_level_; level <= hi_level_; ++level) {
        for (std::size_t i = 0; i < n; ++i) {
            const double s = std::ldexp(x[static_cast<Eigen::Index>(i)], level) - 0.5;
            std::tie(lo[i], hi[i]) = integer_range(s - half, s + half, true);
        }
        for_each_in_box(lo, hi, [&](const std::vector<std::int64_t>& c) {
            auto it = index_.find(DyadicCube{level, c});
            if (it != index_.end()) out.push_back(it->second);
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Eigen::Index> WhitneyCover::dilate_neighbours(Eigen::Index q, double factor) const {
    const DyadicCube& cube = cubes_[static_cast<std::size_t>(q)];
    const auto n = static_cast<std::size_t>(cube.dim());
    const double half = 0.5 * factor;
    std::vector<double> qlo(n), qhi(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = static_cast<double>(cube.coords[i]) + 0.5;
        qlo[i] = std::ldexp(c - half, -cube.level);
        qhi[i] = std::ldexp(c + half, -cube.level);
    }
    std::vector<Eigen::Index> out;
    std::vector<std::int64_t> lo(n), hi(n);
    // Whitney neighbours differ by at most a factor 4 in size.
    const int from = std::max(lo_level_, cube.level - 3);
    const int to = std::min(hi_level_, cube.level + 3);
    for (int level = from; level <= to; ++level) {
        for (std::size_t i = 0; i < n; ++i) {
            std::tie(lo[i], hi[i]) = integer_range(std::ldexp(qlo[i], level) - 0.5 - half,
                                                   std::ldexp(qhi[i], level) - 0.5 + half, false);
        }
        for_each_in_box(lo, hi, [&](const std::vector<std::int64_t>& c) {
            auto it = index_.find(DyadicCube{level, c});
            if (it != index_.end()) out.push_back(it->second);
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

WhitneyCover whitney_decompose(const DSet& s, const Cube& region, int min_level,
                               std::size_t max_cubes) {
    const int n = s.dim();
    if (region.dim() != n) throw GeometryError("region dimension does not match the set");
    const Eigen::VectorXd amin = s.atoms().rowwise().minCoeff();
    const Eigen::VectorXd amax = s.atoms().rowwise().maxCoeff();
    for (int i = 0; i < n; ++i) {
        if (amin[i] < region.lower(i) || amax[i] > region.upper(i)) {
            throw GeometryError("region does not contain the set");
        }
    }
    const int top = aligned_level(region);
    const double per_axis = std::ldexp(region.side(), top);
    if (std::pow(per_axis, n) > static_cast<double>(max_cubes)) {
        throw ResourceError("region tiling exceeds the cube budget");
    }

    std::vector<DyadicCube> stack;
    {
        std::vector<std::int64_t> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            lo[static_cast<std::size_t>(i)] =
                static_cast<std::int64_t>(std::ldexp(region.lower(i), top));
            hi[static_cast<std::size_t>(i)] =
                lo[static_cast<std::size_t>(i)] + static_cast<std::int64_t>(per_axis) - 1;
        }
        for_each_in_box(lo, hi, [&](const std::vector<std::int64_t>& c) {
            stack.push_back(DyadicCube{top, c});
        });
    }

    WhitneyCover w;
    w.region_ = region;
    w.min_level_ = min_level;
    std::size_t visited = 0;
    while (!stack.empty()) {
        DyadicCube q = std::move(stack.back());
        stack.pop_back();
        if (++visited > max_cubes) throw ResourceError("Whitney recursion exceeds the cube budget");
        const double dist = s.dist(q.to_cube());
        const double diam = q.side();
        if (dist >= diam) {
            if (dist > 4.0 * diam) {
                throw GeometryError("region tiling is too fine for its distance to the set");
            }
            w.cubes_.push_back(std::move(q));
        } else if (q.level >= min_level) {
            w.residual_.push_back(std::move(q));
        } else {
            for (unsigned m = 0; m < (1u << n); ++m) stack.push_back(q.child(m));
        }
    }
    std::sort(w.cubes_.begin(), w.cubes_.end());
    std::sort(w.residual_.begin(), w.residual_.end());
    w.build_index();
    return w;
}

std::string to_json_lines(const std::vector<DyadicCube>& cubes) {
    std::ostringstream os;
    for (const auto& q : cubes) {
        os << "{\"level\": " << q.level << ", \"coords\": [";
        for (std::size_t i = 0; i < q.coords.size(); ++i) {
            if (i) os << ", ";
            os << q.coords[i];
        }
        os << "]}\n";
    }
    return os.str();
}

}  // namespace fracbesov
