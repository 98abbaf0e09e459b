#include "fracbesov/covers.hpp"

#include "fracbesov/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fracbesov {

namespace {

// Uniform bucket grid over points, for fixed-radius sup-metric queries.
class Buckets {
public:
    explicit Buckets(double cell) : cell_(cell) {}

    void insert(const PointRef& x, int id) { cells_[key(x)].push_back(id); }

    // Ids of points stored in cells that can hold points within `cell_` of x.
    template <typename Visit>
    void near(const PointRef& x, Visit&& visit) const {
        const std::vector<std::int64_t> base = key(x);
        const auto n = base.size();
        std::vector<std::int64_t> k(n);
        std::vector<int> off(n, -1);
        while (true) {
            for (std::size_t i = 0; i < n; ++i) k[i] = base[i] + off[i];
            auto it = cells_.find(k);
            if (it != cells_.end()) {
                for (int id : it->second) visit(id);
            }
            std::size_t i = 0;
            while (i < n) {
                if (off[i] < 1) {
                    ++off[i];
                    break;
                }
                off[i] = -1;
                ++i;
            }
            if (i == n) return;
        }
    }

private:
    std::vector<std::int64_t> key(const PointRef& x) const {
        std::vector<std::int64_t> k(static_cast<std::size_t>(x.size()));
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            k[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(x[i] / cell_));
        }
        return k;
    }

    double cell_;
    std::map<std::vector<std::int64_t>, std::vector<int>> cells_;
};

}  // namespace

std::vector<int> CoverFamily::doubled_neighbours(int q) const {
    std::vector<int> out;
    const Cube& a = cubes[static_cast<std::size_t>(q)];
    for (std::size_t r = 0; r < cubes.size(); ++r) {
        if (sup_dist(a.center, cubes[r].center) <= 2.0 * (a.half_side + cubes[r].half_side)) {
            out.push_back(static_cast<int>(r));
        }
    }
    return out;
}

CoverFamily build_covers(const DSet& s, int level, double delta) {
    if (level < -10) throw ParameterError("cover level must be at least -10");
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    CoverFamily fam;
    fam.level = level;
    fam.delta = delta;
    const double r = std::ldexp(delta, -level);

    // Closed cubes Q(x, r/5) and Q(y, r/5) are disjoint iff |x - y| > 2r/5.
    const double gap = 0.4 * r;
    Buckets kept(gap);
    for (Eigen::Index a = 0; a < s.size(); ++a) {
        bool clash = false;
        kept.near(s.atom(a), [&](int id) {
            if (sup_dist(s.atom(a), s.atom(fam.centers[static_cast<std::size_t>(id)])) <= gap) {
                clash = true;
            }
        });
        if (clash) continue;
        kept.insert(s.atom(a), static_cast<int>(fam.centers.size()));
        fam.centers.push_back(a);
        fam.cubes.emplace_back(Point(s.atom(a)), r);
    }

    // 2Q and 2R meet iff |x_Q - x_R| <= 4r.
    const double reach = 4.0 * r;
    Buckets all(reach);
    for (std::size_t q = 0; q < fam.cubes.size(); ++q) all.insert(fam.cubes[q].center, static_cast<int>(q));
    std::vector<int> color(fam.cubes.size(), -1);
    int colors = 0;
    for (std::size_t q = 0; q < fam.cubes.size(); ++q) {
        std::vector<int> nbrs;
        all.near(fam.cubes[q].center, [&](int id) {
            if (sup_dist(fam.cubes[q].center, fam.cubes[static_cast<std::size_t>(id)].center) <= reach) {
                nbrs.push_back(id);
            }
        });
        fam.overlap_bound = std::max(fam.overlap_bound, static_cast<int>(nbrs.size()));
        std::vector<bool> used(nbrs.size() + 1, false);
        for (int id : nbrs) {
            const int c = color[static_cast<std::size_t>(id)];
            if (c >= 0 && c < static_cast<int>(used.size())) used[static_cast<std::size_t>(c)] = true;
        }
        int c = 0;
        while (used[static_cast<std::size_t>(c)]) ++c;
        color[q] = c;
        colors = std::max(colors, c + 1);
    }
    fam.color_classes.assign(static_cast<std::size_t>(colors), {});
    for (std::size_t q = 0; q < fam.cubes.size(); ++q) {
        fam.color_classes[static_cast<std::size_t>(color[q])].push_back(static_cast<int>(q));
    }
    return fam;
}

CoverAudit audit_covers(const CoverFamily& cover, const DSet& s) {
    CoverAudit audit;
    for (Eigen::Index a = 0; a < s.size(); ++a) {
        const bool hit = std::any_of(cover.cubes.begin(), cover.cubes.end(),
                                     [&](const Cube& q) { return q.contains(s.atom(a)); });
        if (!hit) ++audit.uncovered_atoms;
    }
    for (std::size_t q = 0; q < cover.cubes.size(); ++q) {
        int count = 0;
        for (const Cube& r : cover.cubes) {
            if (cover.cubes[q].scaled(2.0).intersects(r.scaled(2.0))) ++count;
        }
        audit.max_overlap = std::max(audit.max_overlap, count);
    }
    for (const auto& cls : cover.color_classes) {
        for (std::size_t a = 0; a < cls.size(); ++a) {
            for (std::size_t b = a + 1; b < cls.size(); ++b) {
                const Cube qa = cover.cubes[static_cast<std::size_t>(cls[a])].scaled(2.0);
                const Cube qb = cover.cubes[static_cast<std::size_t>(cls[b])].scaled(2.0);
                if (qa.intersects(qb)) ++audit.class_intersections;
            }
        }
    }
    return audit;
}

int shell_period() {
    int m = 0;
    while (!(std::ldexp(1.0, -m) < kShellInner / kShellOuter)) ++m;
    return m;
}

std::vector<Shell> build_shells(int i_min, int i_max) {
    if (i_min > i_max) throw ParameterError("shell range is empty");
    std::vector<Shell> out;
    for (int i = i_min; i <= i_max; ++i) {
        out.push_back({i, std::ldexp(kShellInner, -i), std::ldexp(kShellOuter, -i)});
    }
    return out;
}

std::size_t shell_intersections(const std::vector<Shell>& shells, int m0) {
    std::size_t hits = 0;
    for (std::size_t a = 0; a < shells.size(); ++a) {
        for (std::size_t b = a + 1; b < shells.size(); ++b) {
            const int da = ((shells[a].level % m0) + m0) % m0;
            const int db = ((shells[b].level % m0) + m0) % m0;
            if (da != db || shells[a].level == shells[b].level) continue;
            if (std::max(shells[a].inner, shells[b].inner) <= std::min(shells[a].outer, shells[b].outer)) {
                ++hits;
            }
        }
    }
    return hits;
}

}  // namespace fracbesov
