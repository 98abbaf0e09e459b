#include "fracbesov/porosity.hpp"

#include "fracbesov/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace fracbesov {

namespace {

constexpr std::size_t kMaxFamilySize = std::size_t{1} << 22;

// Visit subgrid points of `search` with step half_side / (2 kappa) in
// lexicographic order whose closed hole cube misses every atom; stop when
// the visitor returns true.
template <typename Visit>
bool for_each_hole(const DSet& s, const Cube& search, double hole, double kappa, Visit&& visit) {
    const int n = s.dim();
    const auto per_side = static_cast<std::int64_t>(std::llround(2.0 * kappa));
    const double step = search.half_side / static_cast<double>(per_side);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n), -per_side);
    Point y(n);
    while (true) {
        for (int i = 0; i < n; ++i) {
            y[i] = search.center[i] + static_cast<double>(idx[static_cast<std::size_t>(i)]) * step;
        }
        if (s.dist(y) > hole && visit(y)) return true;
        int i = 0;
        while (i < n) {
            auto& c = idx[static_cast<std::size_t>(i)];
            if (c < per_side) {
                ++c;
                break;
            }
            c = -per_side;
            ++i;
        }
        if (i == n) return false;
    }
}

}  // namespace

NearSetFamily near_set_family(const DSet& s, double gamma, int max_level,
                              std::optional<Cube> region) {
    if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
    if (max_level < 0) throw ParameterError("max_level must be non-negative");
    const Cube box = region.value_or(s.bounding());
    const int n = s.dim();
    NearSetFamily fam;
    fam.gamma = gamma;
    std::size_t scanned = 0;
    for (int level = 0; level <= max_level; ++level) {
        std::vector<std::int64_t> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
        double count = 1.0;
        for (int i = 0; i < n; ++i) {
            lo[static_cast<std::size_t>(i)] =
                static_cast<std::int64_t>(std::ceil(std::ldexp(box.lower(i), level)));
            hi[static_cast<std::size_t>(i)] =
                static_cast<std::int64_t>(std::floor(std::ldexp(box.upper(i), level))) - 1;
            count *= static_cast<double>(
                std::max<std::int64_t>(0, hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)] + 1));
        }
        scanned += static_cast<std::size_t>(count);
        if (scanned > kMaxFamilySize) throw ResourceError("near-set family scan exceeds budget");
        if (count == 0.0) continue;
        std::vector<std::int64_t> c = lo;
        const double side = std::ldexp(1.0, -level);
        while (true) {
            DyadicCube q{level, c};
            if (s.dist(q.center()) <= gamma * side) fam.cubes.push_back(std::move(q));
            int i = 0;
            while (i < n) {
                auto& ci = c[static_cast<std::size_t>(i)];
                if (ci < hi[static_cast<std::size_t>(i)]) {
                    ++ci;
                    break;
                }
                ci = lo[static_cast<std::size_t>(i)];
                ++i;
            }
            if (i == n) break;
        }
    }
    std::sort(fam.cubes.begin(), fam.cubes.end());
    return fam;
}

std::optional<Point> find_hole(const DSet& s, const Cube& search, double hole, double kappa) {
    std::optional<Point> found;
    for_each_hole(s, search, hole, kappa, [&](const Point& y) {
        found = y;
        return true;
    });
    return found;
}

double estimate_porosity(const DSet& s, int trials, std::uint64_t rng_seed) {
    if (trials < 1) throw ParameterError("porosity estimate needs at least one trial");
    const double r_lo = std::min(1.0, s.resolution_floor());
    std::mt19937_64 rng(rng_seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, s.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Cube> samples;
    samples.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        const Eigen::Index a = pick(rng);
        const double r = r_lo * std::pow(1.0 / r_lo, unit(rng));
        samples.emplace_back(Point(s.atom(a)), r);
    }
    for (int e = 1; e <= kMaxPorosityLadderExponent; ++e) {
        const double kappa = std::ldexp(1.0, e);
        if (s.spacing() > 0.0 && r_lo / kappa < 0.5 * s.spacing()) break;
        const bool all = std::all_of(samples.begin(), samples.end(), [&](const Cube& q) {
            return find_hole(s, q, q.half_side / kappa, kappa).has_value();
        });
        if (all) return kappa;
    }
    throw PorosityError("no porosity constant on the ladder works at this resolution");
}

int PorousSelection::residue(const DyadicCube& q) const {
    return ((q.level % r0) + r0) % r0;
}

PorousSelection porous_selection(const NearSetFamily& family, const DSet& s, double kappa) {
    if (!(kappa >= 1.0)) throw ParameterError("kappa must be at least 1");
    PorousSelection sel;
    sel.gamma = family.gamma;
    sel.kappa = kappa;
    sel.sigma = (1.0 + family.gamma) * 16.0 * kappa;
    sel.r0 = static_cast<int>(std::floor(std::log2(sel.sigma * sel.sigma))) + 1;
    while (std::ldexp(1.0, sel.r0 - 1) > sel.sigma * sel.sigma) --sel.r0;
    while (!(sel.sigma * sel.sigma < std::ldexp(1.0, sel.r0))) ++sel.r0;
    for (const auto& q : family.cubes) {
        if (q.level < 0) throw ParameterError("family cubes must have side at most 1");
        const Cube cube = q.to_cube();
        const double rq = cube.half_side;
        const auto y = find_hole(s, Cube(cube.center, 0.5 * rq), rq / (2.0 * kappa), kappa);
        if (!y) {
            std::ostringstream os;
            os << "no hole found in cube at level " << q.level;
            throw PorosityError(os.str());
        }
        int level = q.level;
        while (std::ldexp(1.0, -level) > rq / (4.0 * kappa)) ++level;
        sel.assignment.emplace(q, DyadicCube::containing(*y, level));
    }
    return sel;
}

SelectionAudit audit_selection(const PorousSelection& sel, const DSet& s) {
    SelectionAudit audit;
    std::map<int, std::vector<const DyadicCube*>> classes;
    for (const auto& [q, r] : sel.assignment) {
        ++audit.checked;
        const double lq = q.side();
        bool ok = lq <= sel.sigma * r.side();
        // r(Q) inside int(Q): strict containment on integer coordinates.
        if (ok) {
            const int shift = r.level - q.level;
            ok = shift >= 0;
            for (int i = 0; ok && i < q.dim(); ++i) {
                const std::int64_t lo = q.coords[static_cast<std::size_t>(i)] << shift;
                const std::int64_t hi = (q.coords[static_cast<std::size_t>(i)] + 1) << shift;
                ok = r.coords[static_cast<std::size_t>(i)] > lo &&
                     r.coords[static_cast<std::size_t>(i)] + 1 < hi;
            }
        }
        if (ok) {
            const Cube rc = r.to_cube();
            ok = s.dist(rc) >= lq / sel.sigma && s.dist(rc.center) + rc.half_side <= sel.sigma * lq;
        }
        if (!ok) ++audit.violations;
        classes[sel.residue(q)].push_back(&r);
    }
    for (auto& [res, cubes] : classes) {
        std::sort(cubes.begin(), cubes.end(), [](const DyadicCube* a, const DyadicCube* b) {
            return a->lower(0) < b->lower(0);
        });
        std::vector<const DyadicCube*> active;
        for (const DyadicCube* c : cubes) {
            const double start = c->lower(0);
            std::erase_if(active, [&](const DyadicCube* a) { return a->upper(0) < start; });
            for (const DyadicCube* a : active) {
                if (closed_intersect(*a, *c)) ++audit.intersections;
            }
            active.push_back(c);
        }
    }
    return audit;
}

DyadicCube cop_check(const DSet& s, Eigen::Index atom, int i, const WhitneyCover& cover,
                     double kappa) {
    const double scale = std::ldexp(1.0, -i);
    if (scale < s.resolution_floor()) {
        std::ostringstream os;
        os << "scale 2^-" << i << " is below the atom resolution " << s.resolution_floor();
        throw ResolutionError(os.str());
    }
    const Point x = s.atom(atom);
    const double half = 0.5 * scale;
    const Cube outer(x, scale);
    std::optional<DyadicCube> result;
    for_each_hole(s, Cube(x, half), half / kappa, kappa, [&](const Point& y) {
        const auto k = cover.locate(y);
        if (!k) return false;
        const DyadicCube& q = cover.cubes()[static_cast<std::size_t>(*k)];
        const double diam = q.side();
        if (diam >= half / (5.0 * kappa) && diam <= half && outer.contains(q.to_cube())) {
            result = q;
            return true;
        }
        return false;
    });
    if (!result) {
        std::ostringstream os;
        os << "no Whitney cube of the required size near atom " << atom << " at scale 2^-" << i;
        throw ResolutionError(os.str());
    }
    return *result;
}

}  // namespace fracbesov
