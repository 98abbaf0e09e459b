#include "fracbesov/extension.hpp"

#include "fracbesov/covers.hpp"
#include "fracbesov/errors.hpp"
#include "fracbesov/norms.hpp"
#include "fracbesov/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace fracbesov {

double bump_profile(double s) {
    const double a = 1.0 - s * s;
    return a > 0.0 ? std::exp(-1.0 / a) : 0.0;
}

double cube_bump(const DyadicCube& q, const PointRef& x) {
    const double half = 0.5 * kBumpDilation * q.side();
    double v = 1.0;
    for (int i = 0; i < q.dim() && v > 0.0; ++i) {
        const double c = 0.5 * (q.lower(i) + q.upper(i));
        v *= bump_profile((x[i] - c) / half);
    }
    return v;
}

int extension_min_level(const Grid& g) {
    int level = static_cast<int>(std::floor(-std::log2(g.step()))) - 2;
    while (g.step() > std::ldexp(1.0, -level - 2)) --level;
    return level;
}

PartitionOfUnity build_partition(std::shared_ptr<const WhitneyCover> cover, const Grid& grid, const DSet& s) {
    if (!cover) throw ParameterError("partition needs a Whitney cover");
    PartitionOfUnity pu;
    pu.grid = grid;
    pu.cubes = cover->cubes();
    pu.kept = pu.cubes.size();
    const WhitneyCover residual =
        WhitneyCover::from_cubes(cover->residual(), cover->bounding_region(), cover->min_level());
    pu.cubes.insert(pu.cubes.end(), residual.cubes().begin(), residual.cubes().end());
    pu.cover = std::move(cover);

    const Eigen::Index m = grid.size();
    pu.offsets.assign(static_cast<std::size_t>(m) + 1, 0);
    pu.raw_sum = Eigen::VectorXd::Zero(m);
    pu.on_set.assign(static_cast<std::size_t>(m), false);
    for (Eigen::Index g = 0; g < m; ++g) {
        const Point x = grid.point(g);
        auto hits = pu.cover->dilate_hits(x, kBumpDilation);
        for (Eigen::Index r : residual.dilate_hits(x, kBumpDilation)) {
            hits.push_back(static_cast<Eigen::Index>(pu.kept) + r);
        }
        const auto start = pu.weights.size();
        CompensatedSum sum;
        for (Eigen::Index id : hits) {
            const double b = cube_bump(pu.cubes[static_cast<std::size_t>(id)], x);
            if (b > 0.0) {
                pu.cube_ids.push_back(id);
                pu.weights.push_back(b);
                sum.add(b);
            }
        }
        pu.raw_sum[g] = sum.value();
        if (!(pu.raw_sum[g] > 0.0)) {
            if (s.dist(x) == 0.0) {
                pu.on_set[static_cast<std::size_t>(g)] = true;
            } else {
                std::ostringstream os;
                os << std::setprecision(17) << "no bump covers grid point (" << x.transpose() << ")";
                throw GeometryError(os.str());
            }
        }
        for (auto i = start; i < pu.weights.size(); ++i) pu.weights[i] /= pu.raw_sum[g];
        pu.offsets[static_cast<std::size_t>(g) + 1] = static_cast<Eigen::Index>(pu.weights.size());
        pu.max_overlap = std::max(pu.max_overlap, static_cast<int>(pu.weights.size() - start));
    }
    return pu;
}

ReflectedCube reflect(const DyadicCube& q, const DSet& s) {
    ReflectedCube rc;
    rc.whitney = q;
    const Point c = q.center();
    // Lowest index among the nearest atoms.
    const double dist = s.dist(c);
    const auto tied = s.atoms_in(Cube(c, dist));
    rc.atom = s.nearest(c);
    for (Eigen::Index a : tied) {
        if ((s.atom(a) - c).cwiseAbs().maxCoeff() == dist) {
            rc.atom = a;
            break;
        }
    }
    rc.cube = Cube(Point(s.atom(rc.atom)), 0.25 * q.side());
    rc.mass = s.measure(rc.cube);
    return rc;
}

std::vector<Eigen::Index> ExtensionField::provenance(Eigen::Index point) const {
    const auto& pu = *partition;
    return {pu.cube_ids.begin() + pu.offsets[static_cast<std::size_t>(point)],
            pu.cube_ids.begin() + pu.offsets[static_cast<std::size_t>(point) + 1]};
}

std::string ExtensionField::to_csv() const {
    std::ostringstream os;
    os << std::setprecision(17) << "x,y,value\n";
    const Grid& g = field.grid;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const Point x = g.point(i);
        for (int a = 0; a < g.dim(); ++a) os << x[a] << ',';
        os << field.values[i] << '\n';
    }
    return os.str();
}

nlohmann::json ExtensionField::sidecar() const {
    const Grid& g = field.grid;
    nlohmann::json origin = nlohmann::json::array();
    for (int a = 0; a < g.dim(); ++a) origin.push_back(g.coord(a, 0));
    return {{"nx", g.per_side}, {"ny", g.per_side}, {"origin", origin}, {"step", g.step()},
            {"k", k},           {"delta", delta},   {"dtype", "float64"}, {"order", "x fastest"}};
}

void ExtensionField::write_binary(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path);
    out.write(reinterpret_cast<const char*>(field.values.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(field.values.size())));
    std::ofstream meta(path + ".json");
    if (!meta) throw Error("cannot open " + path + ".json");
    meta << sidecar().dump(2) << '\n';
}

ExtensionOperator::ExtensionOperator(const DSet& s, const Grid& grid, int k, double delta)
    : s_(&s), k_(k), delta_(delta) {
    if (k < 1) throw ParameterError("extension order k must be at least 1");
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    if (grid.dim() != s.dim()) throw ParameterError("grid dimension mismatch");
    auto cover = std::make_shared<const WhitneyCover>(whitney_decompose(s, grid.region, extension_min_level(grid)));
    partition_ = std::make_shared<const PartitionOfUnity>(build_partition(cover, grid, s));
    const auto& pu = *partition_;

    reflected_.reserve(pu.cubes.size());
    projections_.resize(pu.cubes.size());
    for (std::size_t i = 0; i < pu.cubes.size(); ++i) {
        ReflectedCube rc = reflect(pu.cubes[i], s);
        rc.residual = i >= pu.kept;
        rc.truncated = pu.cubes[i].side() > delta;
        if (!rc.truncated) {
            for (int deg = k - 1; deg >= 0; --deg) {
                try {
                    projections_[i] = build_projection(s, rc.cube, deg, 2);
                    rc.degree = deg;
                    break;
                } catch (const DegenerateGeometryError&) {
                }
            }
        }
        reflected_.push_back(std::move(rc));
    }

    row_offsets_.assign(pu.weights.size() + 1, 0);
    degraded_points_.assign(static_cast<std::size_t>(grid.size()), false);
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        const Point x = grid.point(g);
        for (auto e = pu.offsets[static_cast<std::size_t>(g)]; e < pu.offsets[static_cast<std::size_t>(g) + 1]; ++e) {
            const auto id = static_cast<std::size_t>(pu.cube_ids[static_cast<std::size_t>(e)]);
            const auto& proj = projections_[id];
            if (proj) {
                const Eigen::VectorXd row = proj->basis.row(x, proj->cube);
                for (Eigen::Index b = 0; b < row.size(); ++b) rows_.push_back(pu.weights[static_cast<std::size_t>(e)] * row[b]);
                if (reflected_[id].degree < k - 1) degraded_points_[static_cast<std::size_t>(g)] = true;
            }
            row_offsets_[static_cast<std::size_t>(e) + 1] = static_cast<Eigen::Index>(rows_.size());
        }
    }
}

std::size_t ExtensionOperator::degraded_cubes() const {
    return static_cast<std::size_t>(std::count_if(reflected_.begin(), reflected_.end(), [&](const ReflectedCube& r) {
        return !r.truncated && r.degree < k_ - 1;
    }));
}

ExtensionField ExtensionOperator::apply(const Eigen::VectorXd& f) const {
    if (f.size() != s_->size()) throw ParameterError("function must be sampled on every atom");
    const auto& pu = *partition_;
    std::vector<Eigen::VectorXd> coeffs(pu.cubes.size());
    for (std::size_t i = 0; i < pu.cubes.size(); ++i) {
        if (projections_[i]) coeffs[i] = projections_[i]->apply(f);
    }
    ExtensionField out;
    out.k = k_;
    out.delta = delta_;
    out.partition = partition_;
    out.degraded = degraded_points_;
    out.field.grid = pu.grid;
    out.field.values = Eigen::VectorXd::Zero(pu.grid.size());
    for (Eigen::Index g = 0; g < pu.grid.size(); ++g) {
        if (pu.on_set[static_cast<std::size_t>(g)]) {
            out.field.values[g] = f[s_->nearest(pu.grid.point(g))];
            continue;
        }
        CompensatedSum v;
        for (auto e = pu.offsets[static_cast<std::size_t>(g)]; e < pu.offsets[static_cast<std::size_t>(g) + 1]; ++e) {
            const auto& c = coeffs[static_cast<std::size_t>(pu.cube_ids[static_cast<std::size_t>(e)])];
            const auto r0 = row_offsets_[static_cast<std::size_t>(e)];
            for (Eigen::Index b = 0; b < c.size(); ++b) v.add(rows_[static_cast<std::size_t>(r0 + b)] * c[b]);
        }
        out.field.values[g] = v.value();
    }
    return out;
}

ExtensionField extend(const Eigen::VectorXd& f, const DSet& s, int k, double delta, const Grid& grid) {
    return ExtensionOperator(s, grid, k, delta).apply(f);
}

std::vector<double> default_trace_ladder(const Grid& g, int steps) {
    if (steps < 1) throw ParameterError("trace ladder needs at least one step");
    std::vector<double> ladder;
    for (int i = steps - 1; i >= 0; --i) ladder.push_back(std::ldexp(2.0 * g.step(), i));
    return ladder;
}

TraceResult trace(const GridFunction& field, const DSet& s, const std::vector<double>& ladder) {
    const Grid& g = field.grid;
    if (ladder.empty()) throw ParameterError("empty trace ladder");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (ladder[i] < g.step()) throw ResolutionError("trace radius below the grid step");
        if (i > 0 && !(ladder[i] < ladder[i - 1])) throw ParameterError("trace ladder must decrease");
    }
    TraceResult res;
    res.ladder = ladder;
    res.steps.resize(s.size(), static_cast<Eigen::Index>(ladder.size()));
    const int n = g.dim();
    const double h = g.step();
    std::vector<Eigen::Index> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
    for (Eigen::Index a = 0; a < s.size(); ++a) {
        for (std::size_t l = 0; l < ladder.size(); ++l) {
            const double t = ladder[l];
            bool empty = false;
            for (int i = 0; i < n; ++i) {
                const auto si = static_cast<std::size_t>(i);
                lo[si] = std::max<Eigen::Index>(
                    0, static_cast<Eigen::Index>(std::ceil((s.atom(a)[i] - t - g.region.lower(i)) / h - 0.5)));
                hi[si] = std::min<Eigen::Index>(
                    g.per_side - 1,
                    static_cast<Eigen::Index>(std::floor((s.atom(a)[i] + t - g.region.lower(i)) / h - 0.5)));
                empty = empty || hi[si] < lo[si];
            }
            if (empty) throw ResolutionError("trace cube holds no grid point");
            CompensatedSum sum;
            long count = 0;
            std::vector<Eigen::Index> idx = lo;
            while (true) {
                sum.add(field.values[g.flatten(idx)]);
                ++count;
                int i = 0;
                while (i < n) {
                    auto& v = idx[static_cast<std::size_t>(i)];
                    if (v < hi[static_cast<std::size_t>(i)]) {
                        ++v;
                        break;
                    }
                    v = lo[static_cast<std::size_t>(i)];
                    ++i;
                }
                if (i == n) break;
            }
            res.steps(a, static_cast<Eigen::Index>(l)) = sum.value() / static_cast<double>(count);
        }
    }
    res.values = res.steps.col(res.steps.cols() - 1);
    res.convergence = res.steps.cols() > 1
                          ? Eigen::VectorXd((res.values - res.steps.col(res.steps.cols() - 2)).cwiseAbs())
                          : Eigen::VectorXd::Zero(s.size());
    return res;
}

nlohmann::json LocalTransferReport::to_json() const {
    return {{"j", j},
            {"k", k},
            {"u", u},
            {"near_max_ratio", near_max_ratio},
            {"near_points", near_points},
            {"near_vacuous", near_vacuous},
            {"far_max_ratio", far_max_ratio},
            {"far_points", far_points},
            {"far_beyond_nonzero", far_beyond_nonzero},
            {"cubetrans_max_ratio", cubetrans_max_ratio},
            {"cubetrans_points", cubetrans_points},
            {"witnesses", witnesses}};
}

nlohmann::json DecayReport::to_json() const {
    return {{"t", t},
            {"max_ratio", max_ratio},
            {"points", points},
            {"vacuous", vacuous},
            {"second_regime", second_regime},
            {"witnesses", witnesses}};
}

namespace {

constexpr double kZero = 1e-13;

double set_e(const DSet& s, const Eigen::VectorXd& f, const Cube& q, int k, int u) {
    const auto atoms = s.atoms_in(q);
    if (atoms.empty()) return 0.0;
    return approx_value(s, f, atoms, q, k, u);
}

// Sum of E(f, 2K) over the cover cubes K whose double contains x.
struct CoverSums {
    CoverFamily cover;
    std::vector<double> e;

    double at(const PointRef& x, const DSet& s, std::optional<Shell> shell) const {
        if (shell && !shell->contains(s.dist(x))) return 0.0;
        double sum = 0.0;
        for (std::size_t c = 0; c < cover.cubes.size(); ++c) {
            const Cube twice(cover.cubes[c].center, 2.0 * cover.cubes[c].half_side);
            if (twice.contains(x)) sum += e[c];
        }
        return sum;
    }
};

CoverSums cover_sums(const DSet& s, const Eigen::VectorXd& f, int level, double delta, int k, int u) {
    CoverSums cs;
    cs.cover = build_covers(s, level, delta);
    for (const auto& c : cs.cover.cubes) cs.e.push_back(set_e(s, f, Cube(c.center, 2.0 * c.half_side), k, u));
    return cs;
}

void note_ratio(double lhs, double rhs, double& worst, nlohmann::json& witnesses, const char* side,
                const Point& x) {
    double r = 0.0;
    if (lhs <= kZero * (1.0 + rhs)) {
        r = 0.0;
    } else if (rhs > 0.0) {
        r = lhs / rhs;
    } else {
        r = std::numeric_limits<double>::infinity();
    }
    if (r > worst) {
        worst = r;
        if (witnesses.size() < 8) {
            witnesses.push_back({{"side", side}, {"x", std::vector<double>(x.data(), x.data() + x.size())},
                                 {"lhs", lhs}, {"rhs", rhs}});
        }
    }
}

}  // namespace

LocalTransferReport local_transfer_check(const ExtensionField& ext, const Eigen::VectorXd& f, const DSet& s,
                                         int u, int j, double cover_delta, int stride) {
    if (j < 0) throw ParameterError("scale index j must be non-negative");
    if (stride < 1) throw ParameterError("stride must be positive");
    const GridFunction& ft = ext.field;
    const Grid& g = ft.grid;
    const int k = ext.k;
    const double side = std::ldexp(1.0, -j);
    if (side < 4.0 * g.step()) throw ResolutionError("scale 2^-j is not resolved by the grid");
    LocalTransferReport rep;
    rep.j = j;
    rep.k = k;
    rep.u = u;

    const CoverSums near_cover = cover_sums(s, f, j, cover_delta, k, u);
    std::vector<CoverSums> far_covers;  // levels -10 .. j-1
    for (int i = -10; i < j; ++i) far_covers.push_back(cover_sums(s, f, i, cover_delta, i >= 0 ? k : 0, u));
    const auto shells = build_shells(-10, std::max(j - 1, -10));

    for (Eigen::Index gi = 0; gi < g.size(); ++gi) {
        const auto idx = g.unflatten(gi);
        if (!std::all_of(idx.begin(), idx.end(), [&](Eigen::Index v) { return v % stride == stride / 2; })) continue;
        const Point x = g.point(gi);
        const DyadicCube q = DyadicCube::containing(x, j);
        const Cube four(q.center(), 2.0 * side);
        const double lhs = grid_cube_approx(ft, four, k, u);
        const double dq = s.dist(q.center());

        // cube transfer: E_k(f~, Q(x, 2^-j)) against the dyadic cube holding x
        ++rep.cubetrans_points;
        note_ratio(grid_cube_approx(ft, Cube(x, side), k, u), lhs, rep.cubetrans_max_ratio, rep.witnesses,
                   "cubetrans", x);

        if (dq / 320.0 <= side && side <= 1.0) {
            ++rep.near_points;
            const double rhs = near_cover.at(x, s, std::nullopt);
            if (lhs <= kZero && rhs <= kZero) ++rep.near_vacuous;
            note_ratio(lhs, rhs, rep.near_max_ratio, rep.witnesses, "near", x);
            continue;
        }
        // Far cube: 320 2^{-i-1} < dist(x_Q, S) <= 320 2^{-i}.
        ++rep.far_points;
        const int i = static_cast<int>(std::floor(std::log2(320.0 / dq)));
        if (i < -10) {
            if (lhs > kZero) ++rep.far_beyond_nonzero;
            continue;
        }
        double rhs = 0.0;
        for (int ii = -10; ii < j; ++ii) {
            const auto& cs = far_covers[static_cast<std::size_t>(ii + 10)];
            rhs += std::ldexp(1.0, k * (ii - j)) * cs.at(x, s, shells[static_cast<std::size_t>(ii + 10)]);
        }
        note_ratio(lhs, rhs, rep.far_max_ratio, rep.witnesses, "far", x);
    }
    return rep;
}

DecayReport decay_check(const ExtensionField& ext, const Eigen::VectorXd& f, const DSet& s, int u, double t,
                        int stride) {
    const GridFunction& ft = ext.field;
    const Grid& g = ft.grid;
    if (t < 2.0 * g.step()) throw ResolutionError("decay radius below the grid resolution");
    if (stride < 1) throw ParameterError("stride must be positive");
    DecayReport rep;
    rep.t = t;
    const int k = ext.k;
    for (Eigen::Index gi = 0; gi < g.size(); ++gi) {
        const auto idx = g.unflatten(gi);
        if (!std::all_of(idx.begin(), idx.end(), [&](Eigen::Index v) { return v % stride == stride / 2; })) continue;
        const Point x = g.point(gi);
        const double dist = s.dist(x);
        if (dist < t) continue;
        ++rep.points;
        const double lhs = grid_cube_approx(ft, Cube(x, t), k, u);
        const double r = 50.0 * std::max(80.0 * t, dist);
        const bool second = r > ext.delta;
        if (second) ++rep.second_regime;
        const Cube kx(Point(s.atom(s.nearest(x))), r);
        const double damp = std::pow(t, k) / (std::pow(t, k) + std::pow(dist, k));
        const double rhs = damp * set_e(s, f, kx, second ? 0 : k, u);
        if (lhs <= kZero && rhs <= kZero) {
            ++rep.vacuous;
            continue;
        }
        note_ratio(lhs, rhs, rep.max_ratio, rep.witnesses, "decay", x);
    }
    return rep;
}

}  // namespace fracbesov
