#include "fracbesov/norms.hpp"

#include "fracbesov/approx.hpp"
#include "fracbesov/errors.hpp"
#include "fracbesov/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace fracbesov {

void NormParams::validate(int n, double d) const {
    if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("p must lie in (1, inf)");
    if (!(q > 1.0) || !std::isfinite(q)) throw ParameterError("q must lie in (1, inf)");
    if (u != 1 && u != 2) throw ParameterError("u must be 1 or 2");
    if (u > p) throw ParameterError("u must not exceed p");
    if (!(alpha < k)) throw ParameterError("k must exceed alpha");
    if (j_min > j_max) throw ParameterError("empty scale window");
    if (trace_side && !(alpha > (n - d) / p)) {
        std::ostringstream os;
        os << "trace norms need alpha > (n - d)/p = " << (n - d) / p;
        throw ParameterError(os.str());
    }
}

double NormParams::scale_exponent(int n, double d) const {
    return trace_side ? alpha - (n - d) / p : alpha;
}

nlohmann::json NormParams::to_json() const {
    return {{"alpha", alpha}, {"p", p},         {"q", q}, {"u", u}, {"k", k},
            {"j_min", j_min}, {"j_max", j_max}, {"trace_side", trace_side}};
}

NormParams NormParams::from_json(const nlohmann::json& j) {
    NormParams np;
    np.alpha = j.value("alpha", np.alpha);
    np.p = j.value("p", np.p);
    np.q = j.value("q", np.q);
    np.u = j.value("u", np.u);
    np.k = j.value("k", np.k);
    np.j_min = j.value("j_min", np.j_min);
    np.j_max = j.value("j_max", np.j_max);
    np.trace_side = j.value("trace_side", np.trace_side);
    return np;
}

nlohmann::json NormReport::to_json() const {
    nlohmann::json scales = nlohmann::json::array();
    for (const auto& [j, v] : per_scale) scales.push_back({j, v});
    return {{"total", total}, {"lp_part", lp_part}, {"seminorm_part", seminorm_part}, {"per_scale", scales}};
}

std::string NormReport::per_scale_csv() const {
    std::ostringstream os;
    os << std::setprecision(17) << "j,value\n";
    for (const auto& [j, v] : per_scale) os << j << ',' << v << '\n';
    return os.str();
}

int resolution_cutoff(double step) {
    if (!(step > 0.0)) throw ParameterError("resolution step must be positive");
    int j = static_cast<int>(std::floor(-std::log2(4.0 * step)));
    while (std::ldexp(1.0, -j) < 4.0 * step) --j;
    while (std::ldexp(1.0, -(j + 1)) >= 4.0 * step) ++j;
    return j;
}

namespace {

int clamp_window(const NormParams& params, double step) {
    const int top = std::min(params.j_max, resolution_cutoff(step));
    if (top < params.j_min) {
        std::ostringstream os;
        os << "scale window [" << params.j_min << ", " << params.j_max
           << "] is empty below the resolution cutoff " << resolution_cutoff(step);
        throw ResolutionError(os.str());
    }
    return top;
}

double lq_aggregate(const std::vector<std::pair<int, double>>& terms, double q) {
    CompensatedSum acc;
    for (const auto& t : terms) acc.add(std::pow(t.second, q));
    return std::pow(acc.value(), 1.0 / q);
}

NormReport assemble(double lp, std::vector<std::pair<int, double>> per_scale, double q, int j_min,
                    int j_max) {
    NormReport rep;
    rep.lp_part = lp;
    rep.seminorm_part = lq_aggregate(per_scale, q);
    rep.total = rep.lp_part + rep.seminorm_part;
    rep.per_scale = std::move(per_scale);
    rep.j_min = j_min;
    rep.j_max = j_max;
    return rep;
}

struct IndexVectorHash {
    std::size_t operator()(const std::vector<Eigen::Index>& v) const noexcept {
        std::size_t h = v.size();
        for (Eigen::Index x : v) h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

}  // namespace

NormReport besov_norm_on_set(const Eigen::VectorXd& f, const DSet& s, const NormParams& params) {
    params.validate(s.dim(), s.dimension());
    if (f.size() != s.size()) throw ParameterError("function must be sampled on every atom");
    const int top = clamp_window(params, s.resolution_floor() / 4.0);
    const double beta = params.scale_exponent(s.dim(), s.dimension());
    const double w = s.weight();

    std::vector<std::pair<int, double>> per_scale;
    for (int j = params.j_min; j <= top; ++j) {
        const double t = std::ldexp(1.0, -j);
        // Many atoms see the same subset at coarse scales.
        std::unordered_map<std::vector<Eigen::Index>, double, IndexVectorHash> cache;
        CompensatedSum acc;
        for (Eigen::Index a = 0; a < s.size(); ++a) {
            const Cube q(Point(s.atom(a)), t);
            auto atoms = s.atoms_in(q);
            auto it = cache.find(atoms);
            if (it == cache.end()) {
                const double e = approx_value(s, f, atoms, q, params.k, params.u);
                it = cache.emplace(std::move(atoms), e).first;
            }
            acc.add(w * std::pow(it->second, params.p));
        }
        per_scale.emplace_back(j, std::pow(2.0, j * beta) *
                                      std::pow(acc.value(), 1.0 / params.p));
    }
    return assemble(weighted_lp(f, s.weights(), params.p), std::move(per_scale), params.q, params.j_min, top);
}

NormReport besov_norm_on_set_reference(const Eigen::VectorXd& f, const DSet& s, const NormParams& params) {
    params.validate(s.dim(), s.dimension());
    if (f.size() != s.size()) throw ParameterError("function must be sampled on every atom");
    const int top = clamp_window(params, s.resolution_floor() / 4.0);
    const double beta = params.scale_exponent(s.dim(), s.dimension());
    const Eigen::MatrixXd& pts = s.atoms();
    const long double w = s.weight();

    long double lp = 0;
    for (Eigen::Index a = 0; a < s.size(); ++a) lp += w * std::pow(static_cast<long double>(std::abs(f[a])), params.p);
    NormReport rep;
    rep.lp_part = static_cast<double>(std::pow(lp, 1.0L / params.p));
    long double semi = 0;
    for (int j = params.j_min; j <= top; ++j) {
        const double t = std::ldexp(1.0, -j);
        long double acc = 0;
        for (Eigen::Index a = 0; a < s.size(); ++a) {
            std::vector<Eigen::Index> inside;
            for (Eigen::Index b = 0; b < s.size(); ++b) {
                bool in = true;
                for (int i = 0; i < s.dim() && in; ++i) {
                    in = pts(i, b) >= pts(i, a) - t && pts(i, b) <= pts(i, a) + t;
                }
                if (in) inside.push_back(b);
            }
            const double e = approx_value(s, f, inside, Cube(Point(pts.col(a)), t), params.k, params.u);
            acc += w * std::pow(static_cast<long double>(e), params.p);
        }
        const double term = std::pow(2.0, j * beta) * static_cast<double>(std::pow(acc, 1.0L / params.p));
        rep.per_scale.emplace_back(j, term);
        semi += std::pow(static_cast<long double>(term), params.q);
    }
    rep.seminorm_part = static_cast<double>(std::pow(semi, 1.0L / params.q));
    rep.total = rep.lp_part + rep.seminorm_part;
    rep.j_min = params.j_min;
    rep.j_max = top;
    return rep;
}

namespace {

// Outer integration points: every stride-th grid point inside the region,
// offset so the sample sits in the middle of its stride block.
struct OuterPoints {
    std::vector<Eigen::Index> flat;
    double weight = 0.0;
};

int outer_stride(const Grid& g, const GridSampling& sampling) {
    if (sampling.outer_per_side < 1 || sampling.inner_per_side < 1) {
        throw ParameterError("grid sampling counts must be positive");
    }
    return std::max(1, g.per_side / sampling.outer_per_side);
}

OuterPoints outer_points(const Grid& g, const Cube& region, int stride) {
    OuterPoints out;
    const int off = stride / 2;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const auto idx = g.unflatten(i);
        bool keep = true;
        for (auto v : idx) keep = keep && v % stride == off;
        if (keep && region.contains(g.point(i))) out.flat.push_back(i);
    }
    out.weight = std::pow(stride * g.step(), g.dim());
    return out;
}

// Inner lattice step and reach (in grid steps) for a cube of radius t.
struct InnerLattice {
    Eigen::Index step = 1;
    Eigen::Index reach = 0;  // multiples of step
};

InnerLattice inner_lattice(const Grid& g, double t, const GridSampling& sampling) {
    const double cells = t / g.step();  // radius in grid steps
    InnerLattice lat;
    lat.step = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::floor(2.0 * cells / sampling.inner_per_side)));
    lat.reach = static_cast<Eigen::Index>(std::floor(cells / static_cast<double>(lat.step) * (1.0 + 1e-12)));
    return lat;
}

double local_e(const GridFunction& f, const std::vector<Eigen::Index>& pts, const Point& x, double t, int k,
               int u) {
    const Grid& g = f.grid;
    const auto m = static_cast<Eigen::Index>(pts.size());
    Eigen::VectorXd values(m);
    Eigen::MatrixXd coords(g.dim(), k >= 2 ? m : 0);
    for (Eigen::Index i = 0; i < m; ++i) {
        values[i] = f.values[pts[static_cast<std::size_t>(i)]];
        if (k >= 2) coords.col(i) = g.point(pts[static_cast<std::size_t>(i)]);
    }
    if (k < 2) coords.resize(g.dim(), m);
    return best_approx(coords, values, Eigen::VectorXd::Ones(m), Cube(x, t), k, u).value;
}

// Grid points of the inner lattice around `center`, ascending flat index.
std::vector<Eigen::Index> inner_sample(const Grid& g, const std::vector<Eigen::Index>& center,
                                       const InnerLattice& lat) {
    const int n = g.dim();
    std::vector<Eigen::Index> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        const auto c = center[static_cast<std::size_t>(a)];
        Eigen::Index mlo = -lat.reach, mhi = lat.reach;
        while (c + mlo * lat.step < 0) ++mlo;
        while (c + mhi * lat.step >= g.per_side) --mhi;
        lo[static_cast<std::size_t>(a)] = c + mlo * lat.step;
        hi[static_cast<std::size_t>(a)] = c + mhi * lat.step;
    }
    std::vector<Eigen::Index> out;
    std::vector<Eigen::Index> idx = lo;
    while (true) {
        out.push_back(g.flatten(idx));
        int a = 0;
        while (a < n) {
            auto& v = idx[static_cast<std::size_t>(a)];
            if (v + lat.step <= hi[static_cast<std::size_t>(a)]) {
                v += lat.step;
                break;
            }
            v = lo[static_cast<std::size_t>(a)];
            ++a;
        }
        if (a == n) break;
    }
    return out;
}

struct GridTable {
    OuterPoints outer;
    int j_min = 0;
    int j_max = 0;
    Eigen::MatrixXd e;  // outer point x scale
    double lp = 0.0;
};

double grid_lp(const GridFunction& f, const Cube& region, double p) {
    CompensatedSum acc;
    const double w = f.grid.cell_volume();
    for (Eigen::Index i = 0; i < f.grid.size(); ++i) {
        if (region.contains(f.grid.point(i))) acc.add(w * std::pow(std::abs(f.values[i]), p));
    }
    return std::pow(acc.value(), 1.0 / p);
}

void check_grid_input(const GridFunction& f, const Cube& region) {
    if (f.values.size() != f.grid.size()) throw ParameterError("grid function size mismatch");
    if (region.dim() != f.grid.dim()) throw ParameterError("region dimension mismatch");
}

GridTable grid_table(const GridFunction& f, const Cube& region, const NormParams& params, int u,
                     const GridSampling& sampling) {
    check_grid_input(f, region);
    GridTable tab;
    const Grid& g = f.grid;
    tab.j_min = params.j_min;
    tab.j_max = clamp_window(params, g.step());
    tab.outer = outer_points(g, region, outer_stride(g, sampling));
    const auto scales = tab.j_max - tab.j_min + 1;
    tab.e.resize(static_cast<Eigen::Index>(tab.outer.flat.size()), scales);
    for (int j = tab.j_min; j <= tab.j_max; ++j) {
        const double t = std::ldexp(1.0, -j);
        const InnerLattice lat = inner_lattice(g, t, sampling);
        for (std::size_t o = 0; o < tab.outer.flat.size(); ++o) {
            const Eigen::Index c = tab.outer.flat[o];
            const auto pts = inner_sample(g, g.unflatten(c), lat);
            tab.e(static_cast<Eigen::Index>(o), j - tab.j_min) = local_e(f, pts, g.point(c), t, params.k, u);
        }
    }
    tab.lp = grid_lp(f, region, params.p);
    return tab;
}

// Same table by scanning the whole grid for every outer point.
GridTable grid_table_reference(const GridFunction& f, const Cube& region, const NormParams& params, int u,
                               const GridSampling& sampling) {
    check_grid_input(f, region);
    GridTable tab;
    const Grid& g = f.grid;
    tab.j_min = params.j_min;
    tab.j_max = clamp_window(params, g.step());
    const int stride = outer_stride(g, sampling);
    tab.outer.weight = std::pow(stride * g.step(), g.dim());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const auto idx = g.unflatten(i);
        if (std::all_of(idx.begin(), idx.end(), [&](Eigen::Index v) { return v % stride == stride / 2; }) &&
            region.contains(g.point(i))) {
            tab.outer.flat.push_back(i);
        }
    }
    tab.e.resize(static_cast<Eigen::Index>(tab.outer.flat.size()), tab.j_max - tab.j_min + 1);
    for (int j = tab.j_min; j <= tab.j_max; ++j) {
        const double t = std::ldexp(1.0, -j);
        const InnerLattice lat = inner_lattice(g, t, sampling);
        for (std::size_t o = 0; o < tab.outer.flat.size(); ++o) {
            const auto c = g.unflatten(tab.outer.flat[o]);
            std::vector<Eigen::Index> pts;
            for (Eigen::Index y = 0; y < g.size(); ++y) {
                const auto yi = g.unflatten(y);
                bool in = true;
                for (std::size_t a = 0; a < yi.size() && in; ++a) {
                    const Eigen::Index diff = yi[a] - c[a];
                    in = diff % lat.step == 0 && std::abs(diff) <= lat.reach * lat.step;
                }
                if (in) pts.push_back(y);
            }
            tab.e(static_cast<Eigen::Index>(o), j - tab.j_min) =
                local_e(f, pts, g.point(tab.outer.flat[o]), t, params.k, u);
        }
    }
    long double lp = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (region.contains(g.point(i))) {
            lp += g.cell_volume() * std::pow(static_cast<long double>(std::abs(f.values[i])), params.p);
        }
    }
    tab.lp = static_cast<double>(std::pow(lp, 1.0L / params.p));
    return tab;
}

NormReport besov_from_table(const GridTable& tab, const NormParams& params) {
    std::vector<std::pair<int, double>> per_scale;
    for (Eigen::Index c = 0; c < tab.e.cols(); ++c) {
        CompensatedSum acc;
        for (Eigen::Index o = 0; o < tab.e.rows(); ++o) acc.add(tab.outer.weight * std::pow(tab.e(o, c), params.p));
        const int j = tab.j_min + static_cast<int>(c);
        per_scale.emplace_back(j, std::pow(2.0, j * params.alpha) * std::pow(acc.value(), 1.0 / params.p));
    }
    return assemble(tab.lp, std::move(per_scale), params.q, tab.j_min, tab.j_max);
}

NormReport tl_from_table(const GridTable& tab, const NormParams& params) {
    NormReport rep = besov_from_table(tab, params);
    CompensatedSum outer;
    for (Eigen::Index o = 0; o < tab.e.rows(); ++o) {
        CompensatedSum g;
        for (Eigen::Index c = 0; c < tab.e.cols(); ++c) {
            const int j = tab.j_min + static_cast<int>(c);
            g.add(std::pow(std::pow(2.0, j * params.alpha) * tab.e(o, c), params.q));
        }
        outer.add(tab.outer.weight * std::pow(g.value(), params.p / params.q));
    }
    rep.seminorm_part = std::pow(outer.value(), 1.0 / params.p);
    rep.total = rep.lp_part + rep.seminorm_part;
    return rep;
}

NormReport besov_reference_aggregate(const GridTable& tab, const NormParams& params) {
    NormReport rep;
    rep.lp_part = tab.lp;
    long double semi = 0;
    for (Eigen::Index c = 0; c < tab.e.cols(); ++c) {
        long double acc = 0;
        for (Eigen::Index o = 0; o < tab.e.rows(); ++o) {
            acc += tab.outer.weight * std::pow(static_cast<long double>(tab.e(o, c)), params.p);
        }
        const int j = tab.j_min + static_cast<int>(c);
        const double term = std::pow(2.0, j * params.alpha) * static_cast<double>(std::pow(acc, 1.0L / params.p));
        rep.per_scale.emplace_back(j, term);
        semi += std::pow(static_cast<long double>(term), params.q);
    }
    rep.seminorm_part = static_cast<double>(std::pow(semi, 1.0L / params.q));
    rep.total = rep.lp_part + rep.seminorm_part;
    rep.j_min = tab.j_min;
    rep.j_max = tab.j_max;
    return rep;
}

NormParams tl_params(const NormParams& params) {
    NormParams tp = params;
    tp.u = 1;
    tp.validate();
    return tp;
}

}  // namespace

NormReport besov_norm_on_grid(const GridFunction& f, const Cube& region, const NormParams& params,
                              const GridSampling& sampling) {
    params.validate();
    return besov_from_table(grid_table(f, region, params, params.u, sampling), params);
}

NormReport tl_norm_on_grid(const GridFunction& f, const Cube& region, const NormParams& params,
                           const GridSampling& sampling) {
    const NormParams tp = tl_params(params);
    return tl_from_table(grid_table(f, region, tp, 1, sampling), tp);
}

std::pair<NormReport, NormReport> besov_and_tl_on_grid(const GridFunction& f, const Cube& region,
                                                       const NormParams& params, const GridSampling& sampling) {
    const NormParams tp = tl_params(params);
    const GridTable tab = grid_table(f, region, tp, 1, sampling);
    return {besov_from_table(tab, tp), tl_from_table(tab, tp)};
}

NormReport besov_norm_on_grid_reference(const GridFunction& f, const Cube& region, const NormParams& params,
                                        const GridSampling& sampling) {
    params.validate();
    return besov_reference_aggregate(grid_table_reference(f, region, params, params.u, sampling), params);
}

NormReport tl_norm_on_grid_reference(const GridFunction& f, const Cube& region, const NormParams& params,
                                     const GridSampling& sampling) {
    const NormParams tp = tl_params(params);
    const GridTable tab = grid_table_reference(f, region, tp, 1, sampling);
    NormReport rep = besov_reference_aggregate(tab, tp);
    long double outer = 0;
    for (Eigen::Index o = 0; o < tab.e.rows(); ++o) {
        long double g = 0;
        for (Eigen::Index c = 0; c < tab.e.cols(); ++c) {
            const int j = tab.j_min + static_cast<int>(c);
            g += std::pow(static_cast<long double>(std::pow(2.0, j * tp.alpha) * tab.e(o, c)), tp.q);
        }
        outer += tab.outer.weight * std::pow(g, tp.p / tp.q);
    }
    rep.seminorm_part = static_cast<double>(std::pow(outer, 1.0L / tp.p));
    rep.total = rep.lp_part + rep.seminorm_part;
    return rep;
}

double grid_cube_approx(const GridFunction& f, const Cube& q, int k, int u, int inner_per_side) {
    const Grid& g = f.grid;
    const int n = g.dim();
    const double h = g.step();
    std::vector<Eigen::Index> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n)),
        step(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        const auto sa = static_cast<std::size_t>(a);
        lo[sa] = std::max<Eigen::Index>(
            0, static_cast<Eigen::Index>(std::ceil((q.lower(a) - g.region.lower(a)) / h - 0.5)));
        hi[sa] = std::min<Eigen::Index>(
            g.per_side - 1, static_cast<Eigen::Index>(std::floor((q.upper(a) - g.region.lower(a)) / h - 0.5)));
        if (hi[sa] < lo[sa]) throw EmptySupportError("cube holds no grid point");
        step[sa] = std::max<Eigen::Index>(1, (hi[sa] - lo[sa] + 1) / std::max(1, inner_per_side));
    }
    std::vector<Eigen::Index> pts, idx = lo;
    while (true) {
        pts.push_back(g.flatten(idx));
        int a = 0;
        while (a < n) {
            const auto sa = static_cast<std::size_t>(a);
            if (idx[sa] + step[sa] <= hi[sa]) {
                idx[sa] += step[sa];
                break;
            }
            idx[sa] = lo[sa];
            ++a;
        }
        if (a == n) break;
    }
    return local_e(f, pts, q.center, q.half_side, k, u);
}

double sharp_maximal(const GridFunction& f, const PointRef& x, const NormParams& params,
                     const GridSampling& sampling) {
    if (!(params.alpha > 0.0)) throw ParameterError("alpha must be positive");
    const Grid& g = f.grid;
    if (f.values.size() != g.size()) throw ParameterError("grid function size mismatch");
    const int k = static_cast<int>(std::floor(params.alpha)) + 1;
    const int top = std::min(params.j_max, resolution_cutoff(g.step()));
    const auto center = g.nearest(x);
    const Point xc = g.point(g.flatten(center));
    double best = 0.0;
    for (int j = params.j_min; j <= top; ++j) {
        const double t = std::ldexp(1.0, -j);
        const auto pts = inner_sample(g, center, inner_lattice(g, t, sampling));
        best = std::max(best, std::pow(2.0, j * params.alpha) * local_e(f, pts, xc, t, k, 1));
    }
    return best;
}

HardyResult hardy_check(const std::vector<double>& a, double sigma, double p, HardyDirection dir) {
    if (dir == HardyDirection::prefix && !(sigma < 0.0)) throw ParameterError("prefix sums need sigma < 0");
    if (dir == HardyDirection::tail && !(sigma > 0.0)) throw ParameterError("tail sums need sigma > 0");
    if (!(p > 0.0)) throw ParameterError("p must be positive");
    for (double v : a) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("sequence must be finite and nonnegative");
    }
    const auto len = a.size();
    std::vector<long double> partial(len);
    ExtendedSum run;
    if (dir == HardyDirection::prefix) {
        for (std::size_t j = 0; j < len; ++j) {
            run.add(a[j]);
            partial[j] = run.value();
        }
    } else {
        for (std::size_t j = len; j-- > 0;) {
            run.add(a[j]);
            partial[j] = run.value();
        }
    }
    ExtendedSum lhs, rhs;
    const long double lp = p;
    for (std::size_t j = 0; j < len; ++j) {
        const long double w = std::pow(2.0L, static_cast<long double>(sigma) * static_cast<long double>(j));
        lhs.add(w * std::pow(partial[j], lp));
        rhs.add(w * std::pow(static_cast<long double>(a[j]), lp));
    }
    HardyResult res;
    res.lhs = static_cast<double>(lhs.value());
    res.rhs = static_cast<double>(rhs.value());
    res.ratio = res.rhs > 0.0 ? static_cast<double>(lhs.value() / rhs.value()) : 0.0;
    return res;
}

nlohmann::json PorousSummationResult::to_json() const {
    nlohmann::json j = {{"lhs", lhs}, {"rhs", rhs}, {"ratio", ratio}, {"vacuous", vacuous}};
    if (selected_norm) j["selected_norm"] = *selected_norm;
    if (selected_ratio) j["selected_ratio"] = *selected_ratio;
    return j;
}

namespace {

struct DyadicSums {
    double plain = 0.0;   // ||sum chi_Q a_Q||_p^p
    double q_sum = 0.0;   // ||(sum (chi_Q a_Q)^q)^{1/q}||_p^p
};

// Integrates sum a_Q chi_Q exactly by descending a sparse dyadic tree: a
// node is split only while some term cube lies strictly below it.
DyadicSums dyadic_integrals(const std::vector<std::pair<DyadicCube, double>>& terms, double p, double q) {
    DyadicSums out;
    if (terms.empty()) return out;
    std::unordered_map<DyadicCube, std::pair<double, double>, DyadicCubeHash> own;
    std::unordered_set<DyadicCube, DyadicCubeHash> ancestors;
    int top = terms.front().first.level;
    for (const auto& [c, v] : terms) top = std::min(top, c.level);
    for (const auto& [c, v] : terms) {
        auto& slot = own[c];
        slot.first += v;
        slot.second += std::pow(v, q);
        DyadicCube up = c;
        while (up.level > top) {
            up = up.parent();
            if (!ancestors.insert(up).second) break;
        }
    }
    std::set<DyadicCube> roots;
    for (const auto& [c, v] : terms) {
        DyadicCube up = c;
        while (up.level > top) up = up.parent();
        roots.insert(up);
    }
    const int n = terms.front().first.dim();
    CompensatedSum plain, qs;
    struct Frame {
        DyadicCube cube;
        double a;
        double aq;
    };
    std::vector<Frame> stack;
    for (const auto& r : roots) stack.push_back({r, 0.0, 0.0});
    while (!stack.empty()) {
        Frame fr = std::move(stack.back());
        stack.pop_back();
        if (auto it = own.find(fr.cube); it != own.end()) {
            fr.a += it->second.first;
            fr.aq += it->second.second;
        }
        if (ancestors.count(fr.cube)) {
            for (unsigned mask = 0; mask < (1u << n); ++mask) stack.push_back({fr.cube.child(mask), fr.a, fr.aq});
            continue;
        }
        const double vol = std::pow(fr.cube.side(), n);
        plain.add(vol * std::pow(fr.a, p));
        qs.add(vol * std::pow(fr.aq, p / q));
    }
    out.plain = plain.value();
    out.q_sum = qs.value();
    return out;
}

}  // namespace

PorousSummationResult porous_summation_check(const DSet& s, const NearSetFamily& family,
                                             const std::map<DyadicCube, double>& a, double p, double q,
                                             const PorousSelection* selection) {
    if (!(p > 1.0) || !std::isfinite(p) || !(q > 1.0) || !std::isfinite(q)) {
        throw ParameterError("p and q must lie in (1, inf)");
    }
    PorousSummationResult res;
    if (family.cubes.empty()) {
        res.vacuous = true;
        return res;
    }
    std::vector<std::pair<DyadicCube, double>> terms;
    for (const auto& [c, v] : a) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("coefficients must be finite and nonnegative");
        if (c.dim() != s.dim()) throw ParameterError("coefficient cube dimension mismatch");
        if (!std::binary_search(family.cubes.begin(), family.cubes.end(), c)) {
            throw ParameterError("coefficient map must be supported on the family");
        }
        if (v > 0.0) terms.emplace_back(c, v);
    }
    const DyadicSums sums = dyadic_integrals(terms, p, q);
    res.lhs = std::pow(sums.plain, 1.0 / p);
    res.rhs = std::pow(sums.q_sum, 1.0 / p);
    res.vacuous = terms.empty();
    res.ratio = res.rhs > 0.0 ? res.lhs / res.rhs : 0.0;
    if (selection) {
        std::vector<std::pair<DyadicCube, double>> moved;
        for (const auto& [c, v] : terms) {
            auto it = selection->assignment.find(c);
            if (it == selection->assignment.end()) throw ParameterError("selection does not cover the family");
            moved.emplace_back(it->second, v);
        }
        res.selected_norm = std::pow(dyadic_integrals(moved, p, q).plain, 1.0 / p);
        res.selected_ratio = *res.selected_norm > 0.0 ? res.lhs / *res.selected_norm : 0.0;
    }
    return res;
}

}  // namespace fracbesov
