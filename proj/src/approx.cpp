#include "fracbesov/approx.hpp"

#include "fracbesov/errors.hpp"
#include "fracbesov/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace fracbesov {

namespace {

double total_weight(const Eigen::VectorXd& w) {
    CompensatedSum s;
    for (Eigen::Index i = 0; i < w.size(); ++i) s.add(w[i]);
    return s.value();
}

double normalized_norm(const Eigen::VectorXd& r, const Eigen::VectorXd& w, double total, int u) {
    CompensatedSum s;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        s.add(w[i] * (u == 1 ? std::abs(r[i]) : r[i] * r[i]));
    }
    const double mean = std::max(0.0, s.value()) / total;
    return u == 1 ? mean : std::sqrt(mean);
}

double weighted_median(const Eigen::VectorXd& v, const Eigen::VectorXd& w, double total) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(v.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return v[a] < v[b]; });
    CompensatedSum cum;
    for (Eigen::Index i : order) {
        cum.add(w[i]);
        if (cum.value() >= 0.5 * total) return v[i];
    }
    return v[order.back()];
}

// Weighted least squares through a column-pivoted QR of sqrt(w) A.
Eigen::VectorXd weighted_lsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& f, const Eigen::VectorXd& w,
                             bool* full_rank) {
    const Eigen::VectorXd sw = w.cwiseSqrt();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sw.asDiagonal() * a);
    qr.setThreshold(kRankThreshold);
    if (full_rank) *full_rank = qr.rank() == a.cols();
    return qr.solve(sw.cwiseProduct(f));
}

// Exact weighted L1 regression. The optimum sits at a vertex where rank(A)
// residuals vanish; starting from the vertex nearest the least-squares fit,
// move along the edge (drop one interpolated point) whose weighted-median
// line search lowers the objective most, until no edge descends.
Eigen::VectorXd l1_fit(const Eigen::MatrixXd& a_full, const Eigen::VectorXd& f, const Eigen::VectorXd& w,
                       const Eigen::VectorXd& start, std::vector<double>* history, double total) {
    const Eigen::Index m = a_full.rows();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a_full);
    qr.setThreshold(kRankThreshold);
    const Eigen::Index rank = qr.rank();
    if (rank == 0) return Eigen::VectorXd::Zero(a_full.cols());
    // Work in the span of the pivot columns.
    std::vector<Eigen::Index> cols(static_cast<std::size_t>(rank));
    for (Eigen::Index t = 0; t < rank; ++t) cols[static_cast<std::size_t>(t)] = qr.colsPermutation().indices()[t];
    Eigen::MatrixXd a(m, rank);
    for (Eigen::Index t = 0; t < rank; ++t) a.col(t) = a_full.col(cols[static_cast<std::size_t>(t)]);
    auto lift = [&](const Eigen::VectorXd& c) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(a_full.cols());
        for (Eigen::Index t = 0; t < rank; ++t) out[cols[static_cast<std::size_t>(t)]] = c[t];
        return out;
    };
    auto objective = [&](const Eigen::VectorXd& r) {
        CompensatedSum s;
        for (Eigen::Index i = 0; i < m; ++i) s.add(w[i] * std::abs(r[i]));
        return s.value();
    };

    // Initial basis: points with the smallest least-squares residuals that
    // keep the interpolation rows independent.
    const Eigen::VectorXd r0 = f - a_full * start;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return std::abs(r0[x]) < std::abs(r0[y]); });
    std::vector<Eigen::Index> basis;
    Eigen::MatrixXd rows(0, rank);
    for (Eigen::Index i : order) {
        Eigen::MatrixXd trial(rows.rows() + 1, rank);
        trial << rows, a.row(i);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(trial);
        lu.setThreshold(kRankThreshold);
        if (lu.rank() == trial.rows()) {
            rows = std::move(trial);
            basis.push_back(i);
            if (static_cast<Eigen::Index>(basis.size()) == rank) break;
        }
    }
    if (static_cast<Eigen::Index>(basis.size()) < rank) {
        return lift(qr.solve(f).head(rank));
    }

    Eigen::MatrixXd ab(rank, rank);
    Eigen::VectorXd fb(rank);
    auto solve_basis = [&]() {
        for (Eigen::Index t = 0; t < rank; ++t) {
            ab.row(t) = a.row(basis[static_cast<std::size_t>(t)]);
            fb[t] = f[basis[static_cast<std::size_t>(t)]];
        }
        return Eigen::PartialPivLU<Eigen::MatrixXd>(ab);
    };
    auto lu = solve_basis();
    Eigen::VectorXd c = lu.solve(fb);
    Eigen::VectorXd r = f - a * c;
    double obj = objective(r);
    if (history) history->push_back(obj / total);
    // Objective changes below this are rounding noise of the data, and an
    // exact fit is already optimal.
    const double noise = 1e-14 * objective(f);

    std::vector<std::pair<double, double>> breaks;  // (t, weight)
    for (int it = 0; it < kL1MaxPivots; ++it) {
        if (obj <= noise) return lift(c);
        const Eigen::MatrixXd inv = lu.inverse();
        double best_obj = obj;
        Eigen::VectorXd best_c;
        Eigen::Index best_out = -1, best_in = -1;
        for (Eigen::Index j = 0; j < rank; ++j) {
            const Eigen::VectorXd d = inv.col(j);
            const Eigen::VectorXd g = a * d;
            breaks.clear();
            const Eigen::Index leaving = basis[static_cast<std::size_t>(j)];
            breaks.emplace_back(0.0, w[leaving]);
            for (Eigen::Index i = 0; i < m; ++i) {
                if (i == leaving || std::abs(g[i]) <= 1e-14) continue;
                if (std::find(basis.begin(), basis.end(), i) != basis.end()) continue;
                breaks.emplace_back(r[i] / g[i], w[i] * std::abs(g[i]));
            }
            std::sort(breaks.begin(), breaks.end());
            double half = 0.0;
            for (const auto& b : breaks) half += b.second;
            half *= 0.5;
            double cum = 0.0, t_star = 0.0;
            for (const auto& b : breaks) {
                cum += b.second;
                if (cum >= half) {
                    t_star = b.first;
                    break;
                }
            }
            if (t_star == 0.0) continue;
            const Eigen::VectorXd cn = c + t_star * d;
            const double on = objective(f - a * cn);
            if (on < best_obj * (1.0 - 1e-13) - noise) {
                // The entering point is the non-basic one whose residual hits zero.
                Eigen::Index in = -1;
                double closest = std::numeric_limits<double>::infinity();
                for (Eigen::Index i = 0; i < m; ++i) {
                    if (i == leaving || std::abs(g[i]) <= 1e-14) continue;
                    if (std::find(basis.begin(), basis.end(), i) != basis.end()) continue;
                    const double dt = std::abs(r[i] / g[i] - t_star);
                    if (dt < closest) {
                        closest = dt;
                        in = i;
                    }
                }
                if (in < 0) continue;
                best_obj = on;
                best_c = cn;
                best_out = j;
                best_in = in;
            }
        }
        if (best_out < 0) return lift(c);
        basis[static_cast<std::size_t>(best_out)] = best_in;
        lu = solve_basis();
        c = lu.solve(fb);
        r = f - a * c;
        obj = objective(r);
        if (history) history->push_back(obj / total);
    }
    throw ConvergenceError("L1 vertex descent did not terminate", obj / total);
}

}  // namespace

ApproxResult best_approx(const Eigen::MatrixXd& points, const Eigen::VectorXd& values,
                         const Eigen::VectorXd& weights, const Cube& cube, int k, int u) {
    if (k < 0) throw ParameterError("k must be non-negative");
    if (u != 1 && u != 2) throw ParameterError("u must be 1 or 2");
    ApproxResult res;
    res.u = u;
    res.k = k;
    res.cube = cube;
    res.support = values.size();
    const double total = values.size() ? total_weight(weights) : 0.0;
    if (values.size() == 0 || !(total > 0.0)) throw EmptySupportError("no support points in the cube");

    if (k == 0) {
        res.minimizer.resize(0);
        res.value = normalized_norm(values, weights, total, u);
        return res;
    }
    if (k == 1) {
        double c = 0.0;
        if (u == 2) {
            CompensatedSum s;
            for (Eigen::Index i = 0; i < values.size(); ++i) s.add(weights[i] * values[i]);
            c = s.value() / total;
        } else {
            c = weighted_median(values, weights, total);
        }
        res.minimizer = Eigen::VectorXd::Constant(1, c);
        res.value = normalized_norm(values.array() - c, weights, total, u);
        return res;
    }

    const MonomialBasis basis(static_cast<int>(points.rows()), k - 1);
    const Eigen::MatrixXd a = basis.design(points, cube);
    bool full_rank = true;
    Eigen::VectorXd c = weighted_lsq(a, values, weights, &full_rank);
    res.unique = full_rank && values.size() >= basis.size();
    Eigen::VectorXd r = values - a * c;
    double value = normalized_norm(r, weights, total, u);
    if (u == 2) {
        res.minimizer = c;
        res.value = value;
        return res;
    }

    res.minimizer = l1_fit(a, values, weights, c, &res.residual_norm_history, total);
    res.value = normalized_norm(values - a * res.minimizer, weights, total, 1);
    return res;
}

double approx_value(const DSet& s, const Eigen::VectorXd& f, const std::vector<Eigen::Index>& atoms,
                    const Cube& q, int k, int u) {
    const auto m = static_cast<Eigen::Index>(atoms.size());
    Eigen::VectorXd values(m);
    for (Eigen::Index i = 0; i < m; ++i) values[i] = f[atoms[static_cast<std::size_t>(i)]];
    const Eigen::VectorXd weights = Eigen::VectorXd::Constant(m, s.weight());
    if (k <= 1) {
        // Point coordinates are not needed for constants.
        return best_approx(Eigen::MatrixXd(s.dim(), m), values, weights, q, k, u).value;
    }
    Eigen::MatrixXd pts(s.dim(), m);
    for (Eigen::Index i = 0; i < m; ++i) pts.col(i) = s.atom(atoms[static_cast<std::size_t>(i)]);
    return best_approx(pts, values, weights, q, k, u).value;
}

ApproxResult best_approx_on_set(const DSet& s, const Eigen::VectorXd& f, const Cube& q, int k, int u) {
    if (f.size() != s.size()) throw ParameterError("function must be sampled on every atom");
    const auto atoms = s.atoms_in(q);
    const auto m = static_cast<Eigen::Index>(atoms.size());
    Eigen::MatrixXd pts(s.dim(), m);
    Eigen::VectorXd values(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        pts.col(i) = s.atom(atoms[static_cast<std::size_t>(i)]);
        values[i] = f[atoms[static_cast<std::size_t>(i)]];
    }
    return best_approx(pts, values, Eigen::VectorXd::Constant(m, s.weight()), q, k, u);
}

std::optional<double> monotonicity_factor(const ApproxResult& e1, const ApproxResult& e2, const DSet& s) {
    constexpr double zero = 1e-12;
    if (e2.value <= zero) {
        if (e1.value <= zero) return std::nullopt;
        throw InconsistencyError("outer approximation vanishes while the inner one does not");
    }
    const double scale = std::pow(e2.cube.half_side / e1.cube.half_side, s.dimension() / e1.u);
    return e1.value / (scale * e2.value);
}

Eigen::VectorXd Projection::apply(const Eigen::VectorXd& f_all) const {
    Eigen::VectorXd wf(static_cast<Eigen::Index>(atoms.size()));
    const double w = mass / static_cast<double>(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) wf[static_cast<Eigen::Index>(i)] = w * f_all[atoms[i]];
    const Eigen::VectorXd inner = onb * (design.transpose() * wf);
    return onb.transpose() * inner;
}

Eigen::VectorXd Projection::apply_representation(const Eigen::VectorXd& f_all) const {
    const Eigen::MatrixXd hv = design * h.transpose();  // column nu: h_nu at the atoms
    const double w = mass / static_cast<double>(atoms.size());
    Eigen::VectorXd out(basis.size());
    for (int nu = 0; nu < basis.size(); ++nu) {
        CompensatedSum s;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            s.add(w * f_all[atoms[i]] * hv(static_cast<Eigen::Index>(i), nu));
        }
        out[nu] = s.value() / mass;
    }
    return out;
}

Projection build_projection(const DSet& s, const Cube& q, int k, int sup_grid) {
    if (k < 0) throw ParameterError("projection degree must be non-negative");
    Projection p;
    p.cube = q;
    p.k = k;
    p.basis = MonomialBasis(s.dim(), k);
    p.atoms = s.atoms_in(q);
    if (p.atoms.empty()) throw EmptySupportError("no atoms in the projection cube");
    const auto m = static_cast<Eigen::Index>(p.atoms.size());
    p.mass = s.weight() * static_cast<double>(m);
    Eigen::MatrixXd pts(s.dim(), m);
    for (Eigen::Index i = 0; i < m; ++i) pts.col(i) = s.atom(p.atoms[static_cast<std::size_t>(i)]);
    p.design = p.basis.design(pts, q);

    const int dim = p.basis.size();
    const double w = s.weight();
    auto inner = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return w * a.dot(b); };
    p.onb = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd values(m, dim);  // orthonormal polynomials at the atoms
    for (int t = 0; t < dim; ++t) {
        Eigen::VectorXd v = p.design.col(t);
        Eigen::VectorXd coef = Eigen::VectorXd::Unit(dim, t);
        const double n0 = std::sqrt(inner(v, v));
        for (int pass = 0; pass < 2; ++pass) {
            for (int b = 0; b < t; ++b) {
                const double c = inner(v, values.col(b));
                v -= c * values.col(b);
                coef -= c * p.onb.row(b).transpose();
            }
        }
        const double nv = std::sqrt(inner(v, v));
        if (!(nv > kRankThreshold * n0)) {
            std::ostringstream os;
            os << "atoms in the cube do not determine polynomials of degree " << k << " (" << m
               << " atoms)";
            throw DegenerateGeometryError(os.str());
        }
        values.col(t) = v / nv;
        p.onb.row(t) = coef.transpose() / nv;
    }
    const Eigen::MatrixXd pv = p.design * p.onb.transpose();
    p.gram_error = (w * pv.transpose() * pv - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    p.h = p.mass * p.onb.transpose() * p.onb;

    // Sup norms on a (sup_grid)^n lattice including the faces of Q.
    const int n = s.dim();
    Eigen::Index total = 1;
    for (int i = 0; i < n; ++i) total *= sup_grid;
    Eigen::MatrixXd grid(n, total);
    for (Eigen::Index g = 0; g < total; ++g) {
        Eigen::Index rest = g;
        for (int i = 0; i < n; ++i) {
            const auto idx = rest % sup_grid;
            rest /= sup_grid;
            grid(i, g) = q.lower(i) + q.side() * static_cast<double>(idx) / (sup_grid - 1);
        }
    }
    p.h_sup = (p.basis.design(grid, q) * p.h.transpose()).cwiseAbs().colwise().maxCoeff().transpose();
    return p;
}

std::optional<double> near_best_check(const DSet& s, const Projection& proj, int u, const Eigen::VectorXd& f) {
    const Eigen::VectorXd c = proj.apply(f);
    const auto m = static_cast<Eigen::Index>(proj.atoms.size());
    Eigen::VectorXd r(m);
    for (Eigen::Index i = 0; i < m; ++i) r[i] = f[proj.atoms[static_cast<std::size_t>(i)]];
    const double scale = 1.0 + r.cwiseAbs().maxCoeff();
    r -= proj.design * c;
    const double num = normalized_norm(r, Eigen::VectorXd::Constant(m, s.weight()), proj.mass, u);
    const double den = approx_value(s, f, proj.atoms, proj.cube, proj.k + 1, u);
    const double tol = 1e-10 * scale;
    if (den <= tol) {
        if (num <= tol) return std::nullopt;
        return kInfinity;
    }
    return num / den;
}

nlohmann::json CertifierResult::to_json() const {
    nlohmann::json j;
    j["check"] = check;
    j["params"] = params;
    j["max_ratio"] = std::isfinite(max_ratio) ? nlohmann::json(max_ratio) : nlohmann::json(nullptr);
    j["finite"] = static_cast<bool>(std::isfinite(max_ratio));
    j["trials"] = trials;
    j["skipped"] = skipped;
    j["vacuous"] = vacuous;
    j["witnesses"] = witnesses;
    return j;
}

std::string CertifierResult::to_json_line() const {
    return to_json().dump() + "\n";
}

namespace {

// Midpoint quadrature of polynomials over a cube with cached design matrices.
class CubeQuadrature {
public:
    CubeQuadrature(const MonomialBasis& basis, const Cube& anchor, const Cube& q, int max_per_side)
        : basis_(basis), anchor_(anchor), q_(q), max_per_side_(max_per_side) {}

    double mean_norm(const Eigen::VectorXd& coeffs, double r) {
        double prev = -1.0;
        int level = 0;
        for (int per = 32;; per *= 2, ++level) {
            const Eigen::VectorXd v = design(level, per) * coeffs;
            double value = 0.0;
            if (std::isinf(r)) {
                value = v.cwiseAbs().maxCoeff();
            } else {
                CompensatedSum s;
                for (Eigen::Index i = 0; i < v.size(); ++i) s.add(std::pow(std::abs(v[i]), r));
                value = std::pow(s.value() / static_cast<double>(v.size()), 1.0 / r);
            }
            if (prev >= 0.0 && std::abs(value - prev) <= 1e-6 * std::abs(value)) return value;
            if (2 * per > max_per_side_) return value;
            prev = value;
        }
    }

private:
    const Eigen::MatrixXd& design(int level, int per) {
        if (static_cast<int>(designs_.size()) <= level) {
            const int n = q_.dim();
            Eigen::Index total = 1;
            for (int i = 0; i < n; ++i) total *= per;
            Eigen::MatrixXd pts(n, total);
            const double h = q_.side() / per;
            for (Eigen::Index g = 0; g < total; ++g) {
                Eigen::Index rest = g;
                for (int i = 0; i < n; ++i) {
                    pts(i, g) = q_.lower(i) + (static_cast<double>(rest % per) + 0.5) * h;
                    rest /= per;
                }
            }
            designs_.push_back(basis_.design(pts, anchor_));
        }
        return designs_[static_cast<std::size_t>(level)];
    }

    const MonomialBasis& basis_;
    Cube anchor_, q_;
    int max_per_side_;
    std::vector<Eigen::MatrixXd> designs_;
};

struct AtomSide {
    Eigen::MatrixXd design;
    double mass = 0.0;
    double weight = 0.0;

    double norm(const Eigen::VectorXd& coeffs, double u) const {
        const Eigen::VectorXd v = design * coeffs;
        if (std::isinf(u)) return v.cwiseAbs().maxCoeff();
        CompensatedSum s;
        for (Eigen::Index i = 0; i < v.size(); ++i) s.add(weight * std::pow(std::abs(v[i]), u));
        return std::pow(s.value() / mass, 1.0 / u);
    }
};

AtomSide atom_side(const DSet& s, const Cube& qp, const MonomialBasis& basis, const Cube& anchor) {
    const auto atoms = s.atoms_in(qp);
    if (atoms.empty()) throw EmptySupportError("no atoms in the comparison cube");
    Eigen::MatrixXd pts(s.dim(), static_cast<Eigen::Index>(atoms.size()));
    for (std::size_t i = 0; i < atoms.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = s.atom(atoms[i]);
    return {basis.design(pts, anchor), s.weight() * static_cast<double>(atoms.size()), s.weight()};
}

Eigen::VectorXd random_coeffs(int size, std::uint64_t seed, int trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd c(size);
    for (int i = 0; i < size; ++i) c[i] = u(rng);
    return c;
}

nlohmann::json exponent(double v) {
    return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v);
}

nlohmann::json cube_json(const Cube& q) {
    return {{"center", std::vector<double>(q.center.data(), q.center.data() + q.center.size())},
            {"half_side", q.half_side}};
}

}  // namespace

double lebesgue_mean_norm(const MonomialBasis& basis, const Eigen::VectorXd& coeffs, const Cube& anchor,
                          const Cube& q, double r, int max_per_side) {
    CubeQuadrature quad(basis, anchor, q, max_per_side);
    return quad.mean_norm(coeffs, r);
}

double remez_ratio(const DSet& s, const Cube& q, const Cube& qp, const MonomialBasis& basis,
                   const Eigen::VectorXd& coeffs, double u, double r) {
    const double lhs = lebesgue_mean_norm(basis, coeffs, qp, q, r);
    const double rhs = atom_side(s, qp, basis, qp).norm(coeffs, u);
    if (rhs == 0.0) return lhs == 0.0 ? std::nan("") : kInfinity;
    return lhs / rhs;
}

CertifierResult remez_check(const DSet& s, const Cube& q, const Cube& qp, int k, double u, double r,
                            int trials, std::uint64_t seed) {
    if (!q.contains(qp)) throw ParameterError("comparison cube must lie inside Q");
    const MonomialBasis basis(s.dim(), k);
    CubeQuadrature quad(basis, qp, q, 512);
    const AtomSide rhs_side = atom_side(s, qp, basis, qp);
    CertifierResult res;
    res.check = "remez";
    res.params = {{"k", k}, {"u", exponent(u)}, {"r", exponent(r)}, {"trials", trials}, {"seed", seed},
                  {"Q", cube_json(q)}, {"Qp", cube_json(qp)}};
    nlohmann::json best;
    for (int t = 0; t < trials; ++t) {
        const Eigen::VectorXd c = random_coeffs(basis.size(), seed, t);
        const double lhs = quad.mean_norm(c, r);
        const double rhs = rhs_side.norm(c, u);
        ++res.trials;
        if (lhs == 0.0 && rhs == 0.0) {
            ++res.vacuous;
            continue;
        }
        if (rhs <= 1e-14 * lhs) {
            ++res.skipped;
            continue;
        }
        const double ratio = lhs / rhs;
        if (ratio > res.max_ratio) {
            res.max_ratio = ratio;
            best = {{"trial", t}, {"ratio", ratio}, {"lhs", lhs}, {"rhs", rhs},
                    {"coeffs", std::vector<double>(c.data(), c.data() + c.size())}};
        }
    }
    if (!best.is_null()) res.witnesses.push_back(best);
    return res;
}

std::optional<double> markov_ratio(const DSet& s, const Cube& q, const MonomialBasis& basis,
                                   const Eigen::VectorXd& coeffs) {
    const auto atoms = s.atoms_in(q);
    if (atoms.empty()) throw EmptySupportError("no atoms in the cube");
    double max_p = 0.0, max_grad = 0.0;
    for (Eigen::Index a : atoms) {
        max_p = std::max(max_p, std::abs(basis.evaluate(coeffs, s.atom(a), q)));
        max_grad = std::max(max_grad, (basis.gradient(s.atom(a), q) * coeffs).norm());
    }
    if (max_p == 0.0) return std::nullopt;
    return max_grad * q.side() / max_p;
}

CertifierResult markov_check(const DSet& s, const Cube& q, int k, int trials, std::uint64_t seed) {
    const MonomialBasis basis(s.dim(), k);
    CertifierResult res;
    res.check = "markov";
    res.params = {{"k", k}, {"trials", trials}, {"seed", seed}, {"Q", cube_json(q)}};
    nlohmann::json best;
    for (int t = 0; t < trials; ++t) {
        const Eigen::VectorXd c = random_coeffs(basis.size(), seed, t);
        ++res.trials;
        const auto ratio = markov_ratio(s, q, basis, c);
        if (!ratio) {
            ++res.skipped;
            continue;
        }
        if (*ratio > res.max_ratio) {
            res.max_ratio = *ratio;
            best = {{"trial", t}, {"ratio", *ratio},
                    {"coeffs", std::vector<double>(c.data(), c.data() + c.size())}};
        }
    }
    if (!best.is_null()) res.witnesses.push_back(best);
    return res;
}

}  // namespace fracbesov
