#include "doctest.h"

#include "fracbesov/approx.hpp"
#include "fracbesov/errors.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace fracbesov;

namespace {

Point pt(double x, double y) {
    return (Point(2) << x, y).finished();
}

DSet cantor(int depth) {
    return DSet::from_ifs(IfsSpec::four_corner_cantor(depth));
}

Eigen::VectorXd sample(const DSet& s, const std::function<double(double, double)>& f) {
    Eigen::VectorXd v(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) v[i] = f(s.atoms()(0, i), s.atoms()(1, i));
    return v;
}

Eigen::VectorXd random_values(Eigen::Index m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(m);
    for (Eigen::Index i = 0; i < m; ++i) v[i] = u(rng);
    return v;
}

// L1 regression over affine functions attains its minimum at a fit that
// interpolates three of the points; scan every triple.
double l1_affine_oracle(const Eigen::MatrixXd& pts, const Eigen::VectorXd& f, const Eigen::VectorXd& w) {
    const Eigen::Index m = f.size();
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = a + 1; b < m; ++b) {
            for (Eigen::Index c = b + 1; c < m; ++c) {
                Eigen::Matrix3d A;
                Eigen::Vector3d rhs;
                const Eigen::Index idx[3] = {a, b, c};
                for (int r = 0; r < 3; ++r) {
                    A.row(r) << 1.0, pts(0, idx[r]), pts(1, idx[r]);
                    rhs[r] = f[idx[r]];
                }
                if (std::abs(A.determinant()) < 1e-12) continue;
                const Eigen::Vector3d co = A.lu().solve(rhs);
                double sum = 0.0;
                for (Eigen::Index i = 0; i < m; ++i) {
                    sum += w[i] * std::abs(f[i] - co[0] - co[1] * pts(0, i) - co[2] * pts(1, i));
                }
                best = std::min(best, sum / w.sum());
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("monomial basis") {
    const MonomialBasis b(2, 2);
    CHECK(b.size() == 6);
    CHECK(poly_dim(2, 3) == 10);
    CHECK(poly_dim(3, 1) == 4);
    CHECK(poly_dim(2, -1) == 0);
    CHECK(MonomialBasis(2, -1).size() == 0);
    const Cube q(pt(1.0, 2.0), 0.25);
    const Eigen::RowVectorXd r = b.row(pt(1.5, 1.0), q);
    // z = ((1.5 - 1) / 0.5, (1 - 2) / 0.5) = (1, -2)
    CHECK(r[b.index_of(Eigen::Vector2i(0, 0))] == 1.0);
    CHECK(r[b.index_of(Eigen::Vector2i(1, 0))] == 1.0);
    CHECK(r[b.index_of(Eigen::Vector2i(0, 1))] == -2.0);
    CHECK(r[b.index_of(Eigen::Vector2i(1, 1))] == -2.0);
    CHECK(r[b.index_of(Eigen::Vector2i(0, 2))] == 4.0);
    const Eigen::MatrixXd g = b.gradient(pt(1.5, 1.0), q);
    // d/dy of z_y^2 = 2 z_y / l = -8
    CHECK(g(1, b.index_of(Eigen::Vector2i(0, 2))) == doctest::Approx(-8.0));
    CHECK(g(0, b.index_of(Eigen::Vector2i(1, 1))) == doctest::Approx(-4.0));
}

TEST_CASE("best approximation closed forms") {
    const DSet s = cantor(4);
    const Cube q(Point(s.atom(5)), 0.2);

    SUBCASE("polynomials of degree below k give zero") {
        const auto f = sample(s, [](double x, double y) { return 1.0 + 2.0 * x - 3.0 * y; });
        for (int u : {1, 2}) {
            CHECK(best_approx_on_set(s, f, q, 2, u).value == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(best_approx_on_set(s, f, q, 3, u).value < 1e-9);
        }
    }
    SUBCASE("k = 0 approximates by zero") {
        const Eigen::VectorXd f = Eigen::VectorXd::Constant(s.size(), 2.0);
        CHECK(best_approx_on_set(s, f, q, 0, 1).value == doctest::Approx(2.0));
        CHECK(best_approx_on_set(s, f, q, 0, 2).value == doctest::Approx(2.0));
    }
    SUBCASE("k = 1, u = 2 is the weighted standard deviation") {
        const Eigen::VectorXd f = random_values(s.size(), 3);
        const auto atoms = s.atoms_in(q);
        double mean = 0.0;
        for (auto a : atoms) mean += f[a];
        mean /= static_cast<double>(atoms.size());
        double var = 0.0;
        for (auto a : atoms) var += (f[a] - mean) * (f[a] - mean);
        var /= static_cast<double>(atoms.size());
        CHECK(best_approx_on_set(s, f, q, 1, 2).value == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
    }
    SUBCASE("k = 1, u = 1 is attained at a sample value") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Eigen::MatrixXd pts = Eigen::MatrixXd::Random(2, 5);
            const Eigen::VectorXd f = random_values(5, seed);
            Eigen::VectorXd w = random_values(5, seed + 100).cwiseAbs().array() + 0.1;
            double best = std::numeric_limits<double>::infinity();
            for (int c = 0; c < 5; ++c) {
                best = std::min(best, (w.array() * (f.array() - f[c]).abs()).sum() / w.sum());
            }
            const auto r = best_approx(pts, f, w, Cube(pt(0, 0), 1.0), 1, 1);
            CHECK(r.value == doctest::Approx(best).epsilon(1e-12));
        }
    }
    SUBCASE("k = 2, u = 1 matches the interpolating-triple scan") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            Eigen::MatrixXd pts(2, 9);
            for (int i = 0; i < 9; ++i) pts.col(i) = pt(u(rng), u(rng));
            const Eigen::VectorXd f = random_values(9, seed + 7);
            const Eigen::VectorXd w = Eigen::VectorXd::Constant(9, 1.0 / 9.0);
            const auto r = best_approx(pts, f, w, Cube(pt(0, 0), 1.0), 2, 1);
            CHECK(r.value == doctest::Approx(l1_affine_oracle(pts, f, w)).epsilon(1e-6));
            CHECK(r.value >= l1_affine_oracle(pts, f, w) - 1e-12);
        }
    }
    SUBCASE("empty support") {
        CHECK_THROWS_AS(best_approx_on_set(s, Eigen::VectorXd::Zero(s.size()), Cube(pt(0.5, 0.5), 0.01), 1, 1),
                        EmptySupportError);
    }
}

TEST_CASE("best approximation invariants") {
    const DSet s = cantor(5);
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<Eigen::Index> pick(0, s.size() - 1);
    for (int t = 0; t < 20; ++t) {
        const Cube q(Point(s.atom(pick(rng))), std::ldexp(1.0, -1 - t % 4));
        const Eigen::VectorXd f = random_values(s.size(), 40 + t);
        const auto lin = sample(s, [](double x, double y) { return 0.3 - x + 2.0 * y; });
        for (int u : {1, 2}) {
            double prev = std::numeric_limits<double>::infinity();
            for (int k = 0; k <= 3; ++k) {
                const double e = best_approx_on_set(s, f, q, k, u).value;
                CHECK(e <= prev * (1.0 + 1e-9));
                prev = e;
                CHECK(best_approx_on_set(s, Eigen::VectorXd(-2.5 * f), q, k, u).value ==
                      doctest::Approx(2.5 * e).epsilon(1e-8));
            }
            for (int k = 2; k <= 3; ++k) {
                CHECK(best_approx_on_set(s, Eigen::VectorXd(f + lin), q, k, u).value ==
                      doctest::Approx(best_approx_on_set(s, f, q, k, u).value).epsilon(1e-7));
            }
        }
        // u = 2 equals the projection residual one degree down.
        for (int k = 1; k <= 3; ++k) {
            const Projection p = build_projection(s, q, k - 1);
            const Eigen::VectorXd c = p.apply(f);
            double sum = 0.0;
            for (std::size_t i = 0; i < p.atoms.size(); ++i) {
                const double r = f[p.atoms[i]] - p.evaluate(c, s.atom(p.atoms[i]));
                sum += s.weight() * r * r;
            }
            CHECK(std::sqrt(sum / p.mass) ==
                  doctest::Approx(best_approx_on_set(s, f, q, k, 2).value).epsilon(1e-9));
        }
    }
}

TEST_CASE("monotonicity factor") {
    const DSet s = cantor(5);
    const Eigen::VectorXd f = random_values(s.size(), 2);
    const Cube q(Point(s.atom(10)), 0.25);
    const auto e = best_approx_on_set(s, f, q, 1, 2);
    CHECK(*monotonicity_factor(e, e, s) == doctest::Approx(1.0));

    const auto poly = sample(s, [](double x, double) { return x; });
    const auto p1 = best_approx_on_set(s, poly, q.scaled(0.5), 2, 2);
    const auto p2 = best_approx_on_set(s, poly, q, 2, 2);
    CHECK_FALSE(monotonicity_factor(p1, p2, s).has_value());

    ApproxResult zero = e;
    zero.value = 0.0;
    CHECK_THROWS_AS(monotonicity_factor(e, zero, s), InconsistencyError);

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<Eigen::Index> pick(0, s.size() - 1);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Eigen::VectorXd g = random_values(s.size(), 100 + t);
        const Cube q2(Point(s.atom(pick(rng))), 0.5);
        const Cube q1 = q2.scaled(std::ldexp(1.0, -1 - t % 3));
        for (int u : {1, 2}) {
            const auto r = monotonicity_factor(best_approx_on_set(s, g, q1, 2, u),
                                               best_approx_on_set(s, g, q2, 2, u), s);
            REQUIRE(r.has_value());
            worst = std::max(worst, *r);
        }
    }
    CHECK(std::isfinite(worst));
    CHECK(worst > 0.0);
}

TEST_CASE("projections") {
    const DSet s = cantor(5);
    const Cube q(Point(s.atom(100)), 0.3);
    for (int k = 0; k <= 3; ++k) {
        const Projection p = build_projection(s, q, k);
        CHECK(p.gram_error < kGramTolerance);
        CHECK(p.h_sup.size() == poly_dim(2, k));
        CHECK(p.h_sup.allFinite());

        const Eigen::VectorXd c = p.apply(Eigen::VectorXd::Constant(s.size(), 4.5));
        CHECK(p.evaluate(c, pt(0.3, 0.9)) == doctest::Approx(4.5).epsilon(1e-10));

        // Reproduces polynomials of degree <= k.
        const auto f = sample(s, [k](double x, double y) {
            return 1.0 - x + (k >= 1 ? 2.0 * y : 0.0) + (k >= 2 ? x * y : 0.0) + (k >= 3 ? y * y * y : 0.0) -
                   (k == 0 ? -x : 0.0);
        });
        const Eigen::VectorXd cf = p.apply(f);
        for (std::size_t i = 0; i < p.atoms.size(); ++i) {
            CHECK(p.evaluate(cf, s.atom(p.atoms[i])) == doctest::Approx(f[p.atoms[i]]).epsilon(1e-9));
        }

        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            const Eigen::VectorXd g = random_values(s.size(), 500 + t);
            worst = std::max(worst, (p.apply(g) - p.apply_representation(g)).cwiseAbs().maxCoeff());
            const Eigen::VectorXd g2 = random_values(s.size(), 900 + t);
            const Eigen::VectorXd lin = p.apply(Eigen::VectorXd(2.0 * g - 3.0 * g2));
            CHECK((lin - (2.0 * p.apply(g) - 3.0 * p.apply(g2))).cwiseAbs().maxCoeff() < 1e-9);
        }
        CHECK(worst < 1e-8);
    }

    SUBCASE("collinear atoms cannot carry linear polynomials") {
        Eigen::MatrixXd line(2, 20);
        for (int i = 0; i < 20; ++i) line.col(i) = pt(i / 20.0, 0.5);
        const DSet l = DSet::from_atoms(line, 1.0, 0.0);
        CHECK_NOTHROW(build_projection(l, Cube(pt(0.5, 0.5), 0.5), 0));
        CHECK_THROWS_AS(build_projection(l, Cube(pt(0.5, 0.5), 0.5), 1), DegenerateGeometryError);
    }
}

TEST_CASE("near-best projection") {
    const DSet s = cantor(5);
    const Cube q(Point(s.atom(3)), 0.5);
    const Projection p = build_projection(s, q, 1);
    const auto lin = sample(s, [](double x, double y) { return x - y; });
    CHECK_FALSE(near_best_check(s, p, 2, lin).has_value());
    const auto sup = sample(s, [](double x, double y) { return std::max(std::abs(x), std::abs(y)); });
    for (int u : {1, 2}) {
        const auto r = near_best_check(s, p, u, sup);
        REQUIRE(r.has_value());
        CHECK(std::isfinite(*r));
        CHECK(*r >= 1.0 - 1e-9);
    }
}

TEST_CASE("Lebesgue quadrature") {
    const MonomialBasis b(2, 2);
    const Cube q(pt(0.0, 0.0), 1.0);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(6);
    c[0] = 1.0;
    CHECK(lebesgue_mean_norm(b, c, q, q, 2.0) == doctest::Approx(1.0));
    // p = z_x with z_x = x / 2 on [-1,1]^2: mean |p|^2 = 1/12.
    c.setZero();
    c[b.index_of(Eigen::Vector2i(1, 0))] = 1.0;
    CHECK(lebesgue_mean_norm(b, c, q, q, 2.0) == doctest::Approx(std::sqrt(1.0 / 12.0)).epsilon(1e-5));
    CHECK(lebesgue_mean_norm(b, c, q, q, 1.0) == doctest::Approx(0.25).epsilon(1e-5));
    CHECK(lebesgue_mean_norm(b, c, q, q, kInfinity) == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("Remez and reverse Hoelder certifiers") {
    const DSet s = cantor(5);
    const Cube q(Point(s.atom(0)), 0.25);
    const MonomialBasis b(2, 2);
    Eigen::VectorXd one = Eigen::VectorXd::Zero(b.size());
    one[0] = 1.0;
    CHECK(remez_ratio(s, q, q, b, one, 1.0, 2.0) == doctest::Approx(1.0));

    const auto rh = remez_check(s, q, q, 2, 1.0, 2.0, 100, 7);
    CHECK(rh.trials == 100);
    CHECK(std::isfinite(rh.max_ratio));
    CHECK(rh.max_ratio >= 1.0);
    CHECK(rh.witnesses.size() == 1);
    const auto again = remez_check(s, q, q, 2, 1.0, 2.0, 100, 7);
    CHECK(again.max_ratio == rh.max_ratio);

    const auto sub = remez_check(s, q, q.scaled(0.5), 3, 2.0, kInfinity, 50, 1);
    CHECK(std::isfinite(sub.max_ratio));
    CHECK(sub.to_json_line().find("\"check\":\"remez\"") != std::string::npos);

    SUBCASE("atoms on a line") {
        Eigen::MatrixXd line(2, 64);
        for (int i = 0; i < 64; ++i) line.col(i) = pt(i / 64.0, 0.5);
        const DSet l = DSet::from_atoms(line, 1.0, 0.0);
        const Cube lq(pt(0.5, 0.5), 0.25);
        Eigen::VectorXd vanish = Eigen::VectorXd::Zero(b.size());
        vanish[b.index_of(Eigen::Vector2i(0, 1))] = 1.0;
        CHECK(std::isinf(remez_ratio(l, lq, lq, b, vanish, 1.0, 2.0)));
    }
}

TEST_CASE("Markov certifier") {
    const DSet s = cantor(5);
    const Cube q(Point(s.atom(7)), 0.5);
    const MonomialBasis b(2, 1);
    CHECK(*markov_ratio(s, q, b, Eigen::Vector3d(2.0, 0.0, 0.0)) == 0.0);

    // p = 1 + 3 z_x - 4 z_y: |grad p| l = 5 and max |p| over the atoms.
    const Eigen::Vector3d lin(1.0, 3.0, -4.0);
    double max_p = 0.0;
    for (auto a : s.atoms_in(q)) max_p = std::max(max_p, std::abs(b.evaluate(lin, s.atom(a), q)));
    CHECK(*markov_ratio(s, q, b, lin) == doctest::Approx(5.0 / max_p));

    const auto res = markov_check(s, q, 3, 100, 2);
    CHECK(std::isfinite(res.max_ratio));

    SUBCASE("scale invariance") {
        const double t = 0.125;
        const DSet small = DSet::from_atoms(Eigen::MatrixXd(t * s.atoms()), s.dimension(), t * s.cell_radius());
        const Cube tq(t * q.center, t * q.half_side);
        CHECK(markov_check(small, tq, 3, 100, 2).max_ratio == doctest::Approx(res.max_ratio).epsilon(1e-9));
    }
}
