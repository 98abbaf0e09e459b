#include "doctest.h"

#include "fracbesov/dset.hpp"
#include "fracbesov/errors.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace fracbesov;

namespace {

Point pt(double x, double y) {
    return (Point(2) << x, y).finished();
}

}  // namespace

TEST_CASE("four-corner Cantor construction") {
    const DSet s = DSet::from_ifs(IfsSpec::four_corner_cantor(5));
    CHECK(s.size() == 1024);
    CHECK(s.weight() == 1.0 / 1024.0);
    CHECK(s.dimension() == doctest::Approx(std::log(4.0) / std::log(3.0)));
    CHECK(s.dimension() == doctest::Approx(1.2619).epsilon(1e-4));
    // Closest pair: sibling atoms 2 * 3^-5 apart.
    CHECK(s.spacing() == doctest::Approx(2.0 * std::pow(3.0, -5)).epsilon(1e-9));
    CHECK(s.bounding().center == pt(0.5, 0.5));
    CHECK(s.bounding().half_side == 0.5);
}

TEST_CASE("degenerate and alternative IFS parameters") {
    const DSet zero = DSet::from_ifs(IfsSpec::four_corner_cantor(0));
    CHECK(zero.size() == 1);
    CHECK(zero.weight() == 1.0);

    const auto wide = IfsSpec::four_corner_cantor(3, 0.45);
    CHECK(wide.similarity_dimension() == doctest::Approx(std::log(4.0) / std::log(1.0 / 0.45)));
    CHECK(wide.similarity_dimension() == doctest::Approx(1.736).epsilon(1e-3));
    CHECK(DSet::from_ifs(wide).size() == 64);

    // Two maps in the plane: d = log 2 / log 3 < 1.
    IfsSpec thin = IfsSpec::four_corner_cantor(2);
    thin.translations.resize(2);
    CHECK_THROWS_AS(DSet::from_ifs(thin), DimensionError);

    IfsSpec crowded = IfsSpec::four_corner_cantor(2, 0.45);
    crowded.translations[1] = pt(0.3, 0.0);
    CHECK_THROWS_AS(DSet::from_ifs(crowded), OpenSetConditionError);
}

TEST_CASE("measure of cubes") {
    const DSet s = DSet::from_ifs(IfsSpec::four_corner_cantor(5));
    CHECK(s.measure(s.bounding()) == 1.0);
    CHECK(s.measure(Cube(pt(1.0 / 6.0, 1.0 / 6.0), 1.0 / 6.0)) == 0.25);
    CHECK(s.measure(Cube(pt(0.5, 0.5), 0.1)) == 0.0);

    SUBCASE("matches a linear count") {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int t = 0; t < 200; ++t) {
            const Point c = pt(u(rng), u(rng));
            const double r = 0.3 * u(rng);
            CHECK(s.measure(Cube(c, r)) == oracle::linear_count(s.atoms(), c, r) * s.weight());
        }
    }
    SUBCASE("half-open dyadic partitions are additive") {
        for (int level = 0; level <= 6; ++level) {
            double total = 0.0;
            const int per = 1 << level;
            const double h = std::ldexp(1.0, -level);
            for (int x = 0; x < per; ++x) {
                for (int y = 0; y < per; ++y) {
                    total += s.measure_half_open(Cube(pt((x + 0.5) * h, (y + 0.5) * h), 0.5 * h));
                }
            }
            // Atoms on the top faces of the unit square are excluded by [lo, hi).
            CHECK(total <= 1.0);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("self-similarity across matching depth") {
        const DSet next = DSet::from_ifs(IfsSpec::four_corner_cantor(6));
        const auto spec = IfsSpec::four_corner_cantor(6);
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int t = 0; t < 100; ++t) {
            const Cube q(pt(u(rng), u(rng)), 0.4 * u(rng));
            for (const auto& tr : spec.translations) {
                const Cube image(spec.ratio * q.center + tr, spec.ratio * q.half_side);
                CHECK(next.measure(image) == doctest::Approx(s.measure(q) / 4.0));
            }
        }
    }
}

TEST_CASE("distance to the set") {
    const DSet s = DSet::from_ifs(IfsSpec::four_corner_cantor(5));
    CHECK(s.dist(s.atom(17)) == 0.0);
    const double h = 0.25 * s.spacing();
    CHECK(s.dist(Point(s.atom(17) + pt(h, 0.0))) == doctest::Approx(h));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (int t = 0; t < 500; ++t) {
        const Point x = pt(u(rng), u(rng));
        CHECK(s.dist(x) == oracle::linear_dist(s.atoms(), x));
    }
}

TEST_CASE("regularity audit") {
    for (int depth : {4, 5, 6}) {
        const auto rep = audit_regularity(DSet::from_ifs(IfsSpec::four_corner_cantor(depth)), 64, 1);
        CHECK(rep.c1 <= rep.c2);
        CHECK(rep.c2 / rep.c1 <= 32.0);
        CHECK(rep.regular);
        CHECK(rep.c1_witness.ratio == rep.c1);
        CHECK(rep.c2_witness.ratio == rep.c2);
    }

    SUBCASE("single atom is flagged") {
        Eigen::MatrixXd one(2, 1);
        one << 0.5, 0.5;
        const DSet s = DSet::from_atoms(one, std::log(4.0) / std::log(3.0), 0.0);
        const auto rep = audit_regularity(s, 4, 1);
        CHECK_FALSE(rep.regular);
    }
    SUBCASE("constants stable under refinement") {
        const auto a = audit_regularity(DSet::from_ifs(IfsSpec::four_corner_cantor(5)), 64, 3);
        const auto b = audit_regularity(DSet::from_ifs(IfsSpec::four_corner_cantor(6)), 64, 3);
        CHECK(b.c1 >= 0.5 * a.c1);
        CHECK(b.c1 <= 2.0 * a.c1);
        CHECK(b.c2 >= 0.5 * a.c2);
        CHECK(b.c2 <= 2.0 * a.c2);
    }
    SUBCASE("a finer ladder only widens the range") {
        const DSet s = DSet::from_ifs(IfsSpec::four_corner_cantor(5));
        const auto coarse = audit_regularity(s, 32, 5, 16);
        const auto fine = audit_regularity(s, 32, 5, 31);
        CHECK(fine.c1 <= coarse.c1);
        CHECK(fine.c2 >= coarse.c2);
    }
    SUBCASE("deterministic") {
        const DSet s = DSet::from_ifs(IfsSpec::four_corner_cantor(4));
        const auto a = audit_regularity(s, 16, 9);
        const auto b = audit_regularity(s, 16, 9);
        CHECK(a.c1 == b.c1);
        CHECK(a.c2 == b.c2);
    }
}

TEST_CASE("csv export") {
    const DSet s = DSet::from_ifs(IfsSpec::four_corner_cantor(1));
    const std::string csv = s.to_csv();
    CHECK(csv.rfind("x,y,weight\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
