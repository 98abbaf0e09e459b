#include "doctest.h"

#include "fracbesov/errors.hpp"
#include "fracbesov/extension.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace fracbesov;

namespace {

DSet cantor(int depth) {
    return DSet::from_ifs(IfsSpec::four_corner_cantor(depth));
}

Grid unit_grid(int m) {
    return Grid(Cube((Point(2) << 0.5, 0.5).finished(), 0.5), m);
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

double lipschitz(double x, double y) {
    return 0.5 * x - 0.3 * y * y + 0.2 * std::abs(x - y);
}

}  // namespace

TEST_CASE("bump profile and support") {
    CHECK(bump_profile(1.0) == 0.0);
    CHECK(bump_profile(-1.5) == 0.0);
    CHECK(bump_profile(0.0) == doctest::Approx(std::exp(-1.0)));
    const DyadicCube q{3, {2, 5}};
    const Cube star(q.center(), 0.5 * kBumpDilation * q.side());
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 2000; ++t) {
        const Point x = (q.center().array() + u(rng) * star.half_side * Eigen::Array2d(1.0, u(rng) / 2)).matrix();
        const double b = cube_bump(q, x);
        CHECK(b >= 0.0);
        if (!star.contains(x)) CHECK(b == 0.0);
    }
    CHECK(extension_min_level(unit_grid(512)) == 7);
    CHECK(extension_min_level(unit_grid(500)) == 6);
}

TEST_CASE("partition of unity") {
    const DSet s = cantor(4);
    const Grid g = unit_grid(128);
    auto cover = std::make_shared<const WhitneyCover>(whitney_decompose(s, g.region, extension_min_level(g)));
    const auto pu = build_partition(cover, g, s);
    CHECK(pu.offsets.size() == static_cast<std::size_t>(g.size()) + 1);
    int worst_kept = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (pu.on_set[static_cast<std::size_t>(i)]) continue;
        double sum = 0.0;
        int kept = 0;
        for (auto e = pu.offsets[static_cast<std::size_t>(i)]; e < pu.offsets[static_cast<std::size_t>(i) + 1]; ++e) {
            sum += pu.weights[static_cast<std::size_t>(e)];
            const auto id = static_cast<std::size_t>(pu.cube_ids[static_cast<std::size_t>(e)]);
            if (id < pu.kept) ++kept;
            // support inside (9/8)Q
            const DyadicCube& q = pu.cubes[id];
            CHECK(Cube(q.center(), 0.5 * kBumpDilation * q.side()).contains(g.point(i)));
        }
        worst_kept = std::max(worst_kept, kept);
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
    CHECK(worst_kept <= cover->overlap_bound());
    CHECK(pu.max_overlap >= 1);
}

TEST_CASE("reflected cubes") {
    const DSet s = cantor(4);
    const auto cover = whitney_decompose(s, unit_grid(128).region, 5);
    double min_ratio = INFINITY;
    for (const auto& q : cover.cubes()) {
        const ReflectedCube rc = reflect(q, s);
        // a(Q) inside int(10 Q)
        const Cube ten(q.center(), 5.0 * q.side());
        for (int i = 0; i < 2; ++i) {
            CHECK(rc.cube.lower(i) > ten.lower(i));
            CHECK(rc.cube.upper(i) < ten.upper(i));
        }
        CHECK((s.atom(rc.atom) - q.center()).cwiseAbs().maxCoeff() == s.dist(q.center()));
        CHECK(rc.mass > 0.0);
        min_ratio = std::min(min_ratio, rc.mass / std::pow(0.5 * q.side(), s.dimension()));
    }
    CHECK(min_ratio > 0.0);
}

TEST_CASE("extension closed forms") {
    const DSet s = cantor(4);
    const Grid g = unit_grid(128);
    SUBCASE("constants") {
        for (int k : {1, 2}) {
            const auto ext = extend(Eigen::VectorXd::Constant(s.size(), 2.5), s, k, kDefaultDelta, g);
            CHECK((ext.field.values.array() - 2.5).abs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("affine functions with k = 2") {
        // On a fine grid every a(Q) holds a single atom and the projection
        // degrades to constants; at 32^2 the residual cubes are large enough.
        const auto aff = [](double x, double y) { return 1.0 - 2.0 * x + 0.5 * y; };
        const Grid g = unit_grid(32);
        const ExtensionOperator op(s, g, 2);
        CHECK(ExtensionOperator(s, unit_grid(128), 2).degraded_cubes() > 0);
        const auto ext = op.apply(sample(s, aff));
        long checked = 0;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            if (ext.degraded[static_cast<std::size_t>(i)]) continue;
            const Point x = g.point(i);
            CHECK(std::abs(ext.field.values[i] - aff(x[0], x[1])) < 1e-8);
            ++checked;
        }
        CHECK(checked > g.size() / 2);
    }
    SUBCASE("linearity") {
        const ExtensionOperator op(s, g, 2);
        const auto f = random_values(s.size(), 1), h = random_values(s.size(), 2);
        const auto lhs = op.apply(3.0 * f - 0.5 * h).field.values;
        const auto rhs = (3.0 * op.apply(f).field.values - 0.5 * op.apply(h).field.values).eval();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("truncation and support") {
    const DSet s = cantor(4);
    const Grid g = unit_grid(128);
    const double delta = 1.0 / 64;
    const ExtensionOperator op(s, g, 1, delta);
    const auto ext = op.apply(Eigen::VectorXd::Constant(s.size(), 1.0));
    long far = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (s.dist(g.point(i)) > 8.0 * delta) {
            CHECK(ext.field.values[i] == 0.0);
            ++far;
        }
    }
    CHECK(far > 0);
    bool any_truncated = false;
    for (const auto& rc : op.reflected()) {
        CHECK(rc.truncated == (rc.whitney.side() > delta));
        any_truncated = any_truncated || rc.truncated;
    }
    CHECK(any_truncated);
}

TEST_CASE("locality") {
    const DSet s = cantor(4);
    const Grid g = unit_grid(128);
    const ExtensionOperator op(s, g, 2);
    const auto f = random_values(s.size(), 3);
    Eigen::VectorXd perturbed = f;
    // change every atom in the upper-right quarter
    for (Eigen::Index a = 0; a < s.size(); ++a) {
        if (s.atom(a)[0] > 0.5 && s.atom(a)[1] > 0.5) perturbed[a] += 10.0;
    }
    const auto e1 = op.apply(f).field.values, e2 = op.apply(perturbed).field.values;
    long near = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const Point x = g.point(i);
        if (x[0] < 0.35 && x[1] < 0.35 && s.dist(x) < 0.01) {
            CHECK(e1[i] == e2[i]);
            ++near;
        }
    }
    CHECK(near > 0);
}

TEST_CASE("trace") {
    const DSet s = cantor(4);
    const Grid g = unit_grid(128);
    const auto ladder = default_trace_ladder(g, 3);
    REQUIRE(ladder.size() == 3);
    CHECK(ladder.back() == 2.0 * g.step());
    CHECK(ladder.front() == 8.0 * g.step());

    const auto c = trace(GridFunction::sample(g, [](const PointRef&) { return -1.25; }), s, ladder);
    CHECK((c.steps.array() + 1.25).abs().maxCoeff() < 1e-14);
    CHECK(c.convergence.maxCoeff() < 1e-14);

    // a smooth field traces to its point values up to the averaging error
    const auto smooth = [](double x, double y) { return std::sin(3 * x) + y * y; };
    const auto tr = trace(GridFunction::sample(g, [&](const PointRef& x) { return smooth(x[0], x[1]); }), s, ladder);
    const auto exact = sample(s, smooth);
    CHECK((tr.values - exact).cwiseAbs().maxCoeff() < 4.0 * ladder.back());

    const auto zero = GridFunction::sample(g, [](const PointRef&) { return 0.0; });
    CHECK_THROWS_AS(trace(zero, s, {0.5 * g.step()}), ResolutionError);
    CHECK_THROWS_AS(trace(zero, s, {0.1, 0.2}), ParameterError);
}

TEST_CASE("trace of the extension converges under refinement") {
    const DSet s = cantor(4);
    const auto f = sample(s, lipschitz);
    double prev = INFINITY;
    for (int m : {64, 128, 256}) {
        const Grid g = unit_grid(m);
        const auto ext = extend(f, s, 1, kDefaultDelta, g);
        const auto tr = trace(ext.field, s, default_trace_ladder(g, 2));
        const double err = (tr.values - f).cwiseAbs().maxCoeff();
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 2e-2);
}

TEST_CASE("exports") {
    const DSet s = cantor(3);
    const Grid g = unit_grid(32);
    const auto ext = extend(Eigen::VectorXd::Constant(s.size(), 1.0), s, 1, kDefaultDelta, g);
    const std::string csv = ext.to_csv();
    CHECK(csv.rfind("x,y,value\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == g.size() + 1);
    const auto meta = ext.sidecar();
    CHECK(meta["nx"] == 32);
    CHECK(meta["step"].get<double>() == g.step());
    CHECK(meta["origin"][0].get<double>() == 0.5 / 32);

    const auto dir = std::filesystem::temp_directory_path() / "fracbesov_ext_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "field.bin").string();
    ext.write_binary(path);
    CHECK(std::filesystem::file_size(path) == sizeof(double) * static_cast<std::size_t>(g.size()));
    std::ifstream in(path, std::ios::binary);
    std::vector<double> back(static_cast<std::size_t>(g.size()));
    in.read(reinterpret_cast<char*>(back.data()), static_cast<std::streamsize>(back.size() * sizeof(double)));
    CHECK(back[17] == ext.field.values[17]);
    CHECK(nlohmann::json::parse(std::ifstream(path + ".json"))["ny"] == 32);
    std::filesystem::remove_all(dir);
}

TEST_CASE("local transfer diagnostics") {
    const DSet s = cantor(4);
    const Grid g = unit_grid(128);
    const ExtensionOperator op(s, g, 1);
    SUBCASE("constants are vacuous") {
        const Eigen::VectorXd f = Eigen::VectorXd::Constant(s.size(), 4.0);
        const auto rep = local_transfer_check(op.apply(f), f, s, 1, 2);
        CHECK(rep.vacuous());
        CHECK(rep.near_points > 0);
        CHECK(decay_check(op.apply(f), f, s, 1, 1.0 / 32).max_ratio == 0.0);
    }
    SUBCASE("random data gives finite ratios") {
        const auto f = random_values(s.size(), 8);
        const auto ext = op.apply(f);
        const auto rep = local_transfer_check(ext, f, s, 1, 2);
        CHECK(std::isfinite(rep.near_max_ratio));
        CHECK(rep.near_max_ratio > 0.0);
        CHECK(std::isfinite(rep.cubetrans_max_ratio));
        // the unit square holds no cube far from S at this scale
        CHECK(rep.far_points == 0);
        CHECK(rep.far_beyond_nonzero == 0);
        const auto dec = decay_check(ext, f, s, 1, 1.0 / 32);
        CHECK(dec.points > 0);
        CHECK(std::isfinite(dec.max_ratio));
        CHECK(rep.to_json()["j"] == 2);
    }
    CHECK_THROWS_AS(local_transfer_check(op.apply(Eigen::VectorXd::Zero(s.size())), Eigen::VectorXd::Zero(s.size()),
                                         s, 1, 6),
                    ResolutionError);
}
