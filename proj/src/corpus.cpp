#include "fracbesov/corpus.hpp"

#include "fracbesov/errors.hpp"
#include "fracbesov/extension.hpp"

#include <cmath>
#include <random>

namespace fracbesov {

Eigen::VectorXd CorpusFunction::on_atoms(const DSet& s) const {
    Eigen::VectorXd v(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) v[i] = eval(s.atom(i));
    return v;
}

GridFunction CorpusFunction::on_grid(const Grid& g) const {
    return GridFunction::sample(g, [this](const PointRef& x) { return eval(x); });
}

namespace {

Point random_cell_corner(const IfsSpec& ifs, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, ifs.translations.size() - 1);
    Point x = Point::Zero(ifs.n);
    double scale = 1.0;
    for (int l = 0; l < kCorpusCentreDepth; ++l) {
        x += scale * ifs.translations[pick(rng)];
        scale *= ifs.ratio;
    }
    return x;
}

struct Bump {
    Point centre;
    double inv_width;
    double amplitude;
};

}  // namespace

std::vector<CorpusFunction> make_corpus(int size, std::uint64_t seed, const IfsSpec& ifs) {
    if (size < 1) throw ParameterError("corpus size must be positive");
    if (ifs.n != 2) throw DimensionError("corpus functions are planar");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> box(0.0, 1.0);

    std::vector<CorpusFunction> out;
    auto push = [&](CorpusFunction f) {
        if (static_cast<int>(out.size()) < size) out.push_back(std::move(f));
    };

    const double c = unit(rng);
    push({"constant", "constant", 0, 0.0, [c](const PointRef&) { return c; }});

    for (int i = 0; i < 2; ++i) {
        const double a0 = unit(rng), a1 = unit(rng), a2 = unit(rng);
        push({"affine_" + std::to_string(i), "polynomial", 1, std::abs(a1) + std::abs(a2),
              [=](const PointRef& x) { return a0 + a1 * x[0] + a2 * x[1]; }});
    }

    {
        // |a| + |b| + |c| <= 1 keeps the sup-metric Lipschitz constant on the unit square at most 2.
        double a = unit(rng), b = unit(rng), cc = unit(rng);
        const double norm = std::abs(a) + std::abs(b) + std::abs(cc);
        a /= norm, b /= norm, cc /= norm;
        push({"quadratic", "polynomial", 2, 2.0,
              [=](const PointRef& x) { return a * x[0] * x[0] + b * x[0] * x[1] + cc * x[1] * x[1]; }});
    }

    for (int i = 0; i < 6; ++i) {
        const Point centre = random_cell_corner(ifs, rng);
        push({"tent_" + std::to_string(i), "tent", -1, 1.0, [centre](const PointRef& x) {
                  return std::max(0.0, 1.0 - sup_dist(x, centre));
              }});
    }

    for (int i = 0; static_cast<int>(out.size()) < size; ++i) {
        const double beta = 0.3 + 1.2 * box(rng);
        std::vector<Bump> bumps;
        for (int j = 0; j <= 5; ++j) {
            for (int m = 0; m < 4; ++m) {
                Point y(2);
                y[0] = box(rng);
                y[1] = box(rng);
                bumps.push_back({y, std::ldexp(1.0, j), std::exp2(-j * beta) * unit(rng)});
            }
        }
        push({"multiscale_" + std::to_string(i), "multiscale", -1, std::numeric_limits<double>::infinity(), [bumps](const PointRef& x) {
                  double v = 0.0;
                  for (const auto& b : bumps) {
                      // Tensor bump normalized to 1 at its centre.
                      double w = b.amplitude;
                      for (int a = 0; a < 2 && w != 0.0; ++a) {
                          w *= std::exp(1.0) * bump_profile((x[a] - b.centre[a]) * b.inv_width);
                      }
                      v += w;
                  }
                  return v;
              }});
    }
    return out;
}

std::vector<CorpusFunction> lipschitz_subset(const std::vector<CorpusFunction>& corpus) {
    std::vector<CorpusFunction> out;
    for (const auto& f : corpus) {
        if (std::isfinite(f.lipschitz)) out.push_back(f);
    }
    return out;
}

}  // namespace fracbesov
