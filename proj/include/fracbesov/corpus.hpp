#pragma once

#include "fracbesov/cube.hpp"
#include "fracbesov/dset.hpp"
#include "fracbesov/grid.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace fracbesov {

// A test function defined on all of R^2, so the same f can be sampled on the
// atoms of any depth and on any grid.
struct CorpusFunction {
    std::string name;
    std::string kind;  // constant, polynomial, tent, multiscale
    int degree = -1;   // polynomial degree; -1 when not a polynomial
    // Sup-metric Lipschitz bound on the unit square; infinite when none is claimed.
    double lipschitz = std::numeric_limits<double>::infinity();
    std::function<double(const PointRef&)> eval;

    Eigen::VectorXd on_atoms(const DSet& s) const;
    GridFunction on_grid(const Grid& g) const;
};

// Tent centres are cell corners of the attractor at this depth. They lie on
// the attractor, and the corpus does not change when the atom cloud is refined.
inline constexpr int kCorpusCentreDepth = 3;

// One constant, two affine maps, one quadratic, six unit-slope tents at
// random cell corners, and the rest random bump sums over dyadic scales
// 0..5 with amplitude 2^{-j beta}. Deterministic in (size, seed, ifs).
std::vector<CorpusFunction> make_corpus(int size, std::uint64_t seed, const IfsSpec& ifs);

std::vector<CorpusFunction> lipschitz_subset(const std::vector<CorpusFunction>& corpus);

}  // namespace fracbesov
