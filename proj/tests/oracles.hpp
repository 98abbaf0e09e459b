#pragma once

// Independent brute-force reference computations used as test oracles.

#include "fracbesov/cube.hpp"
#include "fracbesov/dset.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

inline double linear_dist(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& x) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < atoms.cols(); ++k) {
        best = std::min(best, (atoms.col(k) - x).cwiseAbs().maxCoeff());
    }
    return best;
}

inline Eigen::Index linear_count(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& c, double r) {
    Eigen::Index count = 0;
    for (Eigen::Index k = 0; k < atoms.cols(); ++k) {
        if ((atoms.col(k) - c).cwiseAbs().maxCoeff() <= r) ++count;
    }
    return count;
}

// Integer coordinate on the 2^-40 lattice.
inline std::int64_t lattice(double v) {
    return static_cast<std::int64_t>(std::llround(std::ldexp(v, fracbesov::kLatticeBits)));
}

// Sup distance from a dyadic cube to the atoms, and the cube side, both as
// exact multiples of 2^-40.
struct ExactWhitney {
    __int128 dist;
    __int128 diam;
};

inline ExactWhitney exact_whitney(const fracbesov::DyadicCube& q, const Eigen::MatrixXd& atoms) {
    const int shift = fracbesov::kLatticeBits - q.level;
    const __int128 side = static_cast<__int128>(1) << shift;
    __int128 best = -1;
    for (Eigen::Index k = 0; k < atoms.cols(); ++k) {
        __int128 d = 0;
        for (int i = 0; i < q.dim(); ++i) {
            const __int128 lo = static_cast<__int128>(q.coords[static_cast<std::size_t>(i)]) * side;
            const __int128 hi = lo + side;
            const __int128 a = lattice(atoms(i, k));
            __int128 di = 0;
            if (a < lo) di = lo - a;
            if (a > hi) di = a - hi;
            d = std::max(d, di);
        }
        if (best < 0 || d < best) best = d;
    }
    return {best, side};
}

// Uniform grid of atoms at cell midpoints of [0,1]^2 with 2^m cells per side.
inline fracbesov::DSet full_grid(int m) {
    const int per = 1 << m;
    Eigen::MatrixXd atoms(2, per * per);
    for (int y = 0; y < per; ++y) {
        for (int x = 0; x < per; ++x) {
            atoms(0, y * per + x) = std::ldexp(x + 0.5, -m);
            atoms(1, y * per + x) = std::ldexp(y + 0.5, -m);
        }
    }
    return fracbesov::DSet::from_atoms(atoms, 2.0, std::ldexp(0.5, -m));
}

inline fracbesov::DSet single_atom(double x = 0.0, double y = 0.0) {
    Eigen::MatrixXd atoms(2, 1);
    atoms << x, y;
    return fracbesov::DSet::from_atoms(atoms, 0.0, 0.0);
}

}  // namespace oracle
