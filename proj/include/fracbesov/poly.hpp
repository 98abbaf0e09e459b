#pragma once

#include "fracbesov/cube.hpp"

#include <Eigen/Dense>

namespace fracbesov {

// Monomials ((x - x_Q) / l(Q))^nu with |nu| <= degree, anchored at a cube.
// Ordered by total degree, then lexicographically with the first exponent
// largest. degree = -1 gives the zero space.
class MonomialBasis {
public:
    MonomialBasis(int n, int degree);

    int dim() const { return n_; }
    int degree() const { return degree_; }
    int size() const { return static_cast<int>(exps_.rows()); }
    // Row t holds the exponent vector of monomial t.
    const Eigen::MatrixXi& exponents() const { return exps_; }
    // Index of a monomial by its exponent vector, -1 if absent.
    int index_of(const Eigen::VectorXi& nu) const;

    // Values at the columns of `points`: rows are points, columns monomials.
    Eigen::MatrixXd design(const Eigen::MatrixXd& points, const Cube& anchor) const;
    Eigen::RowVectorXd row(const PointRef& x, const Cube& anchor) const;
    // Gradient (n x size) of every monomial at x, in original coordinates.
    Eigen::MatrixXd gradient(const PointRef& x, const Cube& anchor) const;

    double evaluate(const Eigen::VectorXd& coeffs, const PointRef& x, const Cube& anchor) const;

private:
    int n_;
    int degree_;
    Eigen::MatrixXi exps_;
};

// Dimension of the polynomials of degree <= degree in n variables.
int poly_dim(int n, int degree);

}  // namespace fracbesov
