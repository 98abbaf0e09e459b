#pragma once

#include "fracbesov/cube.hpp"
#include "fracbesov/dset.hpp"
#include "fracbesov/poly.hpp"

#include <Eigen/Dense>
#include "json.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fracbesov {

// Pivot budget of the exact L1 solver used for u = 1, k >= 2.
inline constexpr int kL1MaxPivots = 500;

// Normalized local best approximation E_k(f, Q)_{L^u} by polynomials of
// degree <= k - 1.
struct ApproxResult {
    double value = 0.0;
    Eigen::VectorXd minimizer;  // coefficients in MonomialBasis(n, k - 1) anchored at `cube`
    int u = 2;
    int k = 1;
    Cube cube;
    Eigen::Index support = 0;
    bool unique = true;
    std::vector<double> residual_norm_history;  // objective after each L1 pivot
};

// Weighted sample (columns of `points`) restricted to a cube by the caller.
// The normalization divides by the total weight.
ApproxResult best_approx(const Eigen::MatrixXd& points, const Eigen::VectorXd& values,
                         const Eigen::VectorXd& weights, const Cube& cube, int k, int u);

// E_k(f, Q)_{L^u(S)} with f sampled on all atoms of S.
ApproxResult best_approx_on_set(const DSet& s, const Eigen::VectorXd& f, const Cube& q, int k, int u);

// Value only, for the subset of atoms given (ascending indices).
double approx_value(const DSet& s, const Eigen::VectorXd& f, const std::vector<Eigen::Index>& atoms,
                    const Cube& q, int k, int u);

// E1 / ((r2 / r1)^(d/u) E2) for Q1 inside Q2; empty when both vanish.
std::optional<double> monotonicity_factor(const ApproxResult& e1, const ApproxResult& e2, const DSet& s);

// L^2(mu restricted to Q) projection onto polynomials of degree <= k.
struct Projection {
    Cube cube;
    int k = 0;
    MonomialBasis basis{2, 0};
    std::vector<Eigen::Index> atoms;
    double mass = 0.0;
    Eigen::MatrixXd design;  // atoms x monomials
    // Row b: coefficients of the orthonormal polynomial P_b in the monomial basis.
    Eigen::MatrixXd onb;
    // Row nu: coefficients of h_{Q,nu} = mass * sum_b onb(b, nu) P_b.
    Eigen::MatrixXd h;
    Eigen::VectorXd h_sup;  // sup of |h_{Q,nu}| over Q on a dense grid
    double gram_error = 0.0;

    // Monomial coefficients of P f through sum_b <f, P_b> P_b.
    Eigen::VectorXd apply(const Eigen::VectorXd& f_all) const;
    // Same through sum_nu avg(f h_nu) m_nu.
    Eigen::VectorXd apply_representation(const Eigen::VectorXd& f_all) const;
    double evaluate(const Eigen::VectorXd& coeffs, const PointRef& x) const {
        return basis.evaluate(coeffs, x, cube);
    }
};

inline constexpr double kGramTolerance = 1e-10;
inline constexpr double kRankThreshold = 1e-8;

Projection build_projection(const DSet& s, const Cube& q, int k, int sup_grid = 33);

// ||f - P_{k,Q} f||_{L^u} / E_{k+1}(f, Q)_{L^u(S)}; empty for 0/0.
std::optional<double> near_best_check(const DSet& s, const Projection& proj, int u,
                                      const Eigen::VectorXd& f);

// Outcome of a randomized inequality certifier.
struct CertifierResult {
    std::string check;
    nlohmann::json params;
    double max_ratio = 0.0;
    int trials = 0;
    int skipped = 0;  // denominator vanished with a positive numerator
    int vacuous = 0;  // 0/0
    nlohmann::json witnesses = nlohmann::json::array();

    nlohmann::json to_json() const;
    std::string to_json_line() const;
};

// Exponent value used for the sup norm in certifier parameters.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// (1/|Q| int_Q |p|^r)^(1/r) by midpoint quadrature from 32^n cells,
// doubled until the relative change is below 1e-6 or max_per_side is hit.
double lebesgue_mean_norm(const MonomialBasis& basis, const Eigen::VectorXd& coeffs,
                          const Cube& anchor, const Cube& q, double r, int max_per_side = 512);

// One polynomial: LHS over Q (Lebesgue, exponent r) against RHS over Qp and S
// (exponent u); +inf when only the right side vanishes, NaN for 0/0.
double remez_ratio(const DSet& s, const Cube& q, const Cube& qp, const MonomialBasis& basis,
                   const Eigen::VectorXd& coeffs, double u, double r);

CertifierResult remez_check(const DSet& s, const Cube& q, const Cube& qp, int k, double u, double r,
                            int trials, std::uint64_t seed);

CertifierResult markov_check(const DSet& s, const Cube& q, int k, int trials, std::uint64_t seed);

// max_atoms |grad p| * l(Q) / max_atoms |p| for one polynomial; empty when p
// vanishes on the atoms.
std::optional<double> markov_ratio(const DSet& s, const Cube& q, const MonomialBasis& basis,
                                   const Eigen::VectorXd& coeffs);

}  // namespace fracbesov
