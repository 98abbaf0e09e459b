#include "fracbesov/poly.hpp"

#include "fracbesov/errors.hpp"

#include <vector>

namespace fracbesov {

int poly_dim(int n, int degree) {
    if (degree < 0) return 0;
    // C(n + degree, n)
    long long c = 1;
    for (int i = 1; i <= n; ++i) c = c * (degree + i) / i;
    return static_cast<int>(c);
}

MonomialBasis::MonomialBasis(int n, int degree) : n_(n), degree_(degree) {
    if (n < 1) throw ParameterError("polynomial dimension must be positive");
    exps_.resize(poly_dim(n, degree), n);
    int row = 0;
    std::vector<int> nu(static_cast<std::size_t>(n));
    for (int total = 0; total <= degree; ++total) {
        // Compositions of `total` into n parts, first part largest first.
        auto rec = [&](auto&& self, int i, int left) -> void {
            if (i == n - 1) {
                nu[static_cast<std::size_t>(i)] = left;
                for (int a = 0; a < n; ++a) exps_(row, a) = nu[static_cast<std::size_t>(a)];
                ++row;
                return;
            }
            for (int v = left; v >= 0; --v) {
                nu[static_cast<std::size_t>(i)] = v;
                self(self, i + 1, left - v);
            }
        };
        rec(rec, 0, total);
    }
}

int MonomialBasis::index_of(const Eigen::VectorXi& nu) const {
    for (int t = 0; t < size(); ++t) {
        if (exps_.row(t).transpose() == nu) return t;
    }
    return -1;
}

Eigen::MatrixXd MonomialBasis::design(const Eigen::MatrixXd& points, const Cube& anchor) const {
    const Eigen::Index m = points.cols();
    Eigen::MatrixXd out(m, size());
    if (size() == 0) return out;
    const double inv = 1.0 / anchor.side();
    // powers[a](p, e) = z_a(p)^e
    std::vector<Eigen::MatrixXd> powers(static_cast<std::size_t>(n_));
    for (int a = 0; a < n_; ++a) {
        auto& pw = powers[static_cast<std::size_t>(a)];
        pw.resize(m, degree_ + 1);
        pw.col(0).setOnes();
        const Eigen::VectorXd z = (points.row(a).transpose().array() - anchor.center[a]) * inv;
        for (int e = 1; e <= degree_; ++e) pw.col(e) = pw.col(e - 1).cwiseProduct(z);
    }
    for (int t = 0; t < size(); ++t) {
        out.col(t) = powers[0].col(exps_(t, 0));
        for (int a = 1; a < n_; ++a) {
            out.col(t).array() *= powers[static_cast<std::size_t>(a)].col(exps_(t, a)).array();
        }
    }
    return out;
}

Eigen::RowVectorXd MonomialBasis::row(const PointRef& x, const Cube& anchor) const {
    Eigen::RowVectorXd out(size());
    const Eigen::VectorXd z = (x - anchor.center) / anchor.side();
    for (int t = 0; t < size(); ++t) {
        double v = 1.0;
        for (int a = 0; a < n_; ++a) {
            for (int e = 0; e < exps_(t, a); ++e) v *= z[a];
        }
        out[t] = v;
    }
    return out;
}

Eigen::MatrixXd MonomialBasis::gradient(const PointRef& x, const Cube& anchor) const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n_, size());
    const double inv = 1.0 / anchor.side();
    const Eigen::VectorXd z = (x - anchor.center) * inv;
    for (int t = 0; t < size(); ++t) {
        for (int b = 0; b < n_; ++b) {
            if (exps_(t, b) == 0) continue;
            double v = exps_(t, b) * inv;
            for (int a = 0; a < n_; ++a) {
                const int e = exps_(t, a) - (a == b ? 1 : 0);
                for (int r = 0; r < e; ++r) v *= z[a];
            }
            g(b, t) = v;
        }
    }
    return g;
}

double MonomialBasis::evaluate(const Eigen::VectorXd& coeffs, const PointRef& x,
                               const Cube& anchor) const {
    if (size() == 0) return 0.0;
    return row(x, anchor).dot(coeffs);
}

}  // namespace fracbesov
