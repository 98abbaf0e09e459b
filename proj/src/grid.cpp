#include "fracbesov/grid.hpp"

#include "fracbesov/errors.hpp"

#include <cmath>

namespace fracbesov {

Grid::Grid(Cube r, int m) : region(std::move(r)), per_side(m) {
    if (m < 1) throw ParameterError("grid needs at least one cell per side");
}

double Grid::cell_volume() const {
    return std::pow(step(), dim());
}

Eigen::Index Grid::size() const {
    Eigen::Index s = 1;
    for (int i = 0; i < dim(); ++i) s *= per_side;
    return s;
}

std::vector<Eigen::Index> Grid::unflatten(Eigen::Index flat) const {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(dim()));
    for (auto& v : idx) {
        v = flat % per_side;
        flat /= per_side;
    }
    return idx;
}

Eigen::Index Grid::flatten(const std::vector<Eigen::Index>& idx) const {
    Eigen::Index flat = 0;
    for (std::size_t a = idx.size(); a-- > 0;) flat = flat * per_side + idx[a];
    return flat;
}

Point Grid::point(Eigen::Index flat) const {
    Point x(dim());
    for (int a = 0; a < dim(); ++a) {
        x[a] = coord(a, flat % per_side);
        flat /= per_side;
    }
    return x;
}

std::vector<Eigen::Index> Grid::nearest(const PointRef& x) const {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(dim()));
    for (int a = 0; a < dim(); ++a) {
        const double s = (x[a] - region.lower(a)) / step() - 0.5;
        idx[static_cast<std::size_t>(a)] =
            std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::llround(s)), 0, per_side - 1);
    }
    return idx;
}

Eigen::MatrixXd Grid::points() const {
    Eigen::MatrixXd pts(dim(), size());
    for (Eigen::Index g = 0; g < size(); ++g) pts.col(g) = point(g);
    return pts;
}

GridFunction GridFunction::sample(const Grid& g, const std::function<double(const PointRef&)>& f) {
    GridFunction out{g, Eigen::VectorXd(g.size())};
    for (Eigen::Index i = 0; i < g.size(); ++i) out.values[i] = f(g.point(i));
    return out;
}

}  // namespace fracbesov
