#include "fracbesov/dset.hpp"

#include "fracbesov/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace fracbesov {

double snap_to_lattice(double x) {
    return std::ldexp(std::nearbyint(std::ldexp(x, kLatticeBits)), -kLatticeBits);
}

double IfsSpec::similarity_dimension() const {
    return std::log(static_cast<double>(translations.size())) / std::log(1.0 / ratio);
}

IfsSpec IfsSpec::four_corner_cantor(int depth, double ratio) {
    IfsSpec spec;
    spec.n = 2;
    spec.ratio = ratio;
    spec.depth = depth;
    const double far = 1.0 - ratio;
    for (double y : {0.0, far}) {
        for (double x : {0.0, far}) {
            spec.translations.push_back((Point(2) << x, y).finished());
        }
    }
    return spec;
}

DSet DSet::from_ifs(const IfsSpec& spec) {
    if (!(spec.ratio > 0.0 && spec.ratio < 1.0)) {
        throw ParameterError("IFS ratio must lie in (0, 1)");
    }
    if (spec.translations.empty()) throw ParameterError("IFS needs at least one map");
    if (spec.depth < 0) throw ParameterError("IFS depth must be non-negative");
    for (const auto& t : spec.translations) {
        if (t.size() != spec.n) throw ParameterError("translation dimension mismatch");
        for (int i = 0; i < spec.n; ++i) {
            if (t[i] < 0.0 || t[i] + spec.ratio > 1.0 + 1e-12) {
                throw GeometryError("IFS maps must send the unit cube into itself");
            }
        }
    }
    const double d = spec.similarity_dimension();
    if (!(d > spec.n - 1 && d < spec.n)) {
        std::ostringstream os;
        os << "similarity dimension " << d << " outside (" << spec.n - 1 << ", " << spec.n << ")";
        throw DimensionError(os.str());
    }
    const auto m = spec.translations.size();
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            const double gap = (spec.translations[a] - spec.translations[b]).cwiseAbs().maxCoeff();
            if (gap < spec.ratio - 1e-12) {
                throw OpenSetConditionError("first-generation images of the unit cube overlap");
            }
        }
    }
    const double count = std::pow(static_cast<double>(m), spec.depth);
    if (count > 1 << 24) throw ResourceError("IFS depth produces too many atoms");

    Eigen::MatrixXd atoms = Eigen::MatrixXd::Constant(spec.n, 1, 0.5);
    for (int level = 0; level < spec.depth; ++level) {
        Eigen::MatrixXd next(spec.n, atoms.cols() * static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) {
            const auto off = static_cast<Eigen::Index>(i) * atoms.cols();
            next.middleCols(off, atoms.cols()) =
                (spec.ratio * atoms).colwise() + spec.translations[i];
        }
        atoms = std::move(next);
    }
    atoms = atoms.unaryExpr([](double v) { return snap_to_lattice(v); });

    DSet s;
    s.d_ = d;
    s.cell_radius_ = 0.5 * std::pow(spec.ratio, spec.depth);
    s.tree_ = std::make_shared<const AtomTree>(std::move(atoms));
    s.finish();
    // The attractor lies in the unit cube, which every map sends into itself.
    s.bounding_ = Cube(Point::Constant(spec.n, 0.5), 0.5);
    return s;
}

DSet DSet::from_atoms(Eigen::MatrixXd atoms, double d, double cell_radius) {
    if (atoms.cols() == 0) throw ParameterError("atom cloud is empty");
    atoms = atoms.unaryExpr([](double v) { return snap_to_lattice(v); });
    DSet s;
    s.d_ = d;
    s.cell_radius_ = cell_radius;
    s.tree_ = std::make_shared<const AtomTree>(std::move(atoms));
    s.finish();
    return s;
}

void DSet::finish() {
    const auto& a = tree_->atoms();
    weight_ = 1.0 / static_cast<double>(a.cols());
    spacing_ = 0.0;
    if (a.cols() > 1) {
        spacing_ = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < a.cols(); ++i) {
            spacing_ = std::min(spacing_, tree_->nearest(a.col(i), i).dist);
        }
    }
    // Rounded outward onto the lattice so dyadic enumerations inside the
    // bounding cube are not lost to roundoff at its faces.
    const Eigen::VectorXd lo = (a.rowwise().minCoeff().array() - cell_radius_).unaryExpr([](double v) {
        return std::ldexp(std::floor(std::ldexp(v, kLatticeBits)), -kLatticeBits);
    });
    const Eigen::VectorXd hi = (a.rowwise().maxCoeff().array() + cell_radius_).unaryExpr([](double v) {
        return std::ldexp(std::ceil(std::ldexp(v, kLatticeBits)), -kLatticeBits);
    });
    bounding_ = Cube(0.5 * (lo + hi), 0.5 * (hi - lo).maxCoeff());
}

double DSet::resolution_floor() const {
    return spacing_ > 0.0 ? 4.0 * spacing_ : std::ldexp(1.0, -16);
}

double DSet::measure(const Cube& q) const {
    const Eigen::VectorXd lo = q.center.array() - q.half_side;
    const Eigen::VectorXd hi = q.center.array() + q.half_side;
    return weight_ * static_cast<double>(tree_->count_in_box(lo, hi));
}

double DSet::measure_half_open(const Cube& q) const {
    const Eigen::VectorXd lo = q.center.array() - q.half_side;
    const Eigen::VectorXd hi = q.center.array() + q.half_side;
    return weight_ * static_cast<double>(tree_->count_in_half_open(lo, hi));
}

double DSet::dist(const PointRef& x) const {
    return tree_->nearest(x).dist;
}

Eigen::Index DSet::nearest(const PointRef& x) const {
    return tree_->nearest(x).index;
}

double DSet::dist(const Cube& q) const {
    const Eigen::VectorXd lo = q.center.array() - q.half_side;
    const Eigen::VectorXd hi = q.center.array() + q.half_side;
    return tree_->dist_to_box(lo, hi);
}

std::vector<Eigen::Index> DSet::atoms_in(const Cube& q) const {
    const Eigen::VectorXd lo = q.center.array() - q.half_side;
    const Eigen::VectorXd hi = q.center.array() + q.half_side;
    return tree_->collect_in_box(lo, hi);
}

std::string DSet::to_csv() const {
    std::ostringstream os;
    os << std::setprecision(17);
    static constexpr const char* kAxes[] = {"x", "y", "z"};
    for (int i = 0; i < dim(); ++i) {
        if (i < 3) {
            os << kAxes[i] << ',';
        } else {
            os << 'x' << i << ',';
        }
    }
    os << "weight\n";
    for (Eigen::Index k = 0; k < size(); ++k) {
        for (int i = 0; i < dim(); ++i) os << atoms()(i, k) << ',';
        os << weight_ << '\n';
    }
    return os.str();
}

RegularityReport audit_regularity(const DSet& s, int samples, std::uint64_t seed, int ladder_size) {
    if (samples < 1) throw ParameterError("audit needs at least one sample");
    RegularityReport rep;
    rep.samples = samples;
    rep.r_min = std::min(1.0, s.resolution_floor());
    rep.r_max = 1.0;
    std::vector<double> ladder;
    const int steps = rep.r_min < 1.0 ? std::max(ladder_size, 2) : 1;
    for (int k = 0; k < steps; ++k) {
        const double t = steps == 1 ? 1.0 : static_cast<double>(k) / (steps - 1);
        ladder.push_back(rep.r_min * std::pow(1.0 / rep.r_min, t));
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, s.size() - 1);
    rep.c1 = std::numeric_limits<double>::infinity();
    rep.c2 = 0.0;
    for (int t = 0; t < samples; ++t) {
        const Eigen::Index w = pick(rng);
        for (double r : ladder) {
            const double ratio = s.measure(Cube(s.atom(w), r)) / std::pow(r, s.dimension());
            if (ratio < rep.c1) {
                rep.c1 = ratio;
                rep.c1_witness = {w, r, ratio};
            }
            if (ratio > rep.c2) {
                rep.c2 = ratio;
                rep.c2_witness = {w, r, ratio};
            }
        }
    }
    rep.regular = rep.c2 <= kRegularityRatioThreshold * rep.c1;
    return rep;
}

}  // namespace fracbesov
