#include "fracbesov/atom_tree.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

namespace fracbesov {

namespace {

double point_box_dist(const PointRef& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        d = std::max({d, lo[i] - x[i], x[i] - hi[i]});
    }
    return d;
}

double box_box_dist(const PointRef& alo, const PointRef& ahi, const Eigen::VectorXd& blo,
                    const Eigen::VectorXd& bhi) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < alo.size(); ++i) {
        d = std::max({d, blo[i] - ahi[i], alo[i] - bhi[i]});
    }
    return d;
}

}  // namespace

AtomTree::AtomTree(Eigen::MatrixXd atoms, int leaf_size) : atoms_(std::move(atoms)) {
    perm_.resize(static_cast<std::size_t>(atoms_.cols()));
    std::iota(perm_.begin(), perm_.end(), Eigen::Index{0});
    if (atoms_.cols() > 0) {
        nodes_.reserve(static_cast<std::size_t>(4 * atoms_.cols() / std::max(leaf_size, 1) + 8));
        build(0, atoms_.cols(), std::max(leaf_size, 1));
    }
}

int AtomTree::build(Eigen::Index begin, Eigen::Index end, int leaf_size) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    Node node;
    node.begin = begin;
    node.end = end;
    node.lo = atoms_.col(perm_[begin]);
    node.hi = node.lo;
    for (Eigen::Index k = begin + 1; k < end; ++k) {
        node.lo = node.lo.cwiseMin(atoms_.col(perm_[k]));
        node.hi = node.hi.cwiseMax(atoms_.col(perm_[k]));
    }
    const bool degenerate = (node.hi - node.lo).maxCoeff() <= 0.0;
    if (end - begin > leaf_size && !degenerate) {
        const Eigen::VectorXd mid = 0.5 * (node.lo + node.hi);
        const int n = dim();
        auto orthant = [&](Eigen::Index a) {
            unsigned m = 0;
            for (int i = 0; i < n; ++i) {
                if (atoms_(i, a) > mid[i]) m |= 1u << i;
            }
            return m;
        };
        // Stable partition keeps ascending atom order inside each orthant.
        std::stable_sort(perm_.begin() + begin, perm_.begin() + end,
                         [&](Eigen::Index a, Eigen::Index b) { return orthant(a) < orthant(b); });
        std::vector<std::pair<Eigen::Index, Eigen::Index>> ranges;
        Eigen::Index k = begin;
        while (k < end) {
            const unsigned m = orthant(perm_[k]);
            Eigen::Index e = k;
            while (e < end && orthant(perm_[e]) == m) ++e;
            ranges.emplace_back(k, e);
            k = e;
        }
        std::vector<int> kids;
        for (auto [b, e] : ranges) kids.push_back(build(b, e, leaf_size));
        // Children are built depth-first, so record them explicitly.
        node.first_child = static_cast<int>(child_index_.size());
        node.child_count = static_cast<int>(kids.size());
        child_index_.insert(child_index_.end(), kids.begin(), kids.end());
    }
    nodes_[static_cast<std::size_t>(id)] = std::move(node);
    return id;
}

AtomTree::Hit AtomTree::nearest(const PointRef& x, Eigen::Index exclude) const {
    Hit best{-1, std::numeric_limits<double>::infinity()};
    if (!nodes_.empty()) nearest_rec(0, x, exclude, best);
    return best;
}

void AtomTree::nearest_rec(int id, const PointRef& x, Eigen::Index exclude, Hit& best) const {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (point_box_dist(x, node.lo, node.hi) > best.dist) return;
    if (node.child_count == 0) {
        for (Eigen::Index k = node.begin; k < node.end; ++k) {
            const Eigen::Index a = perm_[k];
            if (a == exclude) continue;
            const double d = (atoms_.col(a) - x).cwiseAbs().maxCoeff();
            if (d < best.dist || (d == best.dist && a < best.index)) best = {a, d};
        }
        return;
    }
    std::array<std::pair<double, int>, 64> order{};
    const int cc = node.child_count;
    for (int c = 0; c < cc; ++c) {
        const int child = child_index_[static_cast<std::size_t>(node.first_child + c)];
        const Node& cn = nodes_[static_cast<std::size_t>(child)];
        order[static_cast<std::size_t>(c)] = {point_box_dist(x, cn.lo, cn.hi), child};
    }
    std::sort(order.begin(), order.begin() + cc);
    for (int c = 0; c < cc; ++c) {
        if (order[static_cast<std::size_t>(c)].first > best.dist) break;
        nearest_rec(order[static_cast<std::size_t>(c)].second, x, exclude, best);
    }
}

double AtomTree::dist_to_box(const PointRef& lo, const PointRef& hi) const {
    if (nodes_.empty()) return std::numeric_limits<double>::infinity();
    return box_rec(0, lo, hi, std::numeric_limits<double>::infinity());
}

double AtomTree::box_rec(int id, const PointRef& lo, const PointRef& hi, double best) const {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (box_box_dist(lo, hi, node.lo, node.hi) >= best) return best;
    if (node.child_count == 0) {
        for (Eigen::Index k = node.begin; k < node.end; ++k) {
            const auto a = atoms_.col(perm_[k]);
            double d = 0.0;
            for (Eigen::Index i = 0; i < a.size(); ++i) {
                d = std::max({d, lo[i] - a[i], a[i] - hi[i]});
            }
            best = std::min(best, d);
        }
        return best;
    }
    for (int c = 0; c < node.child_count; ++c) {
        best = box_rec(child_index_[static_cast<std::size_t>(node.first_child + c)], lo, hi, best);
        if (best == 0.0) break;
    }
    return best;
}

template <typename Visit>
void AtomTree::range_rec(int id, const PointRef& lo, const PointRef& hi, bool half_open,
                         Visit&& visit) const {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    const int n = dim();
    bool inside = true;
    for (int i = 0; i < n; ++i) {
        if (node.hi[i] < lo[i] || node.lo[i] > hi[i]) return;
        if (half_open && node.lo[i] >= hi[i]) return;
        if (node.lo[i] < lo[i] || node.hi[i] > hi[i] || (half_open && node.hi[i] >= hi[i])) {
            inside = false;
        }
    }
    if (inside) {
        for (Eigen::Index k = node.begin; k < node.end; ++k) visit(perm_[k]);
        return;
    }
    if (node.child_count == 0) {
        for (Eigen::Index k = node.begin; k < node.end; ++k) {
            const Eigen::Index a = perm_[k];
            bool in = true;
            for (int i = 0; i < n && in; ++i) {
                const double v = atoms_(i, a);
                in = v >= lo[i] && (half_open ? v < hi[i] : v <= hi[i]);
            }
            if (in) visit(a);
        }
        return;
    }
    for (int c = 0; c < node.child_count; ++c) {
        range_rec(child_index_[static_cast<std::size_t>(node.first_child + c)], lo, hi, half_open,
                  visit);
    }
}

Eigen::Index AtomTree::count_in_box(const PointRef& lo, const PointRef& hi) const {
    Eigen::Index count = 0;
    if (!nodes_.empty()) range_rec(0, lo, hi, false, [&](Eigen::Index) { ++count; });
    return count;
}

Eigen::Index AtomTree::count_in_half_open(const PointRef& lo, const PointRef& hi) const {
    Eigen::Index count = 0;
    if (!nodes_.empty()) range_rec(0, lo, hi, true, [&](Eigen::Index) { ++count; });
    return count;
}

std::vector<Eigen::Index> AtomTree::collect_in_box(const PointRef& lo, const PointRef& hi) const {
    std::vector<Eigen::Index> out;
    if (!nodes_.empty()) range_rec(0, lo, hi, false, [&](Eigen::Index a) { out.push_back(a); });
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace fracbesov
