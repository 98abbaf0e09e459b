#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace fracbesov {

// Neumaier compensated summation.
template <typename T>
class BasicCompensatedSum {
public:
    void add(T x) {
        const T t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    T value() const { return sum_ + comp_; }

private:
    T sum_ = 0;
    T comp_ = 0;
};

using CompensatedSum = BasicCompensatedSum<double>;
using ExtendedSum = BasicCompensatedSum<long double>;

// (sum_i w_i |v_i|^p)^(1/p) with compensated accumulation.
inline double weighted_lp(const Eigen::Ref<const Eigen::VectorXd>& v,
                          const Eigen::Ref<const Eigen::VectorXd>& w, double p) {
    CompensatedSum s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s.add(w[i] * std::pow(std::abs(v[i]), p));
    return std::pow(s.value(), 1.0 / p);
}

}  // namespace fracbesov
