#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace hopfreeb {

using cplx = std::complex<double>;
using Point2 = Eigen::Vector2cd;

inline constexpr double kPi = 3.14159265358979323846;

/// Deviation of `value` from `reference`, absolute below unit magnitude and
/// relative above it.
inline double scaled_deviation(cplx value, cplx reference) {
    return std::abs(value - reference) / std::max(1.0, std::abs(reference));
}

inline double scaled_deviation(double value, double reference) {
    return std::abs(value - reference) / std::max(1.0, std::abs(reference));
}

template <typename Derived1, typename Derived2>
double scaled_deviation(const Eigen::MatrixBase<Derived1>& value, const Eigen::MatrixBase<Derived2>& reference) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < value.size(); ++i) {
        worst = std::max(worst, scaled_deviation(cplx(value(i)), cplx(reference(i))));
    }
    return worst;
}

/// |z| log-uniform in [r_lo, r_hi], argument uniform.
template <typename Rng>
cplx sample_complex(Rng& rng, double r_lo = 0.1, double r_hi = 10.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double r = r_lo * std::pow(r_hi / r_lo, u(rng));
    double theta = 2.0 * kPi * u(rng);
    return std::polar(r, theta);
}

template <typename Rng>
Point2 sample_point2(Rng& rng) {
    return Point2(sample_complex(rng), sample_complex(rng));
}

template <typename Rng>
Eigen::VectorXcd sample_pointn(Rng& rng, int n) {
    Eigen::VectorXcd z(n);
    for (int i = 0; i < n; ++i) z(i) = sample_complex(rng);
    return z;
}

inline double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    double hi = *mid;
    if (values.size() % 2 == 1) return hi;
    double lo = *std::max_element(values.begin(), mid);
    return 0.5 * (lo + hi);
}

} // namespace hopfreeb
