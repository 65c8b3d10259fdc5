#include "hopfreeb/holonomy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "hopfreeb/error.hpp"

namespace hopfreeb {

namespace {

using Series = std::vector<double>;

Series series_mul(const Series& x, const Series& y, int order) {
    Series out(static_cast<std::size_t>(order) + 1, 0.0);
    for (int i = 0; i <= order; ++i) {
        for (int j = 0; i + j <= order; ++j) out[i + j] += x[i] * y[j];
    }
    return out;
}

// exp of a series with zero constant term.
Series series_exp(const Series& w, int order) {
    Series e(static_cast<std::size_t>(order) + 1, 0.0);
    e[0] = 1.0;
    for (int n = 1; n <= order; ++n) {
        double acc = 0.0;
        for (int k = 1; k <= n; ++k) acc += k * w[k] * e[n - k];
        e[n] = acc / n;
    }
    return e;
}

double binomial_d(int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

} // namespace

HolonomyMap make_holonomy(double c, double a, double x_max) {
    if (!(a >= 1.0) || !std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "exponent a must be >= 1");
    if (!(x_max > 0.0) || !std::isfinite(x_max)) throw Error(ErrorCode::InvalidArgument, "x_max must be positive");
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw Error(ErrorCode::NotExpanding, "c must be positive for phi(x) > x");
    }
    HolonomyMap phi;
    phi.c_ = c;
    phi.a_ = a;
    phi.x_max_ = x_max;

    // Geometric grid x_max * 2^{-k/64}; x_min is the smallest grid point whose
    // gap is still resolved against the spacing of doubles.
    double x_min = x_max;
    for (int k = 0; k < 64 * 200; ++k) {
        double x = x_max * std::exp2(-k / 64.0);
        double ulp = std::nextafter(x, std::numeric_limits<double>::infinity()) - x;
        if (!(phi.gap(x) > 10.0 * ulp)) break;
        x_min = x;
    }
    if (!(x_min < x_max)) throw Error(ErrorCode::NotExpanding, "phi(x) - x unresolved on the whole window");
    phi.x_min_ = x_min;

    for (int k = 0; k <= 1000; ++k) {
        double x = x_min + (x_max - x_min) * k / 1000.0;
        if (!(phi.derivative(x) > 0.0) || !(phi(x) > x)) {
            throw Error(ErrorCode::NotExpanding, "phi is not an expanding diffeomorphism on the window");
        }
    }
    return phi;
}

double HolonomyMap::gap(double x) const {
    if (x <= 0.0) return 0.0;
    return c_ * std::exp(-std::pow(x, -a_));
}

double HolonomyMap::gap_derivative(double x) const {
    if (x <= 0.0) return 0.0;
    return gap(x) * a_ * std::pow(x, -a_ - 1.0);
}

double HolonomyMap::inverse(double y) const {
    if (y <= 0.0) return y;
    double lo = y - 2.0 * gap(y);
    double hi = y;
    if (lo < 0.0) lo = 0.0;
    double x = y - gap(y);
    for (int it = 0; it < 50; ++it) {
        double f = (*this)(x) - y;
        if (f == 0.0) return x;
        if (f > 0.0) hi = x; else lo = x;
        double next = x - f / derivative(x);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x) return next;
        x = next;
    }
    for (int it = 0; it < 200 && hi - lo > std::numeric_limits<double>::epsilon() * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if ((*this)(mid) > y) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

double HolonomyMap::iterate(double x, long n) const {
    for (; n > 0; --n) x = (*this)(x);
    for (; n < 0; ++n) x = inverse(x);
    return x;
}

std::vector<double> HolonomyMap::taylor(double x, int order) const {
    // -(x + h)^{-a} = -x^{-a} sum_k binom(-a, k) (h / x)^k
    Series w(static_cast<std::size_t>(order) + 1, 0.0);
    double coeff = 1.0;
    for (int k = 1; k <= order; ++k) {
        coeff *= (-a_ - (k - 1)) / k;
        w[k] = -std::pow(x, -a_) * coeff * std::pow(x, -k);
    }
    Series e = series_exp(w, order);
    double g0 = gap(x);
    Series out(static_cast<std::size_t>(order) + 1, 0.0);
    for (int k = 0; k <= order; ++k) out[k] = g0 * e[k];
    out[0] += x;
    if (order >= 1) out[1] += 1.0;
    return out;
}

double HolonomyMap::steps_lower_bound(double x, double y) const {
    if (!(x < y)) return 0.0;
    if (x <= 0.0) return std::numeric_limits<double>::infinity();
    // u = t^{-a}: integral = 1/(c a) * int_{u_y}^{u_x} e^u u^{-1-1/a} du.
    const double u_lo = std::pow(y, -a_);
    const double u_hi = std::pow(x, -a_);
    if (u_hi > 700.0) return std::numeric_limits<double>::infinity();
    const double power = -1.0 - 1.0 / a_;
    double h = 0.25;
    int cells = static_cast<int>(std::ceil((u_hi - u_lo) / h));
    if (cells > 4096) {
        cells = 4096;
    }
    if (cells < 1) cells = 1;
    h = (u_hi - u_lo) / cells;
    double sum = 0.0;
    for (int i = 0; i < cells; ++i) {
        double u = u_lo + i * h;
        sum += h * std::exp(u) * std::pow(u + h, power);
    }
    return sum / (c_ * a_);
}

TimeFunction build_time_function(const HolonomyMap& phi, double x0, int k_match) {
    if (k_match < 0 || k_match > 8) throw Error(ErrorCode::InvalidArgument, "k_match must lie in [0, 8]");
    if (!(x0 > phi.x_min()) || !(phi(x0) < phi.x_max())) {
        throw Error(ErrorCode::InvalidArgument, "x0 must satisfy x_min < x0 and phi(x0) < x_max");
    }
    TimeFunction s(phi);
    s.x0_ = x0;
    s.x1_ = phi(x0);
    s.k_match_ = k_match;
    const int K = k_match;
    const double L = s.x1_ - x0;

    // delta(h) = phi(x0 + h) - phi(x0); its powers drive the chain rule.
    Series taylor = phi.taylor(x0, K);
    Series delta = taylor;
    delta[0] = 0.0;
    std::vector<Series> powers{Series(static_cast<std::size_t>(K) + 1, 0.0)};
    powers[0][0] = 1.0;
    for (int j = 1; j <= K; ++j) powers.push_back(series_mul(powers.back(), delta, K));

    const double d1 = taylor.size() > 1 ? taylor[1] : phi.derivative(x0);
    Series left(static_cast<std::size_t>(K) + 1, 0.0);
    if (K >= 1) left[1] = std::sqrt(d1) / L;
    Series right(static_cast<std::size_t>(K) + 1, 0.0);
    right[0] = 1.0;
    // s(phi(x0 + h)) = s(x0 + h) + 1, matched order by order.
    for (int k = 1; k <= K; ++k) {
        double acc = left[k];
        for (int j = 1; j < k; ++j) acc -= right[j] * powers[j][k];
        right[k] = acc / std::pow(d1, k);
    }
    s.left_taylor_ = left;
    s.right_taylor_ = right;

    // Hermite interpolant of degree 2K+1 in t = (x - x0)/L.
    const int degree = 2 * K + 1;
    s.poly_.assign(static_cast<std::size_t>(degree) + 1, 0.0);
    for (int i = 0; i <= K; ++i) s.poly_[i] = left[i] * std::pow(L, i);
    Eigen::MatrixXd A(K + 1, K + 1);
    Eigen::VectorXd rhs(K + 1);
    for (int k = 0; k <= K; ++k) {
        double known = 0.0;
        for (int i = 0; i <= K; ++i) known += binomial_d(i, k) * s.poly_[i];
        rhs(k) = right[k] * std::pow(L, k) - known;
        for (int i = K + 1; i <= degree; ++i) A(k, i - K - 1) = binomial_d(i, k);
    }
    Eigen::VectorXd upper = A.fullPivLu().solve(rhs);
    for (int i = K + 1; i <= degree; ++i) s.poly_[i] = upper(i - K - 1);

    for (int k = 0; k <= 4000; ++k) {
        double x = x0 + L * k / 4000.0;
        if (!(s.fundamental_derivative(x, 1) > 0.0)) {
            throw Error(ErrorCode::MatchingFailure, "interpolant on the fundamental domain is not monotone");
        }
    }
    return s;
}

double TimeFunction::fundamental(double x) const {
    const double t = (x - x0_) / (x1_ - x0_);
    double acc = 0.0;
    for (std::size_t i = poly_.size(); i-- > 0;) acc = acc * t + poly_[i];
    return acc;
}

double TimeFunction::fundamental_derivative(double x, int order) const {
    const double L = x1_ - x0_;
    const double t = (x - x0_) / L;
    double acc = 0.0;
    for (std::size_t i = poly_.size(); i-- > static_cast<std::size_t>(order);) {
        double falling = 1.0;
        for (int j = 0; j < order; ++j) falling *= static_cast<double>(i - j);
        acc = acc * t + falling * poly_[i];
    }
    return acc / std::pow(L, order);
}

std::optional<double> TimeFunction::eval_above(double x, double floor) const {
    if (!(x > 0.0)) return std::nullopt;
    constexpr std::size_t kCacheLimit = 1u << 20;
    {
        std::lock_guard lock(cache_->mutex);
        auto it = cache_->entries.find(x);
        if (it != cache_->entries.end()) {
            const CacheEntry& e = it->second;
            if (e.exact) return e.value >= floor ? std::optional<double>(e.value) : std::nullopt;
            if (e.value <= floor) return std::nullopt;
        }
    }
    std::optional<double> v = compute_above(x, floor);
    std::lock_guard lock(cache_->mutex);
    if (cache_->entries.size() >= kCacheLimit) cache_->entries.clear();
    if (v) {
        cache_->entries[x] = CacheEntry{*v, true};
    } else {
        auto [it, fresh] = cache_->entries.try_emplace(x, CacheEntry{floor, false});
        if (!fresh && !it->second.exact) it->second.value = std::min(it->second.value, floor);
    }
    return v;
}

std::optional<double> TimeFunction::compute_above(double x, double floor) const {
    if (x >= x0_) {
        double y = x;
        long n = 0;
        while (y >= x1_) {
            y = phi_.inverse(y);
            if (++n > 10'000'000) throw Error(ErrorCode::WindowExceeded, "time function: x too large");
        }
        double value = fundamental(y) + static_cast<double>(n);
        if (value < floor) return std::nullopt;
        return value;
    }
    // s(x) <= 1 - (steps to reach x0) <= 1 - lower bound.
    if (1.0 - phi_.steps_lower_bound(x, x0_) < floor) return std::nullopt;
    double y = x;
    long n = 0;
    while (y < x0_) {
        y = phi_(y);
        ++n;
        if (-static_cast<double>(n) < floor) return std::nullopt;
    }
    double value = fundamental(y) - static_cast<double>(n);
    if (value < floor) return std::nullopt;
    return value;
}

double TimeFunction::operator()(double x) const {
    auto v = eval_above(x, kDefaultFloor);
    if (!v) throw Error(ErrorCode::WindowExceeded, "time function below the supported range at x");
    return *v;
}

double TimeFunction::unit_solve(double frac) const {
    // P is increasing on [0, 1] with P(0) = 0, P(1) = 1.
    double lo = 0.0, hi = 1.0, t = frac;
    const double L = x1_ - x0_;
    for (int it = 0; it < 60; ++it) {
        double f = fundamental(x0_ + L * t) - frac;
        if (f == 0.0) return t;
        if (f > 0.0) hi = t; else lo = t;
        double next = t - f / (fundamental_derivative(x0_ + L * t, 1) * L);
        if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) < 1e-17) return next;
        t = next;
    }
    return t;
}

double TimeFunction::inverse(double sigma) const {
    if (!std::isfinite(sigma)) throw Error(ErrorCode::WindowExceeded, "non-finite time value");
    if (sigma < kDefaultFloor || sigma > 1.0e7) {
        throw Error(ErrorCode::WindowExceeded, "time value outside the supported range");
    }
    {
        std::lock_guard lock(cache_->mutex);
        auto it = cache_->inverses.find(sigma);
        if (it != cache_->inverses.end()) return it->second;
    }
    double x = compute_inverse(sigma);
    std::lock_guard lock(cache_->mutex);
    if (cache_->inverses.size() >= (1u << 20)) cache_->inverses.clear();
    cache_->inverses.emplace(sigma, x);
    return x;
}

double TimeFunction::compute_inverse(double sigma) const {
    double n = std::floor(sigma);
    double frac = sigma - n;
    double y = x0_ + (x1_ - x0_) * unit_solve(frac);
    return phi_.iterate(y, static_cast<long>(n));
}

CentralizerElement CentralizerElement::identity(TimeFunctionPtr time) {
    return CentralizerElement(std::move(time), Kind::IntegerIterate, 0, 0.0);
}

CentralizerElement CentralizerElement::iterate(TimeFunctionPtr time, long n) {
    return CentralizerElement(std::move(time), Kind::IntegerIterate, n, 0.0);
}

CentralizerElement CentralizerElement::flow(TimeFunctionPtr time, double t) {
    if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "flow time must be finite");
    return CentralizerElement(std::move(time), Kind::Flow, 0, t);
}

CentralizerElement centralizer_flow(TimeFunctionPtr time, double t) {
    return CentralizerElement::flow(std::move(time), t);
}

double CentralizerElement::operator()(double x) const {
    if (!(x > 0.0)) return 0.0;
    const HolonomyMap& phi = time_->holonomy();
    if (kind_ == Kind::IntegerIterate) return phi.iterate(x, n_);
    if (t_ == 0.0) return x;
    auto s = time_->eval_above(x, kDeepZone);
    if (s) return time_->inverse(*s + t_);
    // Deep in the flat zone: eta_t = phi^n o eta_f with |f| < 1 and
    // eta_f(x) = x + f g + f (f - 1)/2 g g' up to O(g g'^2).
    double n = std::floor(t_);
    double f = t_ - n;
    double g = phi.gap(x);
    double y = x + f * g + 0.5 * f * (f - 1.0) * g * phi.gap_derivative(x);
    return phi.iterate(y, static_cast<long>(n));
}

CentralizerElement CentralizerElement::compose(const CentralizerElement& other) const {
    if (kind_ == Kind::IntegerIterate && other.kind_ == Kind::IntegerIterate) {
        return iterate(time_, n_ + other.n_);
    }
    return flow(time_, shift() + other.shift());
}

CentralizerElement CentralizerElement::inverse() const {
    if (kind_ == Kind::IntegerIterate) return iterate(time_, -n_);
    return flow(time_, -t_);
}

std::string CentralizerElement::describe() const {
    std::ostringstream os;
    if (kind_ == Kind::IntegerIterate) {
        os << "phi^" << n_;
    } else {
        os << "flow(" << t_ << ")";
    }
    return os.str();
}

} // namespace hopfreeb
