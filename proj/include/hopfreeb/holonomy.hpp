#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace hopfreeb {

/// Expanding half-line diffeomorphism phi(x) = x + c exp(-1/x^a), flat at 0.
class HolonomyMap {
public:
    static constexpr const char* kFamily = "exp-flat";

    double c() const { return c_; }
    double a() const { return a_; }
    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }

    double operator()(double x) const { return x + gap(x); }
    /// phi(x) - x.
    double gap(double x) const;
    double gap_derivative(double x) const;
    double derivative(double x) const { return 1.0 + gap_derivative(x); }

    /// phi^{-1}(y) by safeguarded Newton on the bracket [y - 2 gap(y), y].
    double inverse(double y) const;
    /// phi^n for any integer n.
    double iterate(double x, long n) const;

    /// Taylor coefficients of phi at x, orders 0..order.
    std::vector<double> taylor(double x, int order) const;

    /// Rigorous lower bound (up to rounding) of the integral of 1/gap over
    /// [x, y]; the forward orbit of x needs at least that many steps to reach y.
    double steps_lower_bound(double x, double y) const;

    friend HolonomyMap make_holonomy(double c, double a, double x_max);

private:
    HolonomyMap() = default;
    double c_ = 1.0;
    double a_ = 1.0;
    double x_min_ = 0.0;
    double x_max_ = 1.0;
};

HolonomyMap make_holonomy(double c, double a, double x_max);

/// Abel function s with s(phi(x)) = s(x) + 1, built from a Hermite
/// interpolant on the fundamental domain [x0, phi(x0)] and extended by the
/// functional equation.
class TimeFunction {
public:
    const HolonomyMap& holonomy() const { return phi_; }
    double x0() const { return x0_; }
    double x1() const { return x1_; }
    int k_match() const { return k_match_; }

    /// s(x); throws WindowExceeded when s(x) < floor cannot be excluded
    /// cheaply (deep inside the flat zone).
    double operator()(double x) const;
    /// s(x) if s(x) >= floor, nullopt when s(x) < floor is certified.
    std::optional<double> eval_above(double x, double floor) const;
    /// s^{-1}(sigma).
    double inverse(double sigma) const;

    /// The interpolating polynomial of the fundamental domain, evaluated at any
    /// x (used for derivative-matching diagnostics), and its derivatives.
    double fundamental(double x) const;
    double fundamental_derivative(double x, int order) const;

    /// Taylor coefficients of the interpolant at x0 and at phi(x0).
    const std::vector<double>& left_taylor() const { return left_taylor_; }
    const std::vector<double>& right_taylor() const { return right_taylor_; }

    static constexpr double kDefaultFloor = -1.0e5;

    friend TimeFunction build_time_function(const HolonomyMap& phi, double x0, int k_match);

private:
    explicit TimeFunction(const HolonomyMap& phi) : phi_(phi), cache_(std::make_shared<Cache>()) {}
    double unit_solve(double frac) const;
    std::optional<double> compute_above(double x, double floor) const;
    double compute_inverse(double sigma) const;

    // Memo of evaluated points: the exact value, or a certified upper bound.
    struct CacheEntry {
        double value;
        bool exact;
    };
    struct Cache {
        std::mutex mutex;
        std::unordered_map<double, CacheEntry> entries;
        std::unordered_map<double, double> inverses;
    };

    HolonomyMap phi_;
    double x0_ = 0.5;
    double x1_ = 0.0;
    int k_match_ = 3;
    std::vector<double> poly_; // coefficients in t = (x - x0) / (x1 - x0)
    std::vector<double> left_taylor_, right_taylor_;
    std::shared_ptr<Cache> cache_;
};

TimeFunction build_time_function(const HolonomyMap& phi, double x0, int k_match = 3);

using TimeFunctionPtr = std::shared_ptr<const TimeFunction>;

/// Element of the centralizer of phi: an integer iterate phi^n or a flow
/// time-t map s^{-1}(s(x) + t).
class CentralizerElement {
public:
    enum class Kind { IntegerIterate, Flow };

    static CentralizerElement identity(TimeFunctionPtr time);
    static CentralizerElement iterate(TimeFunctionPtr time, long n);
    static CentralizerElement flow(TimeFunctionPtr time, double t);

    Kind kind() const { return kind_; }
    /// n for integer iterates, t for flows.
    double shift() const { return kind_ == Kind::IntegerIterate ? static_cast<double>(n_) : t_; }
    bool is_identity() const { return shift() == 0.0; }
    const TimeFunctionPtr& time() const { return time_; }

    double operator()(double x) const;

    /// this o other.
    CentralizerElement compose(const CentralizerElement& other) const;
    CentralizerElement inverse() const;

    std::string describe() const;

    /// Below this time value flows use the small-gap expansion instead of
    /// transport through the fundamental domain.
    static constexpr double kDeepZone = -2000.0;

private:
    CentralizerElement(TimeFunctionPtr time, Kind kind, long n, double t)
        : time_(std::move(time)), kind_(kind), n_(n), t_(t) {}

    TimeFunctionPtr time_;
    Kind kind_ = Kind::IntegerIterate;
    long n_ = 0;
    double t_ = 0.0;
};

CentralizerElement centralizer_flow(TimeFunctionPtr time, double t);

} // namespace hopfreeb
