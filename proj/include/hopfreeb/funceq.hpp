#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hopfreeb/holonomy.hpp"
#include "hopfreeb/numeric.hpp"

namespace hopfreeb {

using CoeffFn = std::function<cplx(double)>;

/// Finite Fourier sum U(theta) = sum_k u_k exp(2 pi i k theta) on R/Z.
class PeriodicSeed {
public:
    using Term = std::pair<int, cplx>;

    PeriodicSeed() = default;
    explicit PeriodicSeed(std::vector<Term> terms);
    static PeriodicSeed constant(cplx value) { return PeriodicSeed({{0, value}}); }
    static PeriodicSeed zero() { return PeriodicSeed(); }

    cplx operator()(double theta) const;
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    /// sum of |u_k|, an upper bound for |U|.
    double bound() const;
    /// Real-valued iff u_{-k} = conj(u_k) for every k.
    bool is_real_valued() const;

    friend PeriodicSeed operator+(const PeriodicSeed& a, const PeriodicSeed& b);
    friend PeriodicSeed operator*(cplx s, const PeriodicSeed& a);

private:
    std::vector<Term> terms_; // sorted by frequency, no zero coefficients
};

/// Member of Z_{phi,nu}: beta(x) = U(s(x) mod 1) exp(s(x) log nu), beta(0) = 0.
class SolutionZ {
public:
    SolutionZ(TimeFunctionPtr time, cplx nu, PeriodicSeed seed);

    cplx operator()(double x) const { return eval(x, nullptr); }
    /// Value plus the time s(x) used (nullopt when the value underflowed).
    cplx eval(double x, std::optional<double>* time) const;

    cplx multiplier() const { return nu_; }
    cplx log_multiplier() const { return log_nu_; }
    const PeriodicSeed& seed() const { return seed_; }
    const TimeFunctionPtr& time() const { return time_; }
    /// Below this time value |beta| underflows double precision.
    double time_floor() const { return floor_; }

    CoeffFn as_function() const {
        return [self = *this](double x) { return self(x); };
    }

private:
    TimeFunctionPtr time_;
    cplx nu_;
    cplx log_nu_;
    PeriodicSeed seed_;
    double floor_;
};

/// Member of S_{phi,lambda}(c): beta1(phi) = lambda beta1 + c beta2, beta2 in Z_{phi,lambda}.
struct SolutionS {
    CoeffFn beta1;
    SolutionZ beta2;
    cplx lambda;
    cplx coupling;

    double residual(std::span<const double> grid) const;
};

/// Member of S_{phi,mu}(c): beta_{1,j}(phi) = mu^{p-j} beta_{1,j} + c_j beta2^{p-j}.
struct SolutionSIII {
    std::vector<CoeffFn> beta1;
    SolutionZ beta2;
    cplx mu;
    int p;
    std::vector<cplx> c;

    double residual(std::span<const double> grid) const;
};

SolutionZ base_solution(TimeFunctionPtr time, cplx lambda);
SolutionZ solve_I(TimeFunctionPtr time, cplx nu, PeriodicSeed seed);
SolutionS solve_II(TimeFunctionPtr time, cplx lambda, const SolutionZ& beta2,
                   std::optional<SolutionZ> gamma = std::nullopt);
SolutionS solve_IIc(TimeFunctionPtr time, cplx lambda, cplx c, const SolutionZ& beta2,
                    std::optional<SolutionZ> gamma = std::nullopt);
/// gammas, when given, must have one entry per j with multiplier mu^{p-j}.
SolutionSIII solve_III(TimeFunctionPtr time, cplx mu, int p, std::vector<cplx> c, const SolutionZ& beta2,
                       std::vector<std::optional<SolutionZ>> gammas = {});

/// The projection onto the beta2 component.
inline const SolutionZ& project_beta2(const SolutionS& s) { return s.beta2; }
inline const SolutionZ& project_beta2(const SolutionSIII& s) { return s.beta2; }

/// Uniform grid of n points on [x_min, x_max].
std::vector<double> window_grid(const HolonomyMap& phi, int n);

/// max over the grid of the scaled deviation of f(phi(x)) from nu f(x).
double residual_I(const CoeffFn& f, cplx nu, const HolonomyMap& phi, std::span<const double> grid);

struct FlatnessReport {
    int k_max = 0;
    std::vector<double> x;                  // x_n = phi^{-n}(x0)
    std::vector<double> abs_f;              // |f(x_n)|
    std::vector<std::vector<double>> ratio; // ratio[n][K-1] = |f(x_n)| / x_n^K
    std::vector<bool> flat_by_order;
    bool flat = false;
    bool truncated = false;

    std::string to_csv() const;
};

FlatnessReport flatness_report(const CoeffFn& f, const HolonomyMap& phi, double x0, int k_max, int steps);

struct ConstancyReport {
    bool is_constant = false;
    cplx limit;
    double invariance_residual = 0.0;
    double limit_spread = 0.0;
};

/// Checks a(phi(x)) = a(x) and whether the backward-orbit limits agree.
ConstancyReport constancy_report(const CoeffFn& a, const HolonomyMap& phi, double x0, int steps);

/// For a solution of nu a(phi(x)) = a(x), |nu| > 1, confirms a vanishes on
/// the window. Throws EquationViolated if a does not solve the equation.
bool forced_zero_check(const CoeffFn& a, cplx nu, const HolonomyMap& phi, double x0, int steps);

} // namespace hopfreeb
