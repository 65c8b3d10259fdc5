#include "hopfreeb/funceq.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "hopfreeb/error.hpp"

namespace hopfreeb {

PeriodicSeed::PeriodicSeed(std::vector<Term> terms) {
    std::map<int, cplx> merged;
    for (const auto& [k, u] : terms) merged[k] += u;
    for (const auto& [k, u] : merged) {
        if (u != 0.0) terms_.emplace_back(k, u);
    }
}

cplx PeriodicSeed::operator()(double theta) const {
    cplx acc = 0.0;
    for (const auto& [k, u] : terms_) acc += u * std::polar(1.0, 2.0 * kPi * k * theta);
    return acc;
}

double PeriodicSeed::bound() const {
    double acc = 0.0;
    for (const auto& term : terms_) acc += std::abs(term.second);
    return acc;
}

bool PeriodicSeed::is_real_valued() const {
    for (const auto& [k, u] : terms_) {
        auto it = std::find_if(terms_.begin(), terms_.end(), [k = k](const Term& t) { return t.first == -k; });
        if (it == terms_.end() || std::abs(it->second - std::conj(u)) > 1e-15 * (1.0 + std::abs(u))) return false;
    }
    return true;
}

PeriodicSeed operator+(const PeriodicSeed& a, const PeriodicSeed& b) {
    std::vector<PeriodicSeed::Term> all = a.terms_;
    all.insert(all.end(), b.terms_.begin(), b.terms_.end());
    return PeriodicSeed(std::move(all));
}

PeriodicSeed operator*(cplx s, const PeriodicSeed& a) {
    std::vector<PeriodicSeed::Term> out;
    for (const auto& [k, u] : a.terms_) out.emplace_back(k, s * u);
    return PeriodicSeed(std::move(out));
}

SolutionZ::SolutionZ(TimeFunctionPtr time, cplx nu, PeriodicSeed seed)
    : time_(std::move(time)), nu_(nu), log_nu_(std::log(nu)), seed_(std::move(seed)) {
    if (!(std::abs(nu) > 1.0)) throw Error(ErrorCode::InvalidArgument, "Equation I needs |nu| > 1");
    if (!time_) throw Error(ErrorCode::InvalidArgument, "missing time function");
    floor_ = -(800.0 + std::log(std::max(1.0, seed_.bound()))) / std::log(std::abs(nu));
}

cplx SolutionZ::eval(double x, std::optional<double>* time) const {
    if (time) time->reset();
    if (seed_.is_zero() || !(x > 0.0)) return 0.0;
    auto s = time_->eval_above(x, floor_);
    if (!s) return 0.0;
    if (time) *time = s;
    double theta = *s - std::floor(*s);
    return seed_(theta) * std::exp(*s * log_nu_);
}

double SolutionS::residual(std::span<const double> grid) const {
    const HolonomyMap& phi = beta2.time()->holonomy();
    double worst = 0.0;
    for (double x : grid) {
        double y = phi(x);
        cplx b2 = beta2(x);
        worst = std::max(worst, scaled_deviation(beta2(y), lambda * b2));
        worst = std::max(worst, scaled_deviation(beta1(y), lambda * beta1(x) + coupling * b2));
    }
    return worst;
}

double SolutionSIII::residual(std::span<const double> grid) const {
    const HolonomyMap& phi = beta2.time()->holonomy();
    double worst = 0.0;
    for (double x : grid) {
        double y = phi(x);
        cplx b2 = beta2(x);
        worst = std::max(worst, scaled_deviation(beta2(y), mu * b2));
        for (int j = 0; j < p; ++j) {
            cplx expected = std::pow(mu, p - j) * beta1[j](x) + c[j] * std::pow(b2, p - j);
            worst = std::max(worst, scaled_deviation(beta1[j](y), expected));
        }
    }
    return worst;
}

SolutionZ base_solution(TimeFunctionPtr time, cplx lambda) {
    return SolutionZ(std::move(time), lambda, PeriodicSeed::constant(1.0));
}

SolutionZ solve_I(TimeFunctionPtr time, cplx nu, PeriodicSeed seed) {
    return SolutionZ(std::move(time), nu, std::move(seed));
}

namespace {

void require_multiplier(const SolutionZ& z, cplx nu, const char* what) {
    if (std::abs(z.multiplier() - nu) > 1e-12 * std::abs(nu)) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " has the wrong multiplier");
    }
}

} // namespace

SolutionS solve_IIc(TimeFunctionPtr time, cplx lambda, cplx c, const SolutionZ& beta2, std::optional<SolutionZ> gamma) {
    if (c == 0.0) {
        throw Error(ErrorCode::ZeroCoupling, "c = 0 decouples Equation IIc into two copies of Equation I");
    }
    require_multiplier(beta2, lambda, "beta2");
    if (gamma) require_multiplier(*gamma, lambda, "gamma");
    (void)time;
    // (beta1, c beta2) solves Equation II; beta1 = s c beta2 / lambda + gamma.
    CoeffFn beta1 = [beta2, gamma, lambda, c](double x) {
        std::optional<double> s;
        cplx b2 = beta2.eval(x, &s);
        cplx v = s ? (*s) * c * b2 / lambda : cplx(0.0);
        if (gamma) v += (*gamma)(x);
        return v;
    };
    return SolutionS{std::move(beta1), beta2, lambda, c};
}

SolutionS solve_II(TimeFunctionPtr time, cplx lambda, const SolutionZ& beta2, std::optional<SolutionZ> gamma) {
    return solve_IIc(std::move(time), lambda, 1.0, beta2, std::move(gamma));
}

SolutionSIII solve_III(TimeFunctionPtr time, cplx mu, int p, std::vector<cplx> c, const SolutionZ& beta2,
                       std::vector<std::optional<SolutionZ>> gammas) {
    (void)time;
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "p must be positive");
    if (static_cast<int>(c.size()) != p) throw Error(ErrorCode::InvalidArgument, "need p coupling constants");
    for (cplx cj : c) {
        if (cj == 0.0) throw Error(ErrorCode::ZeroCoupling, "all coupling constants must be nonzero");
    }
    require_multiplier(beta2, mu, "beta2");
    if (gammas.empty()) gammas.resize(static_cast<std::size_t>(p));
    if (static_cast<int>(gammas.size()) != p) throw Error(ErrorCode::InvalidArgument, "need one gamma per j");
    std::vector<CoeffFn> beta1;
    for (int j = 0; j < p; ++j) {
        const cplx power = std::pow(mu, p - j);
        if (gammas[j]) require_multiplier(*gammas[j], power, "gamma_j");
        beta1.push_back([beta2, gamma = gammas[j], cj = c[j], power, e = p - j](double x) {
            std::optional<double> s;
            cplx b2 = beta2.eval(x, &s);
            cplx v = s ? (*s) * cj * std::pow(b2, e) / power : cplx(0.0);
            if (gamma) v += (*gamma)(x);
            return v;
        });
    }
    return SolutionSIII{std::move(beta1), beta2, mu, p, std::move(c)};
}

std::vector<double> window_grid(const HolonomyMap& phi, int n) {
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        grid.push_back(phi.x_min() + (phi.x_max() - phi.x_min()) * (n == 1 ? 0.0 : double(i) / (n - 1)));
    }
    return grid;
}

double residual_I(const CoeffFn& f, cplx nu, const HolonomyMap& phi, std::span<const double> grid) {
    double worst = 0.0;
    for (double x : grid) worst = std::max(worst, scaled_deviation(f(phi(x)), nu * f(x)));
    return worst;
}

FlatnessReport flatness_report(const CoeffFn& f, const HolonomyMap& phi, double x0, int k_max, int steps) {
    FlatnessReport rep;
    rep.k_max = k_max;
    double x = x0;
    for (int n = 0; n <= steps; ++n) {
        if (n > 0) x = phi.inverse(x);
        if (x < phi.x_min()) {
            rep.truncated = true;
            break;
        }
        double v = std::abs(f(x));
        rep.x.push_back(x);
        rep.abs_f.push_back(v);
        std::vector<double> row;
        for (int k = 1; k <= k_max; ++k) row.push_back(v / std::pow(x, k));
        rep.ratio.push_back(std::move(row));
    }
    rep.flat = !rep.ratio.empty();
    const std::size_t count = rep.ratio.size();
    for (int k = 0; k < k_max; ++k) {
        double peak = 0.0;
        for (const auto& row : rep.ratio) peak = std::max(peak, row[k]);
        bool ok = true;
        if (peak > 0.0) {
            for (std::size_t n = count / 2; n + 1 < count; ++n) {
                if (rep.ratio[n + 1][k] > rep.ratio[n][k]) ok = false;
            }
            if (!(rep.ratio.back()[k] < 1e-3 * peak)) ok = false;
        }
        rep.flat_by_order.push_back(ok);
        rep.flat = rep.flat && ok;
    }
    return rep;
}

std::string FlatnessReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "n,x_n,abs_f";
    for (int k = 1; k <= k_max; ++k) os << ",ratio_K" << k;
    os << '\n';
    for (std::size_t n = 0; n < x.size(); ++n) {
        os << n << ',' << x[n] << ',' << abs_f[n];
        for (double r : ratio[n]) os << ',' << r;
        os << '\n';
    }
    return os.str();
}

ConstancyReport constancy_report(const CoeffFn& a, const HolonomyMap& phi, double x0, int steps) {
    ConstancyReport rep;
    for (double x : window_grid(phi, 400)) {
        rep.invariance_residual = std::max(rep.invariance_residual, scaled_deviation(a(phi(x)), a(x)));
    }
    const double x1 = phi(x0);
    std::vector<cplx> limits;
    for (int k = 0; k < 8; ++k) {
        double start = x0 + (x1 - x0) * k / 8.0;
        limits.push_back(a(phi.iterate(start, -steps)));
    }
    rep.limit = limits.front();
    for (cplx l : limits) rep.limit_spread = std::max(rep.limit_spread, scaled_deviation(l, rep.limit));
    double off = 0.0;
    for (double x : window_grid(phi, 400)) off = std::max(off, scaled_deviation(a(x), rep.limit));
    rep.is_constant = rep.invariance_residual < 1e-9 && rep.limit_spread < 1e-9 && off < 1e-9;
    return rep;
}

bool forced_zero_check(const CoeffFn& a, cplx nu, const HolonomyMap& phi, double x0, int steps) {
    if (!(std::abs(nu) > 1.0)) throw Error(ErrorCode::InvalidArgument, "need |nu| > 1");
    const auto grid = window_grid(phi, 400);
    double residual = 0.0;
    double sup = 0.0;
    for (double x : grid) {
        residual = std::max(residual, scaled_deviation(nu * a(phi(x)), a(x)));
        sup = std::max(sup, std::abs(a(x)));
    }
    if (!(residual < 1e-9)) throw Error(ErrorCode::EquationViolated, "a does not satisfy nu a(phi(x)) = a(x)");
    // |a(x)| = |nu|^{-n} |a(phi^{-n}(x))| along the backward orbit.
    double orbit_bound = 0.0;
    const double x1 = phi(x0);
    for (int k = 0; k < 8; ++k) {
        double start = x0 + (x1 - x0) * k / 8.0;
        double y = phi.iterate(start, -steps);
        orbit_bound = std::max(orbit_bound, std::pow(std::abs(nu), -steps) * std::abs(a(y)));
    }
    return sup < 1e-9 && orbit_bound < 1e-9;
}

} // namespace hopfreeb
