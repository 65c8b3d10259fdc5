#include <cmath>

#include "doctest.h"
#include "support.hpp"

#include "hopfreeb/error.hpp"
#include "hopfreeb/funceq.hpp"

using namespace hopfreeb;
using testing_support::default_phi;
using testing_support::default_time;

namespace {

PeriodicSeed sample_seed() {
    return PeriodicSeed({{0, cplx(1.0, 0.5)}, {1, cplx(0.3, -0.2)}, {-2, cplx(0.0, 0.4)}});
}

} // namespace

TEST_CASE("periodic seeds") {
    PeriodicSeed u = sample_seed();
    CHECK(std::abs(u(0.25) - u(1.25)) < 1e-15);
    CHECK(u.bound() == doctest::Approx(std::abs(cplx(1.0, 0.5)) + std::abs(cplx(0.3, -0.2)) + 0.4));
    CHECK(PeriodicSeed({{1, 0.0}}).is_zero());
    CHECK(PeriodicSeed({{1, cplx(1, 2)}, {-1, cplx(1, -2)}, {0, 3.0}}).is_real_valued());
    CHECK_FALSE(u.is_real_valued());
    PeriodicSeed v = u + (-1.0) * u;
    CHECK(v.is_zero());
}

TEST_CASE("Equation I solutions") {
    TimeFunctionPtr tf = default_time();
    const HolonomyMap& phi = default_phi();
    auto grid = window_grid(phi, 1000);
    REQUIRE(grid.size() == 1000);
    for (cplx nu : {cplx(2.0), cplx(2.0, 1.0), cplx(5.0), cplx(-3.0)}) {
        CAPTURE(nu);
        SolutionZ z = solve_I(tf, nu, sample_seed());
        CHECK(residual_I(z.as_function(), nu, phi, grid) < 1e-9);
        CHECK(z(0.0) == cplx(0.0));
        CHECK(z(-1.0) == cplx(0.0));
    }
    CHECK_THROWS_AS(solve_I(tf, cplx(0.5), sample_seed()), Error);
    CHECK_THROWS_AS(solve_I(tf, cplx(0.0, 1.0), sample_seed()), Error);
    SolutionZ zero = solve_I(tf, 2.0, PeriodicSeed::zero());
    CHECK(zero(0.5) == cplx(0.0));
}

TEST_CASE("base solution halves along the backward orbit") {
    TimeFunctionPtr tf = default_time();
    const HolonomyMap& phi = default_phi();
    SolutionZ b = base_solution(tf, 2.0);
    double x = 0.5;
    for (int n = 0; n <= 12; ++n) {
        CAPTURE(n);
        CHECK(std::abs(b(x) - std::ldexp(1.0, -n)) < 1e-12);
        x = phi.inverse(x);
    }
}

TEST_CASE("Equation II and IIc solutions") {
    TimeFunctionPtr tf = default_time();
    const HolonomyMap& phi = default_phi();
    auto grid = window_grid(phi, 1000);
    for (cplx lambda : {cplx(2.0), cplx(2.0, 1.0), cplx(5.0)}) {
        CAPTURE(lambda);
        SolutionZ b2 = solve_I(tf, lambda, sample_seed());
        SolutionZ g = solve_I(tf, lambda, PeriodicSeed({{1, 0.7}}));
        CHECK(solve_II(tf, lambda, b2).residual(grid) < 1e-9);
        CHECK(solve_II(tf, lambda, b2, g).residual(grid) < 1e-9);
        SolutionS s = solve_IIc(tf, lambda, cplx(0.5, -1.5), b2, g);
        CHECK(s.residual(grid) < 1e-9);
        // beta1 alone is not a solution of Equation I
        CHECK(residual_I(s.beta1, lambda, phi, grid) > 1e-6);
        CHECK(&project_beta2(s) == &s.beta2);
    }
    SolutionZ b2 = solve_I(tf, 2.0, sample_seed());
    CHECK_THROWS_AS(solve_IIc(tf, 2.0, 0.0, b2), Error);
    try {
        solve_IIc(tf, 2.0, 0.0, b2);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroCoupling);
    }
    CHECK_THROWS_AS(solve_II(tf, 3.0, b2), Error);
}

TEST_CASE("Equation III solutions") {
    TimeFunctionPtr tf = default_time();
    const HolonomyMap& phi = default_phi();
    auto grid = window_grid(phi, 1000);
    cplx mu = 2.0;
    for (int p : {2, 3}) {
        CAPTURE(p);
        SolutionZ b2 = solve_I(tf, mu, sample_seed());
        std::vector<cplx> c;
        std::vector<std::optional<SolutionZ>> gammas;
        for (int j = 0; j < p; ++j) {
            c.push_back(cplx(1.0 + j, 0.5));
            gammas.emplace_back(solve_I(tf, std::pow(mu, p - j), PeriodicSeed({{j - 1, 0.25}})));
        }
        CHECK(solve_III(tf, mu, p, c, b2).residual(grid) < 1e-9);
        CHECK(solve_III(tf, mu, p, c, b2, gammas).residual(grid) < 1e-9);
        c[0] = 0.0;
        CHECK_THROWS_AS(solve_III(tf, mu, p, c, b2), Error);
    }
    SolutionZ b2 = solve_I(tf, mu, sample_seed());
    CHECK_THROWS_AS(solve_III(tf, mu, 2, {1.0}, b2), Error);
}

TEST_CASE("solutions are flat at zero") {
    TimeFunctionPtr tf = default_time();
    const HolonomyMap& phi = default_phi();
    for (cplx nu : {cplx(2.0), cplx(2.0, 1.0), cplx(5.0)}) {
        SolutionZ z = solve_I(tf, nu, sample_seed());
        FlatnessReport rep = flatness_report(z.as_function(), phi, 0.5, 6, 100);
        CHECK(rep.flat);
        CHECK(rep.flat_by_order.size() == 6);
        CHECK(rep.x.size() == rep.abs_f.size());
    }
    SolutionS s = solve_II(tf, 2.0, solve_I(tf, 2.0, sample_seed()));
    CHECK(flatness_report(s.beta1, phi, 0.5, 6, 100).flat);

    CoeffFn cube = [](double x) { return cplx(x * x * x); };
    FlatnessReport bad = flatness_report(cube, phi, 0.5, 6, 100);
    CHECK_FALSE(bad.flat);
    CHECK_FALSE(bad.flat_by_order[0]);
    CHECK_FALSE(bad.flat_by_order[3]);
    std::string csv = bad.to_csv();
    CHECK(csv.rfind("n,x_n,abs_f,ratio_K1", 0) == 0);

    CoeffFn zero = [](double) { return cplx(0.0); };
    CHECK(flatness_report(zero, phi, 0.5, 6, 100).flat);
}

TEST_CASE("phi-invariant coefficients are constant") {
    TimeFunctionPtr tf = default_time();
    const HolonomyMap& phi = default_phi();
    CoeffFn c3 = [](double) { return cplx(3.0); };
    ConstancyReport r = constancy_report(c3, phi, 0.5, 100);
    CHECK(r.is_constant);
    CHECK(r.limit == cplx(3.0));

    // invariant but oscillating: no limit at 0, hence not continuous
    CoeffFn osc = [tf](double x) {
        auto s = tf->eval_above(x, -1e4);
        return cplx(s ? std::cos(2.0 * kPi * *s) : 0.0);
    };
    ConstancyReport o = constancy_report(osc, phi, 0.5, 100);
    CHECK(o.limit_spread > 0.1);
    CHECK_FALSE(o.is_constant);
}

TEST_CASE("forced-zero check") {
    TimeFunctionPtr tf = default_time();
    const HolonomyMap& phi = default_phi();
    CoeffFn zero = [](double) { return cplx(0.0); };
    CHECK(forced_zero_check(zero, 2.0, phi, 0.5, 100));
    CoeffFn id = [](double x) { return cplx(x); };
    CHECK_THROWS_AS(forced_zero_check(id, 2.0, phi, 0.5, 100), Error);
    CHECK_THROWS_AS(forced_zero_check(zero, 0.5, phi, 0.5, 100), Error);
}
