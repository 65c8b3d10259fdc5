#include <random>

#include "doctest.h"
#include "support.hpp"

#include "hopfreeb/autgroup.hpp"
#include "hopfreeb/error.hpp"

using namespace hopfreeb;
using testing_support::default_phi;
using testing_support::default_time;
using testing_support::params;

namespace {

template <typename G>
ActionFn action_of(const G& g) {
    return [g](const Point2& z, double x) { return g(z, x); };
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

std::vector<HopfParams> reference_sets() {
    return {testing_support::case1(), testing_support::case2(), testing_support::case3(), testing_support::case4(),
            testing_support::case5()};
}

const ActionFn kIdentity = [](const Point2& z, double x) { return Sample{z, x}; };

} // namespace

TEST_CASE("kernel degree") {
    CHECK(kernel_degree(testing_support::case1()) == 0);
    CHECK(kernel_degree(testing_support::case2()) == 1);
    CHECK(kernel_degree(testing_support::case3()) == 2);
    CHECK(kernel_degree(params("-4", "2")) == 1);
    CHECK(kernel_degree(testing_support::case4()) == 0);
    CHECK(kernel_degree(testing_support::case5()) == 1);
    CHECK(kernel_multiplier(testing_support::case3(), 2) == cplx(1.25));
}

TEST_CASE("random kernel elements are equivariant and form a group") {
    TimeFunctionPtr tf = default_time();
    std::mt19937_64 rng(21);
    auto pts = sample_points(rng, default_phi(), 300);
    for (const HopfParams& ps : reference_sets()) {
        CAPTURE(classify_case(ps).to_string());
        auto g1 = random_kernel_element(ps, tf, rng, centralizer_flow(tf, 0.4));
        auto g2 = random_kernel_element(ps, tf, rng, centralizer_flow(tf, -0.7));
        auto g3 = random_kernel_element(ps, tf, rng, CentralizerElement::iterate(tf, 1));
        CHECK(verify_equivariance(g1, pts) < 1e-8);
        CHECK(verify_equivariance(g3, pts) < 1e-8);
        ActionFn direct = [g1, g2](const Point2& z, double x) {
            Sample s = g2(z, x);
            return g1(s.z, s.x);
        };
        KernelElement g12 = compose_kernel(g1, g2);
        CHECK(action_deviation(action_of(g12), direct, pts) < 1e-10);
        CHECK(verify_equivariance(g12, pts) < 1e-8);
        CHECK(action_deviation(action_of(compose_kernel(g12, g3)), action_of(compose_kernel(g1, compose_kernel(g2, g3))),
                               pts) < 1e-10);
        CHECK(action_deviation(action_of(compose_kernel(g1, invert_kernel(g1))), kIdentity, pts) < 1e-10);
        CHECK(action_deviation(action_of(compose_kernel(invert_kernel(g2), g2)), kIdentity, pts) < 1e-10);
        CHECK(action_deviation(action_of(kernel_identity(ps, tf)), kIdentity, pts) == 0.0);

        CentralizerElement zeta = centralizer_flow(tf, 0.3);
        KernelElement h = kernel_translation(ps, zeta);
        KernelElement conj = compose_kernel(invert_kernel(h), compose_kernel(g1, h));
        CHECK(action_deviation(action_of(conj), action_of(precompose_coefficients(g1, zeta)), pts) < 1e-9);
        CHECK(action_deviation(action_of(conjugate_by_centralizer(g1, zeta)), action_of(conj), pts) < 1e-9);
    }
}

TEST_CASE("full automorphisms") {
    TimeFunctionPtr tf = default_time();
    std::mt19937_64 rng(22);
    auto pts = sample_points(rng, default_phi(), 300);
    for (const HopfParams& ps : reference_sets()) {
        CaseTag tag = classify_case(ps);
        CAPTURE(tag.to_string());
        BoundaryAut f = random_boundary_aut(tag, rng);
        FullAutomorphism g = make_full_automorphism(f, random_kernel_element(ps, tf, rng, centralizer_flow(tf, 1.3)));
        CHECK(verify_equivariance(g, pts) < 1e-8);
        CHECK(restrict_to_boundary(g) == f);
        for (const Sample& s : pts) {
            Sample at0 = g(s.z, 0.0);
            CHECK(at0.x == 0.0);
            CHECK(scaled_deviation(at0.z, f(s.z)) < 1e-15);
            break;
        }
        FullAutomorphism ext = extend_boundary(f, ps, tf);
        CHECK(verify_equivariance(ext, pts) < 1e-12);

        FullAutomorphism deck = deck_transformation(ps, tf);
        CHECK(verify_equivariance(deck, pts) < 1e-12);
        const HolonomyMap& phi = default_phi();
        double worst = 0.0;
        for (const Sample& s : pts) {
            Sample t = deck(s.z, s.x);
            worst = std::max({worst, scaled_deviation(t.z, apply_G(ps, s.z)), scaled_deviation(t.x, phi(s.x))});
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("user coordinates for tau != 1") {
    TimeFunctionPtr tf = default_time();
    std::mt19937_64 rng(23);
    auto pts = sample_points(rng, default_phi(), 300);
    for (const HopfParams& ps : {params("8", "2", "3", 3), params("2", "2", "0/1", 1), params("2", "2", "5", 1)}) {
        auto g = random_kernel_element(ps, tf, rng, centralizer_flow(tf, 0.2));
        CHECK(verify_equivariance(g, pts) < 1e-8);
    }
}

TEST_CASE("corrupted elements are rejected") {
    TimeFunctionPtr tf = default_time();
    std::mt19937_64 rng(24);
    auto pts = sample_points(rng, default_phi(), 300);
    HopfParams c3 = testing_support::case3();
    std::vector<SolutionZ> beta1;
    for (int j = 0; j <= 2; ++j) beta1.push_back(solve_I(tf, kernel_multiplier(c3, j), random_seed(rng)));
    SolutionZ beta2 = solve_I(tf, 2.0, random_seed(rng));
    auto eta = centralizer_flow(tf, 0.5);
    CHECK_NOTHROW(make_kernel_element(c3, beta1, beta2, eta));

    // wrong multiplier in one slot
    std::vector<SolutionZ> wrong = beta1;
    wrong[1] = solve_I(tf, 3.0, random_seed(rng));
    CHECK(code_of([&] { make_kernel_element(c3, wrong, beta2, eta); }) == ErrorCode::WrongSolutionSpace);
    CHECK(code_of([&] { make_kernel_element(c3, beta1, solve_I(tf, 5.0, random_seed(rng)), eta); }) ==
          ErrorCode::WrongSolutionSpace);

    // coefficient that is not a solution at all
    KernelEval bad = [beta1, beta2](double x) {
        KernelCoeffs c;
        for (const auto& b : beta1) c.beta1.push_back(b(x));
        c.beta1[0] += 0.1 * x;
        c.beta2 = beta2(x);
        return c;
    };
    KernelElement corrupted = assemble_kernel_element(c3, 2, bad, eta);
    CHECK(verify_equivariance(corrupted, pts) > 1e-3);

    // eta outside the centralizer of phi
    TimeFunctionPtr other =
        std::make_shared<const TimeFunction>(build_time_function(make_holonomy(2.0, 1.0, 1.0), 0.5, 3));
    CHECK(code_of([&] { make_kernel_element(c3, beta1, beta2, centralizer_flow(other, 0.5)); }) ==
          ErrorCode::InvalidArgument);

    // cases must match
    HopfParams c4 = testing_support::case4();
    SolutionZ b4 = solve_I(tf, 2.0, random_seed(rng));
    CHECK(code_of([&] { make_kernel_element(c3, solve_II(tf, 2.0, b4), eta); }) == ErrorCode::CaseMismatch);
    CHECK(code_of([&] {
              compose_kernel(random_kernel_element(c3, tf, rng, eta), random_kernel_element(c4, tf, rng, eta));
          }) == ErrorCode::CaseMismatch);
    CHECK(code_of([&] {
              make_full_automorphism(identity_boundary(classify_case(c4)), random_kernel_element(c3, tf, rng, eta));
          }) == ErrorCode::CaseMismatch);
}

TEST_CASE("diagonal elements in dimension n") {
    TimeFunctionPtr tf = default_time();
    std::mt19937_64 rng(25);
    const cplx lambda(2.0, 1.0);
    for (int n : {1, 2, 4}) {
        CAPTURE(n);
        auto pts = sample_points_n(rng, default_phi(), n, 300);
        auto make = [&](double t) {
            std::vector<SolutionZ> betas;
            for (int i = 0; i < n; ++i) betas.push_back(solve_I(tf, lambda, random_seed(rng)));
            return make_diagonal_n(n, lambda, betas, centralizer_flow(tf, t));
        };
        DiagonalElementN g1 = make(0.6), g2 = make(-0.2), g3 = make(1.0);
        CHECK(g1.dimension() == n);
        CHECK(verify_equivariance(g1, pts) < 1e-8);
        DiagonalElementN g12 = compose_diagonal(g1, g2);
        CHECK(composition_deviation(g12, g1, g2, pts) < 1e-10);
        CHECK(verify_equivariance(g12, pts) < 1e-8);
        CHECK(identity_deviation(compose_diagonal(g1, invert_diagonal(g1)), pts) < 1e-10);
        DiagonalElementN l = compose_diagonal(g12, g3), r = compose_diagonal(g1, compose_diagonal(g2, g3));
        double assoc = 0.0;
        for (const auto& s : pts) assoc = std::max(assoc, scaled_deviation(l(s.z, s.x).first, r(s.z, s.x).first));
        CHECK(assoc < 1e-10);
        // composition law beta(x) = beta_1(eta_2(x)) + beta_2(x)
        for (double x : {0.1, 0.4, 0.8}) {
            for (int i = 0; i < n; ++i) {
                cplx want = g1.betas()[i](g2.eta()(x)) + g2.betas()[i](x);
                CHECK(std::abs(g12.betas()[i](x) - want) < 1e-12 * std::max(1.0, std::abs(want)));
            }
        }
    }
    CHECK(code_of([&] { make_diagonal_n(0, lambda, {}, centralizer_flow(tf, 0.0)); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([&] { make_diagonal_n(2, lambda, {solve_I(tf, lambda, PeriodicSeed::zero())}, centralizer_flow(tf, 0.0)); }) ==
          ErrorCode::DimensionMismatch);
    CHECK(code_of([&] { make_diagonal_n(1, lambda, {solve_I(tf, 3.0, PeriodicSeed::zero())}, centralizer_flow(tf, 0.0)); }) ==
          ErrorCode::WrongSolutionSpace);
    CHECK(code_of([&] { assemble_diagonal_n(0.5, {[](double) { return cplx(0.0); }}, centralizer_flow(tf, 0.0)); }) ==
          ErrorCode::ModulusOrder);
}
