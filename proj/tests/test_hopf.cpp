#include <random>

#include "doctest.h"
#include "support.hpp"

#include "hopfreeb/error.hpp"
#include "hopfreeb/hopf.hpp"

using namespace hopfreeb;
using testing_support::cr;
using testing_support::params;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

std::vector<Point2> random_points(std::mt19937_64& rng, int n) {
    std::vector<Point2> pts;
    for (int i = 0; i < n; ++i) pts.push_back(sample_point2(rng));
    return pts;
}

BoundaryAut random_aut(const CaseTag& tag, std::mt19937_64& rng) {
    auto c = [&rng] { return sample_complex(rng, 0.5, 2.0); };
    switch (tag.kind) {
    case CaseKind::Case1: return make_boundary_aut(tag, c() + 3.0, c(), c(), c() + 3.0);
    case CaseKind::Case2: return make_boundary_aut(tag, c(), c(), 0.0, c());
    case CaseKind::Case3: return make_boundary_aut(tag, c(), 0.0, 0.0, c());
    default: return make_boundary_aut(tag, c(), c());
    }
}

const std::vector<HopfParams>& reference_sets() {
    static const std::vector<HopfParams> sets{testing_support::case1(), testing_support::case2(),
                                              testing_support::case3(), testing_support::case4(),
                                              testing_support::case5()};
    return sets;
}

} // namespace

TEST_CASE("complex rationals are exact") {
    ComplexRational a = cr("1/2", "3/4");
    CHECK(a.to_string() == "1/2+3/4i");
    CHECK((a * a.conj()).is_real());
    CHECK(a.norm2() == mpq_class(13, 16));
    CHECK(cr("2").pow(-3).to_string() == "1/8");
    CHECK(cr("0", "1").pow(2) == cr("-1"));
    CHECK(cr("2", "1").to_string() == "2+i");
    CHECK(cr("0", "-3/4").to_string() == "-3/4i");
    CHECK(cr("6/4").re_string() == "3/2");
    CHECK((cr("1/3") + cr("2/3")) == ComplexRational(1));
    CHECK(binomial(5, 2) == 10);
    CHECK(code_of([] { cr("1/0"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { cr("abc"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { ComplexRational(0).pow(-1); }) != ErrorCode::Internal);
}

TEST_CASE("validate_params examples") {
    CHECK_NOTHROW(params("2", "2"));
    CHECK(code_of([] { params("3", "2", "1", 1); }) == ErrorCode::ResonanceConstraint);
    CHECK_NOTHROW(params("4", "2", "1", 2));
    CHECK(code_of([] { params("2", "3"); }) == ErrorCode::ModulusOrder);
    CHECK(code_of([] { params("2", "1"); }) == ErrorCode::ModulusOrder);
    CHECK(code_of([] { params("1/2", "1/3"); }) == ErrorCode::ModulusOrder);
    CHECK(code_of([] { params("2", "2", "0", 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("classify_case examples and exactness") {
    CHECK(classify_case(params("2", "2")) == CaseTag{CaseKind::Case1, 1});
    CHECK(classify_case(params("4", "2")) == CaseTag{CaseKind::Case2, 2});
    CHECK(classify_case(params("5", "2")) == CaseTag{CaseKind::Case3, 2});
    CHECK(classify_case(params("2", "2", "1", 1)) == CaseTag{CaseKind::Case4, 1});
    CHECK(classify_case(params("4", "2", "1", 2)) == CaseTag{CaseKind::Case5, 2});

    // mu = 1 + i, lambda = mu^2 = 2i
    HopfParams gauss = validate_params(cr("0", "2"), cr("1", "1"), cr("0"), 1);
    CHECK(classify_case(gauss) == CaseTag{CaseKind::Case2, 2});
    // a perturbation far below any floating tolerance is still detected
    HopfParams near = params("4000000000000000000000000000001/1000000000000000000000000000000", "2");
    CHECK(classify_case(near).kind == CaseKind::Case3);
    // |lambda| = |mu|^2 but lambda != mu^2
    CHECK(classify_case(params("-4", "2")) == CaseTag{CaseKind::Case3, 2});
    CHECK(classify_case(params("64", "2")) == CaseTag{CaseKind::Case2, 6});
    CHECK(code_of([] { classify_case(params("32", "2"), 4); }) == ErrorCode::SearchBoundExceeded);
    CHECK(modulus_floor(params("5", "2")) == 2);
    CHECK(classify_case(params("5", "2")).to_string() == "Case 3 (p_floor=2)");
}

TEST_CASE("boundary group labels") {
    CHECK(boundary_group_label({CaseKind::Case1, 1}) == "GL(2,ℂ)");
    CHECK(boundary_group_label({CaseKind::Case5, 2}) == "ℂ ⋊ ℂ*");
}

TEST_CASE("apply_G examples") {
    CHECK(apply_G(params("5", "2"), Point2(1, 1)) == Point2(5, 2));
    CHECK(apply_G(params("4", "2", "1", 2), Point2(1, 1)) == Point2(5, 2));
    CHECK(apply_G(params("2", "2", "1", 1), Point2(0, 1)) == Point2(1, 2));
    CHECK(code_of([] { apply_G(params("2", "2"), Point2(0, 0)); }) == ErrorCode::OriginExcluded);
}

TEST_CASE("boundary automorphism examples") {
    const CaseTag c3{CaseKind::Case3, 2}, c4{CaseKind::Case4, 1}, c5{CaseKind::Case5, 2};
    CHECK(apply_boundary(make_boundary_aut(c3, 2.0, 0.0, 0.0, 3.0), Point2(1, 1)) == Point2(2, 3));
    BoundaryAut id4 = compose_boundary(make_boundary_aut(c4, 1.0, 1.0), make_boundary_aut(c4, 1.0, -1.0));
    CHECK(id4.a() == cplx(1.0));
    CHECK(id4.b() == cplx(0.0));

    BoundaryAut f = make_boundary_aut(c5, 2.0, 1.0), g = make_boundary_aut(c5, 3.0, 0.0);
    BoundaryAut fg = compose_boundary(f, g);
    CHECK(fg.a() == cplx(6.0));
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (const Point2& z : random_points(rng, 100)) worst = std::max(worst, scaled_deviation(fg(z), f(g(z))));
    CHECK(worst < 1e-12);

    CHECK(code_of([&] { make_boundary_aut(c3, 0.0, 0.0, 0.0, 1.0); }) == ErrorCode::Degenerate);
    CHECK(code_of([] { make_boundary_aut({CaseKind::Case1, 1}, 1.0, 2.0, 1.0, 2.0); }) == ErrorCode::Degenerate);
    CHECK(code_of([&] { compose_boundary(f, identity_boundary(c4)); }) == ErrorCode::CaseMismatch);
}

TEST_CASE("boundary closure and group axioms on random pairs") {
    std::mt19937_64 rng(11);
    auto pts = random_points(rng, 20);
    for (const HopfParams& ps : reference_sets()) {
        CaseTag tag = classify_case(ps);
        CAPTURE(tag.to_string());
        double worst_axiom = 0.0;
        bool closed = true;
        for (int i = 0; i < 10000; ++i) {
            BoundaryAut f = random_aut(tag, rng), g = random_aut(tag, rng);
            BoundaryAut fg = compose_boundary(f, g);
            if (!(fg.tag() == tag)) closed = false;
            if (tag.kind == CaseKind::Case3 && (fg.b() != 0.0 || fg.c() != 0.0)) closed = false;
            if (tag.kind != CaseKind::Case1 && fg.c() != 0.0) closed = false;
            if (i % 500 == 0) {
                BoundaryAut h = random_aut(tag, rng);
                BoundaryAut l = compose_boundary(compose_boundary(f, g), h);
                BoundaryAut r = compose_boundary(f, compose_boundary(g, h));
                BoundaryAut e = compose_boundary(f, invert_boundary(f));
                for (const Point2& z : pts) {
                    worst_axiom = std::max(worst_axiom, scaled_deviation(l(z), r(z)));
                    worst_axiom = std::max(worst_axiom, scaled_deviation(e(z), z));
                    worst_axiom = std::max(worst_axiom, scaled_deviation(fg(z), f(g(z))));
                    worst_axiom = std::max(worst_axiom, scaled_deviation(compose_boundary(f, identity_boundary(tag))(z), f(z)));
                }
            }
        }
        CHECK(closed);
        CHECK(worst_axiom < 1e-12);
    }
}

TEST_CASE("boundary automorphisms commute with G; off-normal-form maps do not") {
    std::mt19937_64 rng(12);
    auto pts = random_points(rng, 200);
    for (const HopfParams& ps : reference_sets()) {
        CaseTag tag = classify_case(ps);
        CAPTURE(tag.to_string());
        CHECK(check_commutes_with_G(identity_boundary(tag), ps, pts) == 0.0);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) worst = std::max(worst, check_commutes_with_G(random_aut(tag, rng), ps, pts));
        CHECK(worst < 1e-12);

        BoundaryAut f = random_aut(tag, rng);
        const int p = ps.p();
        std::function<Point2(const Point2&)> bad;
        switch (tag.kind) {
        case CaseKind::Case1: bad = [f](const Point2& z) { return Point2(f(z)(0) + 1e-3 * z(0) * z(0), f(z)(1)); }; break;
        case CaseKind::Case2: bad = [f](const Point2& z) { return Point2(f(z)(0) + 1e-3 * z(1), f(z)(1)); }; break;
        case CaseKind::Case3: bad = [f](const Point2& z) { return Point2(f(z)(0) + 1e-3 * z(1), f(z)(1)); }; break;
        case CaseKind::Case4: bad = [f](const Point2& z) { return Point2(f(z)(0), f(z)(1) + 1e-3 * z(0)); }; break;
        case CaseKind::Case5:
            bad = [f, p](const Point2& z) { return Point2(f(z)(0) + 1e-3 * std::pow(z(1), p - 1), f(z)(1)); };
            break;
        }
        CHECK(check_commutes_with_G(bad, ps, pts) > 1e-6);
    }
}

TEST_CASE("injected b in Case 3 is detected at (1,1)") {
    // F = (2 z1 + z2, 3 z2), lambda = 5, mu = 2: F(G(1,1)) = (12, 6), G(F(1,1)) = (15, 6).
    std::function<Point2(const Point2&)> f = [](const Point2& z) { return Point2(2.0 * z(0) + z(1), 3.0 * z(1)); };
    std::vector<Point2> one{Point2(1, 1)};
    CHECK(check_commutes_with_G(f, params("5", "2"), one) == doctest::Approx(0.2).epsilon(1e-14));
}
