#include "hopfreeb/hopf.hpp"

#include "hopfreeb/error.hpp"

namespace hopfreeb {

HopfParams validate_params(const ComplexRational& lambda, const ComplexRational& mu, const ComplexRational& tau,
                           int p) {
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "p must be a positive integer");
    if (!(mu.norm2() > 1)) throw Error(ErrorCode::ModulusOrder, "|mu| must exceed 1");
    if (lambda.norm2() < mu.norm2()) throw Error(ErrorCode::ModulusOrder, "|lambda| < |mu|");
    if (!((lambda - mu.pow(p)) * tau).is_zero()) {
        throw Error(ErrorCode::ResonanceConstraint, "(lambda - mu^p) tau != 0");
    }
    HopfParams out;
    out.lambda_ = lambda;
    out.mu_ = mu;
    out.tau_ = tau;
    out.p_ = p;
    return out;
}

std::string CaseTag::to_string() const {
    std::string s = "Case " + std::to_string(number());
    switch (kind) {
    case CaseKind::Case2:
    case CaseKind::Case5: return s + " (p=" + std::to_string(p) + ")";
    case CaseKind::Case3: return s + " (p_floor=" + std::to_string(p) + ")";
    default: return s;
    }
}

int modulus_floor(const HopfParams& params) {
    const mpq_class lam2 = params.lambda().norm2();
    const mpq_class mu2 = params.mu().norm2();
    mpq_class power = mu2;
    int m = 1;
    // |mu|^(2(m+1)) <= |lambda|^2 ; the loop stops one past the cap.
    while (m <= kResonanceSearchCap && power * mu2 <= lam2) {
        power *= mu2;
        ++m;
    }
    return m;
}

CaseTag classify_case(const HopfParams& params, int search_cap) {
    if (!params.tau().is_zero()) {
        if (params.p() == 1) return {CaseKind::Case4, 1};
        return {CaseKind::Case5, params.p()};
    }
    if (params.lambda() == params.mu()) return {CaseKind::Case1, 1};
    const int floor_m = modulus_floor(params);
    if (floor_m > search_cap) {
        throw Error(ErrorCode::SearchBoundExceeded,
                    "lambda = mu^m could hold only for m beyond the search cap " + std::to_string(search_cap));
    }
    ComplexRational power = params.mu();
    for (int m = 2; m <= floor_m; ++m) {
        power *= params.mu();
        if (power == params.lambda()) return {CaseKind::Case2, m};
    }
    return {CaseKind::Case3, floor_m};
}

std::string boundary_group_label(const CaseTag& tag) {
    switch (tag.kind) {
    case CaseKind::Case1: return "GL(2,ℂ)";
    case CaseKind::Case2: return "ℂ ⋊ (ℂ* × ℂ*)";
    case CaseKind::Case3: return "ℂ* × ℂ*";
    case CaseKind::Case4: return "ℂ ⋊ ℂ*";
    case CaseKind::Case5: return "ℂ ⋊ ℂ*";
    }
    return {};
}

Point2 apply_G(const HopfParams& params, const Point2& z) {
    if (z(0) == 0.0 && z(1) == 0.0) throw Error(ErrorCode::OriginExcluded, "G is not applied at the origin");
    return Point2(params.lambda_c() * z(0) + params.tau_c() * std::pow(z(1), params.p()), params.mu_c() * z(1));
}

namespace {

Eigen::Matrix2cd as_matrix(const BoundaryAut& f) {
    Eigen::Matrix2cd m;
    m << f.a(), f.b(), f.c(), f.d();
    return m;
}

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

} // namespace

BoundaryAut make_boundary_aut(const CaseTag& tag, cplx a, cplx b, cplx c, cplx d) {
    if (!finite(a) || !finite(b) || !finite(c) || !finite(d)) {
        throw Error(ErrorCode::Degenerate, "non-finite boundary coefficient");
    }
    BoundaryAut f;
    f.tag_ = tag;
    switch (tag.kind) {
    case CaseKind::Case1:
        if (a * d - b * c == 0.0) throw Error(ErrorCode::Degenerate, "ad - bc = 0");
        f.a_ = a, f.b_ = b, f.c_ = c, f.d_ = d;
        break;
    case CaseKind::Case2:
        if (a * d == 0.0) throw Error(ErrorCode::Degenerate, "ad = 0");
        f.a_ = a, f.b_ = b, f.c_ = 0.0, f.d_ = d;
        break;
    case CaseKind::Case3:
        if (a * d == 0.0) throw Error(ErrorCode::Degenerate, "ad = 0");
        f.a_ = a, f.b_ = 0.0, f.c_ = 0.0, f.d_ = d;
        break;
    case CaseKind::Case4:
    case CaseKind::Case5:
        if (a == 0.0) throw Error(ErrorCode::Degenerate, "a = 0");
        f.a_ = a, f.b_ = b, f.c_ = 0.0, f.d_ = 0.0;
        break;
    }
    return f;
}

BoundaryAut identity_boundary(const CaseTag& tag) { return make_boundary_aut(tag, 1.0, 0.0, 0.0, 1.0); }

Point2 BoundaryAut::operator()(const Point2& z) const {
    const int p = tag_.p;
    switch (tag_.kind) {
    case CaseKind::Case1: return as_matrix(*this) * z;
    case CaseKind::Case2: return Point2(a_ * z(0) + b_ * std::pow(z(1), p), d_ * z(1));
    case CaseKind::Case3: return Point2(a_ * z(0), d_ * z(1));
    case CaseKind::Case4: return Point2(a_ * z(0) + b_ * z(1), a_ * z(1));
    case CaseKind::Case5: return Point2(std::pow(a_, p) * z(0) + b_ * std::pow(z(1), p), a_ * z(1));
    }
    return z;
}

Point2 apply_boundary(const BoundaryAut& f, const Point2& z) { return f(z); }

BoundaryAut compose_boundary(const BoundaryAut& f1, const BoundaryAut& f2) {
    if (!(f1.tag() == f2.tag())) throw Error(ErrorCode::CaseMismatch, "boundary automorphisms of different cases");
    const CaseTag& tag = f1.tag();
    const int p = tag.p;
    switch (tag.kind) {
    case CaseKind::Case1: {
        Eigen::Matrix2cd m = as_matrix(f1) * as_matrix(f2);
        return make_boundary_aut(tag, m(0, 0), m(0, 1), m(1, 0), m(1, 1));
    }
    case CaseKind::Case2:
        return make_boundary_aut(tag, f1.a() * f2.a(), f1.a() * f2.b() + f1.b() * std::pow(f2.d(), p), 0.0,
                                 f1.d() * f2.d());
    case CaseKind::Case3: return make_boundary_aut(tag, f1.a() * f2.a(), 0.0, 0.0, f1.d() * f2.d());
    case CaseKind::Case4: return make_boundary_aut(tag, f1.a() * f2.a(), f1.a() * f2.b() + f1.b() * f2.a());
    case CaseKind::Case5:
        return make_boundary_aut(tag, f1.a() * f2.a(),
                                 std::pow(f1.a(), p) * f2.b() + f1.b() * std::pow(f2.a(), p));
    }
    return f1;
}

BoundaryAut invert_boundary(const BoundaryAut& f) {
    const CaseTag& tag = f.tag();
    const int p = tag.p;
    switch (tag.kind) {
    case CaseKind::Case1: {
        Eigen::Matrix2cd m = as_matrix(f).inverse();
        return make_boundary_aut(tag, m(0, 0), m(0, 1), m(1, 0), m(1, 1));
    }
    case CaseKind::Case2:
        return make_boundary_aut(tag, 1.0 / f.a(), -f.b() / (f.a() * std::pow(f.d(), p)), 0.0, 1.0 / f.d());
    case CaseKind::Case3: return make_boundary_aut(tag, 1.0 / f.a(), 0.0, 0.0, 1.0 / f.d());
    case CaseKind::Case4: return make_boundary_aut(tag, 1.0 / f.a(), -f.b() / (f.a() * f.a()));
    case CaseKind::Case5: return make_boundary_aut(tag, 1.0 / f.a(), -f.b() / std::pow(f.a(), 2 * p));
    }
    return f;
}

double check_commutes_with_G(const std::function<Point2(const Point2&)>& f, const HopfParams& params,
                             std::span<const Point2> samples) {
    double worst = 0.0;
    for (const Point2& z : samples) {
        Point2 fg = f(apply_G(params, z));
        Point2 gf = apply_G(params, f(z));
        worst = std::max(worst, scaled_deviation(fg, gf));
    }
    return worst;
}

double check_commutes_with_G(const BoundaryAut& f, const HopfParams& params, std::span<const Point2> samples) {
    return check_commutes_with_G([&f](const Point2& z) { return f(z); }, params, samples);
}

} // namespace hopfreeb
