#pragma once

#include <functional>
#include <span>
#include <string>

#include "hopfreeb/complex_rational.hpp"
#include "hopfreeb/numeric.hpp"

namespace hopfreeb {

/// Resonance search cap for lambda = mu^m.
inline constexpr int kResonanceSearchCap = 64;

/// Deck-map parameters of G(z1, z2) = (lambda z1 + tau z2^p, mu z2), validated
/// against |lambda| >= |mu| > 1 and (lambda - mu^p) tau = 0.
class HopfParams {
public:
    const ComplexRational& lambda() const { return lambda_; }
    const ComplexRational& mu() const { return mu_; }
    const ComplexRational& tau() const { return tau_; }
    int p() const { return p_; }

    cplx lambda_c() const { return lambda_.to_complex(); }
    cplx mu_c() const { return mu_.to_complex(); }
    cplx tau_c() const { return tau_.to_complex(); }

    friend HopfParams validate_params(const ComplexRational& lambda, const ComplexRational& mu,
                                      const ComplexRational& tau, int p);

private:
    HopfParams() = default;
    ComplexRational lambda_, mu_, tau_;
    int p_ = 1;
};

HopfParams validate_params(const ComplexRational& lambda, const ComplexRational& mu, const ComplexRational& tau,
                           int p);

enum class CaseKind { Case1 = 1, Case2, Case3, Case4, Case5 };

/// Normal-form case of G. `p` is the resonance degree for Case2/Case5, the
/// floor of log|lambda|/log|mu| for Case3 and 1 otherwise.
struct CaseTag {
    CaseKind kind = CaseKind::Case1;
    int p = 1;

    bool diagonal() const { return kind == CaseKind::Case1 || kind == CaseKind::Case2 || kind == CaseKind::Case3; }
    int number() const { return static_cast<int>(kind); }
    std::string to_string() const;

    friend bool operator==(const CaseTag&, const CaseTag&) = default;
};

CaseTag classify_case(const HopfParams& params, int search_cap = kResonanceSearchCap);

/// Largest m with |mu|^m <= |lambda|, computed exactly.
int modulus_floor(const HopfParams& params);

/// Description of the boundary centralizer, e.g. "GL(2,ℂ)".
std::string boundary_group_label(const CaseTag& tag);

Point2 apply_G(const HopfParams& params, const Point2& z);

/// Element of the centralizer of G in normal form. Case1 uses the full
/// matrix [[a, b], [c, d]]; the other cases use the coefficient subset of
/// their normal form and ignore the rest.
class BoundaryAut {
public:
    const CaseTag& tag() const { return tag_; }
    cplx a() const { return a_; }
    cplx b() const { return b_; }
    cplx c() const { return c_; }
    cplx d() const { return d_; }

    Point2 operator()(const Point2& z) const;

    friend BoundaryAut make_boundary_aut(const CaseTag& tag, cplx a, cplx b, cplx c, cplx d);
    friend bool operator==(const BoundaryAut&, const BoundaryAut&) = default;

private:
    BoundaryAut() = default;
    CaseTag tag_;
    cplx a_, b_, c_, d_;
};

BoundaryAut make_boundary_aut(const CaseTag& tag, cplx a, cplx b = 0.0, cplx c = 0.0, cplx d = 0.0);
BoundaryAut identity_boundary(const CaseTag& tag);
BoundaryAut compose_boundary(const BoundaryAut& f1, const BoundaryAut& f2);
BoundaryAut invert_boundary(const BoundaryAut& f);
Point2 apply_boundary(const BoundaryAut& f, const Point2& z);

/// sup over samples of the scaled deviation between F(G(z)) and G(F(z)).
double check_commutes_with_G(const BoundaryAut& f, const HopfParams& params, std::span<const Point2> samples);
double check_commutes_with_G(const std::function<Point2(const Point2&)>& f, const HopfParams& params,
                             std::span<const Point2> samples);

} // namespace hopfreeb
