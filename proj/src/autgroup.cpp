#include "hopfreeb/autgroup.hpp"

#include <cmath>

#include "hopfreeb/classify.hpp"
#include "hopfreeb/error.hpp"

namespace hopfreeb {

namespace {

constexpr double kMembershipTolerance = 1e-8;
constexpr int kMembershipSamples = 1000;
constexpr std::uint64_t kMembershipSeed = 0x5eedULL;

cplx sigma_for(const HopfParams& params) {
    if (params.tau().is_zero() || params.tau() == ComplexRational(1)) return 1.0;
    return std::pow(params.tau_c(), 1.0 / params.p());
}

bool same_multiplier(cplx a, cplx b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

void require_multiplier(cplx got, cplx want, const std::string& what) {
    if (!same_multiplier(got, want)) {
        throw Error(ErrorCode::WrongSolutionSpace, what + " has the wrong multiplier");
    }
}

bool same_params(const HopfParams& a, const HopfParams& b) {
    return a.lambda() == b.lambda() && a.mu() == b.mu() && a.tau() == b.tau() && a.p() == b.p();
}

double binom_d(int n, int k) { return binomial(n, k).get_d(); }

KernelElement checked(KernelElement g) {
    std::mt19937_64 rng(kMembershipSeed);
    auto samples = sample_points(rng, g.time()->holonomy(), kMembershipSamples);
    double r = verify_equivariance(g, samples);
    if (!(r < kMembershipTolerance)) {
        throw Error(ErrorCode::ResidualFailure, "equivariance residual " + std::to_string(r));
    }
    return g;
}

void require_same_time(const TimeFunctionPtr& a, const TimeFunctionPtr& b) {
    if (a != b) throw Error(ErrorCode::InvalidArgument, "solutions and eta must share one time function");
}

} // namespace

KernelCoeffs KernelElement::coeffs(double x) const {
    if (!(x > 0.0)) return KernelCoeffs{std::vector<cplx>(static_cast<std::size_t>(degree_ + 1), 0.0), 0.0};
    return coeffs_(x);
}

Sample KernelElement::act_normalized(const Point2& z, double x) const {
    KernelCoeffs c = coeffs(x);
    cplx xi1 = z(0);
    cplx power = 1.0;
    for (cplx b : c.beta1) {
        xi1 += b * power;
        power *= z(1);
    }
    return Sample{Point2(xi1, z(1) + c.beta2), eta_(x)};
}

Sample KernelElement::operator()(const Point2& z, double x) const {
    if (sigma_ == 1.0) return act_normalized(z, x);
    Sample s = act_normalized(Point2(z(0), sigma_ * z(1)), x);
    s.z(1) /= sigma_;
    return s;
}

int kernel_degree(const HopfParams& params) {
    CaseTag tag = classify_case(params);
    switch (tag.kind) {
    case CaseKind::Case1:
    case CaseKind::Case4: return 0;
    case CaseKind::Case2:
    case CaseKind::Case5: return tag.p - 1;
    case CaseKind::Case3: return params.mu().pow(tag.p).norm2() == params.lambda().norm2() ? tag.p - 1 : tag.p;
    }
    return 0;
}

cplx kernel_multiplier(const HopfParams& params, int j) {
    return (params.lambda() * params.mu().pow(-j)).to_complex();
}

KernelElement assemble_kernel_element(const HopfParams& params, int degree, KernelEval coeffs, CentralizerElement eta) {
    if (degree < 0) throw Error(ErrorCode::InvalidArgument, "negative degree");
    return KernelElement(params, classify_case(params), degree, sigma_for(params), std::move(coeffs), std::move(eta));
}

KernelElement kernel_translation(const HopfParams& params, const CentralizerElement& eta) {
    const int degree = kernel_degree(params);
    KernelEval zero = [degree](double) {
        return KernelCoeffs{std::vector<cplx>(static_cast<std::size_t>(degree + 1), 0.0), 0.0};
    };
    return assemble_kernel_element(params, degree, std::move(zero), eta);
}

KernelElement kernel_identity(const HopfParams& params, TimeFunctionPtr time) {
    return kernel_translation(params, CentralizerElement::identity(std::move(time)));
}

KernelElement make_kernel_element(const HopfParams& params, const std::vector<SolutionZ>& beta1,
                                  const SolutionZ& beta2, const CentralizerElement& eta) {
    CaseTag tag = classify_case(params);
    if (!tag.diagonal()) throw Error(ErrorCode::CaseMismatch, tag.to_string() + " needs a coupled solution");
    const int degree = kernel_degree(params);
    if (static_cast<int>(beta1.size()) != degree + 1) {
        throw Error(ErrorCode::WrongSolutionSpace, "expected " + std::to_string(degree + 1) + " beta1 components");
    }
    for (int j = 0; j <= degree; ++j) {
        require_multiplier(beta1[j].multiplier(), kernel_multiplier(params, j), "beta1_" + std::to_string(j));
        require_same_time(beta1[j].time(), eta.time());
    }
    require_multiplier(beta2.multiplier(), params.mu_c(), "beta2");
    require_same_time(beta2.time(), eta.time());
    KernelEval eval = [beta1, beta2](double x) {
        KernelCoeffs c;
        for (const auto& b : beta1) c.beta1.push_back(b(x));
        c.beta2 = beta2(x);
        return c;
    };
    return checked(assemble_kernel_element(params, degree, std::move(eval), eta));
}

KernelElement make_kernel_element(const HopfParams& params, const SolutionS& solution, const CentralizerElement& eta) {
    CaseTag tag = classify_case(params);
    if (tag.kind != CaseKind::Case4) throw Error(ErrorCode::CaseMismatch, "S_{phi,lambda} describes Case 4 only");
    require_multiplier(solution.lambda, params.lambda_c(), "solution");
    require_multiplier(solution.coupling, 1.0, "coupling");
    require_multiplier(solution.beta2.multiplier(), params.lambda_c(), "beta2");
    require_same_time(solution.beta2.time(), eta.time());
    KernelEval eval = [solution](double x) { return KernelCoeffs{{solution.beta1(x)}, solution.beta2(x)}; };
    return checked(assemble_kernel_element(params, 0, std::move(eval), eta));
}

KernelElement make_kernel_element(const HopfParams& params, const SolutionSIII& solution,
                                  const CentralizerElement& eta) {
    CaseTag tag = classify_case(params);
    if (tag.kind != CaseKind::Case5) throw Error(ErrorCode::CaseMismatch, "S_{phi,mu}(c) describes Case 5 only");
    if (solution.p != params.p()) throw Error(ErrorCode::WrongSolutionSpace, "solution degree differs from p");
    require_multiplier(solution.mu, params.mu_c(), "solution");
    require_multiplier(solution.beta2.multiplier(), params.mu_c(), "beta2");
    require_same_time(solution.beta2.time(), eta.time());
    auto c = case5_constants(params.mu(), params.p());
    for (int j = 0; j < params.p(); ++j) require_multiplier(solution.c[j], c[j].to_complex(), "c_" + std::to_string(j));
    KernelEval eval = [solution](double x) {
        KernelCoeffs k;
        for (const auto& b : solution.beta1) k.beta1.push_back(b(x));
        k.beta2 = solution.beta2(x);
        return k;
    };
    return checked(assemble_kernel_element(params, params.p() - 1, std::move(eval), eta));
}

KernelElement compose_kernel(const KernelElement& g1, const KernelElement& g2) {
    if (!(g1.tag() == g2.tag()) || !same_params(g1.params(), g2.params()) || g1.degree() != g2.degree()) {
        throw Error(ErrorCode::CaseMismatch, "kernel elements belong to different cases");
    }
    const int degree = g1.degree();
    KernelEval eval = [g1, g2, degree](double x) {
        KernelCoeffs inner = g2.coeffs(x);
        KernelCoeffs outer = g1.coeffs(g2.eta()(x));
        KernelCoeffs out;
        out.beta1.resize(static_cast<std::size_t>(degree + 1));
        for (int i = 0; i <= degree; ++i) {
            cplx acc = inner.beta1[i];
            cplx power = 1.0;
            for (int j = i; j <= degree; ++j) {
                acc += binom_d(j, i) * outer.beta1[j] * power;
                power *= inner.beta2;
            }
            out.beta1[i] = acc;
        }
        out.beta2 = outer.beta2 + inner.beta2;
        return out;
    };
    return assemble_kernel_element(g1.params(), degree, std::move(eval), g1.eta().compose(g2.eta()));
}

KernelElement invert_kernel(const KernelElement& g) {
    const int degree = g.degree();
    const CentralizerElement back = g.eta().inverse();
    KernelEval eval = [g, back, degree](double y) {
        KernelCoeffs c = g.coeffs(back(y));
        KernelCoeffs out;
        out.beta1.resize(static_cast<std::size_t>(degree + 1));
        for (int i = 0; i <= degree; ++i) {
            cplx acc = 0.0;
            cplx power = 1.0;
            for (int j = i; j <= degree; ++j) {
                acc -= binom_d(j, i) * c.beta1[j] * power;
                power *= -c.beta2;
            }
            out.beta1[i] = acc;
        }
        out.beta2 = -c.beta2;
        return out;
    };
    return assemble_kernel_element(g.params(), degree, std::move(eval), back);
}

KernelElement precompose_coefficients(const KernelElement& g, const CentralizerElement& zeta) {
    KernelEval eval = [g, zeta](double x) { return g.coeffs(zeta(x)); };
    return assemble_kernel_element(g.params(), g.degree(), std::move(eval), g.eta());
}

KernelElement conjugate_by_centralizer(const KernelElement& g, const CentralizerElement& zeta) {
    KernelElement h = kernel_translation(g.params(), zeta);
    return compose_kernel(invert_kernel(h), compose_kernel(g, h));
}

Sample FullAutomorphism::operator()(const Point2& z, double x) const {
    Sample s = kernel_(z, x);
    s.z = boundary_(s.z);
    return s;
}

FullAutomorphism make_full_automorphism(const BoundaryAut& f, const KernelElement& k) {
    if (!(f.tag() == k.tag())) throw Error(ErrorCode::CaseMismatch, "boundary part and kernel disagree on the case");
    return FullAutomorphism(f, k);
}

FullAutomorphism extend_boundary(const BoundaryAut& f, const HopfParams& params, TimeFunctionPtr time) {
    return make_full_automorphism(f, kernel_identity(params, std::move(time)));
}

BoundaryAut restrict_to_boundary(const FullAutomorphism& g) { return g.boundary(); }

FullAutomorphism deck_transformation(const HopfParams& params, TimeFunctionPtr time) {
    CaseTag tag = classify_case(params);
    const cplx lambda = params.lambda_c(), mu = params.mu_c(), tau = params.tau_c();
    BoundaryAut f = [&] {
        switch (tag.kind) {
        case CaseKind::Case1: return make_boundary_aut(tag, lambda, 0.0, 0.0, mu);
        case CaseKind::Case2:
        case CaseKind::Case3: return make_boundary_aut(tag, lambda, 0.0, 0.0, mu);
        case CaseKind::Case4: return make_boundary_aut(tag, lambda, tau);
        case CaseKind::Case5: return make_boundary_aut(tag, mu, tau);
        }
        throw Error(ErrorCode::Internal, "unknown case");
    }();
    auto eta = CentralizerElement::iterate(time, 1);
    return make_full_automorphism(f, kernel_translation(params, eta));
}

double equivariance_residual(const ActionFn& g, const HopfParams& params, const HolonomyMap& phi,
                             std::span<const Sample> samples) {
    double worst = 0.0;
    for (const Sample& s : samples) {
        Sample left = g(apply_G(params, s.z), phi(s.x));
        Sample mid = g(s.z, s.x);
        Point2 right_z = apply_G(params, mid.z);
        double right_x = phi(mid.x);
        worst = std::max(worst, scaled_deviation(left.z, right_z));
        worst = std::max(worst, scaled_deviation(left.x, right_x));
    }
    return worst;
}

double verify_equivariance(const FullAutomorphism& g, std::span<const Sample> samples) {
    ActionFn act = [&g](const Point2& z, double x) { return g(z, x); };
    return equivariance_residual(act, g.params(), g.kernel().time()->holonomy(), samples);
}

double verify_equivariance(const KernelElement& g, std::span<const Sample> samples) {
    ActionFn act = [&g](const Point2& z, double x) { return g(z, x); };
    return equivariance_residual(act, g.params(), g.time()->holonomy(), samples);
}

double action_deviation(const ActionFn& a, const ActionFn& b, std::span<const Sample> samples) {
    double worst = 0.0;
    for (const Sample& s : samples) {
        Sample u = a(s.z, s.x);
        Sample v = b(s.z, s.x);
        worst = std::max({worst, scaled_deviation(u.z, v.z), scaled_deviation(u.x, v.x)});
    }
    return worst;
}

PeriodicSeed random_seed(std::mt19937_64& rng, bool real_valued) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<PeriodicSeed::Term> terms;
    if (real_valued) {
        terms.emplace_back(0, cplx(u(rng), 0.0));
        for (int k = 1; k <= 2; ++k) {
            cplx c(0.5 * u(rng), 0.5 * u(rng));
            terms.emplace_back(k, c);
            terms.emplace_back(-k, std::conj(c));
        }
    } else {
        for (int k = -2; k <= 2; ++k) terms.emplace_back(k, std::polar(std::abs(u(rng)), kPi * u(rng)));
    }
    return PeriodicSeed(std::move(terms));
}

KernelElement random_kernel_element(const HopfParams& params, TimeFunctionPtr time, std::mt19937_64& rng,
                                    const CentralizerElement& eta) {
    CaseTag tag = classify_case(params);
    const cplx lambda = params.lambda_c(), mu = params.mu_c();
    switch (tag.kind) {
    case CaseKind::Case1:
    case CaseKind::Case2:
    case CaseKind::Case3: {
        std::vector<SolutionZ> beta1;
        for (int j = 0; j <= kernel_degree(params); ++j) {
            beta1.push_back(solve_I(time, kernel_multiplier(params, j), random_seed(rng)));
        }
        return make_kernel_element(params, beta1, solve_I(time, mu, random_seed(rng)), eta);
    }
    case CaseKind::Case4: {
        SolutionZ beta2 = solve_I(time, lambda, random_seed(rng));
        SolutionZ gamma = solve_I(time, lambda, random_seed(rng));
        return make_kernel_element(params, solve_II(time, lambda, beta2, gamma), eta);
    }
    case CaseKind::Case5: {
        const int p = params.p();
        std::vector<cplx> c;
        for (const auto& cj : case5_constants(params.mu(), p)) c.push_back(cj.to_complex());
        SolutionZ beta2 = solve_I(time, mu, random_seed(rng));
        std::vector<std::optional<SolutionZ>> gammas;
        for (int j = 0; j < p; ++j) gammas.emplace_back(solve_I(time, std::pow(mu, p - j), random_seed(rng)));
        return make_kernel_element(params, solve_III(time, mu, p, c, beta2, gammas), eta);
    }
    }
    throw Error(ErrorCode::Internal, "unknown case");
}

BoundaryAut random_boundary_aut(const CaseTag& tag, std::mt19937_64& rng) {
    auto coef = [&rng] { return sample_complex(rng, 0.5, 2.0); };
    switch (tag.kind) {
    case CaseKind::Case1:
        for (;;) {
            cplx a = coef(), b = coef(), c = coef(), d = coef();
            if (std::abs(a * d - b * c) > 0.1) return make_boundary_aut(tag, a, b, c, d);
        }
    case CaseKind::Case2: return make_boundary_aut(tag, coef(), coef(), 0.0, coef());
    case CaseKind::Case3: return make_boundary_aut(tag, coef(), 0.0, 0.0, coef());
    case CaseKind::Case4:
    case CaseKind::Case5: return make_boundary_aut(tag, coef(), coef());
    }
    throw Error(ErrorCode::Internal, "unknown case");
}

// ---------------------------------------------------------------------------

std::pair<Eigen::VectorXcd, double> DiagonalElementN::operator()(const Eigen::VectorXcd& z, double x) const {
    if (z.size() != dimension()) throw Error(ErrorCode::DimensionMismatch, "point has the wrong dimension");
    Eigen::VectorXcd out = z;
    if (x > 0.0) {
        for (int i = 0; i < dimension(); ++i) out(i) += betas_[i](x);
    }
    return {out, eta_(x)};
}

DiagonalElementN assemble_diagonal_n(cplx lambda, std::vector<CoeffFn> betas, CentralizerElement eta) {
    if (betas.empty()) throw Error(ErrorCode::DimensionMismatch, "dimension must be at least 1");
    if (!(std::abs(lambda) > 1.0)) throw Error(ErrorCode::ModulusOrder, "need |lambda| > 1");
    return DiagonalElementN(lambda, std::move(betas), std::move(eta));
}

DiagonalElementN make_diagonal_n(int n, cplx lambda, const std::vector<SolutionZ>& betas,
                                 const CentralizerElement& eta) {
    if (n < 1 || static_cast<int>(betas.size()) != n) {
        throw Error(ErrorCode::DimensionMismatch, "need exactly n coefficient functions");
    }
    std::vector<CoeffFn> fns;
    for (const auto& b : betas) {
        require_multiplier(b.multiplier(), lambda, "beta");
        require_same_time(b.time(), eta.time());
        fns.push_back(b.as_function());
    }
    return assemble_diagonal_n(lambda, std::move(fns), eta);
}

DiagonalElementN compose_diagonal(const DiagonalElementN& g1, const DiagonalElementN& g2) {
    if (g1.dimension() != g2.dimension()) throw Error(ErrorCode::DimensionMismatch, "dimensions differ");
    if (g1.lambda() != g2.lambda()) throw Error(ErrorCode::CaseMismatch, "deck maps differ");
    std::vector<CoeffFn> out;
    const CentralizerElement eta2 = g2.eta();
    for (int i = 0; i < g1.dimension(); ++i) {
        out.push_back([b1 = g1.betas()[i], b2 = g2.betas()[i], eta2](double x) { return b1(eta2(x)) + b2(x); });
    }
    return assemble_diagonal_n(g1.lambda(), std::move(out), g1.eta().compose(g2.eta()));
}

DiagonalElementN invert_diagonal(const DiagonalElementN& g) {
    const CentralizerElement back = g.eta().inverse();
    std::vector<CoeffFn> out;
    for (const auto& b : g.betas()) out.push_back([b, back](double y) { return -b(back(y)); });
    return assemble_diagonal_n(g.lambda(), std::move(out), back);
}

namespace {

double vector_deviation(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return scaled_deviation(a, b); }

} // namespace

double verify_equivariance(const DiagonalElementN& g, std::span<const SampleN> samples) {
    const HolonomyMap& phi = g.eta().time()->holonomy();
    double worst = 0.0;
    for (const SampleN& s : samples) {
        auto left = g(g.lambda() * s.z, phi(s.x));
        auto mid = g(s.z, s.x);
        Eigen::VectorXcd right = g.lambda() * mid.first;
        worst = std::max({worst, vector_deviation(left.first, right), scaled_deviation(left.second, phi(mid.second))});
    }
    return worst;
}

double composition_deviation(const DiagonalElementN& composed, const DiagonalElementN& g1,
                             const DiagonalElementN& g2, std::span<const SampleN> samples) {
    double worst = 0.0;
    for (const SampleN& s : samples) {
        auto a = composed(s.z, s.x);
        auto inner = g2(s.z, s.x);
        auto b = g1(inner.first, inner.second);
        worst = std::max({worst, vector_deviation(a.first, b.first), scaled_deviation(a.second, b.second)});
    }
    return worst;
}

double identity_deviation(const DiagonalElementN& g, std::span<const SampleN> samples) {
    double worst = 0.0;
    for (const SampleN& s : samples) {
        auto a = g(s.z, s.x);
        worst = std::max({worst, vector_deviation(a.first, s.z), scaled_deviation(a.second, s.x)});
    }
    return worst;
}

} // namespace hopfreeb
