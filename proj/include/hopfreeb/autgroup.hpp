#pragma once

#include <functional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "hopfreeb/funceq.hpp"
#include "hopfreeb/holonomy.hpp"
#include "hopfreeb/hopf.hpp"

namespace hopfreeb {

/// Coefficient functions of a kernel element at one x.
struct KernelCoeffs {
    std::vector<cplx> beta1; // beta_{1,0} .. beta_{1,P}
    cplx beta2 = 0.0;
};

using KernelEval = std::function<KernelCoeffs(double)>;

/// A point of C^2 x [0, inf).
struct Sample {
    Point2 z;
    double x = 0.0;
};

/// g(z1, z2, x) = (z1 + sum_j beta_{1,j}(x) z2^j, z2 + beta2(x), eta(x)).
/// Nondiagonal elements are stored in tau = 1 coordinates; operator() acts
/// in the user's coordinates through S(z1, z2) = (z1, sigma z2), sigma^p = tau.
class KernelElement {
public:
    const HopfParams& params() const { return params_; }
    const CaseTag& tag() const { return tag_; }
    /// Highest power of z2 in xi_1.
    int degree() const { return degree_; }
    cplx sigma() const { return sigma_; }
    const CentralizerElement& eta() const { return eta_; }
    const TimeFunctionPtr& time() const { return eta_.time(); }

    KernelCoeffs coeffs(double x) const;
    cplx beta1(int j, double x) const { return coeffs(x).beta1.at(static_cast<std::size_t>(j)); }
    cplx beta2(double x) const { return coeffs(x).beta2; }

    /// Action in tau = 1 coordinates.
    Sample act_normalized(const Point2& z, double x) const;
    /// Action in the user's coordinates.
    Sample operator()(const Point2& z, double x) const;

    friend KernelElement assemble_kernel_element(const HopfParams& params, int degree, KernelEval coeffs,
                                                 CentralizerElement eta);

private:
    KernelElement(HopfParams params, CaseTag tag, int degree, cplx sigma, KernelEval coeffs, CentralizerElement eta)
        : params_(std::move(params)), tag_(tag), degree_(degree), sigma_(sigma), coeffs_(std::move(coeffs)),
          eta_(std::move(eta)) {}

    HopfParams params_;
    CaseTag tag_;
    int degree_ = 0;
    cplx sigma_ = 1.0;
    KernelEval coeffs_;
    CentralizerElement eta_;
};

/// Number of z2-powers minus one carried by xi_1 in the kernel: 0 for Cases
/// 1 and 4, p - 1 for Cases 2 and 5, and for Case 3 p_floor, or p_floor - 1
/// when |lambda| = |mu|^p_floor.
int kernel_degree(const HopfParams& params);

/// Multiplier of beta_{1,j} in the diagonal cases: lambda mu^{-j}.
cplx kernel_multiplier(const HopfParams& params, int j);

/// Builds an element from raw coefficient functions without checking
/// equivariance; meant for diagnostics and negative controls.
KernelElement assemble_kernel_element(const HopfParams& params, int degree, KernelEval coeffs, CentralizerElement eta);

KernelElement kernel_identity(const HopfParams& params, TimeFunctionPtr time);
/// eta-only element (all coefficient functions zero).
KernelElement kernel_translation(const HopfParams& params, const CentralizerElement& eta);

/// Cases 1-3: beta1[j] in Z_{phi, lambda mu^{-j}}, beta2 in Z_{phi, mu}.
KernelElement make_kernel_element(const HopfParams& params, const std::vector<SolutionZ>& beta1,
                                  const SolutionZ& beta2, const CentralizerElement& eta);
/// Case 4: (beta1, beta2) in S_{phi, lambda}.
KernelElement make_kernel_element(const HopfParams& params, const SolutionS& solution, const CentralizerElement& eta);
/// Case 5: (beta_{1,0}, .., beta_{1,p-1}, beta2) in S_{phi, mu}(c).
KernelElement make_kernel_element(const HopfParams& params, const SolutionSIII& solution,
                                  const CentralizerElement& eta);

/// g1 o g2.
KernelElement compose_kernel(const KernelElement& g1, const KernelElement& g2);
KernelElement invert_kernel(const KernelElement& g);
/// h^{-1} o g o h for the eta-only element h = (id, id, zeta).
KernelElement conjugate_by_centralizer(const KernelElement& g, const CentralizerElement& zeta);
/// The coefficient functions of g precomposed with zeta.
KernelElement precompose_coefficients(const KernelElement& g, const CentralizerElement& zeta);

/// Boundary automorphism F extended constantly in x, composed with a kernel
/// element: g = (F x id) o k.
class FullAutomorphism {
public:
    const BoundaryAut& boundary() const { return boundary_; }
    const KernelElement& kernel() const { return kernel_; }
    const HopfParams& params() const { return kernel_.params(); }

    Sample operator()(const Point2& z, double x) const;

    friend FullAutomorphism make_full_automorphism(const BoundaryAut& f, const KernelElement& k);

private:
    FullAutomorphism(BoundaryAut f, KernelElement k) : boundary_(std::move(f)), kernel_(std::move(k)) {}
    BoundaryAut boundary_;
    KernelElement kernel_;
};

FullAutomorphism make_full_automorphism(const BoundaryAut& f, const KernelElement& k);
FullAutomorphism extend_boundary(const BoundaryAut& f, const HopfParams& params, TimeFunctionPtr time);
BoundaryAut restrict_to_boundary(const FullAutomorphism& g);
/// T = G x phi as a FullAutomorphism.
FullAutomorphism deck_transformation(const HopfParams& params, TimeFunctionPtr time);

using ActionFn = std::function<Sample(const Point2&, double)>;

/// sup over samples of the deviation between g(T(pt)) and T(g(pt)), taken as
/// the scaled deviation of each coordinate including the x slot.
double equivariance_residual(const ActionFn& g, const HopfParams& params, const HolonomyMap& phi,
                             std::span<const Sample> samples);
double verify_equivariance(const FullAutomorphism& g, std::span<const Sample> samples);
double verify_equivariance(const KernelElement& g, std::span<const Sample> samples);

/// max over samples of the scaled deviation between two actions.
double action_deviation(const ActionFn& a, const ActionFn& b, std::span<const Sample> samples);

template <typename Rng>
std::vector<Sample> sample_points(Rng& rng, const HolonomyMap& phi, int n) {
    std::uniform_real_distribution<double> ux(phi.x_min(), phi.x_max());
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Point2 z = sample_point2(rng);
        out.push_back(Sample{z, ux(rng)});
    }
    return out;
}

/// Random Fourier seed with frequencies -2..2 and coefficients of modulus <= 1.
PeriodicSeed random_seed(std::mt19937_64& rng, bool real_valued = false);

/// Random element of the kernel for the case of `params`, drawn from the
/// solution spaces of its normal-form table.
KernelElement random_kernel_element(const HopfParams& params, TimeFunctionPtr time, std::mt19937_64& rng,
                                    const CentralizerElement& eta);

/// Random boundary automorphism in the normal form of the case.
BoundaryAut random_boundary_aut(const CaseTag& tag, std::mt19937_64& rng);

/// Diagonal deck map G = lambda I_n: g(z, x) = (z_i + beta_i(x), eta(x)).
class DiagonalElementN {
public:
    int dimension() const { return static_cast<int>(betas_.size()); }
    cplx lambda() const { return lambda_; }
    const CentralizerElement& eta() const { return eta_; }
    const std::vector<CoeffFn>& betas() const { return betas_; }

    std::pair<Eigen::VectorXcd, double> operator()(const Eigen::VectorXcd& z, double x) const;

    friend DiagonalElementN assemble_diagonal_n(cplx lambda, std::vector<CoeffFn> betas, CentralizerElement eta);

private:
    DiagonalElementN(cplx lambda, std::vector<CoeffFn> betas, CentralizerElement eta)
        : lambda_(lambda), betas_(std::move(betas)), eta_(std::move(eta)) {}
    cplx lambda_;
    std::vector<CoeffFn> betas_;
    CentralizerElement eta_;
};

DiagonalElementN assemble_diagonal_n(cplx lambda, std::vector<CoeffFn> betas, CentralizerElement eta);
DiagonalElementN make_diagonal_n(int n, cplx lambda, const std::vector<SolutionZ>& betas,
                                 const CentralizerElement& eta);
DiagonalElementN compose_diagonal(const DiagonalElementN& g1, const DiagonalElementN& g2);
DiagonalElementN invert_diagonal(const DiagonalElementN& g);

struct SampleN {
    Eigen::VectorXcd z;
    double x = 0.0;
};

template <typename Rng>
std::vector<SampleN> sample_points_n(Rng& rng, const HolonomyMap& phi, int dim, int n) {
    std::uniform_real_distribution<double> ux(phi.x_min(), phi.x_max());
    std::vector<SampleN> out;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXcd z = sample_pointn(rng, dim);
        out.push_back(SampleN{z, ux(rng)});
    }
    return out;
}

double verify_equivariance(const DiagonalElementN& g, std::span<const SampleN> samples);
/// max scaled deviation between (g1 o g2) applied and g1(g2(.)).
double composition_deviation(const DiagonalElementN& composed, const DiagonalElementN& g1,
                             const DiagonalElementN& g2, std::span<const SampleN> samples);
double identity_deviation(const DiagonalElementN& g, std::span<const SampleN> samples);

} // namespace hopfreeb
