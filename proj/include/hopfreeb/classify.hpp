#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hopfreeb/complex_rational.hpp"
#include "hopfreeb/hopf.hpp"

namespace hopfreeb {

/// Coefficient a^j_{kl} of z1^k z2^l in xi_j, with l = stride * q + r.
struct CoeffSlot {
    int j = 1;
    int k = 0;
    int l = 0;
    int q = 0;
    int r = 0;

    std::string to_string() const;
    friend bool operator==(const CoeffSlot& a, const CoeffSlot& b) { return a.j == b.j && a.k == b.k && a.l == b.l; }
};

CoeffSlot make_slot(int j, int k, int l, int stride = 1);

struct CoeffStatus {
    enum class Kind { Zero, ForcedConstant, Free, CoupledS };

    Kind kind = Kind::Zero;
    int value = 0;                            // ForcedConstant
    cplx nu = 0.0;                            // Free / CoupledS multiplier
    std::optional<ComplexRational> nu_exact;  // set by the exact engine
    std::vector<CoeffSlot> partners;          // CoupledS
    std::vector<cplx> constants;              // CoupledS, one per partner
    std::vector<ComplexRational> constants_exact;
    int exponent = 1;                         // CoupledS: driver enters as partner^exponent

    static CoeffStatus zero() { return {}; }
    static CoeffStatus forced(int v);
    static CoeffStatus free(const ComplexRational& nu);

    bool survives() const { return kind == Kind::Free || kind == Kind::CoupledS; }
    std::string to_string() const;
};

std::string to_string(CoeffStatus::Kind kind);

/// Same kind, same forced value or partners, multipliers and constants within tol.
bool statuses_agree(const CoeffStatus& a, const CoeffStatus& b, double tol = 1e-9);

struct NormalFormTable {
    CaseTag tag;
    int degree = 8;
    std::vector<std::pair<CoeffSlot, CoeffStatus>> slots; // ordered by (j, k + l, k)
    std::string summary;
    std::vector<ComplexRational> constants; // c for Case 4/5
    /// Every slot on the outer layer k + l = degree has |rho| < 1 and is Zero,
    /// so the modulus rule kills all higher slots as well.
    bool certified_tail = false;

    const CoeffStatus& status(int j, int k, int l) const;
    std::vector<std::pair<CoeffSlot, CoeffStatus>> survivors() const;
    std::string to_text() const;
};

inline constexpr int kDefaultTableDegree = 8;
inline constexpr int kMaxSlotDegree = 64;
inline constexpr int kDefaultOracleOrbit = 60;

CoeffStatus coefficient_status(const HopfParams& params, const CaseTag& tag, const CoeffSlot& slot);
NormalFormTable normal_form_table(const HopfParams& params, int degree = kDefaultTableDegree);

/// Constants c_j = binom(p, j) mu^{-j}, j = 0..p-1.
std::vector<ComplexRational> case5_constants(const ComplexRational& mu, int p);

/// Free-parameter summary line for a table, e.g.
/// "0 -> K -> Aut(R,H) -> Z_phi -> 1; 0 -> Z(4) x Z(2) -> K -> Z(2) -> 0".
std::string table_summary(const NormalFormTable& table);

/// Independent floating-point check: expands the slot equations numerically,
/// runs the resulting recursions backward from generic unit data over N orbit
/// steps and classifies each slot by its growth. Throws Inconclusive when a
/// growth rate is too close to zero to decide.
CoeffStatus oracle_status(const HopfParams& params, const CoeffSlot& slot, int orbit = kDefaultOracleOrbit);
std::vector<std::pair<CoeffSlot, CoeffStatus>> oracle_table(const HopfParams& params, int degree,
                                                            int orbit = kDefaultOracleOrbit);

} // namespace hopfreeb
