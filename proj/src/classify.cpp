#include "hopfreeb/classify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

#include "hopfreeb/error.hpp"

namespace hopfreeb {

std::string CoeffSlot::to_string() const {
    std::ostringstream os;
    os << "a" << j << "_" << k << "," << l;
    return os.str();
}

CoeffSlot make_slot(int j, int k, int l, int stride) {
    if (j != 1 && j != 2) throw Error(ErrorCode::InvalidArgument, "slot index j must be 1 or 2");
    if (k < 0 || l < 0) throw Error(ErrorCode::InvalidArgument, "slot exponents must be nonnegative");
    if (stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be positive");
    return CoeffSlot{j, k, l, l / stride, l % stride};
}

CoeffStatus CoeffStatus::forced(int v) {
    CoeffStatus s;
    s.kind = Kind::ForcedConstant;
    s.value = v;
    return s;
}

CoeffStatus CoeffStatus::free(const ComplexRational& nu) {
    CoeffStatus s;
    s.kind = Kind::Free;
    s.nu = nu.to_complex();
    s.nu_exact = nu;
    return s;
}

std::string to_string(CoeffStatus::Kind kind) {
    switch (kind) {
    case CoeffStatus::Kind::Zero: return "Zero";
    case CoeffStatus::Kind::ForcedConstant: return "ForcedConstant";
    case CoeffStatus::Kind::Free: return "Free";
    case CoeffStatus::Kind::CoupledS: return "CoupledS";
    }
    return "?";
}

namespace {

std::string complex_text(cplx z) {
    std::ostringstream os;
    os << std::setprecision(12);
    if (z.imag() == 0.0) {
        os << z.real();
    } else {
        os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    }
    return os.str();
}

std::string nu_text(const CoeffStatus& s) { return s.nu_exact ? s.nu_exact->to_string() : complex_text(s.nu); }

} // namespace

std::string CoeffStatus::to_string() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::Zero: os << "Zero"; break;
    case Kind::ForcedConstant: os << "ForcedConstant(" << value << ")"; break;
    case Kind::Free: os << "Free(" << nu_text(*this) << ")"; break;
    case Kind::CoupledS:
        os << "CoupledS(nu = " << nu_text(*this) << "; ";
        for (std::size_t i = 0; i < partners.size(); ++i) {
            if (i) os << ", ";
            os << partners[i].to_string() << " c = "
               << (i < constants_exact.size() ? constants_exact[i].to_string() : complex_text(constants[i]));
        }
        os << "; e = " << exponent << ")";
        break;
    }
    return os.str();
}

bool statuses_agree(const CoeffStatus& a, const CoeffStatus& b, double tol) {
    if (a.kind != b.kind) return false;
    auto close = [tol](cplx x, cplx y) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(x)); };
    switch (a.kind) {
    case CoeffStatus::Kind::Zero: return true;
    case CoeffStatus::Kind::ForcedConstant: return a.value == b.value;
    case CoeffStatus::Kind::Free: return close(a.nu, b.nu);
    case CoeffStatus::Kind::CoupledS:
        if (!close(a.nu, b.nu) || a.exponent != b.exponent) return false;
        if (a.partners.size() != b.partners.size() || a.constants.size() != b.constants.size()) return false;
        for (std::size_t i = 0; i < a.partners.size(); ++i) {
            if (!(a.partners[i] == b.partners[i])) return false;
        }
        for (std::size_t i = 0; i < a.constants.size(); ++i) {
            if (!close(a.constants[i], b.constants[i])) return false;
        }
        return true;
    }
    return false;
}

std::vector<ComplexRational> case5_constants(const ComplexRational& mu, int p) {
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "p must be positive");
    std::vector<ComplexRational> c;
    for (int j = 0; j < p; ++j) c.push_back(ComplexRational(binomial(p, j)) * mu.pow(-j));
    return c;
}

namespace {

int boundary_value(int j, int k, int l) { return (j == 1 && k == 1 && l == 0) || (j == 2 && k == 0 && l == 1) ? 1 : 0; }

int stride_for(const HopfParams& params, const CaseTag& tag) { return params.tau().is_zero() ? tag.p : params.p(); }

// Slots of degree <= max_degree in processing order: all of j = 2 first, then
// j = 1; inside each, increasing q and descending k.
std::vector<CoeffSlot> processing_order(int max_degree, int stride) {
    std::vector<CoeffSlot> out;
    for (int j : {2, 1}) {
        std::vector<CoeffSlot> block;
        for (int deg = 0; deg <= max_degree; ++deg) {
            for (int k = 0; k <= deg; ++k) block.push_back(make_slot(j, k, deg - k, stride));
        }
        std::stable_sort(block.begin(), block.end(), [](const CoeffSlot& a, const CoeffSlot& b) {
            return std::make_tuple(a.q, -a.k, a.r) < std::make_tuple(b.q, -b.k, b.r);
        });
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

using Key = std::tuple<int, int, int>;
Key key_of(const CoeffSlot& s) { return {s.j, s.k, s.l}; }

// Truncated bivariate polynomial with exact coefficients, c[k][l].
struct ExactPoly {
    int kmax, lmax;
    std::vector<std::vector<ComplexRational>> c;
    ExactPoly(int km, int lm) : kmax(km), lmax(lm), c(km + 1, std::vector<ComplexRational>(lm + 1)) {}

    static ExactPoly one(int km, int lm) {
        ExactPoly p(km, lm);
        p.c[0][0] = ComplexRational(1);
        return p;
    }

    ExactPoly operator*(const ExactPoly& o) const {
        ExactPoly out(kmax, lmax);
        for (int a = 0; a <= kmax; ++a)
            for (int b = 0; b <= lmax; ++b) {
                if (c[a][b].is_zero()) continue;
                for (int x = 0; a + x <= kmax; ++x)
                    for (int y = 0; b + y <= lmax; ++y) {
                        if (!o.c[x][y].is_zero()) out.c[a + x][b + y] += c[a][b] * o.c[x][y];
                    }
            }
        return out;
    }
};

bool modulus_greater_than_one(const ComplexRational& z) { return z.norm2() > 1; }

CoeffStatus diagonal_rule(const ComplexRational& rho, int bv) {
    if (modulus_greater_than_one(rho)) return CoeffStatus::free(rho);
    if (rho == ComplexRational(1)) return CoeffStatus::forced(bv);
    return CoeffStatus::zero();
}

class ExactEngine {
public:
    ExactEngine(const HopfParams& params, const CaseTag& tag) : params_(params), tag_(tag) {}

    std::map<Key, CoeffStatus> run(int max_degree) {
        const int stride = params_.p();
        const ComplexRational& lambda = params_.lambda();
        const ComplexRational& mu = params_.mu();
        const ComplexRational& tau = params_.tau();
        const bool nondiagonal = !tau.is_zero();
        std::vector<CoeffSlot> coupled;
        for (const CoeffSlot& s : processing_order(max_degree, stride)) {
            const ComplexRational D = lambda.pow(s.k) * mu.pow(s.l);
            const ComplexRational m = s.j == 1 ? lambda : mu;
            const ComplexRational rho = m / D;
            const int bv = boundary_value(s.j, s.k, s.l);

            if (nondiagonal) {
                for (int i = 1; s.l - stride * i >= 0; ++i) {
                    const CoeffStatus& partner = status_.at({s.j, s.k + i, s.l - stride * i});
                    if (partner.survives()) {
                        throw Error(ErrorCode::Internal, "unexpected coupling of " + s.to_string() + " through a partner");
                    }
                }
            }
            std::vector<std::pair<int, ComplexRational>> driver; // (power of a2_00, coefficient)
            if (nondiagonal && s.j == 1) driver = symbolic_power_coefficient(s.k, s.l);

            if (driver.empty()) {
                status_[key_of(s)] = diagonal_rule(rho, bv);
                continue;
            }
            if (driver.size() != 1 || !modulus_greater_than_one(rho)) {
                throw Error(ErrorCode::Internal, "unsupported coupling pattern at " + s.to_string());
            }
            CoeffStatus st;
            st.kind = CoeffStatus::Kind::CoupledS;
            st.nu = rho.to_complex();
            st.nu_exact = rho;
            st.exponent = driver.front().first;
            ComplexRational c = tau * driver.front().second / D;
            st.partners.push_back(make_slot(2, 0, 0, stride));
            st.constants.push_back(c.to_complex());
            st.constants_exact.push_back(c);
            status_[key_of(s)] = st;
            coupled.push_back(s);
        }
        if (!coupled.empty()) {
            CoeffStatus& b = status_.at({2, 0, 0});
            std::sort(coupled.begin(), coupled.end(), [](const CoeffSlot& a, const CoeffSlot& c) { return a.l < c.l; });
            b.kind = CoeffStatus::Kind::CoupledS;
            b.exponent = 1;
            for (const CoeffSlot& s : coupled) {
                const CoeffStatus& st = status_.at(key_of(s));
                b.partners.push_back(s);
                b.constants.push_back(st.constants.front());
                b.constants_exact.push_back(st.constants_exact.front());
            }
        }
        return status_;
    }

private:
    // [xi2^p]_{kl} as a polynomial in B = a2_00 when a2_00 survives; the
    // constant (B-free) part is dropped because it cancels against the
    // boundary identity.
    std::vector<std::pair<int, ComplexRational>> symbolic_power_coefficient(int k, int l) {
        const int p = params_.p();
        ExactPoly C(k, l);
        bool b_free = false;
        for (int a = 0; a <= k; ++a)
            for (int b = 0; b <= l; ++b) {
                const CoeffStatus& st = status_.at({2, a, b});
                if (st.survives()) {
                    if (a != 0 || b != 0) {
                        throw Error(ErrorCode::Internal, "unexpected surviving slot a2_" + std::to_string(a) + "," +
                                                             std::to_string(b));
                    }
                    b_free = true;
                } else if (st.kind == CoeffStatus::Kind::ForcedConstant) {
                    C.c[a][b] = ComplexRational(st.value);
                }
            }
        std::vector<std::pair<int, ComplexRational>> out;
        if (!b_free) return out;
        std::vector<ExactPoly> powers{ExactPoly::one(k, l)};
        for (int e = 1; e <= p; ++e) powers.push_back(powers.back() * C);
        for (int e = 1; e <= p; ++e) {
            ComplexRational coeff = ComplexRational(binomial(p, e)) * powers[p - e].c[k][l];
            if (!coeff.is_zero()) out.emplace_back(e, coeff);
        }
        return out;
    }

    const HopfParams& params_;
    CaseTag tag_;
    std::map<Key, CoeffStatus> status_;
};

std::vector<std::pair<CoeffSlot, CoeffStatus>> ordered(const std::map<Key, CoeffStatus>& m, int degree, int stride) {
    std::vector<std::pair<CoeffSlot, CoeffStatus>> out;
    for (int j : {1, 2})
        for (int deg = 0; deg <= degree; ++deg)
            for (int k = 0; k <= deg; ++k) {
                out.emplace_back(make_slot(j, k, deg - k, stride), m.at({j, k, deg - k}));
            }
    return out;
}

} // namespace

CoeffStatus coefficient_status(const HopfParams& params, const CaseTag& tag, const CoeffSlot& slot) {
    if (slot.k + slot.l > kMaxSlotDegree) {
        throw Error(ErrorCode::DegreeBoundExceeded, "slot degree above " + std::to_string(kMaxSlotDegree));
    }
    if (!(classify_case(params) == tag)) throw Error(ErrorCode::CaseMismatch, "tag does not match the parameters");
    ExactEngine engine(params, tag);
    auto m = engine.run(std::max(slot.k + slot.l, tag.p + 1));
    return m.at(key_of(slot));
}

const CoeffStatus& NormalFormTable::status(int j, int k, int l) const {
    for (const auto& [s, st] : slots) {
        if (s.j == j && s.k == k && s.l == l) return st;
    }
    throw Error(ErrorCode::DegreeBoundExceeded, "slot outside the table");
}

std::vector<std::pair<CoeffSlot, CoeffStatus>> NormalFormTable::survivors() const {
    std::vector<std::pair<CoeffSlot, CoeffStatus>> out;
    for (const auto& entry : slots) {
        if (entry.second.survives()) out.push_back(entry);
    }
    return out;
}

std::string NormalFormTable::to_text() const {
    std::ostringstream os;
    os << tag.to_string() << ", degree bound " << degree << "\n";
    for (const auto& [s, st] : slots) {
        os << "  " << std::left << std::setw(10) << s.to_string() << st.to_string() << "\n";
    }
    os << "tail certified: " << (certified_tail ? "yes" : "no") << "\n";
    os << "summary: " << summary << "\n";
    return os.str();
}

std::string table_summary(const NormalFormTable& table) {
    std::vector<std::string> kernel;
    std::string quotient;
    for (const auto& [s, st] : table.survivors()) {
        if (st.kind != CoeffStatus::Kind::Free) continue;
        std::string z = "Z(" + st.nu_exact->to_string() + ")";
        if (s.j == 1) kernel.push_back(z);
        else quotient = z;
    }
    auto join = [](const std::vector<std::string>& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " x " : "") + v[i];
        return out;
    };
    switch (table.tag.kind) {
    case CaseKind::Case1: {
        kernel.push_back(quotient);
        std::string k = join(kernel);
        return "0 -> " + k + " -> Aut(R,H) = (" + k + ") x| Z_phi -> Z_phi -> 1";
    }
    case CaseKind::Case2:
    case CaseKind::Case3:
        return "0 -> K -> Aut(R,H) -> Z_phi -> 1; 0 -> " + join(kernel) + " -> K -> " + quotient + " -> 0";
    case CaseKind::Case4:
    case CaseKind::Case5: {
        const CoeffStatus& b = table.status(2, 0, 0);
        std::string s = "S(" + b.nu_exact.value_or(ComplexRational(0)).to_string();
        if (table.tag.kind == CaseKind::Case5) {
            s += "; c = (";
            for (std::size_t i = 0; i < table.constants.size(); ++i) {
                s += (i ? ", " : "") + table.constants[i].to_string();
            }
            s += ")";
        }
        s += ")";
        if (table.tag.kind == CaseKind::Case4) return "0 -> " + s + " -> Aut(R,H) = " + s + " x| Z_phi -> Z_phi -> 1";
        return "0 -> " + s + " -> Aut(R,H) -> Z_phi -> 1";
    }
    }
    return {};
}

NormalFormTable normal_form_table(const HopfParams& params, int degree) {
    CaseTag tag = classify_case(params);
    if (degree < tag.p + 1) {
        throw Error(ErrorCode::DegreeBoundExceeded, "degree bound must be at least " + std::to_string(tag.p + 1));
    }
    if (degree > kMaxSlotDegree) {
        throw Error(ErrorCode::DegreeBoundExceeded, "degree bound above " + std::to_string(kMaxSlotDegree));
    }
    ExactEngine engine(params, tag);
    auto m = engine.run(degree);
    NormalFormTable table;
    table.tag = tag;
    table.degree = degree;
    table.slots = ordered(m, degree, stride_for(params, tag));
    const CoeffStatus& b = m.at({2, 0, 0});
    if (b.kind == CoeffStatus::Kind::CoupledS) table.constants = b.constants_exact;

    bool tail = true;
    for (int k = 0; k <= degree; ++k) {
        for (int j : {1, 2}) {
            const int l = degree - k;
            ComplexRational rho = (j == 1 ? params.lambda() : params.mu()) / (params.lambda().pow(k) * params.mu().pow(l));
            if (!(rho.norm2() < 1) || table.status(j, k, l).kind != CoeffStatus::Kind::Zero) tail = false;
        }
    }
    table.certified_tail = tail;
    table.summary = table_summary(table);
    return table;
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

struct FloatPoly {
    int kmax, lmax;
    std::vector<cplx> c;
    FloatPoly(int km, int lm) : kmax(km), lmax(lm), c(static_cast<std::size_t>((km + 1) * (lm + 1)), 0.0) {}
    cplx& at(int a, int b) { return c[static_cast<std::size_t>(a * (lmax + 1) + b)]; }
    cplx at(int a, int b) const { return c[static_cast<std::size_t>(a * (lmax + 1) + b)]; }

    FloatPoly operator*(const FloatPoly& o) const {
        FloatPoly out(kmax, lmax);
        for (int a = 0; a <= kmax; ++a)
            for (int b = 0; b <= lmax; ++b) {
                cplx u = at(a, b);
                if (u == 0.0) continue;
                for (int x = 0; a + x <= kmax; ++x)
                    for (int y = 0; b + y <= lmax; ++y) out.at(a + x, b + y) += u * o.at(x, y);
            }
        return out;
    }
};

FloatPoly float_power(const FloatPoly& base, int e) {
    FloatPoly out(base.kmax, base.lmax);
    out.at(0, 0) = 1.0;
    for (int i = 0; i < e; ++i) out = out * base;
    return out;
}

class OracleEngine {
public:
    OracleEngine(const HopfParams& params, int orbit) : params_(params), orbit_(orbit) {
        lambda_ = params.lambda_c();
        mu_ = params.mu_c();
        tau_ = params.tau_c();
        p_ = params.p();
    }

    std::map<Key, CoeffStatus> run(int max_degree) {
        std::map<Key, CoeffStatus> status;
        std::vector<CoeffSlot> coupled;
        for (const CoeffSlot& s : processing_order(max_degree, p_)) {
            status[key_of(s)] = classify(s, coupled);
        }
        if (!coupled.empty()) {
            CoeffStatus& b = status.at({2, 0, 0});
            std::sort(coupled.begin(), coupled.end(), [](const CoeffSlot& a, const CoeffSlot& c) { return a.l < c.l; });
            b.kind = CoeffStatus::Kind::CoupledS;
            b.exponent = 1;
            for (const CoeffSlot& s : coupled) {
                b.partners.push_back(s);
                b.constants.push_back(status.at(key_of(s)).constants.front());
            }
        }
        return status;
    }

private:
    // Coefficient of z1^k z2^l in (lambda z1 + tau z2^p)^K (mu z2)^L.
    cplx expansion(int K, int L, int k, int l) const {
        FloatPoly first(k, l);
        if (k >= 1) first.at(1, 0) = lambda_;
        if (p_ <= l) first.at(0, p_) += tau_;
        FloatPoly second(k, l);
        if (l >= 1) second.at(0, 1) = mu_;
        FloatPoly prod = float_power(first, K) * float_power(second, L);
        return prod.at(k, l);
    }

    // [xi2^p]_{kl} along the orbit, minus its value at the boundary identity.
    std::vector<cplx> power_driver(int k, int l) const {
        std::vector<cplx> out(static_cast<std::size_t>(orbit_ + 1), 0.0);
        FloatPoly ident(k, l);
        if (l >= 1) ident.at(0, 1) = 1.0;
        const cplx base = float_power(ident, p_).at(k, l);
        for (int n = 0; n <= orbit_; ++n) {
            FloatPoly xi = ident;
            for (const auto& [key, seq] : deviation_) {
                auto [j, a, b] = key;
                if (j == 2 && a <= k && b <= l) xi.at(a, b) += seq[static_cast<std::size_t>(n)];
            }
            out[static_cast<std::size_t>(n)] = float_power(xi, p_).at(k, l) - base;
        }
        return out;
    }

    CoeffStatus classify(const CoeffSlot& s, std::vector<CoeffSlot>& coupled) {
        const int k = s.k, l = s.l;
        const cplx m = s.j == 1 ? lambda_ : mu_;
        const cplx D = expansion(k, l, k, l);
        std::vector<std::pair<Key, cplx>> partners;
        for (int K = 0; K <= k + l; ++K)
            for (int L = 0; L <= l; ++L) {
                if (K == k && L == l) continue;
                cplx coef = expansion(K, L, k, l);
                if (coef != 0.0) partners.emplace_back(Key{s.j, K, L}, coef);
            }
        std::vector<cplx> X(static_cast<std::size_t>(orbit_ + 1), 0.0);
        if (s.j == 1 && tau_ != 0.0) X = power_driver(k, l);

        // d(x_{-n-1}) = (D d(x_{-n}) + sum coef d_P(x_{-n}) - tau X(x_{-n-1})) / m
        std::vector<cplx> d(static_cast<std::size_t>(orbit_ + 1));
        d[0] = std::polar(1.0, 0.7 + 0.31 * (3 * k + 5 * l + s.j));
        bool driven = false;
        for (int n = 0; n < orbit_; ++n) {
            cplx acc = D * d[static_cast<std::size_t>(n)];
            for (const auto& [key, coef] : partners) {
                auto it = deviation_.find(key);
                if (it == deviation_.end()) continue;
                cplx v = coef * it->second[static_cast<std::size_t>(n)];
                if (v != 0.0) driven = true;
                acc += v;
            }
            cplx x = tau_ * X[static_cast<std::size_t>(n + 1)];
            if (x != 0.0) driven = true;
            d[static_cast<std::size_t>(n + 1)] = (acc - x) / m;
        }
        const double rate = std::log(std::abs(d.back()) / std::abs(d.front())) / orbit_;
        const int bv = boundary_value(s.j, k, l);

        CoeffStatus st;
        if (std::abs(rate) <= 1e-12) {
            double spread = 0.0;
            for (cplx v : d) spread = std::max(spread, std::abs(v - d.front()));
            st = spread <= 1e-9 ? CoeffStatus::forced(bv) : CoeffStatus::zero();
        } else if (rate > 1e-3) {
            st = CoeffStatus::zero();
        } else if (rate < -1e-3) {
            const cplx rho = m / D;
            if (!driven) {
                st.kind = CoeffStatus::Kind::Free;
                st.nu = d[0] / d[1];
            } else {
                st.kind = CoeffStatus::Kind::CoupledS;
                st.nu = rho;
                measure_coupling(s, X, D, st);
                coupled.push_back(s);
            }
            deviation_[key_of(s)] = d;
            return st;
        } else {
            throw Error(ErrorCode::Inconclusive, s.to_string() + " growth rate " + std::to_string(rate));
        }
        return st;
    }

    // Find e and c with tau X = c D B^e along the orbit, B = deviation of a2_00.
    void measure_coupling(const CoeffSlot& s, const std::vector<cplx>& X, cplx D, CoeffStatus& st) const {
        auto it = deviation_.find({2, 0, 0});
        if (it == deviation_.end()) throw Error(ErrorCode::Inconclusive, s.to_string() + " driven without a2_00");
        const auto& B = it->second;
        const std::size_t n1 = 1, n2 = static_cast<std::size_t>(orbit_ / 4);
        for (int e = 1; e <= p_; ++e) {
            cplx c1 = tau_ * X[n1] / (D * std::pow(B[n1], e));
            cplx c2 = tau_ * X[n2] / (D * std::pow(B[n2], e));
            if (std::abs(c1 - c2) <= 1e-9 * std::max(1.0, std::abs(c1))) {
                st.exponent = e;
                st.partners = {make_slot(2, 0, 0, p_)};
                st.constants = {c1};
                return;
            }
        }
        throw Error(ErrorCode::Inconclusive, s.to_string() + " coupling is not a power of a2_00");
    }

    const HopfParams& params_;
    int orbit_;
    cplx lambda_, mu_, tau_;
    int p_;
    std::map<Key, std::vector<cplx>> deviation_;
};

} // namespace

std::vector<std::pair<CoeffSlot, CoeffStatus>> oracle_table(const HopfParams& params, int degree, int orbit) {
    if (orbit < 8) throw Error(ErrorCode::InvalidArgument, "orbit length too short");
    if (degree < 0 || degree > kMaxSlotDegree) throw Error(ErrorCode::DegreeBoundExceeded, "bad degree bound");
    OracleEngine engine(params, orbit);
    auto m = engine.run(degree);
    return ordered(m, degree, params.p());
}

CoeffStatus oracle_status(const HopfParams& params, const CoeffSlot& slot, int orbit) {
    const int degree = std::max(slot.k + slot.l, params.p() + 1);
    for (const auto& [s, st] : oracle_table(params, degree, orbit)) {
        if (s == slot) return st;
    }
    throw Error(ErrorCode::Internal, "slot not produced by the oracle");
}

} // namespace hopfreeb
