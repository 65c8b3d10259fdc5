#include "hopfreeb/complex_rational.hpp"

#include "hopfreeb/error.hpp"

#include <cctype>

namespace hopfreeb {

namespace {

mpq_class parse_rational(const std::string& text) {
    std::string s;
    for (char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    }
    auto slash = s.find('/');
    auto is_int = [](const std::string& t) {
        if (t.empty()) return false;
        std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        }
        return true;
    };
    auto strip_plus = [](std::string t) { return (!t.empty() && t[0] == '+') ? t.substr(1) : t; };
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!is_int(num) || !is_int(den) || den[0] == '-' || den[0] == '+') {
        throw Error(ErrorCode::ConfigError, "malformed rational '" + text + "'");
    }
    mpz_class n(strip_plus(num)), d(den);
    if (d == 0) throw Error(ErrorCode::ConfigError, "zero denominator in '" + text + "'");
    mpq_class q(n, d);
    q.canonicalize();
    return q;
}

std::string rational_text(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

} // namespace

ComplexRational::ComplexRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
}

ComplexRational ComplexRational::parse(const std::string& re, const std::string& im) {
    return {parse_rational(re), parse_rational(im)};
}

ComplexRational ComplexRational::pow(int n) const {
    if (n < 0) return ComplexRational(1) / pow(-n);
    ComplexRational result(1), base = *this;
    while (n > 0) {
        if (n & 1) result *= base;
        base *= base;
        n >>= 1;
    }
    return result;
}

std::string ComplexRational::to_string() const {
    if (sgn(im_) == 0) return rational_text(re_);
    std::string imag;
    mpq_class mag = abs(im_);
    imag = (mag == 1) ? "i" : rational_text(mag) + "i";
    if (sgn(re_) == 0) return (sgn(im_) < 0 ? "-" : "") + imag;
    return rational_text(re_) + (sgn(im_) < 0 ? "-" : "+") + imag;
}

std::string ComplexRational::re_string() const {
    return re_.get_num().get_str() + "/" + re_.get_den().get_str();
}

std::string ComplexRational::im_string() const {
    return im_.get_num().get_str() + "/" + im_.get_den().get_str();
}

ComplexRational& ComplexRational::operator+=(const ComplexRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

ComplexRational& ComplexRational::operator-=(const ComplexRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

ComplexRational& ComplexRational::operator*=(const ComplexRational& o) {
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = r;
    im_ = i;
    return *this;
}

ComplexRational& ComplexRational::operator/=(const ComplexRational& o) {
    mpq_class n = o.norm2();
    if (sgn(n) == 0) throw Error(ErrorCode::InvalidArgument, "division by zero Gaussian rational");
    *this *= o.conj();
    re_ /= n;
    im_ /= n;
    return *this;
}

mpq_class binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return mpq_class(r);
}

} // namespace hopfreeb
