#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>

namespace hopfreeb {

/// Exact Gaussian rational re + i*im over arbitrary-precision rationals.
class ComplexRational {
public:
    ComplexRational() = default;
    ComplexRational(long re) : re_(re), im_(0) {}
    ComplexRational(mpq_class re, mpq_class im = 0);

    /// Parses "a/b" (or "a") strings for each component; throws ConfigError.
    static ComplexRational parse(const std::string& re, const std::string& im);

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }

    ComplexRational conj() const { return {re_, -im_}; }
    /// |z|^2, exact.
    mpq_class norm2() const { return re_ * re_ + im_ * im_; }
    ComplexRational pow(int n) const;

    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    /// Canonical text: "5", "1/2", "2+i", "-3/4i", "1-2i".
    std::string to_string() const;
    /// Component strings "num/den" as used by the JSON parameter block.
    std::string re_string() const;
    std::string im_string() const;

    ComplexRational& operator+=(const ComplexRational& o);
    ComplexRational& operator-=(const ComplexRational& o);
    ComplexRational& operator*=(const ComplexRational& o);
    ComplexRational& operator/=(const ComplexRational& o);

    friend ComplexRational operator+(ComplexRational a, const ComplexRational& b) { return a += b; }
    friend ComplexRational operator-(ComplexRational a, const ComplexRational& b) { return a -= b; }
    friend ComplexRational operator*(ComplexRational a, const ComplexRational& b) { return a *= b; }
    friend ComplexRational operator/(ComplexRational a, const ComplexRational& b) { return a /= b; }
    friend ComplexRational operator-(const ComplexRational& a) { return {-a.re_, -a.im_}; }
    friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

mpq_class binomial(int n, int k);

} // namespace hopfreeb
