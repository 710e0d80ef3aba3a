#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace hzeta {

/**
 * Arbitrary-precision rational number, always kept in lowest terms with a
 * positive denominator.  Thin value wrapper over GMP's mpq_class that
 * canonicalizes on every construction, so the reduced-form invariant can be
 * assumed everywhere else in the library.
 */
class Rational {
  public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}                 // NOLINT(google-explicit-constructor)
    Rational(long num, long den) : v_(num, den) { canon(); }
    Rational(const mpz_class& num, const mpz_class& den) : v_(num, den) { canon(); }
    explicit Rational(const mpz_class& n) : v_(n) {}
    explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }

    /// Parse "n", "-n", or "n/d".  Throws std::invalid_argument on garbage.
    static Rational parse(const std::string& text);

    const mpz_class& num() const { return v_.get_num(); }
    const mpz_class& den() const { return v_.get_den(); }
    const mpq_class& raw() const { return v_; }

    bool is_zero() const { return v_ == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }
    double to_double() const { return v_.get_d(); }
    std::string str() const;

    Rational inverse() const;
    Rational abs() const { return Rational(mpq_class(::abs(v_))); }
    /// Integer power, negative exponents allowed for nonzero values.
    Rational pow(long e) const;

    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ + b.v_)); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ - b.v_)); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ * b.v_)); }
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& b) { v_ += b.v_; return *this; }
    Rational& operator-=(const Rational& b) { v_ -= b.v_; return *this; }
    Rational& operator*=(const Rational& b) { v_ *= b.v_; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    friend std::ostream& operator<<(std::ostream& os, const Rational& q);

  private:
    void canon() {
        if (v_.get_den() == 0) throw std::domain_error("Rational: zero denominator");
        v_.canonicalize();
    }
    mpq_class v_;
};

}  // namespace hzeta
