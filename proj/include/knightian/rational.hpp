#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <string>

namespace knightian {

// Exact rational scalar. All bids, valuations, inaccuracies and allocation
// probabilities in the library are Rationals; nothing is ever rounded.
//
// Thin wrapper over GMP's mpq_class that guarantees the canonical form
// (coprime numerator/denominator, denominator > 0) on every construction
// path and adds the "p/q" parsing/formatting conventions shared by the CLI
// and the JSON interfaces.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(int n) : v_(n) {}                 // NOLINT: implicit by design
    Rational(long n) : v_(static_cast<long>(n)) {}
    Rational(long num, long den);
    Rational(const mpz_class& num, const mpz_class& den);
    explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

    // Accepts "p/q", plain integers, and decimal strings ("0.05" -> 1/20).
    // Throws DomainError on malformed input or a zero denominator.
    static Rational parse(const std::string& text);

    // "p/q", or just "p" when the denominator is 1.
    std::string str() const;

    // Decimal rendering with the given number of significant digits
    // (used by the CSV sweep; not exact).
    std::string decimal(int significant_digits) const;

    double to_double() const { return v_.get_d(); }

    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }
    bool is_integer() const { return v_.get_den() == 1; }
    bool is_zero() const { return sgn(v_) == 0; }
    int sign() const { return sgn(v_); }

    mpz_class floor() const;
    mpz_class ceil() const;
    long floor_long() const { return static_cast<long>(floor().get_si()); }
    long ceil_long() const { return static_cast<long>(ceil().get_si()); }

    const mpq_class& raw() const { return v_; }

    Rational operator-() const { return Rational(mpq_class(-v_)); }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r);

private:
    mpq_class v_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

} // namespace knightian
