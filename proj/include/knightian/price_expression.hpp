#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "knightian/rational.hpp"

namespace knightian {

// Exact value of the form
//
//     rational_part + sum_k coeff_k * ln(atom_k)
//
// where the atoms are integers >= 2. Payments of the optimal mechanism are
// sums of this shape (integrating a + b/z pieces produces b*ln(hi/lo)), and
// dominance comparisons need reliable sign decisions on differences of them,
// so the representation is kept exact end to end.
//
// On construction every log argument is factored over the integers: ln(p/q)
// splits into logs of the prime factors of p and q. Logarithms of distinct
// primes are linearly independent over the rationals, so after this
// canonicalization the expression equals zero iff the rational part is zero
// and no log terms remain — making the zero case exactly decidable. Nonzero
// values are signed by interval refinement (MPFR with directed rounding) at
// doubling precision up to a cap; arguments too large to factor drop the
// zero-detection guarantee but keep interval soundness.
class PriceExpression {
public:
    PriceExpression() = default;
    PriceExpression(Rational rational_part) : rat_(std::move(rational_part)) {}
    PriceExpression(long v) : rat_(v) {}

    // coeff * ln(arg); requires arg > 0.
    static PriceExpression log_term(const Rational& coeff, const Rational& arg);

    const Rational& rational_part() const { return rat_; }
    // (coefficient, atom) pairs, atoms ascending. Atoms are integers >= 2,
    // prime whenever factorization succeeded.
    std::vector<std::pair<Rational, mpz_class>> log_terms() const;

    bool is_rational() const { return logs_.empty(); }
    std::optional<Rational> as_rational() const;

    PriceExpression& operator+=(const PriceExpression& o);
    PriceExpression& operator-=(const PriceExpression& o);
    PriceExpression& operator*=(const Rational& c); // scale
    PriceExpression& operator/=(const Rational& c);

    friend PriceExpression operator+(PriceExpression a, const PriceExpression& b) { return a += b; }
    friend PriceExpression operator-(PriceExpression a, const PriceExpression& b) { return a -= b; }
    friend PriceExpression operator*(PriceExpression a, const Rational& c) { return a *= c; }
    friend PriceExpression operator*(const Rational& c, PriceExpression a) { return a *= c; }
    friend PriceExpression operator/(PriceExpression a, const Rational& c) { return a /= c; }
    PriceExpression operator-() const;

    // Canonical-form equality (same rational part, same log terms).
    friend bool operator==(const PriceExpression& a, const PriceExpression& b) {
        return a.rat_ == b.rat_ && a.logs_ == b.logs_;
    }
    friend bool operator!=(const PriceExpression& a, const PriceExpression& b) { return !(a == b); }

    // Enclosure [lo, hi] of the exact value with hi - lo <= 2^-bits.
    std::pair<Rational, Rational> interval(unsigned bits) const;

    // -1, 0 or +1. Throws UndecidableAtPrecision if interval refinement up
    // to cap_bits cannot separate the value from zero (never happens for
    // values this library produces at desk scale, but the cap is honored).
    int sign(unsigned cap_bits) const;
    int sign() const; // cap from KNIGHTIAN_PREC_BITS (default 256)

    double to_double() const;
    std::string str() const;

private:
    struct MpzLess {
        bool operator()(const mpz_class& a, const mpz_class& b) const { return a < b; }
    };

    void add_log(const mpz_class& atom, const Rational& coeff);
    void add_integer_log(mpz_class value, const Rational& coeff); // factors value

    Rational rat_;
    std::map<mpz_class, Rational, MpzLess> logs_;
    bool canonical_ = true; // every atom proven prime
};

// Sign of a - b under the same contract as PriceExpression::sign.
int compare(const PriceExpression& a, const PriceExpression& b);

// Precision cap in bits used by sign decisions: KNIGHTIAN_PREC_BITS when the
// environment variable is set, otherwise 256.
unsigned precision_cap_bits();

} // namespace knightian
