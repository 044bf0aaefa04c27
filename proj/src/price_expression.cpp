#include "knightian/price_expression.hpp"

#include <mpfr.h>

#include <cstdlib>
#include <sstream>

#include "knightian/errors.hpp"

namespace knightian {

namespace {

// Trial division bound. A cofactor with no factor below this bound is
// certainly prime as long as it is below the square of the bound.
const unsigned long kTrialBound = 1000000;

} // namespace

unsigned precision_cap_bits() {
    const char* s = std::getenv("KNIGHTIAN_PREC_BITS");
    if (s == nullptr || *s == '\0') return 256;
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end == nullptr || *end != '\0' || v < 16 || v > 100000000)
        throw DomainError("KNIGHTIAN_PREC_BITS must be an integer in [16, 1e8]");
    return static_cast<unsigned>(v);
}

void PriceExpression::add_log(const mpz_class& atom, const Rational& coeff) {
    if (coeff.is_zero()) return;
    auto it = logs_.find(atom);
    if (it == logs_.end()) {
        logs_.emplace(atom, coeff);
    } else {
        it->second += coeff;
        if (it->second.is_zero()) logs_.erase(it);
    }
}

void PriceExpression::add_integer_log(mpz_class value, const Rational& coeff) {
    // value >= 1; peel prime factors by trial division.
    if (coeff.is_zero()) return;
    for (unsigned long p = 2; p <= kTrialBound && value > 1; p = (p == 2 ? 3 : p + 2)) {
        if (mpz_divisible_ui_p(value.get_mpz_t(), p)) {
            unsigned long e = 0;
            while (mpz_divisible_ui_p(value.get_mpz_t(), p)) {
                mpz_divexact_ui(value.get_mpz_t(), value.get_mpz_t(), p);
                ++e;
            }
            add_log(mpz_class(p), coeff * Rational(static_cast<long>(e)));
        }
        // Stop early once the remaining cofactor must be prime.
        if (value > 1 && mpz_cmp_ui(value.get_mpz_t(), p * p) < 0) break;
    }
    if (value > 1) {
        mpz_class bound_sq(kTrialBound);
        bound_sq *= kTrialBound;
        bool certainly_prime = value <= bound_sq;
        if (!certainly_prime)
            certainly_prime = mpz_probab_prime_p(value.get_mpz_t(), 40) == 2;
        if (!certainly_prime) canonical_ = false;
        add_log(value, coeff);
    }
}

PriceExpression PriceExpression::log_term(const Rational& coeff, const Rational& arg) {
    if (arg.sign() <= 0) throw DomainError("log_term: argument must be positive");
    PriceExpression e;
    e.add_integer_log(arg.num(), coeff);
    e.add_integer_log(arg.den(), -coeff);
    return e;
}

std::vector<std::pair<Rational, mpz_class>> PriceExpression::log_terms() const {
    std::vector<std::pair<Rational, mpz_class>> out;
    out.reserve(logs_.size());
    for (const auto& [atom, coeff] : logs_) out.emplace_back(coeff, atom);
    return out;
}

std::optional<Rational> PriceExpression::as_rational() const {
    if (!logs_.empty()) return std::nullopt;
    return rat_;
}

PriceExpression& PriceExpression::operator+=(const PriceExpression& o) {
    rat_ += o.rat_;
    canonical_ = canonical_ && o.canonical_;
    for (const auto& [atom, coeff] : o.logs_) add_log(atom, coeff);
    return *this;
}

PriceExpression& PriceExpression::operator-=(const PriceExpression& o) {
    rat_ -= o.rat_;
    canonical_ = canonical_ && o.canonical_;
    for (const auto& [atom, coeff] : o.logs_) add_log(atom, -coeff);
    return *this;
}

PriceExpression& PriceExpression::operator*=(const Rational& c) {
    if (c.is_zero()) {
        rat_ = Rational(0);
        logs_.clear();
        canonical_ = true;
        return *this;
    }
    rat_ *= c;
    for (auto& [atom, coeff] : logs_) coeff *= c;
    return *this;
}

PriceExpression& PriceExpression::operator/=(const Rational& c) {
    if (c.is_zero()) throw DomainError("PriceExpression: division by zero");
    rat_ /= c;
    for (auto& [atom, coeff] : logs_) coeff /= c;
    return *this;
}

PriceExpression PriceExpression::operator-() const {
    PriceExpression e(*this);
    e *= Rational(-1);
    return e;
}

std::pair<Rational, Rational> PriceExpression::interval(unsigned bits) const {
    if (logs_.empty()) return {rat_, rat_};

    // Target absolute width 2^-bits. Work at increasing precision until the
    // directed-rounding enclosure is tight enough.
    mpz_class width_den = 1;
    mpz_mul_2exp(width_den.get_mpz_t(), width_den.get_mpz_t(), bits);
    Rational target(mpz_class(1), width_den);

    unsigned work = bits + 64;
    for (;; work *= 2) {
        mpfr_t lo, hi, ln_lo, ln_hi, t;
        mpfr_inits2(work, lo, hi, ln_lo, ln_hi, t, static_cast<mpfr_ptr>(nullptr));

        mpfr_set_q(lo, rat_.raw().get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(hi, rat_.raw().get_mpq_t(), MPFR_RNDU);
        for (const auto& [atom, coeff] : logs_) {
            // atom >= 2 so ln(atom) > 0; rounding of the set is exact for
            // atoms below the precision but directed anyway.
            mpfr_set_z(t, atom.get_mpz_t(), MPFR_RNDD);
            mpfr_log(ln_lo, t, MPFR_RNDD);
            mpfr_set_z(t, atom.get_mpz_t(), MPFR_RNDU);
            mpfr_log(ln_hi, t, MPFR_RNDU);
            const mpq_srcptr q = coeff.raw().get_mpq_t();
            if (coeff.sign() > 0) {
                mpfr_mul_q(ln_lo, ln_lo, q, MPFR_RNDD);
                mpfr_mul_q(ln_hi, ln_hi, q, MPFR_RNDU);
                mpfr_add(lo, lo, ln_lo, MPFR_RNDD);
                mpfr_add(hi, hi, ln_hi, MPFR_RNDU);
            } else {
                // Negative coefficient swaps which endpoint bounds below.
                mpfr_mul_q(ln_hi, ln_hi, q, MPFR_RNDD);
                mpfr_mul_q(ln_lo, ln_lo, q, MPFR_RNDU);
                mpfr_add(lo, lo, ln_hi, MPFR_RNDD);
                mpfr_add(hi, hi, ln_lo, MPFR_RNDU);
            }
        }

        mpq_class qlo, qhi;
        mpfr_get_q(qlo.get_mpq_t(), lo);
        mpfr_get_q(qhi.get_mpq_t(), hi);
        mpfr_clears(lo, hi, ln_lo, ln_hi, t, static_cast<mpfr_ptr>(nullptr));

        Rational rlo(qlo), rhi(qhi);
        if (rhi - rlo <= target) return {rlo, rhi};
    }
}

int PriceExpression::sign(unsigned cap_bits) const {
    if (logs_.empty()) return rat_.sign();
    // Nonempty canonical log part: the value is irrational, in particular
    // nonzero, so refinement is guaranteed to separate it eventually; the
    // cap still bounds the work we are willing to do.
    for (unsigned bits = 64;; bits *= 2) {
        if (bits > cap_bits) bits = cap_bits;
        auto [lo, hi] = interval(bits);
        if (lo.sign() > 0) return 1;
        if (hi.sign() < 0) return -1;
        if (bits == cap_bits) break;
    }
    throw UndecidableAtPrecision("sign undecided at " + std::to_string(cap_bits) + " bits: " + str());
}

int PriceExpression::sign() const { return sign(precision_cap_bits()); }

double PriceExpression::to_double() const {
    if (logs_.empty()) return rat_.to_double();
    auto [lo, hi] = interval(64);
    return ((lo + hi) / Rational(2)).to_double();
}

std::string PriceExpression::str() const {
    std::ostringstream os;
    bool first = true;
    if (!rat_.is_zero() || logs_.empty()) {
        os << rat_.str();
        first = false;
    }
    for (const auto& [atom, coeff] : logs_) {
        if (first) {
            if (coeff.sign() < 0) os << "-";
            first = false;
        } else {
            os << (coeff.sign() < 0 ? " - " : " + ");
        }
        Rational a = abs(coeff);
        if (!(a == Rational(1))) os << a.str() << "*";
        os << "ln(" << atom.get_str() << ")";
    }
    return os.str();
}

int compare(const PriceExpression& a, const PriceExpression& b) {
    return (a - b).sign();
}

} // namespace knightian
