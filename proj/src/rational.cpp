#include "knightian/rational.hpp"

#include <cctype>
#include <ostream>
#include <sstream>

#include "knightian/errors.hpp"

namespace knightian {

Rational::Rational(long num, long den) : v_(num, den) {
    if (den == 0) throw DomainError("Rational: zero denominator");
    v_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw DomainError("Rational: zero denominator");
    v_ = mpq_class(num);
    v_ /= mpq_class(den);
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw DomainError("Rational: division by zero");
    v_ /= o.v_;
    return *this;
}

mpz_class Rational::floor() const {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    return q;
}

mpz_class Rational::ceil() const {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    return q;
}

Rational Rational::parse(const std::string& text) {
    // trim whitespace
    size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    std::string s = text.substr(b, e - b);
    if (s.empty()) throw DomainError("Rational: empty string");

    auto is_int = [](const std::string& t) {
        size_t i = (t[0] == '+' || t[0] == '-') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string ns = s.substr(0, slash), ds = s.substr(slash + 1);
        if (!is_int(ns) || !is_int(ds))
            throw DomainError("Rational: malformed 'p/q' value: " + text);
        mpz_class num(ns), den(ds);
        if (den == 0) throw DomainError("Rational: zero denominator in: " + text);
        return Rational(num, den);
    }

    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (ip.empty() || ip == "+" || ip == "-") ip += "0";
        if (!is_int(ip) || (!fp.empty() && !is_int(fp)) || (!fp.empty() && (fp[0] == '+' || fp[0] == '-')))
            throw DomainError("Rational: malformed decimal value: " + text);
        mpz_class scale = 1;
        for (size_t i = 0; i < fp.size(); ++i) scale *= 10;
        mpz_class whole(ip);
        mpz_class frac = fp.empty() ? mpz_class(0) : mpz_class(fp);
        bool neg = whole < 0 || ip[0] == '-';
        mpz_class numer = ::abs(whole) * scale + frac;
        if (neg) numer = -numer;
        return Rational(numer, scale);
    }

    if (!is_int(s)) throw DomainError("Rational: malformed value: " + text);
    return Rational(mpz_class(s), mpz_class(1));
}

std::string Rational::str() const {
    if (is_integer()) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::string Rational::decimal(int significant_digits) const {
    std::ostringstream os;
    os.precision(significant_digits);
    os << to_double();
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
}

} // namespace knightian
