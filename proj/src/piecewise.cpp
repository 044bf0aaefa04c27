#include "knightian/piecewise.hpp"

#include "knightian/errors.hpp"

namespace knightian {

namespace {

Rational piece_value(const PiecewisePiece& p, const Rational& z) {
    if (p.b.is_zero()) return p.a;
    return p.a + p.b / z;
}

} // namespace

PiecewiseAllocation::PiecewiseAllocation(std::vector<PiecewisePiece> pieces)
    : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw DomainError("PiecewiseAllocation: no pieces");
    if (!pieces_.front().lo.is_zero())
        throw DomainError("PiecewiseAllocation: domain must start at 0");
    const Rational zero(0), one(1);
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const PiecewisePiece& p = pieces_[k];
        bool degenerate_first = k == 0 && p.lo == p.hi;
        if (p.lo > p.hi || (!degenerate_first && p.lo == p.hi))
            throw DomainError("PiecewiseAllocation: empty piece");
        if (k > 0 && !(pieces_[k - 1].hi == p.lo))
            throw DomainError("PiecewiseAllocation: pieces not contiguous");
        if (p.lo.is_zero() && !p.b.is_zero())
            throw DomainError("PiecewiseAllocation: 1/z term on a piece touching 0");
        // a + b/z is monotone on (lo, hi], so endpoint values bound the piece.
        Rational at_hi = piece_value(p, p.hi);
        Rational at_lo = p.lo.is_zero() ? p.a : piece_value(p, p.lo);
        if (min(at_lo, at_hi) < zero || max(at_lo, at_hi) > one)
            throw DomainError("PiecewiseAllocation: values leave [0, 1]");
    }
}

std::vector<Rational> PiecewiseAllocation::breakpoints() const {
    std::vector<Rational> out;
    for (std::size_t k = 0; k + 1 < pieces_.size(); ++k) out.push_back(pieces_[k].hi);
    return out;
}

Rational PiecewiseAllocation::value_at(const Rational& z) const {
    if (z.sign() < 0 || z > domain_end())
        throw DomainError("PiecewiseAllocation: point outside domain");
    if (z <= pieces_.front().hi) return piece_value(pieces_.front(), max(z, pieces_.front().lo));
    for (const PiecewisePiece& p : pieces_)
        if (p.lo < z && z <= p.hi) return piece_value(p, z);
    throw DomainError("PiecewiseAllocation: point not covered");
}

PriceExpression PiecewiseAllocation::integral(const Rational& lo, const Rational& hi) const {
    if (lo.sign() < 0 || hi < lo || hi > domain_end())
        throw DomainError("PiecewiseAllocation: bad integration bounds");
    PriceExpression total;
    for (const PiecewisePiece& p : pieces_) {
        Rational a = max(lo, p.lo), b = min(hi, p.hi);
        if (!(a < b)) continue;
        total += PriceExpression(p.a * (b - a));
        if (!p.b.is_zero()) total += PriceExpression::log_term(p.b, b / a);
    }
    return total;
}

} // namespace knightian
