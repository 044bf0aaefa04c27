#pragma once

#include <vector>

#include "knightian/price_expression.hpp"
#include "knightian/rational.hpp"

namespace knightian {

// One piece of an own-bid slice of an allocation function: on (lo, hi] the
// win probability is a + b/z. Pieces that start at zero must have b == 0.
struct PiecewisePiece {
    Rational lo;
    Rational hi;
    Rational a;
    Rational b;
};

// A player's win probability as a function of their own bid z, with the
// other bids held fixed: finitely many pieces of the form a + b/z covering
// [0, domain_end]. The first piece may be the degenerate point [0, 0].
//
// This is the integration view of the slice. Where the underlying function
// jumps (second-price ties), the value at the breakpoint itself may differ
// from the pointwise allocation; integrals are unaffected.
class PiecewiseAllocation {
public:
    // Pieces must be contiguous from 0, with values staying inside [0, 1].
    explicit PiecewiseAllocation(std::vector<PiecewisePiece> pieces);

    const std::vector<PiecewisePiece>& pieces() const { return pieces_; }
    Rational domain_end() const { return pieces_.back().hi; }

    // Interior piece boundaries, ascending (excludes 0 and domain_end).
    std::vector<Rational> breakpoints() const;

    // Value of the piece covering z (the piece with lo < z <= hi; z == 0
    // falls in the first piece).
    Rational value_at(const Rational& z) const;

    // Exact integral over [lo, hi], 0 <= lo <= hi <= domain_end. The 1/z
    // parts contribute logarithms.
    PriceExpression integral(const Rational& lo, const Rational& hi) const;

private:
    std::vector<PiecewisePiece> pieces_;
};

} // namespace knightian
