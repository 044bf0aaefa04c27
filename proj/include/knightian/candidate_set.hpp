#pragma once

#include <vector>

#include "knightian/rational.hpp"

namespace knightian {

// A candidate-valuation set: the finite set of integers a player knows
// contains their true valuation. Values are kept sorted and unique.
class CandidateSet {
public:
    explicit CandidateSet(std::vector<long> values);

    // The contiguous set {lo, lo+1, ..., hi}.
    static CandidateSet interval(long lo, long hi);

    long min() const { return values_.front(); }
    long max() const { return values_.back(); }
    std::size_t size() const { return values_.size(); }
    bool contains(long v) const;
    bool is_interval() const;

    const std::vector<long>& values() const { return values_; }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    friend bool operator==(const CandidateSet& a, const CandidateSet& b) {
        return a.values_ == b.values_;
    }

private:
    std::vector<long> values_; // sorted, unique, nonempty, all >= 0
};

// (max-min)/(max+min); defined as 0 for K={0}.
Rational inaccuracy(const CandidateSet& K);

// The integers z with (1-delta)x <= z <= (1+delta)x and 0 <= z <= B.
// Throws EmptyInterval when no such integer exists, and DomainError when
// delta is outside (0,1) or x < 0.
CandidateSet delta_interval(const Rational& x, const Rational& delta, long B);

} // namespace knightian
