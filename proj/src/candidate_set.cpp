#include "knightian/candidate_set.hpp"

#include <algorithm>

#include "knightian/errors.hpp"

namespace knightian {

CandidateSet::CandidateSet(std::vector<long> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("CandidateSet: empty");
    std::sort(values_.begin(), values_.end());
    values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
    if (values_.front() < 0) throw DomainError("CandidateSet: negative value");
}

CandidateSet CandidateSet::interval(long lo, long hi) {
    if (lo > hi) throw DomainError("CandidateSet: empty interval");
    std::vector<long> vs;
    vs.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long v = lo; v <= hi; ++v) vs.push_back(v);
    return CandidateSet(std::move(vs));
}

bool CandidateSet::contains(long v) const {
    return std::binary_search(values_.begin(), values_.end(), v);
}

bool CandidateSet::is_interval() const {
    return max() - min() + 1 == static_cast<long>(values_.size());
}

Rational inaccuracy(const CandidateSet& K) {
    long lo = K.min(), hi = K.max();
    if (lo + hi == 0) return Rational(0);
    return Rational(hi - lo, hi + lo);
}

CandidateSet delta_interval(const Rational& x, const Rational& delta, long B) {
    if (delta <= Rational(0) || delta >= Rational(1))
        throw DomainError("delta_interval: delta must lie in (0,1), got " + delta.str());
    if (x < Rational(0)) throw DomainError("delta_interval: negative center");
    if (B < 1) throw DomainError("delta_interval: B must be positive");

    long lo = ((Rational(1) - delta) * x).ceil_long();
    long hi = ((Rational(1) + delta) * x).floor_long();
    if (lo < 0) lo = 0;
    if (hi > B) hi = B;
    if (lo > hi)
        throw EmptyInterval("delta_interval: no integer in [(1-d)x,(1+d)x] cap [0,B] for x=" +
                            x.str() + ", delta=" + delta.str());
    return CandidateSet::interval(lo, hi);
}

} // namespace knightian
