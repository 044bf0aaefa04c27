#pragma once

#include <optional>
#include <string>
#include <vector>

#include "knightian/candidate_set.hpp"
#include "knightian/rational.hpp"

namespace knightian {

// Result of running a deterministic mechanism: either some player wins the
// good or it stays unallocated. Player indices are 0-based internally; the
// CLI prints them 1-based.
struct Outcome {
    std::optional<int> winner;
    std::vector<Rational> prices;
};

// Per-player win probabilities of a randomized (or tabulated) mechanism.
struct AllocationVector {
    std::vector<Rational> probs;
};

// Throws DomainError unless every entry is in [0,1] and the sum is <= 1.
void validate_allocation(const AllocationVector& a);

// A full auction instance: n players with valuations bounded by B, a global
// inaccuracy delta, candidate sets K, and the true valuations theta that the
// mechanism never sees (only welfare evaluation reads them).
struct Context {
    int n = 0;
    long B = 0;
    Rational delta;
    std::vector<CandidateSet> K;
    std::vector<long> theta;
};

// theta[winner], or 0 when unallocated.
Rational social_welfare(const std::vector<long>& theta, const Outcome& outcome);

// max_i theta[i].
Rational max_social_welfare(const std::vector<long>& theta);

// Expected welfare sum_i probs[i] * theta[i].
Rational expected_social_welfare(const std::vector<long>& theta, const AllocationVector& a);

// Empty iff the context is well-formed: sizes match, delta in (0,1),
// values within [0,B], theta_i in K_i, inaccuracy(K_i) <= delta.
// Each violation names the offending player and condition.
std::vector<std::string> validate_context(const Context& c);

} // namespace knightian
