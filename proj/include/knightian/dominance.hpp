#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "knightian/candidate_set.hpp"
#include "knightian/finite_mechanism.hpp"
#include "knightian/rational.hpp"

namespace knightian {

// Mixed strategy over one player's pure strategies: positive weights only,
// strategies ascending, weights summing to exactly 1.
struct MixedStrategy {
    std::vector<std::pair<int, Rational>> weights;
    static MixedStrategy pure(int s) { return {{{s, Rational(1)}}}; }
    bool is_pure() const { return weights.size() == 1; }
};

void validate_mixed(const MixedStrategy& sigma, int strategy_count);

// Expected utility of player i with valuation theta playing sigma while the
// opponents play the pure subprofile t_others (opponents in increasing
// player order).
PriceExpression expected_utility(const FiniteMechanism& M, std::size_t i, long theta,
                                 const MixedStrategy& sigma,
                                 const std::vector<int>& t_others);

struct DominanceWitness {
    long theta;
    std::vector<int> t_others;
};

struct DominanceResult {
    enum class Verdict { Holds, Fails };
    Verdict verdict;
    // For a very-weak failure: a (theta, opponents) pair where sigma does
    // strictly worse. A weak-dominance failure with very-weak dominance
    // intact (no strict pair anywhere) carries no witness.
    std::optional<DominanceWitness> witness;
    // True when a log-valued price comparison needed interval refinement.
    bool used_intervals = false;
};

// sigma very-weakly dominates s for every theta in K and every opponent
// profile. Utilities are affine in theta, so only the endpoints of K are
// checked (the reduction is property-tested against full scans). Throws
// UndecidableAtPrecision if a comparison cannot be settled at the cap.
DominanceResult very_weakly_dominates(const FiniteMechanism& M, std::size_t i,
                                      const CandidateSet& K, const MixedStrategy& sigma,
                                      int s);

// Very-weak dominance plus some strictly better (theta, opponents) pair.
DominanceResult weakly_dominates(const FiniteMechanism& M, std::size_t i,
                                 const CandidateSet& K, const MixedStrategy& sigma,
                                 int s);

// Searches for a mixed strategy weakly dominating s. Rational price tables
// use one exact LP: weights over the other strategies, very-weak dominance
// rows per (theta endpoint, opponent profile), one capped slack per row,
// maximize total slack; dominated iff the optimum is positive. Log-valued
// tables replace each advantage coefficient by a directed lower bound
// (exact for advantages that cancel to a rational) at doubling precision;
// any certificate found is re-verified exactly before being returned.
std::optional<MixedStrategy> mixed_dominator(const FiniteMechanism& M, std::size_t i,
                                             const CandidateSet& K, int s);

struct UdedResult {
    std::vector<int> strategies;
    // Parallel to strategies: true when the retention is certified (no
    // dominator exists), false when kept conservatively because interval
    // bounds could not settle the question at the precision cap.
    std::vector<bool> certified;
    bool exact = true; // every retention certified
};

// Undominated pure strategies. Rational tables: exact per-strategy LP over
// the full strategy space. Log-valued bid tables: strategies outside the
// interval box [min K - (d-1), max K + (d-1)] (d = declared
// distinguishability degree) are excluded up front, and the box interior is
// settled by paired pessimistic/optimistic LPs with exact re-verification.
UdedResult uded_detail(const FiniteMechanism& M, std::size_t i, const CandidateSet& K);
std::vector<int> uded(const FiniteMechanism& M, std::size_t i, const CandidateSet& K);

// Pure strategies that very-weakly dominate every pure alternative. A
// comparison that stays undecided at the precision cap disqualifies the
// strategy (conservatively small set).
std::vector<int> dnt(const FiniteMechanism& M, std::size_t i, const CandidateSet& K);

struct ProbeResult {
    Rational epsilon; // minimal worst-case allocation gap
    MixedStrategy sigma;
    MixedStrategy sigma_prime;
    std::vector<int> uded_first;
    std::vector<int> uded_second;
};

// Minimizes, over sigma supported on uded(K) and sigma' on uded(K'), the
// largest absolute difference of player i's win probability across all
// opponent profiles. Allocations are rational, so the LP is exact; when a
// log-priced mechanism retained strategies conservatively the feasible
// supports are supersets and the reported minimum is a lower bound.
// Requires |K intersect K'| >= 2.
ProbeResult intersection_probe(const FiniteMechanism& M, std::size_t i,
                               const CandidateSet& K, const CandidateSet& K_prime);

} // namespace knightian
