#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "knightian/context.hpp"
#include "knightian/dominance.hpp"
#include "knightian/finite_mechanism.hpp"
#include "knightian/rational.hpp"

namespace knightian {

// Worst-case welfare guarantees as a fraction of the maximum: random
// assignment, second price with deterministic ties, and the aggressive
// mechanism.
struct BoundCurves {
    Rational random;       // 1/n
    Rational second_price; // ((1-delta)/(1+delta))^2
    Rational opt;          // ((1-delta)^2 + 4 delta/n) / (1+delta)^2
};

BoundCurves bound_curves(int n, const Rational& delta);

struct RationalInterval {
    Rational lo, hi;
};

// Solves ((1-delta)/(1+delta))^2 = 1/n for delta in (0,1): the point where
// second price stops beating random assignment. Exact when n is a perfect
// square (delta = (sqrt(n)-1)/(sqrt(n)+1)), otherwise a bisection enclosure
// no wider than max_width. Requires n >= 2.
RationalInterval crossover_delta(int n, const Rational& max_width = Rational(1, 100000));

// All integer intervals {lo..hi} within [0, B] whose inaccuracy is at most
// delta, and iteration over profiles of them.
class ContextEnumerator {
public:
    ContextEnumerator(int n, long B, const Rational& delta);

    int players() const { return n_; }
    long bound() const { return B_; }
    const Rational& delta() const { return delta_; }

    const std::vector<std::pair<long, long>>& intervals() const { return intervals_; }
    CandidateSet interval_set(std::size_t idx) const;
    std::optional<std::size_t> find_interval(long lo, long hi) const;

    // Number of candidate-profile choices (intervals^players).
    unsigned long long profile_count() const;
    // Number of (K profile, theta profile) pairs: (sum of interval sizes)^n.
    unsigned long long context_count() const;

    // Visits every K profile as a tuple of interval indices in row-major
    // ascending order; stops early if fn returns false.
    void for_each_profile(const std::function<bool(const std::vector<std::size_t>&)>& fn) const;

private:
    int n_;
    long B_;
    Rational delta_;
    std::vector<std::pair<long, long>> intervals_;
};

struct RatioReport {
    Rational ratio;
    Context witness_context;
    std::vector<int> witness_profile; // bids, one per player
    std::string mechanism_id;
    // The witness strategies were certified undominated (always true for
    // rational price tables).
    bool witness_certified = true;
    // Some undominated set was retained conservatively along the way.
    bool conservative_uded = false;
};

// Minimum of expected social welfare over maximum social welfare across
// every enumerated context (skipping all-zero valuations) and every profile
// of undominated bids. Tabulated bid mechanism required.
RatioReport worst_case_ratio(const FiniteMechanism& M, int n, long B, const Rational& delta,
                             unsigned long long budget = 200000000ULL);

// Same minimization with the context fixed.
struct ContextRatio {
    Rational ratio;
    std::vector<int> witness_profile;
    bool witness_certified = true;
    bool conservative_uded = false;
};
ContextRatio context_worst_ratio(const FiniteMechanism& M, const Context& ctx);

// Adversarial context for the upper-bound theorems: one player centered at
// x = B/(1+delta) (so the top valuation is exactly B) and the rest at the
// interlocking lower center y. Requires n >= 2 and B >= 5/delta.
Context theorem35_construction(int n, long B, const Rational& delta);

// Adversarial context pair for the direct-revelation bound: all players at
// center c = floor((3-delta)/(2delta)) + 1, versus one player raised to B.
struct Theorem1Construction {
    long c;
    Rational bound; // 1/n + c/B
    Context hat_context;
    Context main_context;
};
Theorem1Construction theorem1_construction(int n, long B, const Rational& delta);

// A direct mechanism: every player reports one of the qualifying intervals
// (strategy j = reports[j]), and the table gives allocation and prices per
// report profile.
struct DirectMechanism {
    FiniteMechanism table;
    std::vector<std::pair<long, long>> reports;
};

// Ignores reports, assigns uniformly, charges nothing.
DirectMechanism naive_direct_mechanism(int n, long B, const Rational& delta);
// Runs second price (lexicographic) on the report midpoints.
DirectMechanism midpoint_second_price_direct(int n, long B, const Rational& delta);

struct TruthWitness {
    std::size_t player;
    std::size_t true_report; // report index whose interval is the real candidate set
    std::size_t lie;
    long theta;
    std::vector<int> t_others;
};

// Searches for a profitable misreport: a player, a true interval, a lie, a
// valuation in the true interval and an opponent report profile where the
// lie strictly beats the truthful report. Returns the first violation, or
// nullopt when truthful reporting is very-weakly dominant for every true
// interval.
std::optional<TruthWitness> check_truthful(const DirectMechanism& M);

struct InvarianceWitness {
    std::size_t player;
    long x; // adjacent centers x, x+1 whose reports changed the allocation
    std::vector<int> t_others;
};

struct AuditReport {
    bool truthful = true;
    bool invariance_holds = true;
    std::optional<InvarianceWitness> invariance_witness;
    long c;
    Rational bound;  // 1/n + c/B
    Rational ratio;  // expected welfare share on the adversarial context
    bool within_bound = true;
};

// Verifies that the direct mechanism is truthful (throws NotTruthful with a
// witness otherwise), checks that adjacent-center reports leave the
// allocation unchanged on the relevant range, and evaluates the welfare
// share on the adversarial context against the bound.
AuditReport theorem1_audit(const DirectMechanism& M, int n, long B, const Rational& delta);

enum class PositiveTheorem {
    SecondPriceLex,     // welfare >= ((1-d)/(1+d))^2 MSW - 2 (1-d)/(1+d)
    SecondPriceUniform, // expected welfare >= ((1-d)/(1+d))^2 MSW
    OptMechanism,       // expected welfare >= ((1-d)^2 + 4d/n)/(1+d)^2 MSW
};

struct TheoremWitness {
    Context context;
    std::vector<long> bids;
    Rational lhs, rhs; // violated inequality: lhs < rhs
};

// Exhaustively asserts the welfare bound over every interval context and
// every bid profile in the undominated box (the interval box, widened by
// one on each side for the lexicographic rule whose distinguishability
// degree is two). Valuations are reduced to their per-player extremes; the
// reduction is exact because welfare is affine in each valuation.
std::optional<TheoremWitness> verify_positive_theorem(PositiveTheorem which, int n, long B,
                                                      const Rational& delta,
                                                      unsigned long long budget = 200000000ULL);

// The valuation sandwich (1-d)/(1+d) v <= theta <= (1+d)/(1-d) v relating
// any undominated bid to the valuation; the box reduction above rests on it.
bool key_range_check(const Rational& v, const Rational& theta, const Rational& delta);

} // namespace knightian
