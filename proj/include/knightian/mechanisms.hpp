#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "knightian/context.hpp"
#include "knightian/piecewise.hpp"
#include "knightian/price_expression.hpp"
#include "knightian/rational.hpp"

namespace knightian {

enum class TieRule { Lexicographic, UniformRandom };

// Second-price outcome under lexicographic tie breaking: the lowest-index
// highest bidder wins and pays the highest competing bid. Prices of losers
// are zero. An all-zero profile still has a winner (player 0 at price 0).
Outcome second_price(const std::vector<long>& v);

struct ExpectedOutcome {
    AllocationVector alloc;
    std::vector<Rational> expected_prices;
};

// Expectation form of second price under either tie rule. Lexicographic
// gives a 0/1 allocation; uniform splits the win probability among the
// highest bidders, each paying the highest bid when they win (expected
// price = prob * high bid, which equals prob * second-highest since ties).
ExpectedOutcome second_price(const std::vector<long>& v, TieRule tie);

// Everyone wins with probability 1/n and pays nothing.
AllocationVector random_assignment(int n);

// Aggressiveness constant ((1+delta)/(1-delta))^2 - 1. Requires
// 0 < delta < 1.
Rational d_delta(const Rational& delta);

struct WinnerCount {
    int n_star;
    Rational threshold; // sum of the top n_star bids divided by (n_star + D)
};

// Given bids sorted in nonincreasing order (not all zero) and D > 0, finds
// the unique k with z_k > T(k) >= z_{k+1} where T(k) = (z_1+...+z_k)/(k+D).
// Throws AllZeroBids when every bid is zero.
WinnerCount candidate_winner_count(const std::vector<Rational>& sorted_bids, const Rational& D);

// The aggressive allocation: bidders above the threshold win with
// probability (1/n) * ((n+D)/(n*+D)) * (z_i (n*+D) - S) / (z_i D) where S is
// the sum of the top n* bids; everyone else (and everyone, on the all-zero
// profile) gets zero. Accepts rational bid points since dominance analysis
// integrates over them.
AllocationVector f_delta(const std::vector<Rational>& z, const Rational& delta);
AllocationVector f_delta(const std::vector<long>& z, const Rational& delta);

// The win probability of a player with the other bids fixed at v_others, as
// an exact piecewise a + b/z function of their own bid over [0, B]. The
// allocation is symmetric so the player's identity does not matter, only
// the opposing bids (the number of players is v_others.size() + 1).
PiecewiseAllocation piecewise_profile(const std::vector<Rational>& v_others,
                                      const Rational& delta, long B);

// Expected payment of player i at profile v: v_i * f_i(v) minus the
// integral of their slice from 0 to v_i.
PriceExpression price_opt(std::size_t i, const std::vector<Rational>& v,
                          const Rational& delta, long B);

// Payment conditioned on winning: v_i - integral / f_i(v). Throws
// ZeroWinProbability when f_i(v) == 0.
PriceExpression price_opt_conditional(std::size_t i, const std::vector<Rational>& v,
                                      const Rational& delta, long B);

// Allocation function handle used by the property checkers. Slices are the
// integration view: they agree with at() away from breakpoints.
class AllocationFunction {
public:
    virtual ~AllocationFunction() = default;
    virtual int players() const = 0;
    virtual long bound() const = 0;
    virtual AllocationVector at(const std::vector<Rational>& bids) const = 0;
    virtual bool has_slice() const { return false; }
    virtual PiecewiseAllocation slice(std::size_t i, const std::vector<Rational>& others) const;
};

std::unique_ptr<AllocationFunction> make_f_delta_function(int n, long B, const Rational& delta);
std::unique_ptr<AllocationFunction> make_second_price_function(int n, long B, TieRule tie);
std::unique_ptr<AllocationFunction> make_random_function(int n, long B);

struct MonotoneWitness {
    std::size_t i;
    std::vector<Rational> others;
    Rational z_lo, z_hi; // f_i at z_lo exceeds f_i at z_hi although z_lo < z_hi
};

// Checks that each player's win probability is nondecreasing in their own
// bid. Opponent profiles range over multiples of grid_step in [0, B]; own
// bids additionally include slice breakpoints and piece midpoints when a
// slice is available, which pins down every piece of a piecewise slice.
std::optional<MonotoneWitness> check_monotone(const AllocationFunction& f,
                                              const Rational& grid_step);

struct DistinguishabilityWitness {
    std::size_t i;
    long v_lo, v_hi; // no opponent profile separates this pair
};

// Checks d-distinguishability: for every player and every pair of integer
// bids v_lo < v_hi with v_hi - v_lo >= d there is an opponent profile where
// bidding v_hi strictly beats the flat probability f_i(v_lo) on average,
// i.e. the slice integral over [v_lo, v_hi] exceeds (v_hi - v_lo) *
// f_i(v_lo). Needs slices. Returns a violating pair, or nullopt.
std::optional<DistinguishabilityWitness> check_d_dm(const AllocationFunction& f, int d);

struct GoodnessWitness {
    std::size_t i;
    std::vector<long> v;
};

// Checks the revenue-style lower bound: for all integer profiles v and all
// i, sum_j f_j(v) v_j + D f_i(v) v_i >= (1/n) v_i (n + D). Exhaustive over
// {0..B}^n.
std::optional<GoodnessWitness> check_delta_good(const AllocationFunction& f,
                                                const Rational& delta);

} // namespace knightian
