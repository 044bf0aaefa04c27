#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "knightian/context.hpp"
#include "knightian/mechanisms.hpp"
#include "knightian/price_expression.hpp"

namespace knightian {

// A fully tabulated finite mechanism: per pure strategy profile, the
// allocation vector and each player's expected price. Profiles are indexed
// row-major with player 0 varying slowest.
class FiniteMechanism {
public:
    FiniteMechanism(std::string id, std::vector<int> strategy_counts,
                    std::vector<AllocationVector> alloc_table,
                    std::vector<std::vector<PriceExpression>> price_table,
                    bool strategies_are_bids = false,
                    std::optional<int> dm_degree = std::nullopt);

    const std::string& id() const { return id_; }
    int players() const { return static_cast<int>(counts_.size()); }
    const std::vector<int>& strategy_counts() const { return counts_; }
    std::size_t profile_count() const { return alloc_.size(); }

    std::size_t index_of(const std::vector<int>& profile) const;
    std::vector<int> profile_of(std::size_t index) const;

    const AllocationVector& allocation(std::size_t index) const { return alloc_[index]; }
    const PriceExpression& price(std::size_t index, std::size_t i) const {
        return prices_[index][i];
    }

    // True when every price entry is rational, enabling the exact LP path.
    bool rational_prices() const { return rational_prices_; }

    // Strategy s means "bid s" (tabulated bid mechanisms set this).
    bool strategies_are_bids() const { return bids_; }

    // Declared distinguishability degree; justifies restricting undominated
    // sets to the interval box. Verified separately by check_d_dm.
    std::optional<int> dm_degree() const { return dm_degree_; }

private:
    std::string id_;
    std::vector<int> counts_;
    std::vector<AllocationVector> alloc_;
    std::vector<std::vector<PriceExpression>> prices_;
    bool bids_;
    std::optional<int> dm_degree_;
    bool rational_prices_;
};

struct TabulateOptions {
    unsigned long long max_profiles = 4000000;
};

// Bid spaces are {0..B} per player.
FiniteMechanism tabulate_second_price(int n, long B, TieRule tie,
                                      const TabulateOptions& opts = {});
FiniteMechanism tabulate_random(int n, long B, const TabulateOptions& opts = {});
FiniteMechanism tabulate_opt(int n, long B, const Rational& delta,
                             const TabulateOptions& opts = {});

} // namespace knightian
