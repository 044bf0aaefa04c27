#include "knightian/finite_mechanism.hpp"

#include <algorithm>

#include "knightian/errors.hpp"

namespace knightian {

FiniteMechanism::FiniteMechanism(std::string id, std::vector<int> strategy_counts,
                                 std::vector<AllocationVector> alloc_table,
                                 std::vector<std::vector<PriceExpression>> price_table,
                                 bool strategies_are_bids, std::optional<int> dm_degree)
    : id_(std::move(id)),
      counts_(std::move(strategy_counts)),
      alloc_(std::move(alloc_table)),
      prices_(std::move(price_table)),
      bids_(strategies_are_bids),
      dm_degree_(dm_degree) {
    if (counts_.empty()) throw DomainError("mechanism needs at least one player");
    std::size_t total = 1;
    for (int c : counts_) {
        if (c < 1) throw DomainError("player with no strategies");
        total *= static_cast<std::size_t>(c);
    }
    if (alloc_.size() != total || prices_.size() != total)
        throw DomainError("tables do not cover the profile space");
    const std::size_t n = counts_.size();
    rational_prices_ = true;
    for (std::size_t p = 0; p < total; ++p) {
        if (alloc_[p].probs.size() != n || prices_[p].size() != n)
            throw DomainError("table row has wrong player count");
        validate_allocation(alloc_[p]);
        for (const PriceExpression& e : prices_[p])
            if (!e.is_rational()) rational_prices_ = false;
    }
    if (dm_degree_ && *dm_degree_ < 1) throw DomainError("distinguishability degree must be >= 1");
}

std::size_t FiniteMechanism::index_of(const std::vector<int>& profile) const {
    if (profile.size() != counts_.size()) throw DomainError("profile has wrong player count");
    std::size_t idx = 0;
    for (std::size_t j = 0; j < profile.size(); ++j) {
        if (profile[j] < 0 || profile[j] >= counts_[j])
            throw DomainError("strategy index out of range");
        idx = idx * static_cast<std::size_t>(counts_[j]) + static_cast<std::size_t>(profile[j]);
    }
    return idx;
}

std::vector<int> FiniteMechanism::profile_of(std::size_t index) const {
    if (index >= profile_count()) throw DomainError("profile index out of range");
    std::vector<int> p(counts_.size());
    for (std::size_t j = counts_.size(); j-- > 0;) {
        p[j] = static_cast<int>(index % static_cast<std::size_t>(counts_[j]));
        index /= static_cast<std::size_t>(counts_[j]);
    }
    return p;
}

namespace {

void check_budget(int n, long B, const TabulateOptions& opts) {
    if (n < 1 || B < 1) throw DomainError("need n >= 1 and B >= 1");
    unsigned long long total = 1;
    for (int j = 0; j < n; ++j) {
        total *= static_cast<unsigned long long>(B) + 1;
        if (total > opts.max_profiles)
            throw BudgetExceeded("profile space exceeds the tabulation budget");
    }
}

// Iterate all bid profiles in row-major order (player 0 slowest).
template <typename Fn>
void for_each_bid_profile(int n, long B, Fn&& fn) {
    std::vector<long> v(static_cast<std::size_t>(n), 0);
    for (;;) {
        fn(v);
        std::size_t j = v.size();
        for (; j-- > 0;) {
            if (v[j] < B) {
                ++v[j];
                std::fill(v.begin() + static_cast<long>(j) + 1, v.end(), 0L);
                break;
            }
        }
        if (j == static_cast<std::size_t>(-1)) break;
    }
}

} // namespace

FiniteMechanism tabulate_second_price(int n, long B, TieRule tie, const TabulateOptions& opts) {
    check_budget(n, B, opts);
    std::vector<AllocationVector> alloc;
    std::vector<std::vector<PriceExpression>> prices;
    for_each_bid_profile(n, B, [&](const std::vector<long>& v) {
        ExpectedOutcome out = second_price(v, tie);
        alloc.push_back(std::move(out.alloc));
        std::vector<PriceExpression> row;
        row.reserve(v.size());
        for (const Rational& p : out.expected_prices) row.emplace_back(p);
        prices.push_back(std::move(row));
    });
    std::vector<int> counts(static_cast<std::size_t>(n), static_cast<int>(B) + 1);
    const char* name = tie == TieRule::Lexicographic ? "second_price_lex" : "second_price_uniform";
    // Lexicographic tie breaking separates bid pairs only at distance two;
    // uniform tie breaking separates adjacent bids.
    int dm = tie == TieRule::Lexicographic ? 2 : 1;
    return FiniteMechanism(name, std::move(counts), std::move(alloc), std::move(prices),
                           true, dm);
}

FiniteMechanism tabulate_random(int n, long B, const TabulateOptions& opts) {
    check_budget(n, B, opts);
    std::vector<AllocationVector> alloc;
    std::vector<std::vector<PriceExpression>> prices;
    for_each_bid_profile(n, B, [&](const std::vector<long>&) {
        alloc.push_back(random_assignment(n));
        prices.emplace_back(static_cast<std::size_t>(n));
    });
    std::vector<int> counts(static_cast<std::size_t>(n), static_cast<int>(B) + 1);
    return FiniteMechanism("random_assignment", std::move(counts), std::move(alloc),
                           std::move(prices), true, std::nullopt);
}

FiniteMechanism tabulate_opt(int n, long B, const Rational& delta, const TabulateOptions& opts) {
    check_budget(n, B, opts);
    std::vector<AllocationVector> alloc;
    std::vector<std::vector<PriceExpression>> prices;
    std::vector<Rational> bids(static_cast<std::size_t>(n));
    for_each_bid_profile(n, B, [&](const std::vector<long>& v) {
        for (std::size_t j = 0; j < bids.size(); ++j) bids[j] = Rational(v[j]);
        alloc.push_back(f_delta(bids, delta));
        std::vector<PriceExpression> row;
        row.reserve(bids.size());
        for (std::size_t i = 0; i < bids.size(); ++i)
            row.push_back(price_opt(i, bids, delta, B));
        prices.push_back(std::move(row));
    });
    std::vector<int> counts(static_cast<std::size_t>(n), static_cast<int>(B) + 1);
    return FiniteMechanism("opt_delta_" + delta.str(), std::move(counts), std::move(alloc),
                           std::move(prices), true, 1);
}

} // namespace knightian
