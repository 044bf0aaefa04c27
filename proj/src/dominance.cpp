#include "knightian/dominance.hpp"

#include <algorithm>

#include "knightian/errors.hpp"
#include "knightian/simplex.hpp"

namespace knightian {

void validate_mixed(const MixedStrategy& sigma, int strategy_count) {
    if (sigma.weights.empty()) throw DomainError("mixed strategy with empty support");
    Rational sum(0);
    int prev = -1;
    for (const auto& [s, w] : sigma.weights) {
        if (s <= prev) throw DomainError("mixed strategy support not strictly ascending");
        if (s >= strategy_count) throw DomainError("strategy index out of range");
        if (w.sign() <= 0) throw DomainError("mixed strategy carries a nonpositive weight");
        sum += w;
        prev = s;
    }
    if (!(sum == Rational(1))) throw DomainError("mixed strategy weights do not sum to 1");
}

namespace {

// Opponent pure subprofiles of player i, each stored as the full-profile
// base index with player i's strategy set to 0, so that the profile index
// for own strategy s is base + s * stride.
struct OpponentSpace {
    std::vector<std::size_t> base;
    std::vector<std::vector<int>> subprofiles;
    std::size_t stride = 1;
};

OpponentSpace opponent_space(const FiniteMechanism& M, std::size_t i) {
    const auto& counts = M.strategy_counts();
    const std::size_t n = counts.size();
    if (i >= n) throw DomainError("player index out of range");

    OpponentSpace out;
    out.stride = 1;
    for (std::size_t j = i + 1; j < n; ++j)
        out.stride *= static_cast<std::size_t>(counts[j]);

    std::vector<int> t(n > 1 ? n - 1 : 0, 0);
    std::vector<int> full(n, 0);
    for (;;) {
        for (std::size_t j = 0, k = 0; j < n; ++j) full[j] = j == i ? 0 : t[k++];
        out.base.push_back(M.index_of(full));
        out.subprofiles.push_back(t);
        std::size_t j = t.size();
        for (; j-- > 0;) {
            std::size_t pj = j < i ? j : j + 1; // player owning slot j
            if (t[j] + 1 < counts[pj]) {
                ++t[j];
                std::fill(t.begin() + static_cast<long>(j) + 1, t.end(), 0);
                break;
            }
        }
        if (j == static_cast<std::size_t>(-1)) break;
        if (t.empty()) break;
    }
    return out;
}

PriceExpression pure_utility(const FiniteMechanism& M, std::size_t i, long theta,
                             std::size_t profile_index) {
    PriceExpression u(Rational(theta) * M.allocation(profile_index).probs[i]);
    u -= M.price(profile_index, i);
    return u;
}

std::vector<long> theta_endpoints(const CandidateSet& K) {
    std::vector<long> th{K.min()};
    if (K.max() != K.min()) th.push_back(K.max());
    return th;
}

// advantage(sigma over s) at one (theta, opponents) pair.
PriceExpression pair_advantage(const FiniteMechanism& M, std::size_t i, long theta,
                               const MixedStrategy& sigma, int s,
                               std::size_t base, std::size_t stride) {
    PriceExpression adv;
    for (const auto& [b, w] : sigma.weights)
        adv += pure_utility(M, i, theta, base + static_cast<std::size_t>(b) * stride) * w;
    adv -= pure_utility(M, i, theta, base + static_cast<std::size_t>(s) * stride);
    return adv;
}

// Exact sign with a flag for whether interval refinement was needed.
int advantage_sign(const PriceExpression& adv, bool& used_intervals) {
    if (auto r = adv.as_rational()) return r->sign();
    used_intervals = true;
    return adv.sign();
}

} // namespace

PriceExpression expected_utility(const FiniteMechanism& M, std::size_t i, long theta,
                                 const MixedStrategy& sigma,
                                 const std::vector<int>& t_others) {
    const auto& counts = M.strategy_counts();
    if (i >= counts.size()) throw DomainError("player index out of range");
    validate_mixed(sigma, counts[i]);
    if (t_others.size() + 1 != counts.size())
        throw DomainError("opponent subprofile has wrong size");

    std::vector<int> full(counts.size(), 0);
    for (std::size_t j = 0, k = 0; j < full.size(); ++j)
        if (j != i) full[j] = t_others[k++];

    PriceExpression u;
    for (const auto& [b, w] : sigma.weights) {
        full[i] = b;
        u += pure_utility(M, i, theta, M.index_of(full)) * w;
    }
    return u;
}

DominanceResult very_weakly_dominates(const FiniteMechanism& M, std::size_t i,
                                      const CandidateSet& K, const MixedStrategy& sigma,
                                      int s) {
    validate_mixed(sigma, M.strategy_counts()[i]);
    if (s < 0 || s >= M.strategy_counts()[i]) throw DomainError("strategy index out of range");
    OpponentSpace opp = opponent_space(M, i);
    DominanceResult res{DominanceResult::Verdict::Holds, std::nullopt, false};
    for (long theta : theta_endpoints(K)) {
        for (std::size_t k = 0; k < opp.base.size(); ++k) {
            PriceExpression adv = pair_advantage(M, i, theta, sigma, s, opp.base[k], opp.stride);
            if (advantage_sign(adv, res.used_intervals) < 0) {
                res.verdict = DominanceResult::Verdict::Fails;
                res.witness = DominanceWitness{theta, opp.subprofiles[k]};
                return res;
            }
        }
    }
    return res;
}

DominanceResult weakly_dominates(const FiniteMechanism& M, std::size_t i,
                                 const CandidateSet& K, const MixedStrategy& sigma, int s) {
    validate_mixed(sigma, M.strategy_counts()[i]);
    if (s < 0 || s >= M.strategy_counts()[i]) throw DomainError("strategy index out of range");
    OpponentSpace opp = opponent_space(M, i);
    DominanceResult res{DominanceResult::Verdict::Holds, std::nullopt, false};
    bool strict = false;
    for (long theta : theta_endpoints(K)) {
        for (std::size_t k = 0; k < opp.base.size(); ++k) {
            PriceExpression adv = pair_advantage(M, i, theta, sigma, s, opp.base[k], opp.stride);
            int sg = advantage_sign(adv, res.used_intervals);
            if (sg < 0) {
                res.verdict = DominanceResult::Verdict::Fails;
                res.witness = DominanceWitness{theta, opp.subprofiles[k]};
                return res;
            }
            if (sg > 0) strict = true;
        }
    }
    if (!strict) res.verdict = DominanceResult::Verdict::Fails; // no strict pair
    return res;
}

namespace {

// One dominance LP: maximize total capped slack over very-weak dominance
// rows. Coefficients come from `bound`: an exact rational per advantage
// when available, otherwise a directed bound at the chosen precision.
struct DominanceLp {
    std::vector<int> support;
    LpSolution solution;
};

// advantage table: adv[b][k] for b in support, k over (theta, opponents).
DominanceLp solve_dominance_lp(const std::vector<int>& support,
                               const std::vector<std::vector<Rational>>& adv) {
    const std::size_t ns = support.size();
    const std::size_t np = adv.empty() ? 0 : adv[0].size();
    LinearProgram lp;
    lp.num_vars = static_cast<int>(ns + np); // weights then slacks
    lp.objective.assign(static_cast<std::size_t>(lp.num_vars), Rational(0));
    for (std::size_t k = 0; k < np; ++k) lp.objective[ns + k] = Rational(1);

    auto& norm = lp.add_row(LinearProgram::Rel::Eq, Rational(1));
    for (std::size_t b = 0; b < ns; ++b) norm.a[b] = Rational(1);

    for (std::size_t k = 0; k < np; ++k) {
        // sum_b sigma_b adv[b][k] - e_k >= 0
        auto& row = lp.add_row(LinearProgram::Rel::Ge, Rational(0));
        for (std::size_t b = 0; b < ns; ++b) row.a[b] = adv[b][k];
        row.a[ns + k] = Rational(-1);
        auto& cap = lp.add_row(LinearProgram::Rel::Le, Rational(1));
        cap.a[ns + k] = Rational(1);
    }
    return {support, solve_lp(lp)};
}

MixedStrategy extract_mixture(const DominanceLp& r) {
    MixedStrategy sigma;
    for (std::size_t b = 0; b < r.support.size(); ++b)
        if (r.solution.x[b].sign() > 0)
            sigma.weights.emplace_back(r.support[b], r.solution.x[b]);
    return sigma;
}

enum class BoundMode { Exact, Pessimistic, Optimistic };

// Rational stand-in for a PriceExpression advantage: exact when the
// expression is rational (including exact cancellations to zero), else the
// requested directed interval endpoint.
Rational bound_advantage(const PriceExpression& adv, BoundMode mode, unsigned bits) {
    if (auto r = adv.as_rational()) return *r;
    auto [lo, hi] = adv.interval(bits);
    return mode == BoundMode::Optimistic ? hi : lo;
}

struct AdvantageTable {
    std::vector<int> support;                           // candidate dominator strategies
    std::vector<std::vector<PriceExpression>> adv;      // [support][pair]
    bool all_rational = true;
};

AdvantageTable advantage_table(const FiniteMechanism& M, std::size_t i,
                               const CandidateSet& K, int s,
                               const OpponentSpace& opp) {
    const int count = M.strategy_counts()[i];
    AdvantageTable t;
    for (int b = 0; b < count; ++b)
        if (b != s) t.support.push_back(b);

    std::vector<long> thetas = theta_endpoints(K);
    t.adv.resize(t.support.size());
    for (std::size_t bi = 0; bi < t.support.size(); ++bi) {
        auto& row = t.adv[bi];
        row.reserve(thetas.size() * opp.base.size());
        for (long theta : thetas) {
            for (std::size_t k = 0; k < opp.base.size(); ++k) {
                PriceExpression a = pair_advantage(M, i, theta, MixedStrategy::pure(t.support[bi]),
                                                   s, opp.base[k], opp.stride);
                if (!a.as_rational()) t.all_rational = false;
                row.push_back(std::move(a));
            }
        }
    }
    return t;
}

std::vector<std::vector<Rational>> bound_table(const AdvantageTable& t, BoundMode mode,
                                               unsigned bits) {
    std::vector<std::vector<Rational>> out(t.adv.size());
    for (std::size_t b = 0; b < t.adv.size(); ++b) {
        out[b].reserve(t.adv[b].size());
        for (const PriceExpression& a : t.adv[b]) out[b].push_back(bound_advantage(a, mode, bits));
    }
    return out;
}

// Decides whether s is weakly dominated; returns the dominator if so.
// `certified_undominated` reports whether a "no" answer is exact.
std::optional<MixedStrategy> find_dominator(const FiniteMechanism& M, std::size_t i,
                                            const CandidateSet& K, int s,
                                            bool& certified_undominated) {
    OpponentSpace opp = opponent_space(M, i);
    AdvantageTable table = advantage_table(M, i, K, s, opp);
    certified_undominated = false;
    if (table.support.empty()) {
        certified_undominated = true;
        return std::nullopt;
    }

    if (table.all_rational) {
        auto rows = bound_table(table, BoundMode::Exact, 0);
        DominanceLp r = solve_dominance_lp(table.support, rows);
        if (r.solution.status == LpSolution::Status::Optimal && r.solution.value.sign() > 0) {
            MixedStrategy sigma = extract_mixture(r);
            if (weakly_dominates(M, i, K, sigma, s).verdict != DominanceResult::Verdict::Holds)
                throw DomainError("internal: LP dominator failed re-verification");
            return sigma;
        }
        certified_undominated = true;
        return std::nullopt;
    }

    const unsigned cap = precision_cap_bits();
    for (unsigned bits = 64;; bits *= 2) {
        if (bits > cap) bits = cap;
        // Pessimistic pass: any feasible positive-slack mixture is a true
        // dominator since every true advantage is at least its bound.
        DominanceLp pess = solve_dominance_lp(table.support,
                                              bound_table(table, BoundMode::Pessimistic, bits));
        if (pess.solution.status == LpSolution::Status::Optimal &&
            pess.solution.value.sign() > 0) {
            MixedStrategy sigma = extract_mixture(pess);
            if (weakly_dominates(M, i, K, sigma, s).verdict == DominanceResult::Verdict::Holds)
                return sigma;
            // Interval artifact (possible only if re-verification hit an
            // exact tie the bounds missed); fall through to refinement.
        }
        // Optimistic pass: if even inflated advantages cannot produce
        // positive slack, no dominator exists.
        DominanceLp opt = solve_dominance_lp(table.support,
                                             bound_table(table, BoundMode::Optimistic, bits));
        if (opt.solution.status != LpSolution::Status::Optimal ||
            opt.solution.value.sign() <= 0) {
            certified_undominated = true;
            return std::nullopt;
        }
        if (bits == cap) return std::nullopt; // unresolved: conservative keep
    }
}

} // namespace

std::optional<MixedStrategy> mixed_dominator(const FiniteMechanism& M, std::size_t i,
                                             const CandidateSet& K, int s) {
    if (i >= M.strategy_counts().size()) throw DomainError("player index out of range");
    if (s < 0 || s >= M.strategy_counts()[i]) throw DomainError("strategy index out of range");
    bool certified = false;
    return find_dominator(M, i, K, s, certified);
}

UdedResult uded_detail(const FiniteMechanism& M, std::size_t i, const CandidateSet& K) {
    const auto& counts = M.strategy_counts();
    if (i >= counts.size()) throw DomainError("player index out of range");
    const int count = counts[i];

    int lo = 0, hi = count - 1;
    if (!M.rational_prices() && M.strategies_are_bids() && M.dm_degree()) {
        // Interval box from the declared distinguishability degree; bids
        // outside it are dominated by box endpoints and skipped entirely.
        if (K.max() > count - 1)
            throw DomainError("candidate set exceeds the bid space");
        int d = *M.dm_degree();
        lo = static_cast<int>(std::max<long>(0, K.min() - (d - 1)));
        hi = static_cast<int>(std::min<long>(count - 1, K.max() + (d - 1)));
    }

    UdedResult res;
    for (int s = lo; s <= hi; ++s) {
        bool certified = false;
        std::optional<MixedStrategy> dom;
        try {
            dom = find_dominator(M, i, K, s, certified);
        } catch (const UndecidableAtPrecision&) {
            dom = std::nullopt; // conservative retention
            certified = false;
        }
        if (!dom) {
            res.strategies.push_back(s);
            res.certified.push_back(certified);
            if (!certified) res.exact = false;
        }
    }
    if (res.strategies.empty())
        throw DomainError("internal: undominated set came out empty");
    return res;
}

std::vector<int> uded(const FiniteMechanism& M, std::size_t i, const CandidateSet& K) {
    return uded_detail(M, i, K).strategies;
}

std::vector<int> dnt(const FiniteMechanism& M, std::size_t i, const CandidateSet& K) {
    const auto& counts = M.strategy_counts();
    if (i >= counts.size()) throw DomainError("player index out of range");
    std::vector<int> out;
    for (int s = 0; s < counts[i]; ++s) {
        bool dominant = true;
        for (int t = 0; t < counts[i] && dominant; ++t) {
            if (t == s) continue;
            try {
                if (very_weakly_dominates(M, i, K, MixedStrategy::pure(s), t).verdict !=
                    DominanceResult::Verdict::Holds)
                    dominant = false;
            } catch (const UndecidableAtPrecision&) {
                dominant = false; // cannot certify; leave s out
            }
        }
        if (dominant) out.push_back(s);
    }
    return out;
}

ProbeResult intersection_probe(const FiniteMechanism& M, std::size_t i,
                               const CandidateSet& K, const CandidateSet& K_prime) {
    // Count the shared values.
    std::size_t common = 0;
    for (long v : K.values())
        if (K_prime.contains(v)) ++common;
    if (common < 2)
        throw HypothesisViolated("candidate sets share fewer than two values");

    ProbeResult res;
    res.uded_first = uded(M, i, K);
    res.uded_second = uded(M, i, K_prime);
    OpponentSpace opp = opponent_space(M, i);

    const std::size_t n1 = res.uded_first.size(), n2 = res.uded_second.size();
    LinearProgram lp;
    lp.num_vars = static_cast<int>(n1 + n2 + 1); // sigma, sigma', epsilon
    lp.objective.assign(static_cast<std::size_t>(lp.num_vars), Rational(0));
    lp.objective[n1 + n2] = Rational(-1); // maximize -epsilon

    auto& norm1 = lp.add_row(LinearProgram::Rel::Eq, Rational(1));
    for (std::size_t b = 0; b < n1; ++b) norm1.a[b] = Rational(1);
    auto& norm2 = lp.add_row(LinearProgram::Rel::Eq, Rational(1));
    for (std::size_t b = 0; b < n2; ++b) norm2.a[n1 + b] = Rational(1);

    for (std::size_t k = 0; k < opp.base.size(); ++k) {
        // |sum_b sigma_b A - sum_b sigma'_b A| <= epsilon, as two rows.
        for (int sign : {1, -1}) {
            auto& row = lp.add_row(LinearProgram::Rel::Le, Rational(0));
            for (std::size_t b = 0; b < n1; ++b) {
                std::size_t idx = opp.base[k] +
                                  static_cast<std::size_t>(res.uded_first[b]) * opp.stride;
                row.a[b] = M.allocation(idx).probs[i] * Rational(sign);
            }
            for (std::size_t b = 0; b < n2; ++b) {
                std::size_t idx = opp.base[k] +
                                  static_cast<std::size_t>(res.uded_second[b]) * opp.stride;
                row.a[n1 + b] = M.allocation(idx).probs[i] * Rational(-sign);
            }
            row.a[n1 + n2] = Rational(-1);
        }
    }

    LpSolution sol = solve_lp(lp);
    if (sol.status != LpSolution::Status::Optimal)
        throw DomainError("internal: probe LP did not solve");
    res.epsilon = -sol.value;
    for (std::size_t b = 0; b < n1; ++b)
        if (sol.x[b].sign() > 0) res.sigma.weights.emplace_back(res.uded_first[b], sol.x[b]);
    for (std::size_t b = 0; b < n2; ++b)
        if (sol.x[n1 + b].sign() > 0)
            res.sigma_prime.weights.emplace_back(res.uded_second[b], sol.x[n1 + b]);
    return res;
}

} // namespace knightian
