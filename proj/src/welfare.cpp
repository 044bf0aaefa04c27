#include "knightian/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "knightian/errors.hpp"
#include "knightian/mechanisms.hpp"

namespace knightian {

namespace {

void check_delta_open(const Rational& delta) {
    if (!(delta > Rational(0)) || !(delta < Rational(1)))
        throw DomainError("delta must lie strictly between 0 and 1");
}

unsigned long long sat_mul(unsigned long long a, unsigned long long b) {
    const auto cap = std::numeric_limits<unsigned long long>::max();
    if (a != 0 && b > cap / a) return cap;
    return a * b;
}

unsigned long long sat_pow(unsigned long long base, int exp) {
    unsigned long long r = 1;
    for (int i = 0; i < exp; ++i) r = sat_mul(r, base);
    return r;
}

} // namespace

BoundCurves bound_curves(int n, const Rational& delta) {
    if (n < 1) throw DomainError("need at least one player");
    check_delta_open(delta);
    Rational minus = Rational(1) - delta, plus = Rational(1) + delta;
    Rational ratio = minus / plus;
    BoundCurves c;
    c.random = Rational(1, n);
    c.second_price = ratio * ratio;
    c.opt = (minus * minus + Rational(4) * delta / Rational(n)) / (plus * plus);
    return c;
}

RationalInterval crossover_delta(int n, const Rational& max_width) {
    if (n < 2) throw DomainError("no crossover below two players");
    if (max_width.sign() <= 0) throw DomainError("enclosure width must be positive");

    long root = std::lround(std::sqrt(static_cast<double>(n)));
    while (root * root > n) --root;
    while ((root + 1) * (root + 1) <= n) ++root;
    if (root * root == n) {
        Rational d(root - 1, root + 1);
        return {d, d};
    }

    // g(delta) = n (1-delta)^2 - (1+delta)^2 is strictly decreasing on (0,1)
    // with g(0) > 0 > g(1); bisect.
    auto g = [&](const Rational& d) {
        Rational minus = Rational(1) - d, plus = Rational(1) + d;
        return Rational(n) * minus * minus - plus * plus;
    };
    Rational lo(0), hi(1);
    while (hi - lo > max_width) {
        Rational mid = (lo + hi) / Rational(2);
        int s = g(mid).sign();
        if (s == 0) return {mid, mid};
        (s > 0 ? lo : hi) = mid;
    }
    return {lo, hi};
}

ContextEnumerator::ContextEnumerator(int n, long B, const Rational& delta)
    : n_(n), B_(B), delta_(delta) {
    if (n < 1 || B < 1) throw DomainError("need n >= 1 and B >= 1");
    check_delta_open(delta);
    for (long lo = 0; lo <= B; ++lo)
        for (long hi = lo; hi <= B; ++hi)
            if (Rational(hi - lo) <= delta * Rational(hi + lo))
                intervals_.emplace_back(lo, hi);
}

CandidateSet ContextEnumerator::interval_set(std::size_t idx) const {
    if (idx >= intervals_.size()) throw DomainError("interval index out of range");
    return CandidateSet::interval(intervals_[idx].first, intervals_[idx].second);
}

std::optional<std::size_t> ContextEnumerator::find_interval(long lo, long hi) const {
    for (std::size_t j = 0; j < intervals_.size(); ++j)
        if (intervals_[j] == std::make_pair(lo, hi)) return j;
    return std::nullopt;
}

unsigned long long ContextEnumerator::profile_count() const {
    return sat_pow(intervals_.size(), n_);
}

unsigned long long ContextEnumerator::context_count() const {
    unsigned long long sizes = 0;
    for (const auto& [lo, hi] : intervals_)
        sizes += static_cast<unsigned long long>(hi - lo + 1);
    return sat_pow(sizes, n_);
}

void ContextEnumerator::for_each_profile(
    const std::function<bool(const std::vector<std::size_t>&)>& fn) const {
    std::vector<std::size_t> idx(static_cast<std::size_t>(n_), 0);
    for (;;) {
        if (!fn(idx)) return;
        std::size_t j = idx.size();
        for (; j-- > 0;) {
            if (idx[j] + 1 < intervals_.size()) {
                ++idx[j];
                std::fill(idx.begin() + static_cast<long>(j) + 1, idx.end(), 0);
                break;
            }
        }
        if (j == static_cast<std::size_t>(-1)) break;
    }
}

namespace {

void require_bid_table(const FiniteMechanism& M, int n, long B) {
    if (M.players() != n) throw DomainError("mechanism has a different player count");
    if (!M.strategies_are_bids()) throw DomainError("mechanism strategies are not bids");
    for (int c : M.strategy_counts())
        if (c != B + 1) throw DomainError("mechanism bid space does not match B");
}

struct UdedMemo {
    const FiniteMechanism& M;
    std::vector<std::vector<std::optional<UdedResult>>> cells; // [player][interval]
    const ContextEnumerator& en;
    bool any_conservative = false;

    UdedMemo(const FiniteMechanism& m, const ContextEnumerator& e)
        : M(m), cells(static_cast<std::size_t>(m.players()),
                      std::vector<std::optional<UdedResult>>(e.intervals().size())),
          en(e) {}

    const UdedResult& get(std::size_t player, std::size_t interval) {
        auto& cell = cells[player][interval];
        if (!cell) {
            cell = uded_detail(M, player, en.interval_set(interval));
            if (!cell->exact) any_conservative = true;
        }
        return *cell;
    }
};

} // namespace

RatioReport worst_case_ratio(const FiniteMechanism& M, int n, long B, const Rational& delta,
                             unsigned long long budget) {
    require_bid_table(M, n, B);
    ContextEnumerator en(n, B, delta);
    if (en.context_count() > budget)
        throw BudgetExceeded("context enumeration exceeds the budget");

    UdedMemo memo(M, en);
    const std::size_t np = static_cast<std::size_t>(n);

    std::optional<Rational> best;
    std::vector<std::size_t> best_intervals;
    std::vector<int> best_profile;
    std::vector<long> best_theta;
    bool best_certified = false;

    std::vector<const UdedResult*> sets(np);
    std::vector<std::size_t> vpos(np), tpos(np);
    std::vector<int> vprof(np);
    std::vector<long> theta(np);

    en.for_each_profile([&](const std::vector<std::size_t>& kidx) {
        for (std::size_t i = 0; i < np; ++i) sets[i] = &memo.get(i, kidx[i]);

        std::fill(vpos.begin(), vpos.end(), 0);
        for (;;) { // bid profiles over the undominated sets
            for (std::size_t i = 0; i < np; ++i) vprof[i] = sets[i]->strategies[vpos[i]];
            const AllocationVector& A = M.allocation(M.index_of(vprof));

            std::fill(tpos.begin(), tpos.end(), 0);
            for (;;) { // valuation profiles over the candidate sets
                long msw = 0;
                for (std::size_t i = 0; i < np; ++i) {
                    theta[i] = en.intervals()[kidx[i]].first + static_cast<long>(tpos[i]);
                    msw = std::max(msw, theta[i]);
                }
                if (msw > 0) {
                    Rational esw(0);
                    for (std::size_t i = 0; i < np; ++i)
                        if (theta[i] != 0) esw += A.probs[i] * Rational(theta[i]);
                    Rational ratio = esw / Rational(msw);
                    if (!best || ratio < *best) {
                        best = ratio;
                        best_intervals = kidx;
                        best_profile = vprof;
                        best_theta = theta;
                        best_certified = true;
                        for (std::size_t i = 0; i < np; ++i)
                            if (!sets[i]->certified[vpos[i]]) best_certified = false;
                    }
                }
                std::size_t j = np;
                for (; j-- > 0;) {
                    const auto& [lo, hi] = en.intervals()[kidx[j]];
                    if (tpos[j] + 1 < static_cast<std::size_t>(hi - lo + 1)) {
                        ++tpos[j];
                        std::fill(tpos.begin() + static_cast<long>(j) + 1, tpos.end(), 0);
                        break;
                    }
                }
                if (j == static_cast<std::size_t>(-1)) break;
            }

            std::size_t j = np;
            for (; j-- > 0;) {
                if (vpos[j] + 1 < sets[j]->strategies.size()) {
                    ++vpos[j];
                    std::fill(vpos.begin() + static_cast<long>(j) + 1, vpos.end(), 0);
                    break;
                }
            }
            if (j == static_cast<std::size_t>(-1)) break;
        }
        return true;
    });

    if (!best) throw DomainError("no context with positive welfare found");

    RatioReport rep;
    rep.ratio = *best;
    rep.mechanism_id = M.id();
    rep.witness_profile = best_profile;
    rep.witness_certified = best_certified;
    rep.conservative_uded = memo.any_conservative;
    rep.witness_context.n = n;
    rep.witness_context.B = B;
    rep.witness_context.delta = delta;
    for (std::size_t i = 0; i < np; ++i)
        rep.witness_context.K.push_back(en.interval_set(best_intervals[i]));
    rep.witness_context.theta = best_theta;
    return rep;
}

ContextRatio context_worst_ratio(const FiniteMechanism& M, const Context& ctx) {
    auto problems = validate_context(ctx);
    if (!problems.empty()) throw DomainError("invalid context: " + problems.front());
    require_bid_table(M, ctx.n, ctx.B);

    long msw_l = *std::max_element(ctx.theta.begin(), ctx.theta.end());
    if (msw_l == 0) throw DomainError("context has zero maximum welfare");
    Rational msw(msw_l);

    const std::size_t np = static_cast<std::size_t>(ctx.n);
    std::vector<UdedResult> sets;
    sets.reserve(np);
    ContextRatio out;
    for (std::size_t i = 0; i < np; ++i) {
        sets.push_back(uded_detail(M, i, ctx.K[i]));
        if (!sets.back().exact) out.conservative_uded = true;
    }

    std::optional<Rational> best;
    std::vector<std::size_t> vpos(np, 0);
    std::vector<int> vprof(np);
    for (;;) {
        for (std::size_t i = 0; i < np; ++i) vprof[i] = sets[i].strategies[vpos[i]];
        const AllocationVector& A = M.allocation(M.index_of(vprof));
        Rational esw(0);
        for (std::size_t i = 0; i < np; ++i)
            if (ctx.theta[i] != 0) esw += A.probs[i] * Rational(ctx.theta[i]);
        Rational ratio = esw / msw;
        if (!best || ratio < *best) {
            best = ratio;
            out.witness_profile = vprof;
            out.witness_certified = true;
            for (std::size_t i = 0; i < np; ++i)
                if (!sets[i].certified[vpos[i]]) out.witness_certified = false;
        }
        std::size_t j = np;
        for (; j-- > 0;) {
            if (vpos[j] + 1 < sets[j].strategies.size()) {
                ++vpos[j];
                std::fill(vpos.begin() + static_cast<long>(j) + 1, vpos.end(), 0);
                break;
            }
        }
        if (j == static_cast<std::size_t>(-1)) break;
    }
    out.ratio = *best;
    return out;
}

Context theorem35_construction(int n, long B, const Rational& delta) {
    check_delta_open(delta);
    if (n < 2) throw DomainError("construction needs at least two players");
    if (B < 1) throw DomainError("bid bound must be at least 1");
    if (Rational(B) * delta < Rational(5))
        throw HypothesisViolated("construction requires B >= 5/delta");

    Rational one(1);
    Rational x = Rational(B) / (one + delta);
    long y = (((one - delta) * x + Rational(2)) / (one + delta)).floor_long();

    Context ctx;
    ctx.n = n;
    ctx.B = B;
    ctx.delta = delta;
    ctx.K.push_back(delta_interval(x, delta, B));
    ctx.theta.push_back(((one + delta) * x).floor_long()); // = B
    CandidateSet Ky = delta_interval(Rational(y), delta, B);
    long theta_y = ((one - delta) * Rational(y)).ceil_long();
    for (int j = 1; j < n; ++j) {
        ctx.K.push_back(Ky);
        ctx.theta.push_back(theta_y);
    }
    auto problems = validate_context(ctx);
    if (!problems.empty())
        throw DomainError("internal: constructed context invalid: " + problems.front());
    return ctx;
}

Theorem1Construction theorem1_construction(int n, long B, const Rational& delta) {
    check_delta_open(delta);
    if (n < 2) throw DomainError("construction needs at least two players");
    if (B < 1) throw DomainError("bid bound must be at least 1");
    Rational lb = (Rational(3) - delta) / (Rational(2) * delta);
    if (!(Rational(B) > lb))
        throw HypothesisViolated("construction requires B > (3-delta)/(2 delta)");

    Theorem1Construction out;
    out.c = lb.floor_long() + 1;
    out.bound = Rational(1, n) + Rational(out.c) / Rational(B);

    CandidateSet Kc = delta_interval(Rational(out.c), delta, B);
    CandidateSet KB = delta_interval(Rational(B), delta, B);

    out.hat_context.n = n;
    out.hat_context.B = B;
    out.hat_context.delta = delta;
    out.main_context = out.hat_context;
    for (int j = 0; j < n; ++j) {
        out.hat_context.K.push_back(Kc);
        out.hat_context.theta.push_back(out.c);
        out.main_context.K.push_back(j == 0 ? KB : Kc);
        out.main_context.theta.push_back(j == 0 ? B : out.c);
    }
    for (const Context* c : {&out.hat_context, &out.main_context}) {
        auto problems = validate_context(*c);
        if (!problems.empty())
            throw DomainError("internal: constructed context invalid: " + problems.front());
    }
    return out;
}

namespace {

FiniteMechanism build_direct_table(
    int n, std::size_t report_count, std::string id,
    const std::function<void(const std::vector<int>&, AllocationVector&,
                             std::vector<PriceExpression>&)>& fill) {
    std::size_t total = 1;
    for (int j = 0; j < n; ++j) {
        total *= report_count;
        if (total > 4000000) throw BudgetExceeded("direct mechanism table too large");
    }
    std::vector<AllocationVector> alloc;
    std::vector<std::vector<PriceExpression>> prices;
    alloc.reserve(total);
    prices.reserve(total);
    std::vector<int> profile(static_cast<std::size_t>(n), 0);
    for (;;) {
        AllocationVector a;
        std::vector<PriceExpression> p(static_cast<std::size_t>(n));
        fill(profile, a, p);
        alloc.push_back(std::move(a));
        prices.push_back(std::move(p));
        std::size_t j = profile.size();
        for (; j-- > 0;) {
            if (profile[j] + 1 < static_cast<int>(report_count)) {
                ++profile[j];
                std::fill(profile.begin() + static_cast<long>(j) + 1, profile.end(), 0);
                break;
            }
        }
        if (j == static_cast<std::size_t>(-1)) break;
    }
    std::vector<int> counts(static_cast<std::size_t>(n), static_cast<int>(report_count));
    return FiniteMechanism(std::move(id), std::move(counts), std::move(alloc), std::move(prices));
}

} // namespace

DirectMechanism naive_direct_mechanism(int n, long B, const Rational& delta) {
    ContextEnumerator en(n, B, delta);
    DirectMechanism out{
        build_direct_table(n, en.intervals().size(), "naive_direct",
                           [&](const std::vector<int>&, AllocationVector& a,
                               std::vector<PriceExpression>&) {
                               a = random_assignment(n);
                           }),
        en.intervals()};
    return out;
}

DirectMechanism midpoint_second_price_direct(int n, long B, const Rational& delta) {
    ContextEnumerator en(n, B, delta);
    std::vector<Rational> mid;
    mid.reserve(en.intervals().size());
    for (const auto& [lo, hi] : en.intervals()) mid.emplace_back(lo + hi, 2);
    DirectMechanism out{
        build_direct_table(n, en.intervals().size(), "midpoint_second_price",
                           [&](const std::vector<int>& prof, AllocationVector& a,
                               std::vector<PriceExpression>& p) {
                               std::size_t win = 0;
                               for (std::size_t j = 1; j < prof.size(); ++j)
                                   if (mid[static_cast<std::size_t>(prof[j])] >
                                       mid[static_cast<std::size_t>(prof[win])])
                                       win = j;
                               a.probs.assign(prof.size(), Rational(0));
                               a.probs[win] = Rational(1);
                               Rational pay(0);
                               for (std::size_t j = 0; j < prof.size(); ++j)
                                   if (j != win)
                                       pay = max(pay, mid[static_cast<std::size_t>(prof[j])]);
                               p[win] = PriceExpression(pay);
                           }),
        en.intervals()};
    return out;
}

std::optional<TruthWitness> check_truthful(const DirectMechanism& M) {
    const std::size_t n = static_cast<std::size_t>(M.table.players());
    const std::size_t m = M.reports.size();
    if (M.table.strategy_counts().front() != static_cast<int>(m))
        throw DomainError("report list does not match the strategy count");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < m; ++r) {
            CandidateSet K = CandidateSet::interval(M.reports[r].first, M.reports[r].second);
            for (std::size_t lie = 0; lie < m; ++lie) {
                if (lie == r) continue;
                DominanceResult res =
                    very_weakly_dominates(M.table, i, K, MixedStrategy::pure(static_cast<int>(r)),
                                          static_cast<int>(lie));
                if (res.verdict != DominanceResult::Verdict::Holds)
                    return TruthWitness{i, r, lie, res.witness->theta, res.witness->t_others};
            }
        }
    }
    return std::nullopt;
}

AuditReport theorem1_audit(const DirectMechanism& M, int n, long B, const Rational& delta) {
    if (M.table.players() != n) throw DomainError("mechanism has a different player count");
    Theorem1Construction cons = theorem1_construction(n, B, delta);

    if (auto w = check_truthful(M)) {
        std::string msg = "player " + std::to_string(w->player + 1) + " with candidate set {" +
                          std::to_string(M.reports[w->true_report].first) + ".." +
                          std::to_string(M.reports[w->true_report].second) +
                          "} gains by reporting {" + std::to_string(M.reports[w->lie].first) +
                          ".." + std::to_string(M.reports[w->lie].second) + "} at theta " +
                          std::to_string(w->theta);
        throw NotTruthful(msg);
    }

    AuditReport rep;
    rep.c = cons.c;
    rep.bound = cons.bound;

    auto report_index = [&](long center) -> std::size_t {
        CandidateSet s = delta_interval(Rational(center), delta, B);
        for (std::size_t j = 0; j < M.reports.size(); ++j)
            if (M.reports[j] == std::make_pair(s.min(), s.max())) return j;
        throw DomainError("mechanism lacks the report for center " + std::to_string(center));
    };

    // Allocation invariance across adjacent centers on the relevant range.
    const std::size_t np = static_cast<std::size_t>(n);
    for (long x = cons.c; x < B && rep.invariance_holds; ++x) {
        std::size_t rx = report_index(x), rx1 = report_index(x + 1);
        if (rx == rx1) continue;
        for (std::size_t i = 0; i < np && rep.invariance_holds; ++i) {
            std::vector<int> others(np - 1, 0);
            std::vector<int> full(np);
            for (;;) {
                for (std::size_t j = 0, k = 0; j < np; ++j)
                    if (j != i) full[j] = others[k++];
                full[i] = static_cast<int>(rx);
                Rational a0 = M.table.allocation(M.table.index_of(full)).probs[i];
                full[i] = static_cast<int>(rx1);
                Rational a1 = M.table.allocation(M.table.index_of(full)).probs[i];
                if (!(a0 == a1)) {
                    rep.invariance_holds = false;
                    rep.invariance_witness = InvarianceWitness{i, x, others};
                    break;
                }
                std::size_t j = others.size();
                for (; j-- > 0;) {
                    if (others[j] + 1 < static_cast<int>(M.reports.size())) {
                        ++others[j];
                        std::fill(others.begin() + static_cast<long>(j) + 1, others.end(), 0);
                        break;
                    }
                }
                if (j == static_cast<std::size_t>(-1)) break;
            }
        }
    }

    // Welfare share of the truthful profile on the adversarial context.
    std::vector<int> truthful(np);
    truthful[0] = static_cast<int>(report_index(B));
    for (std::size_t j = 1; j < np; ++j) truthful[j] = static_cast<int>(report_index(cons.c));
    const AllocationVector& A = M.table.allocation(M.table.index_of(truthful));
    Rational esw(0);
    for (std::size_t i = 0; i < np; ++i)
        esw += A.probs[i] * Rational(cons.main_context.theta[i]);
    rep.ratio = esw / Rational(B);
    rep.within_bound = rep.ratio <= rep.bound;
    return rep;
}

namespace {

struct TheoremConstants {
    Rational curve;    // multiplicative factor on MSW
    Rational additive; // subtracted constant (zero except lexicographic)
};

TheoremConstants theorem_constants(PositiveTheorem which, int n, const Rational& delta) {
    Rational minus = Rational(1) - delta, plus = Rational(1) + delta;
    switch (which) {
        case PositiveTheorem::SecondPriceLex:
            return {(minus / plus) * (minus / plus), Rational(2) * minus / plus};
        case PositiveTheorem::SecondPriceUniform:
            return {(minus / plus) * (minus / plus), Rational(0)};
        case PositiveTheorem::OptMechanism:
            return {bound_curves(n, delta).opt, Rational(0)};
    }
    throw DomainError("unknown theorem");
}

} // namespace

std::optional<TheoremWitness> verify_positive_theorem(PositiveTheorem which, int n, long B,
                                                      const Rational& delta,
                                                      unsigned long long budget) {
    ContextEnumerator en(n, B, delta);
    const int widen = which == PositiveTheorem::SecondPriceLex ? 1 : 0;
    const std::size_t np = static_cast<std::size_t>(n);
    const std::size_t m = en.intervals().size();

    {
        unsigned long long boxes = 0;
        for (const auto& [lo, hi] : en.intervals())
            boxes += static_cast<unsigned long long>(std::min(B, hi + widen) -
                                                     std::max(0L, lo - widen) + 1);
        if (sat_pow(boxes, n) > budget)
            throw BudgetExceeded("verification sweep exceeds the budget");
        if (sat_pow(static_cast<unsigned long long>(B) + 1, n) > budget)
            throw BudgetExceeded("bid table exceeds the budget");
    }

    TheoremConstants tc = theorem_constants(which, n, delta);

    // Per integer bid profile: what the check needs, precomputed once.
    const std::size_t bid_profiles = static_cast<std::size_t>(sat_pow(
        static_cast<unsigned long long>(B) + 1, n));
    std::vector<int> lex_winner;
    std::vector<std::vector<char>> uni_winner;
    std::vector<int> uni_count;
    std::vector<std::vector<Rational>> opt_probs;

    {
        std::vector<long> v(np, 0);
        std::vector<Rational> bids(np);
        if (which == PositiveTheorem::SecondPriceLex) lex_winner.reserve(bid_profiles);
        for (;;) {
            switch (which) {
                case PositiveTheorem::SecondPriceLex: {
                    int w = 0;
                    for (std::size_t j = 1; j < np; ++j)
                        if (v[j] > v[static_cast<std::size_t>(w)]) w = static_cast<int>(j);
                    lex_winner.push_back(w);
                    break;
                }
                case PositiveTheorem::SecondPriceUniform: {
                    long high = *std::max_element(v.begin(), v.end());
                    std::vector<char> win(np, 0);
                    int cnt = 0;
                    for (std::size_t j = 0; j < np; ++j)
                        if (v[j] == high) {
                            win[j] = 1;
                            ++cnt;
                        }
                    uni_winner.push_back(std::move(win));
                    uni_count.push_back(cnt);
                    break;
                }
                case PositiveTheorem::OptMechanism: {
                    for (std::size_t j = 0; j < np; ++j) bids[j] = Rational(v[j]);
                    opt_probs.push_back(f_delta(bids, delta).probs);
                    break;
                }
            }
            std::size_t j = np;
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

    // rhs[t] = curve * t - additive; rat[t] = t.
    std::vector<Rational> rhs(static_cast<std::size_t>(B) + 1), rat(static_cast<std::size_t>(B) + 1);
    for (long t = 0; t <= B; ++t) {
        rat[static_cast<std::size_t>(t)] = Rational(t);
        rhs[static_cast<std::size_t>(t)] = tc.curve * Rational(t) - tc.additive;
    }

    // A violation witness: valuations at the reducing extremes, re-checked
    // by direct evaluation of both sides.
    std::optional<TheoremWitness> found;
    auto build_witness = [&](const std::vector<std::size_t>& kidx, const std::vector<long>& v,
                             std::size_t raise_player, bool raise) {
        std::vector<long> theta(np);
        for (std::size_t i = 0; i < np; ++i) theta[i] = en.intervals()[kidx[i]].first;
        if (raise) theta[raise_player] = en.intervals()[kidx[raise_player]].second;

        std::size_t idx = 0;
        for (std::size_t j = 0; j < np; ++j)
            idx = idx * (static_cast<std::size_t>(B) + 1) + static_cast<std::size_t>(v[j]);
        Rational esw(0);
        switch (which) {
            case PositiveTheorem::SecondPriceLex:
                esw = Rational(theta[static_cast<std::size_t>(lex_winner[idx])]);
                break;
            case PositiveTheorem::SecondPriceUniform: {
                long sum = 0;
                for (std::size_t j = 0; j < np; ++j)
                    if (uni_winner[idx][j]) sum += theta[j];
                esw = Rational(sum, uni_count[idx]);
                break;
            }
            case PositiveTheorem::OptMechanism:
                for (std::size_t j = 0; j < np; ++j)
                    if (theta[j] != 0) esw += opt_probs[idx][j] * Rational(theta[j]);
                break;
        }
        long msw = *std::max_element(theta.begin(), theta.end());
        TheoremWitness w;
        w.context.n = n;
        w.context.B = B;
        w.context.delta = delta;
        for (std::size_t i = 0; i < np; ++i) w.context.K.push_back(en.interval_set(kidx[i]));
        w.context.theta = theta;
        w.bids = v;
        w.lhs = esw;
        w.rhs = tc.curve * Rational(msw) - tc.additive;
        found = std::move(w);
    };

    std::vector<long> vlo(np), vhi(np), minK(np), maxK(np), v(np);
    en.for_each_profile([&](const std::vector<std::size_t>& kidx) {
        long max_minK = 0;
        for (std::size_t i = 0; i < np; ++i) {
            auto [lo, hi] = en.intervals()[kidx[i]];
            minK[i] = lo;
            maxK[i] = hi;
            vlo[i] = std::max(0L, lo - widen);
            vhi[i] = std::min(B, hi + widen);
            max_minK = std::max(max_minK, lo);
        }

        for (std::size_t i = 0; i < np; ++i) v[i] = vlo[i];
        for (;;) {
            std::size_t idx = 0;
            for (std::size_t j = 0; j < np; ++j)
                idx = idx * (static_cast<std::size_t>(B) + 1) + static_cast<std::size_t>(v[j]);

            switch (which) {
                case PositiveTheorem::SecondPriceLex: {
                    const std::size_t w = static_cast<std::size_t>(lex_winner[idx]);
                    long m2 = -1;
                    std::size_t m2_at = 0;
                    for (std::size_t i = 0; i < np; ++i)
                        if (i != w && maxK[i] > m2) {
                            m2 = maxK[i];
                            m2_at = i;
                        }
                    if (m2 >= 0 &&
                        rat[static_cast<std::size_t>(minK[w])] < rhs[static_cast<std::size_t>(m2)]) {
                        build_witness(kidx, v, m2_at, true);
                        return false;
                    }
                    break;
                }
                case PositiveTheorem::SecondPriceUniform: {
                    const auto& win = uni_winner[idx];
                    const int cnt = uni_count[idx];
                    long sum_min = 0;
                    for (std::size_t j = 0; j < np; ++j)
                        if (win[j]) sum_min += minK[j];
                    Rational base(sum_min, cnt);
                    // theta at per-player minima.
                    if (base < rhs[static_cast<std::size_t>(max_minK)]) {
                        build_witness(kidx, v, 0, false);
                        return false;
                    }
                    // One player raised to their maximum.
                    for (std::size_t i = 0; i < np; ++i) {
                        Rational lhs = base;
                        if (win[i]) lhs += Rational(maxK[i] - minK[i], cnt);
                        if (lhs < rhs[static_cast<std::size_t>(maxK[i])]) {
                            build_witness(kidx, v, i, true);
                            return false;
                        }
                    }
                    break;
                }
                case PositiveTheorem::OptMechanism: {
                    const auto& f = opt_probs[idx];
                    Rational base(0);
                    for (std::size_t j = 0; j < np; ++j)
                        if (minK[j] != 0 && !f[j].is_zero())
                            base += f[j] * rat[static_cast<std::size_t>(minK[j])];
                    if (base < rhs[static_cast<std::size_t>(max_minK)]) {
                        build_witness(kidx, v, 0, false);
                        return false;
                    }
                    for (std::size_t i = 0; i < np; ++i) {
                        Rational lhs = base;
                        if (!f[i].is_zero() && maxK[i] != minK[i])
                            lhs += f[i] * (rat[static_cast<std::size_t>(maxK[i])] -
                                           rat[static_cast<std::size_t>(minK[i])]);
                        if (lhs < rhs[static_cast<std::size_t>(maxK[i])]) {
                            build_witness(kidx, v, i, true);
                            return false;
                        }
                    }
                    break;
                }
            }

            std::size_t j = np;
            for (; j-- > 0;) {
                if (v[j] < vhi[j]) {
                    ++v[j];
                    for (std::size_t k = j + 1; k < np; ++k) v[k] = vlo[k];
                    break;
                }
            }
            if (j == static_cast<std::size_t>(-1)) break;
        }
        return true;
    });

    return found;
}

bool key_range_check(const Rational& v, const Rational& theta, const Rational& delta) {
    check_delta_open(delta);
    Rational minus = Rational(1) - delta, plus = Rational(1) + delta;
    return minus * v <= plus * theta && minus * theta <= plus * v;
}

} // namespace knightian
