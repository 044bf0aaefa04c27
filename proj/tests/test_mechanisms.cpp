#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "knightian/errors.hpp"
#include "knightian/finite_mechanism.hpp"
#include "knightian/mechanisms.hpp"

using namespace knightian;

namespace {

// Independent payment oracle: adaptive Simpson quadrature in doubles over
// the pointwise allocation (never touches the piecewise machinery). A panel
// is accepted only when two consecutive refinement levels agree: a kink at
// the zero of an a + b/z piece can make one level agree exactly with the
// unrefined estimate, but not two in a row.
double simpson(const std::function<double(double)>& g, double a, double b, double fa,
               double fm, double fb, double whole, double eps, int depth, bool confirmed) {
    double m = (a + b) / 2;
    double lm = (a + m) / 2, rm = (m + b) / 2;
    double flm = g(lm), frm = g(rm);
    double left = (m - a) / 6 * (fa + 4 * flm + fm);
    double right = (b - m) / 6 * (fm + 4 * frm + fb);
    bool agree = std::fabs(left + right - whole) < 15 * eps;
    if (depth <= 0 || (agree && confirmed))
        return left + right + (left + right - whole) / 15;
    return simpson(g, a, m, fa, flm, fm, left, eps / 2, depth - 1, agree) +
           simpson(g, m, b, fm, frm, fb, right, eps / 2, depth - 1, agree);
}

double integrate(const std::function<double(double)>& g, double a, double b, double eps) {
    // Integrate in unit chunks so breakpoints never hide inside one panel.
    double total = 0;
    for (double x = a; x < b; x += 1.0) {
        double hi = std::min(x + 1.0, b);
        double fa = g(x), fb = g(hi), fm = g((x + hi) / 2);
        double whole = (hi - x) / 6 * (fa + 4 * fm + fb);
        total += simpson(g, x, hi, fa, fm, fb, whole, eps, 40, false);
    }
    return total;
}

double own_bid_prob(std::size_t i, const std::vector<Rational>& v, const Rational& delta,
                    double z) {
    std::vector<Rational> bids = v;
    bids[i] = Rational(mpq_class(z)); // exact binary-to-rational conversion
    return f_delta(bids, delta).probs[i].to_double();
}

} // namespace

TEST_CASE("second price outcomes") {
    Outcome o = second_price({3, 7, 5});
    CHECK(o.winner == 1);
    CHECK(o.prices[1] == Rational(5));
    CHECK(o.prices[0] == Rational(0));
    CHECK(o.prices[2] == Rational(0));

    o = second_price({5, 5});
    CHECK(o.winner == 0); // lexicographic tie
    CHECK(o.prices[0] == Rational(5));

    o = second_price({0, 0, 0});
    CHECK(o.winner == 0);
    CHECK(o.prices[0] == Rational(0));

    ExpectedOutcome e = second_price({5, 5}, TieRule::UniformRandom);
    CHECK(e.alloc.probs == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
    CHECK(e.expected_prices == std::vector<Rational>{Rational(5, 2), Rational(5, 2)});

    e = second_price({3, 7, 5}, TieRule::UniformRandom);
    CHECK(e.alloc.probs[1] == Rational(1));
    CHECK(e.expected_prices[1] == Rational(5));

    e = second_price({5, 5}, TieRule::Lexicographic);
    CHECK(e.alloc.probs == std::vector<Rational>{Rational(1), Rational(0)});
    CHECK(e.expected_prices[0] == Rational(5));

    CHECK(random_assignment(4).probs == std::vector<Rational>(4, Rational(1, 4)));
    CHECK_THROWS_AS(second_price({}), DomainError);
    CHECK_THROWS_AS(random_assignment(0), DomainError);
}

TEST_CASE("aggressiveness constant") {
    CHECK(d_delta(Rational(1, 3)) == Rational(3));
    CHECK(d_delta(Rational(1, 2)) == Rational(8));
    CHECK(d_delta(Rational(1, 5)) == Rational(5, 4));
    CHECK_THROWS_AS(d_delta(Rational(0)), DomainError);
    CHECK_THROWS_AS(d_delta(Rational(1)), DomainError);
    CHECK_THROWS_AS(d_delta(Rational(3, 2)), DomainError);
}

TEST_CASE("candidate winner count") {
    WinnerCount w = candidate_winner_count({Rational(10), Rational(2)}, Rational(3));
    CHECK(w.n_star == 1);
    CHECK(w.threshold == Rational(5, 2));

    w = candidate_winner_count({Rational(6), Rational(6), Rational(6)}, Rational(3));
    // k=3: T = 18/6 = 3 and 6 > 3: all three are candidates.
    CHECK(w.n_star == 3);
    CHECK(w.threshold == Rational(3));

    CHECK_THROWS_AS(candidate_winner_count({Rational(0), Rational(0)}, Rational(3)),
                    AllZeroBids);
    CHECK_THROWS_AS(candidate_winner_count({Rational(2), Rational(10)}, Rational(3)),
                    DomainError); // not sorted
    CHECK_THROWS_AS(candidate_winner_count({Rational(10), Rational(2)}, Rational(0)),
                    DomainError); // D must be positive
}

TEST_CASE("winner count is the unique solution of the threshold condition") {
    std::mt19937 rng(20240817);
    std::uniform_int_distribution<long> bid(0, 20);
    std::uniform_int_distribution<int> len(1, 5);
    for (const Rational& D : {Rational(3), Rational(8), Rational(5, 4)}) {
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<Rational> z;
            int n = len(rng);
            bool all_zero = true;
            for (int j = 0; j < n; ++j) {
                long b = bid(rng);
                if (b != 0) all_zero = false;
                z.emplace_back(b);
            }
            std::sort(z.begin(), z.end(), [](const Rational& a, const Rational& b) {
                return b < a;
            });
            if (all_zero) continue;

            // Oracle: count the k satisfying the definition directly.
            int matches = 0;
            int oracle_k = 0;
            Rational prefix(0);
            for (int k = 1; k <= n; ++k) {
                prefix += z[static_cast<std::size_t>(k - 1)];
                Rational t = prefix / (Rational(k) + D);
                bool upper = z[static_cast<std::size_t>(k - 1)] > t;
                bool lower = (k == n) || t >= z[static_cast<std::size_t>(k)];
                if (upper && lower) {
                    ++matches;
                    oracle_k = k;
                }
            }
            CHECK(matches == 1);
            WinnerCount w = candidate_winner_count(z, D);
            CHECK(w.n_star == oracle_k);
        }
    }
}

TEST_CASE("aggressive allocation worked instance") {
    AllocationVector a = f_delta(std::vector<long>{10, 2}, Rational(1, 3));
    CHECK(a.probs[0] == Rational(5, 8));
    CHECK(a.probs[1] == Rational(0));

    a = f_delta(std::vector<long>{0, 0, 0}, Rational(1, 2));
    CHECK(a.probs == std::vector<Rational>(3, Rational(0)));

    // Equal bids share equally.
    a = f_delta(std::vector<long>{6, 6, 6}, Rational(1, 3));
    CHECK(a.probs[0] == a.probs[1]);
    CHECK(a.probs[1] == a.probs[2]);
}

TEST_CASE("aggressive allocation properties on random profiles") {
    std::mt19937 rng(987123);
    std::uniform_int_distribution<long> bid(0, 15);
    std::uniform_int_distribution<int> len(2, 5);
    for (const Rational& delta : {Rational(1, 3), Rational(1, 2), Rational(1, 5)}) {
        Rational D = d_delta(delta);
        for (int trial = 0; trial < 300; ++trial) {
            int n = len(rng);
            std::vector<long> v;
            for (int j = 0; j < n; ++j) v.push_back(bid(rng));
            AllocationVector a = f_delta(v, delta);
            REQUIRE(static_cast<int>(a.probs.size()) == n);

            Rational total(0);
            for (const Rational& p : a.probs) {
                CHECK(p >= Rational(0));
                CHECK(p <= Rational(1));
                total += p;
            }
            CHECK(total <= Rational(1));

            bool all_zero = std::all_of(v.begin(), v.end(), [](long b) { return b == 0; });
            if (all_zero) {
                CHECK(total == Rational(0));
                continue;
            }

            // Positive probability exactly above the threshold.
            std::vector<Rational> sorted;
            for (long b : v) sorted.emplace_back(b);
            std::sort(sorted.begin(), sorted.end(),
                      [](const Rational& x, const Rational& y) { return y < x; });
            WinnerCount w = candidate_winner_count(sorted, D);
            for (int j = 0; j < n; ++j) {
                bool winner = Rational(v[static_cast<std::size_t>(j)]) > w.threshold;
                CHECK((a.probs[static_cast<std::size_t>(j)] > Rational(0)) == winner);
            }

            // Permutation equivariance.
            std::vector<std::size_t> perm(static_cast<std::size_t>(n));
            for (std::size_t j = 0; j < perm.size(); ++j) perm[j] = j;
            std::shuffle(perm.begin(), perm.end(), rng);
            std::vector<long> pv(static_cast<std::size_t>(n));
            for (std::size_t j = 0; j < perm.size(); ++j) pv[j] = v[perm[j]];
            AllocationVector pa = f_delta(pv, delta);
            for (std::size_t j = 0; j < perm.size(); ++j)
                CHECK(pa.probs[j] == a.probs[perm[j]]);
        }
    }
}

TEST_CASE("own-bid slice worked instance") {
    PiecewiseAllocation pw = piecewise_profile({Rational(2)}, Rational(1, 3), 12);
    REQUIRE(pw.pieces().size() == 3);

    CHECK(pw.pieces()[0].lo == Rational(0));
    CHECK(pw.pieces()[0].hi == Rational(1, 2));
    CHECK(pw.pieces()[0].a == Rational(0));
    CHECK(pw.pieces()[0].b == Rational(0));

    CHECK(pw.pieces()[1].hi == Rational(8));
    CHECK(pw.pieces()[1].a == Rational(2, 3));
    CHECK(pw.pieces()[1].b == Rational(-1, 3));

    CHECK(pw.pieces()[2].hi == Rational(12));
    CHECK(pw.pieces()[2].a == Rational(5, 8));
    CHECK(pw.pieces()[2].b == Rational(0));

    CHECK(pw.breakpoints() == std::vector<Rational>{Rational(1, 2), Rational(8)});
    // Continuity: zero at the entry threshold, 5/8 where the opponent drops
    // out of the candidate set.
    CHECK(pw.value_at(Rational(1, 2)) == Rational(0));
    CHECK(pw.value_at(Rational(8)) == Rational(5, 8));
    CHECK(pw.value_at(Rational(10)) == Rational(5, 8));
}

TEST_CASE("slices are continuous and match pointwise evaluation") {
    std::mt19937 rng(55221);
    std::uniform_int_distribution<long> bid(0, 10);
    for (const Rational& delta : {Rational(1, 3), Rational(1, 2)}) {
        for (int trial = 0; trial < 40; ++trial) {
            int n = 2 + (trial % 2);
            std::vector<Rational> others;
            for (int j = 0; j < n - 1; ++j) others.emplace_back(bid(rng));
            PiecewiseAllocation pw = piecewise_profile(others, delta, 10);

            // Adjacent pieces agree at the shared breakpoint. The origin is
            // excluded: with no positive opponent the probability jumps from
            // zero to its constant level as soon as the bid is positive.
            const auto& ps = pw.pieces();
            for (std::size_t k = 0; k + 1 < ps.size(); ++k) {
                Rational z = ps[k].hi;
                if (z.is_zero()) continue;
                Rational left = ps[k].a + ps[k].b / z;
                Rational right = ps[k + 1].a + ps[k + 1].b / z;
                CHECK(left == right);
            }

            // Slice values equal direct evaluation away from breakpoints
            // (and at them, by continuity).
            std::vector<Rational> sample = {Rational(0), Rational(10)};
            for (const Rational& bp : pw.breakpoints()) {
                sample.push_back(bp);
                sample.push_back(bp + Rational(1, 7));
            }
            for (const Rational& z : sample) {
                if (z > Rational(10)) continue;
                std::vector<Rational> bids = others;
                bids.insert(bids.begin(), z);
                Rational direct = f_delta(bids, delta).probs[0];
                CHECK(pw.value_at(z) == direct);
            }
        }
    }
}

TEST_CASE("payment worked instance is exact") {
    std::vector<Rational> v = {Rational(10), Rational(2)};
    PriceExpression cond = price_opt_conditional(0, v, Rational(1, 3), 12);
    CHECK(cond == PriceExpression::log_term(Rational(32, 15), Rational(2)));
    double x = cond.to_double();
    CHECK(std::fabs(x - (32.0 / 15.0) * std::log(2.0)) < 1e-12);

    PriceExpression uncond = price_opt(0, v, Rational(1, 3), 12);
    CHECK(uncond == PriceExpression::log_term(Rational(4, 3), Rational(2)));

    // The loser pays nothing and has no conditional price.
    CHECK(price_opt(1, v, Rational(1, 3), 12) == PriceExpression(Rational(0)));
    CHECK_THROWS_AS(price_opt_conditional(1, v, Rational(1, 3), 12), ZeroWinProbability);
}

TEST_CASE("payments match numerical quadrature on random instances") {
    std::mt19937 rng(424242);
    std::uniform_int_distribution<long> bid(0, 10);
    std::uniform_int_distribution<int> len(2, 3);
    const Rational deltas[] = {Rational(1, 3), Rational(1, 2), Rational(1, 5)};
    int checked = 0;
    for (int trial = 0; checked < 100; ++trial) {
        const Rational& delta = deltas[trial % 3];
        int n = len(rng);
        long B = 10;
        std::vector<Rational> v;
        for (int j = 0; j < n; ++j) v.emplace_back(bid(rng));

        for (std::size_t i = 0; i < v.size(); ++i) {
            double direct = price_opt(i, v, delta, B).to_double();
            auto g = [&](double z) { return own_bid_prob(i, v, delta, z); };
            double quad = integrate(g, 0.0, v[i].to_double(), 1e-12);
            double expect = v[i].to_double() * f_delta(v, delta).probs[i].to_double() - quad;
            CHECK(std::fabs(direct - expect) < 1e-9);
        }
        ++checked;
    }
}

TEST_CASE("slice integrals match quadrature of the pointwise allocation") {
    std::mt19937 rng(77321);
    std::uniform_int_distribution<long> bid(0, 10);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 2 + (trial % 2);
        Rational delta = (trial % 2) ? Rational(1, 2) : Rational(1, 3);
        std::vector<Rational> others;
        for (int j = 0; j < n - 1; ++j) others.emplace_back(bid(rng));
        PiecewiseAllocation pw = piecewise_profile(others, delta, 10);

        std::vector<Rational> v = others;
        v.insert(v.begin(), Rational(0));
        auto g = [&](double z) { return own_bid_prob(0, v, delta, z); };
        double sym = pw.integral(Rational(0), Rational(10)).to_double();
        double quad = integrate(g, 0.0, 10.0, 1e-12);
        CHECK(std::fabs(sym - quad) < 1e-9);
    }
}

namespace {

// A deliberately non-monotone allocation: the first player's win probability
// dips back to zero above bid 5.
class DippingFunction : public AllocationFunction {
public:
    int players() const override { return 2; }
    long bound() const override { return 8; }
    AllocationVector at(const std::vector<Rational>& bids) const override {
        AllocationVector a{{Rational(0), Rational(0)}};
        if (bids[0] > Rational(0) && bids[0] <= Rational(5)) a.probs[0] = Rational(1, 2);
        return a;
    }
};

} // namespace

TEST_CASE("monotonicity checker") {
    CHECK(!check_monotone(*make_f_delta_function(2, 8, Rational(1, 3)), Rational(1, 2)));
    CHECK(!check_monotone(*make_f_delta_function(3, 6, Rational(1, 2)), Rational(1)));
    CHECK(!check_monotone(*make_second_price_function(2, 8, TieRule::Lexicographic),
                          Rational(1)));
    CHECK(!check_monotone(*make_second_price_function(2, 8, TieRule::UniformRandom),
                          Rational(1)));

    DippingFunction dip;
    auto w = check_monotone(dip, Rational(1));
    REQUIRE(w.has_value());
    CHECK(w->i == 0);
    CHECK(w->z_lo <= Rational(5));
    CHECK(w->z_hi > Rational(5));
}

TEST_CASE("distinguishability checker") {
    CHECK(!check_d_dm(*make_f_delta_function(2, 8, Rational(1, 3)), 1));
    CHECK(!check_d_dm(*make_f_delta_function(2, 8, Rational(1, 2)), 1));

    // Lexicographic tie breaking merges adjacent bids for the favored
    // player; distance two separates, distance one does not.
    auto lex = make_second_price_function(2, 8, TieRule::Lexicographic);
    auto w = check_d_dm(*lex, 1);
    REQUIRE(w.has_value());
    CHECK(w->v_hi - w->v_lo == 1);
    CHECK(!check_d_dm(*lex, 2));

    auto uni = make_second_price_function(2, 8, TieRule::UniformRandom);
    CHECK(!check_d_dm(*uni, 1));

    // A constant allocation never separates any pair of bids.
    auto cw = check_d_dm(*make_random_function(2, 8), 1);
    REQUIRE(cw.has_value());
    CHECK(cw->v_lo == 0);
    CHECK(cw->v_hi == 1);

    CHECK_THROWS_AS(check_d_dm(*uni, 0), DomainError);
}

TEST_CASE("goodness checker") {
    CHECK(!check_delta_good(*make_f_delta_function(2, 10, Rational(1, 2)), Rational(1, 2)));
    CHECK(!check_delta_good(*make_f_delta_function(2, 8, Rational(1, 3)), Rational(1, 3)));

    auto w = check_delta_good(*make_random_function(2, 5), Rational(1, 2));
    REQUIRE(w.has_value());
    CHECK(w->i == 0);
    CHECK(w->v == std::vector<long>{5, 0});
}

TEST_CASE("tabulated mechanisms") {
    FiniteMechanism lex = tabulate_second_price(2, 3, TieRule::Lexicographic);
    CHECK(lex.players() == 2);
    CHECK(lex.profile_count() == 16);
    CHECK(lex.strategies_are_bids());
    CHECK(lex.rational_prices());
    CHECK(lex.dm_degree() == 2);
    std::size_t idx = lex.index_of({2, 2});
    CHECK(lex.allocation(idx).probs == std::vector<Rational>{Rational(1), Rational(0)});
    CHECK(lex.price(idx, 0) == PriceExpression(Rational(2)));
    CHECK(lex.profile_of(idx) == std::vector<int>{2, 2});

    FiniteMechanism uni = tabulate_second_price(2, 3, TieRule::UniformRandom);
    CHECK(uni.dm_degree() == 1);
    idx = uni.index_of({2, 2});
    CHECK(uni.allocation(idx).probs ==
          std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
    CHECK(uni.price(idx, 1) == PriceExpression(Rational(1)));

    FiniteMechanism rnd = tabulate_random(3, 2);
    CHECK(rnd.allocation(0).probs == std::vector<Rational>(3, Rational(1, 3)));
    CHECK(rnd.price(5, 1) == PriceExpression(Rational(0)));
    CHECK(rnd.strategies_are_bids());
    CHECK(!rnd.dm_degree().has_value());

    FiniteMechanism opt = tabulate_opt(2, 12, Rational(1, 3));
    CHECK(opt.dm_degree() == 1);
    CHECK(!opt.rational_prices());
    idx = opt.index_of({10, 2});
    CHECK(opt.allocation(idx).probs == std::vector<Rational>{Rational(5, 8), Rational(0)});
    CHECK(opt.price(idx, 0) == PriceExpression::log_term(Rational(4, 3), Rational(2)));
    CHECK(opt.price(idx, 1) == PriceExpression(Rational(0)));

    CHECK_THROWS_AS(tabulate_second_price(2, 3000, TieRule::Lexicographic),
                    BudgetExceeded);
}
