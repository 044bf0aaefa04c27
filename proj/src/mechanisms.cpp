#include "knightian/mechanisms.hpp"

#include <algorithm>
#include <numeric>

#include "knightian/errors.hpp"

namespace knightian {

namespace {

void check_delta(const Rational& delta) {
    if (!(delta > Rational(0)) || !(delta < Rational(1)))
        throw DomainError("delta must lie strictly between 0 and 1");
}

void check_bids(const std::vector<Rational>& v, long B) {
    if (v.empty()) throw DomainError("empty bid profile");
    for (const Rational& z : v)
        if (z.sign() < 0 || z > Rational(B)) throw DomainError("bid outside [0, B]");
}

std::vector<Rational> to_rational(const std::vector<long>& v) {
    std::vector<Rational> out;
    out.reserve(v.size());
    for (long x : v) out.emplace_back(x);
    return out;
}

// Odometer over {0..B}^k; returns false once wrapped around.
bool next_profile(std::vector<long>& p, long B) {
    for (std::size_t j = p.size(); j-- > 0;) {
        if (p[j] < B) {
            ++p[j];
            std::fill(p.begin() + static_cast<long>(j) + 1, p.end(), 0L);
            return true;
        }
    }
    return false;
}

} // namespace

Outcome second_price(const std::vector<long>& v) {
    if (v.empty()) throw DomainError("empty bid profile");
    std::size_t win = 0;
    for (std::size_t j = 1; j < v.size(); ++j)
        if (v[j] > v[win]) win = j;
    long pay = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (j == win) continue;
        pay = std::max(pay, v[j]);
    }
    Outcome o;
    o.winner = static_cast<int>(win);
    o.prices.assign(v.size(), Rational(0));
    o.prices[win] = Rational(pay);
    return o;
}

ExpectedOutcome second_price(const std::vector<long>& v, TieRule tie) {
    if (v.empty()) throw DomainError("empty bid profile");
    long high = *std::max_element(v.begin(), v.end());
    std::vector<std::size_t> winners;
    for (std::size_t j = 0; j < v.size(); ++j)
        if (v[j] == high) winners.push_back(j);

    ExpectedOutcome out;
    out.alloc.probs.assign(v.size(), Rational(0));
    out.expected_prices.assign(v.size(), Rational(0));
    if (tie == TieRule::Lexicographic) {
        Outcome o = second_price(v);
        out.alloc.probs[static_cast<std::size_t>(*o.winner)] = Rational(1);
        out.expected_prices = o.prices;
        return out;
    }
    // Uniform over the highest bidders; a winner pays the highest competing
    // bid, which on a tie of two or more is the high bid itself.
    Rational share(1, static_cast<long>(winners.size()));
    for (std::size_t w : winners) {
        out.alloc.probs[w] = share;
        long pay = winners.size() > 1 ? high : [&] {
            long p = 0;
            for (std::size_t j = 0; j < v.size(); ++j)
                if (j != w) p = std::max(p, v[j]);
            return p;
        }();
        out.expected_prices[w] = share * Rational(pay);
    }
    return out;
}

AllocationVector random_assignment(int n) {
    if (n < 1) throw DomainError("need at least one player");
    AllocationVector a;
    a.probs.assign(static_cast<std::size_t>(n), Rational(1, n));
    return a;
}

Rational d_delta(const Rational& delta) {
    check_delta(delta);
    Rational r = (Rational(1) + delta) / (Rational(1) - delta);
    return r * r - Rational(1);
}

WinnerCount candidate_winner_count(const std::vector<Rational>& sorted_bids, const Rational& D) {
    const std::size_t n = sorted_bids.size();
    if (n == 0) throw DomainError("empty bid profile");
    if (D.sign() <= 0) throw DomainError("aggressiveness constant must be positive");
    for (std::size_t j = 0; j < n; ++j) {
        if (sorted_bids[j].sign() < 0) throw DomainError("negative bid");
        if (j > 0 && sorted_bids[j] > sorted_bids[j - 1])
            throw DomainError("bids not sorted nonincreasingly");
    }
    if (sorted_bids[0].is_zero()) throw AllZeroBids("all bids are zero");

    Rational sum(0);
    for (std::size_t k = 1; k <= n; ++k) {
        sum += sorted_bids[k - 1];
        Rational threshold = sum / (Rational(static_cast<long>(k)) + D);
        if (sorted_bids[k - 1] > threshold &&
            (k == n || threshold >= sorted_bids[k]))
            return {static_cast<int>(k), threshold};
    }
    // The defining chain has exactly one solution; reaching this point would
    // mean the scan above is wrong.
    throw DomainError("winner count search failed");
}

AllocationVector f_delta(const std::vector<Rational>& z, const Rational& delta) {
    check_delta(delta);
    const std::size_t n = z.size();
    if (n == 0) throw DomainError("empty bid profile");
    AllocationVector out;
    out.probs.assign(n, Rational(0));
    for (const Rational& b : z)
        if (b.sign() < 0) throw DomainError("negative bid");

    bool all_zero = std::all_of(z.begin(), z.end(), [](const Rational& b) { return b.is_zero(); });
    if (all_zero) return out;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return z[b] < z[a]; });
    std::vector<Rational> sorted;
    sorted.reserve(n);
    for (std::size_t j : order) sorted.push_back(z[j]);

    Rational D = d_delta(delta);
    WinnerCount wc = candidate_winner_count(sorted, D);
    Rational S(0);
    for (int r = 0; r < wc.n_star; ++r) S += sorted[static_cast<std::size_t>(r)];

    Rational nD = Rational(static_cast<long>(n)) + D;
    Rational kD = Rational(wc.n_star) + D;
    for (int r = 0; r < wc.n_star; ++r) {
        const Rational& zi = sorted[static_cast<std::size_t>(r)];
        Rational p = nD * (zi * kD - S) / (Rational(static_cast<long>(n)) * kD * zi * D);
        out.probs[order[static_cast<std::size_t>(r)]] = p;
    }
    validate_allocation(out);
    return out;
}

AllocationVector f_delta(const std::vector<long>& z, const Rational& delta) {
    return f_delta(to_rational(z), delta);
}

PiecewiseAllocation piecewise_profile(const std::vector<Rational>& v_others,
                                      const Rational& delta, long B) {
    check_delta(delta);
    if (B < 1) throw DomainError("bid bound must be at least 1");
    for (const Rational& w : v_others)
        if (w.sign() < 0 || w > Rational(B)) throw DomainError("bid outside [0, B]");

    const long n = static_cast<long>(v_others.size()) + 1;
    const Rational D = d_delta(delta);
    const Rational end(B);

    std::vector<Rational> w(v_others);
    std::sort(w.begin(), w.end(), [](const Rational& a, const Rational& b) { return b < a; });

    int k_opp = 0;
    if (!w.empty() && !w[0].is_zero())
        k_opp = candidate_winner_count(w, D).n_star;

    std::vector<Rational> prefix(static_cast<std::size_t>(k_opp) + 1, Rational(0));
    for (int k = 1; k <= k_opp; ++k)
        prefix[static_cast<std::size_t>(k)] = prefix[static_cast<std::size_t>(k - 1)] + w[static_cast<std::size_t>(k - 1)];

    Rational entry = k_opp == 0 ? Rational(0)
                                : prefix[static_cast<std::size_t>(k_opp)] / (Rational(k_opp) + D);

    std::vector<PiecewisePiece> pieces;
    pieces.push_back({Rational(0), min(entry, end), Rational(0), Rational(0)});
    Rational z = entry;

    // With k opponents winning alongside the player, the win probability is
    // a_k + b_k / z until the bid pushes opponent k below the threshold at
    // z = w_k (k+1+D) - S_k; the upper bounds increase as k drops, so the
    // pieces chain (ties between opponents produce empty pieces).
    for (int k = k_opp; k >= 0 && z < end; --k) {
        const Rational S = prefix[static_cast<std::size_t>(std::min(k, k_opp))];
        Rational upper = end;
        if (k >= 1) {
            Rational u = w[static_cast<std::size_t>(k - 1)] * (Rational(k + 1) + D) - S;
            upper = min(u, end);
        }
        if (z < upper) {
            Rational scale = (Rational(n) + D) / (Rational(n) * (Rational(k + 1) + D) * D);
            pieces.push_back({z, upper, scale * (Rational(k) + D), -scale * S});
            z = upper;
        }
    }
    return PiecewiseAllocation(std::move(pieces));
}

PriceExpression price_opt(std::size_t i, const std::vector<Rational>& v,
                          const Rational& delta, long B) {
    check_bids(v, B);
    if (i >= v.size()) throw DomainError("player index out of range");
    std::vector<Rational> others;
    others.reserve(v.size() - 1);
    for (std::size_t j = 0; j < v.size(); ++j)
        if (j != i) others.push_back(v[j]);
    PiecewiseAllocation prof = piecewise_profile(others, delta, B);
    Rational fi = f_delta(v, delta).probs[i];
    PriceExpression price(v[i] * fi);
    price -= prof.integral(Rational(0), v[i]);
    return price;
}

PriceExpression price_opt_conditional(std::size_t i, const std::vector<Rational>& v,
                                      const Rational& delta, long B) {
    check_bids(v, B);
    if (i >= v.size()) throw DomainError("player index out of range");
    Rational fi = f_delta(v, delta).probs[i];
    if (fi.is_zero())
        throw ZeroWinProbability("conditional price undefined: player never wins here");
    std::vector<Rational> others;
    others.reserve(v.size() - 1);
    for (std::size_t j = 0; j < v.size(); ++j)
        if (j != i) others.push_back(v[j]);
    PiecewiseAllocation prof = piecewise_profile(others, delta, B);
    PriceExpression price(v[i]);
    price -= prof.integral(Rational(0), v[i]) / fi;
    return price;
}

PiecewiseAllocation AllocationFunction::slice(std::size_t, const std::vector<Rational>&) const {
    throw DomainError("allocation function has no slice form");
}

namespace {

class FDeltaFunction final : public AllocationFunction {
public:
    FDeltaFunction(int n, long B, Rational delta) : n_(n), B_(B), delta_(std::move(delta)) {
        if (n < 1 || B < 1) throw DomainError("need n >= 1 and B >= 1");
        check_delta(delta_);
    }
    int players() const override { return n_; }
    long bound() const override { return B_; }
    AllocationVector at(const std::vector<Rational>& bids) const override {
        check_bids(bids, B_);
        if (bids.size() != static_cast<std::size_t>(n_)) throw DomainError("wrong profile size");
        return f_delta(bids, delta_);
    }
    bool has_slice() const override { return true; }
    PiecewiseAllocation slice(std::size_t i, const std::vector<Rational>& others) const override {
        if (i >= static_cast<std::size_t>(n_) || others.size() + 1 != static_cast<std::size_t>(n_))
            throw DomainError("bad slice request");
        return piecewise_profile(others, delta_, B_);
    }

private:
    int n_;
    long B_;
    Rational delta_;
};

class SecondPriceFunction final : public AllocationFunction {
public:
    SecondPriceFunction(int n, long B, TieRule tie) : n_(n), B_(B), tie_(tie) {
        if (n < 1 || B < 1) throw DomainError("need n >= 1 and B >= 1");
    }
    int players() const override { return n_; }
    long bound() const override { return B_; }
    AllocationVector at(const std::vector<Rational>& bids) const override {
        check_bids(bids, B_);
        if (bids.size() != static_cast<std::size_t>(n_)) throw DomainError("wrong profile size");
        Rational high = bids[0];
        for (const Rational& b : bids) high = max(high, b);
        std::vector<std::size_t> winners;
        for (std::size_t j = 0; j < bids.size(); ++j)
            if (bids[j] == high) winners.push_back(j);
        AllocationVector a;
        a.probs.assign(bids.size(), Rational(0));
        if (tie_ == TieRule::Lexicographic) {
            a.probs[winners.front()] = Rational(1);
        } else {
            Rational share(1, static_cast<long>(winners.size()));
            for (std::size_t wj : winners) a.probs[wj] = share;
        }
        return a;
    }
    bool has_slice() const override { return true; }
    PiecewiseAllocation slice(std::size_t i, const std::vector<Rational>& others) const override {
        if (i >= static_cast<std::size_t>(n_) || others.size() + 1 != static_cast<std::size_t>(n_))
            throw DomainError("bad slice request");
        for (const Rational& w : others)
            if (w.sign() < 0 || w > Rational(B_)) throw DomainError("bid outside [0, B]");
        Rational m(0);
        for (const Rational& w : others) m = max(m, w);
        std::vector<PiecewisePiece> pieces;
        pieces.push_back({Rational(0), m, Rational(0), Rational(0)});
        if (m < Rational(B_)) pieces.push_back({m, Rational(B_), Rational(1), Rational(0)});
        return PiecewiseAllocation(std::move(pieces));
    }

private:
    int n_;
    long B_;
    TieRule tie_;
};

class RandomFunction final : public AllocationFunction {
public:
    RandomFunction(int n, long B) : n_(n), B_(B) {
        if (n < 1 || B < 1) throw DomainError("need n >= 1 and B >= 1");
    }
    int players() const override { return n_; }
    long bound() const override { return B_; }
    AllocationVector at(const std::vector<Rational>& bids) const override {
        check_bids(bids, B_);
        if (bids.size() != static_cast<std::size_t>(n_)) throw DomainError("wrong profile size");
        return random_assignment(n_);
    }
    bool has_slice() const override { return true; }
    PiecewiseAllocation slice(std::size_t i, const std::vector<Rational>& others) const override {
        if (i >= static_cast<std::size_t>(n_) || others.size() + 1 != static_cast<std::size_t>(n_))
            throw DomainError("bad slice request");
        return PiecewiseAllocation({{Rational(0), Rational(B_), Rational(1, n_), Rational(0)}});
    }

private:
    int n_;
    long B_;
};

std::vector<Rational> grid_points(long B, const Rational& step) {
    if (step.sign() <= 0) throw DomainError("grid step must be positive");
    std::vector<Rational> pts;
    Rational end(B);
    for (Rational g(0); g <= end; g += step) pts.push_back(g);
    if (pts.back() < end) pts.push_back(end);
    return pts;
}

} // namespace

std::unique_ptr<AllocationFunction> make_f_delta_function(int n, long B, const Rational& delta) {
    return std::make_unique<FDeltaFunction>(n, B, delta);
}
std::unique_ptr<AllocationFunction> make_second_price_function(int n, long B, TieRule tie) {
    return std::make_unique<SecondPriceFunction>(n, B, tie);
}
std::unique_ptr<AllocationFunction> make_random_function(int n, long B) {
    return std::make_unique<RandomFunction>(n, B);
}

std::optional<MonotoneWitness> check_monotone(const AllocationFunction& f,
                                              const Rational& grid_step) {
    const int n = f.players();
    const long B = f.bound();
    std::vector<Rational> grid = grid_points(B, grid_step);

    std::vector<std::size_t> odo(static_cast<std::size_t>(n - 1), 0);
    std::vector<Rational> others(static_cast<std::size_t>(n - 1));
    for (;;) {
        for (std::size_t j = 0; j < odo.size(); ++j) others[j] = grid[odo[j]];
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
            std::vector<Rational> own = grid;
            if (f.has_slice()) {
                PiecewiseAllocation s = f.slice(i, others);
                for (const PiecewisePiece& p : s.pieces()) {
                    if (p.lo < p.hi) own.push_back((p.lo + p.hi) / Rational(2));
                    own.push_back(p.hi);
                }
                std::sort(own.begin(), own.end());
                own.erase(std::unique(own.begin(), own.end()), own.end());
            }
            std::vector<Rational> bids(static_cast<std::size_t>(n));
            for (std::size_t j = 0, k = 0; j < bids.size(); ++j)
                if (j != i) bids[j] = others[k++];
            std::optional<Rational> prev;
            Rational prev_z(0);
            for (const Rational& z : own) {
                bids[i] = z;
                Rational val = f.at(bids).probs[i];
                if (prev && val < *prev)
                    return MonotoneWitness{i, others, prev_z, z};
                prev = val;
                prev_z = z;
            }
        }
        // Advance the opponents odometer.
        std::size_t j = odo.size();
        for (; j-- > 0;) {
            if (odo[j] + 1 < grid.size()) {
                ++odo[j];
                std::fill(odo.begin() + static_cast<long>(j) + 1, odo.end(), 0);
                break;
            }
        }
        if (j == static_cast<std::size_t>(-1)) break;
        if (odo.empty()) break;
    }
    return std::nullopt;
}

std::optional<DistinguishabilityWitness> check_d_dm(const AllocationFunction& f, int d) {
    if (d < 1) throw DomainError("distinguishability degree must be at least 1");
    if (!f.has_slice()) throw DomainError("distinguishability check needs slices");
    const int n = f.players();
    const long B = f.bound();

    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
        for (long lo = 0; lo + d <= B; ++lo) {
            for (long hi = lo + d; hi <= B; ++hi) {
                bool separated = false;
                std::vector<long> w(static_cast<std::size_t>(n - 1), 0);
                std::vector<Rational> others(w.size());
                std::vector<Rational> bids(static_cast<std::size_t>(n));
                do {
                    for (std::size_t j = 0; j < w.size(); ++j) others[j] = Rational(w[j]);
                    for (std::size_t j = 0, k = 0; j < bids.size(); ++j)
                        if (j != i) bids[j] = others[k++];
                    bids[i] = Rational(lo);
                    Rational flat = f.at(bids).probs[i] * Rational(hi - lo);
                    PriceExpression gain = f.slice(i, others).integral(Rational(lo), Rational(hi));
                    gain -= PriceExpression(flat);
                    if (gain.sign() > 0) {
                        separated = true;
                        break;
                    }
                } while (next_profile(w, B));
                if (!separated) return DistinguishabilityWitness{i, lo, hi};
            }
        }
    }
    return std::nullopt;
}

std::optional<GoodnessWitness> check_delta_good(const AllocationFunction& f,
                                                const Rational& delta) {
    check_delta(delta);
    const int n = f.players();
    const long B = f.bound();
    const Rational D = d_delta(delta);
    const Rational need_scale = (Rational(n) + D) / Rational(n);

    // Own bids descend so the tightest candidates (large v_i against small
    // opponents) surface first in a failing run; v_i = 0 holds trivially.
    std::vector<long> v(static_cast<std::size_t>(n));
    std::vector<Rational> bids(static_cast<std::size_t>(n));
    std::vector<long> others(static_cast<std::size_t>(n) - 1, 0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
        for (long z = B; z >= 1; --z) {
            std::fill(others.begin(), others.end(), 0L);
            do {
                for (std::size_t j = 0, k = 0; j < v.size(); ++j)
                    v[j] = (j == i) ? z : others[k++];
                for (std::size_t j = 0; j < bids.size(); ++j) bids[j] = Rational(v[j]);
                AllocationVector a = f.at(bids);
                Rational lhs = D * a.probs[i] * bids[i];
                for (std::size_t j = 0; j < bids.size(); ++j) lhs += a.probs[j] * bids[j];
                if (lhs < need_scale * bids[i])
                    return GoodnessWitness{i, v};
            } while (next_profile(others, B));
        }
    }
    return std::nullopt;
}

} // namespace knightian
