#include "knightian/context.hpp"

#include <algorithm>

#include "knightian/errors.hpp"

namespace knightian {

void validate_allocation(const AllocationVector& a) {
    Rational sum(0);
    for (const Rational& p : a.probs) {
        if (p < Rational(0) || p > Rational(1))
            throw DomainError("AllocationVector: entry outside [0,1]: " + p.str());
        sum += p;
    }
    if (sum > Rational(1))
        throw DomainError("AllocationVector: entries sum to " + sum.str() + " > 1");
}

Rational social_welfare(const std::vector<long>& theta, const Outcome& outcome) {
    if (!outcome.winner) return Rational(0);
    return Rational(theta.at(static_cast<std::size_t>(*outcome.winner)));
}

Rational max_social_welfare(const std::vector<long>& theta) {
    if (theta.empty()) throw DomainError("max_social_welfare: empty profile");
    return Rational(*std::max_element(theta.begin(), theta.end()));
}

Rational expected_social_welfare(const std::vector<long>& theta, const AllocationVector& a) {
    Rational sum(0);
    for (std::size_t i = 0; i < a.probs.size(); ++i)
        sum += a.probs[i] * Rational(theta.at(i));
    return sum;
}

std::vector<std::string> validate_context(const Context& c) {
    std::vector<std::string> bad;
    auto player = [](std::size_t i) { return std::to_string(i + 1); };

    if (c.n < 1) bad.push_back("n must be >= 1");
    if (c.B < 1) bad.push_back("B must be >= 1");
    if (c.delta <= Rational(0) || c.delta >= Rational(1))
        bad.push_back("delta must lie in (0,1)");
    if (c.K.size() != static_cast<std::size_t>(c.n))
        bad.push_back("K must have n entries");
    if (c.theta.size() != static_cast<std::size_t>(c.n))
        bad.push_back("theta must have n entries");

    for (std::size_t i = 0; i < c.K.size(); ++i) {
        if (c.K[i].min() < 0 || c.K[i].max() > c.B)
            bad.push_back("K[" + player(i) + "] outside {0,...,B}");
        if (inaccuracy(c.K[i]) > c.delta)
            bad.push_back("K[" + player(i) + "] inaccuracy " + inaccuracy(c.K[i]).str() +
                          " exceeds delta " + c.delta.str());
    }
    for (std::size_t i = 0; i < c.theta.size() && i < c.K.size(); ++i) {
        if (c.theta[i] < 0 || c.theta[i] > c.B)
            bad.push_back("theta[" + player(i) + "] outside {0,...,B}");
        if (!c.K[i].contains(c.theta[i]))
            bad.push_back("theta[" + player(i) + "] not in K[" + player(i) + "]");
    }
    return bad;
}

} // namespace knightian
