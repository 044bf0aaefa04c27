#include "knightian/simplex.hpp"

#include <cstddef>

#include "knightian/errors.hpp"

namespace knightian {

LinearProgram::Row& LinearProgram::add_row(Rel rel, Rational rhs) {
    rows.push_back(Row{std::vector<Rational>(num_vars), rel, std::move(rhs)});
    return rows.back();
}

namespace {

// Tableau with rows indexed 0..m-1 and a cost row; column 0 holds the rhs /
// objective value, columns 1..n hold variables.
class Tableau {
public:
    Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), cells_((m + 1) * (n + 1)) {}

    Rational& at(std::size_t r, std::size_t c) { return cells_[r * (n_ + 1) + c]; }
    const Rational& at(std::size_t r, std::size_t c) const { return cells_[r * (n_ + 1) + c]; }
    Rational& cost(std::size_t c) { return cells_[m_ * (n_ + 1) + c]; }

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    void pivot(std::size_t pr, std::size_t pc) {
        Rational inv = Rational(1) / at(pr, pc);
        for (std::size_t c = 0; c <= n_; ++c) at(pr, c) *= inv;
        for (std::size_t r = 0; r <= m_; ++r) {
            if (r == pr) continue;
            Rational f = cells_[r * (n_ + 1) + pc];
            if (f.is_zero()) continue;
            for (std::size_t c = 0; c <= n_; ++c)
                cells_[r * (n_ + 1) + c] -= f * at(pr, c);
        }
    }

private:
    std::size_t m_, n_;
    std::vector<Rational> cells_;
};

} // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    const std::size_t m = lp.rows.size();
    const std::size_t n = static_cast<std::size_t>(lp.num_vars);
    for (const auto& row : lp.rows)
        if (row.a.size() != n) throw DomainError("solve_lp: row width mismatch");
    if (lp.objective.size() != n) throw DomainError("solve_lp: objective width mismatch");

    // Column layout: 1..n originals, then one slack/surplus per inequality
    // row, then one artificial per row that needs one.
    std::size_t num_slack = 0;
    for (const auto& row : lp.rows)
        if (row.rel != LinearProgram::Rel::Eq) ++num_slack;

    // A row with nonnegative rhs and a +1 slack starts basic on its slack;
    // everything else gets an artificial.
    std::vector<int> sign(m, 1);
    std::vector<bool> needs_artificial(m, false);
    std::size_t num_art = 0;
    for (std::size_t r = 0; r < m; ++r) {
        const auto& row = lp.rows[r];
        if (row.rhs.sign() < 0) sign[r] = -1;
        LinearProgram::Rel rel = row.rel;
        if (sign[r] < 0) {
            if (rel == LinearProgram::Rel::Le) rel = LinearProgram::Rel::Ge;
            else if (rel == LinearProgram::Rel::Ge) rel = LinearProgram::Rel::Le;
        }
        bool slack_is_basic = rel == LinearProgram::Rel::Le;
        if (!slack_is_basic) {
            needs_artificial[r] = true;
            ++num_art;
        }
    }

    const std::size_t total = n + num_slack + num_art;
    Tableau t(m, total);
    std::vector<std::size_t> basis(m);

    {
        std::size_t slack_col = n;      // next slack column (1-based offset below)
        std::size_t art_col = n + num_slack;
        for (std::size_t r = 0; r < m; ++r) {
            const auto& row = lp.rows[r];
            Rational s(sign[r]);
            t.at(r, 0) = row.rhs * s;
            for (std::size_t j = 0; j < n; ++j) t.at(r, 1 + j) = row.a[j] * s;
            if (row.rel != LinearProgram::Rel::Eq) {
                Rational coef = row.rel == LinearProgram::Rel::Le ? Rational(1) : Rational(-1);
                t.at(r, 1 + slack_col) = coef * s;
                if (!needs_artificial[r]) basis[r] = 1 + slack_col;
                ++slack_col;
            }
            if (needs_artificial[r]) {
                t.at(r, 1 + art_col) = Rational(1);
                basis[r] = 1 + art_col;
                ++art_col;
            }
        }
    }

    auto run = [&](std::size_t limit_cols) -> bool {
        // Maximize: entering column = smallest index with positive reduced
        // cost (Bland), leaving row = min ratio, smallest basis index on
        // ties. Returns false on unboundedness.
        for (;;) {
            std::size_t pc = 0;
            for (std::size_t c = 1; c <= limit_cols; ++c) {
                if (t.cost(c).sign() > 0) {
                    pc = c;
                    break;
                }
            }
            if (pc == 0) return true;
            std::size_t pr = m;
            Rational best;
            for (std::size_t r = 0; r < m; ++r) {
                if (t.at(r, pc).sign() <= 0) continue;
                Rational ratio = t.at(r, 0) / t.at(r, pc);
                if (pr == m || ratio < best ||
                    (ratio == best && basis[r] < basis[pr])) {
                    pr = r;
                    best = ratio;
                }
            }
            if (pr == m) return false;
            t.pivot(pr, pc);
            basis[pr] = pc;
        }
    };

    // Phase 1: maximize -(sum of artificials).
    if (num_art > 0) {
        for (std::size_t c = n + num_slack; c < total; ++c) t.cost(1 + c) = Rational(-1);
        for (std::size_t r = 0; r < m; ++r) {
            if (basis[r] >= 1 + n + num_slack) {
                // Price out the basic artificial.
                for (std::size_t c = 0; c <= total; ++c) t.cost(c) += t.at(r, c);
            }
        }
        run(total);
        // Convention: cost(0) == -(current objective). Phase 1 maximizes
        // -(sum of artificials), so a positive cost(0) means some artificial
        // is stuck above zero.
        if (t.cost(0).sign() > 0)
            return {LpSolution::Status::Infeasible, Rational(0), {}};
        // Pivot any artificial that is still basic (at zero) out of the
        // basis, or drop the row as redundant.
        for (std::size_t r = 0; r < m; ++r) {
            if (basis[r] < 1 + n + num_slack) continue;
            std::size_t pc = 0;
            for (std::size_t c = 1; c <= n + num_slack; ++c) {
                if (!t.at(r, c).is_zero()) {
                    pc = c;
                    break;
                }
            }
            if (pc != 0) {
                t.pivot(r, pc);
                basis[r] = pc;
            }
            // A fully zero row is redundant; its artificial stays basic at
            // value zero and never blocks phase 2 because the column is
            // excluded from pricing there.
        }
    }

    // Phase 2: restore the real objective priced out against the basis.
    for (std::size_t c = 0; c <= total; ++c) t.cost(c) = Rational(0);
    for (std::size_t j = 0; j < n; ++j) t.cost(1 + j) = lp.objective[j];
    for (std::size_t r = 0; r < m; ++r) {
        std::size_t b = basis[r];
        if (b >= 1 && b <= n) {
            Rational f = lp.objective[b - 1];
            if (f.is_zero()) continue;
            for (std::size_t c = 0; c <= total; ++c) t.cost(c) -= f * t.at(r, c);
        }
    }
    if (!run(n + num_slack))
        return {LpSolution::Status::Unbounded, Rational(0), {}};

    LpSolution sol;
    sol.status = LpSolution::Status::Optimal;
    sol.x.assign(n, Rational(0));
    for (std::size_t r = 0; r < m; ++r)
        if (basis[r] >= 1 && basis[r] <= n) sol.x[basis[r] - 1] = t.at(r, 0);
    sol.value = -t.cost(0);
    return sol;
}

} // namespace knightian
