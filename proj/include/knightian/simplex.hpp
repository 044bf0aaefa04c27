#pragma once

#include <vector>

#include "knightian/rational.hpp"

namespace knightian {

// Dense exact LP: maximize c.x subject to the rows, x >= 0.
struct LinearProgram {
    enum class Rel { Le, Eq, Ge };
    struct Row {
        std::vector<Rational> a;
        Rel rel;
        Rational rhs;
    };
    int num_vars = 0;
    std::vector<Rational> objective; // size num_vars
    std::vector<Row> rows;           // each a sized num_vars

    Row& add_row(Rel rel, Rational rhs);
};

struct LpSolution {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status;
    Rational value;           // objective at optimum (Optimal only)
    std::vector<Rational> x;  // a maximizer (Optimal only)
};

// Two-phase simplex over exact rationals with Bland's anti-cycling rule.
// Intended for the small programs dominance analysis produces (tens of
// variables); everything is dense.
LpSolution solve_lp(const LinearProgram& lp);

} // namespace knightian
