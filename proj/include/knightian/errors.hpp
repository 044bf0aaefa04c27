#pragma once

#include <stdexcept>
#include <string>

namespace knightian {

// Base class for all errors raised by library operations on bad inputs.
// CLI maps these to exit code 3.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// delta_interval produced no integers.
struct EmptyInterval : DomainError {
    explicit EmptyInterval(const std::string& what) : DomainError(what) {}
};

// The threshold rule needs at least one positive bid.
struct AllZeroBids : DomainError {
    explicit AllZeroBids(const std::string& what) : DomainError(what) {}
};

// An enumeration or tabulation would exceed the configured budget.
struct BudgetExceeded : DomainError {
    explicit BudgetExceeded(const std::string& what) : DomainError(what) {}
};

// A conditional (per-win) price was requested for a player who never wins.
struct ZeroWinProbability : DomainError {
    explicit ZeroWinProbability(const std::string& what) : DomainError(what) {}
};

// Interval arithmetic could not separate two log-bearing values within the
// configured precision cap.
struct UndecidableAtPrecision : DomainError {
    explicit UndecidableAtPrecision(const std::string& what) : DomainError(what) {}
};

// A construction's hypothesis (e.g. a lower bound on B) does not hold.
struct HypothesisViolated : DomainError {
    explicit HypothesisViolated(const std::string& what) : DomainError(what) {}
};

// A direct mechanism audit found that truthful reporting is not
// very-weakly dominant; the message carries the witness.
struct NotTruthful : DomainError {
    explicit NotTruthful(const std::string& what) : DomainError(what) {}
};

} // namespace knightian
