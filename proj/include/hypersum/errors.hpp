#pragma once

#include <stdexcept>
#include <string>

namespace hypersum {

// Input text that does not conform to the expression / term grammar.
// `pos` is a byte offset into the offending string.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t pos)
        : std::runtime_error(what + " (at offset " + std::to_string(pos) + ")"), pos_(pos) {}
    std::size_t pos() const { return pos_; }

private:
    std::size_t pos_;
};

// Structurally valid input outside an operation's domain: division by a
// zero polynomial, a quantum-number combination with no bound state,
// evaluation at a pole, and so on.
class DomainViolation : public std::runtime_error {
public:
    explicit DomainViolation(const std::string& what) : std::runtime_error(what) {}
};

// Two terms whose quotient is not a rational function of the summation
// variable; cross ratios and joint telescoping both require similarity.
class NotSimilar : public std::runtime_error {
public:
    explicit NotSimilar(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a numeric routine cannot deliver a trustworthy value
// (lost precision, nonterminating series, quadrature overflow).
class NumericFailure : public std::runtime_error {
public:
    explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

// A feature whose physical inputs are not pinned down yet.  Callers can
// catch this and degrade gracefully (the CLI reports SKIPPED).
class GateBlocked : public std::runtime_error {
public:
    explicit GateBlocked(const std::string& what) : std::runtime_error(what) {}
};

// Quantum numbers that bound no state: mu >= |kappa| (imaginary nu), n < 0,
// or the spurious n = 0 level with kappa > 0.
class UnphysicalState : public DomainViolation {
public:
    explicit UnphysicalState(const std::string& what) : DomainViolation(what) {}
};

// The telescoping search exhausted its order budget without a recurrence.
class NoRecurrenceFound : public std::runtime_error {
public:
    explicit NoRecurrenceFound(const std::string& what) : std::runtime_error(what) {}
};

// A relation that was expected to reduce to zero left a nonzero residual.
// Carries the residual text so reports can show what survived.
class ProofFailed : public std::runtime_error {
public:
    explicit ProofFailed(const std::string& what) : std::runtime_error(what) {}
};

// Series evaluation requested for parameters where no upper index
// terminates the sum.
class NonTerminating : public NumericFailure {
public:
    explicit NonTerminating(const std::string& what) : NumericFailure(what) {}
};

// Quadrature kept moving under node doubling past the node budget.
class NotConverged : public NumericFailure {
public:
    explicit NotConverged(const std::string& what) : NumericFailure(what) {}
};

} // namespace hypersum
