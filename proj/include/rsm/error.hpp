#pragma once

#include <stdexcept>
#include <string>

namespace rsm {

/// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
    precondition,   ///< caller violated an operation's contract
    domain,         ///< radius or level outside the valid range
    schema,         ///< malformed configuration
    evaluation,     ///< non-finite integrand / profile sample
    budget,         ///< tolerance not reached within the evaluation budget
    inconclusive,   ///< classification could not be decided within r_max
    consistency,    ///< internal cross-check failed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when adaptive quadrature exhausts its subdivision budget.
/// Carries the best estimate reached so callers can degrade gracefully.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& what, double best, double err)
        : Error(ErrorKind::budget, what), best_estimate(best), error_estimate(err) {}
    double best_estimate;
    double error_estimate;
};

/// Raised when an integrand or profile evaluates to NaN/inf.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, double x) : Error(ErrorKind::evaluation, what), abscissa(x) {}
    double abscissa;
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::domain: return "domain";
    case ErrorKind::schema: return "schema";
    case ErrorKind::evaluation: return "evaluation";
    case ErrorKind::budget: return "budget";
    case ErrorKind::inconclusive: return "inconclusive";
    case ErrorKind::consistency: return "consistency";
    }
    return "unknown";
}

}  // namespace rsm
