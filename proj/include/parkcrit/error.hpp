#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace parkcrit {

enum class ErrorCode {
    // law construction
    NegativeProbability,
    ProbabilitiesDoNotSumToOne,
    ZeroMu0,
    Mu01IsOne,
    InvalidParameter,
    // evaluation
    EvaluationBeyondRadius,
    OutOfDomain,
    // series
    OrderMismatch,
    NonzeroConstantTerm,
    NonpositiveConstantTerm,
    IrrationalSquareRoot,
    ZeroConstantTerm,
    // analytic engine
    NoRootWithinBudget,
    NegativeRadicand,
    NoSolution,
    NotCritical,
    NegativeCoefficient,
    BracketFailure,
    IterationCapExceeded,
    // enumeration / simulation
    BudgetExceeded,
    NotExact,
    // file formats
    InvalidInput,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for codes caused by bad user input rather than by a numerical failure.
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace parkcrit
