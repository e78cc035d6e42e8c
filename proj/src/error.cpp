#include "parkcrit/error.hpp"

namespace parkcrit {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::ProbabilitiesDoNotSumToOne: return "ProbabilitiesDoNotSumToOne";
    case ErrorCode::ZeroMu0: return "ZeroMu0";
    case ErrorCode::Mu01IsOne: return "Mu01IsOne";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::EvaluationBeyondRadius: return "EvaluationBeyondRadius";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::NonzeroConstantTerm: return "NonzeroConstantTerm";
    case ErrorCode::NonpositiveConstantTerm: return "NonpositiveConstantTerm";
    case ErrorCode::IrrationalSquareRoot: return "IrrationalSquareRoot";
    case ErrorCode::ZeroConstantTerm: return "ZeroConstantTerm";
    case ErrorCode::NoRootWithinBudget: return "NoRootWithinBudget";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::NotCritical: return "NotCritical";
    case ErrorCode::NegativeCoefficient: return "NegativeCoefficient";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::IterationCapExceeded: return "IterationCapExceeded";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NotExact: return "NotExact";
    case ErrorCode::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

bool is_input_error(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NegativeProbability:
    case ErrorCode::ProbabilitiesDoNotSumToOne:
    case ErrorCode::ZeroMu0:
    case ErrorCode::Mu01IsOne:
    case ErrorCode::InvalidParameter:
    case ErrorCode::BudgetExceeded:
    case ErrorCode::NotExact:
    case ErrorCode::InvalidInput:
        return true;
    default:
        return false;
    }
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

} // namespace parkcrit
