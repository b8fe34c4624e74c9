#pragma once
#include <stdexcept>
#include <string>

namespace odrf {

// Error categories map to CLI exit codes: Usage=1, Data=2, Internal=3.
enum class ErrorCode {
    MissingColumn,
    EmptyDataset,
    BadLabel,
    DimensionMismatch,
    TooFewRows,
    EmptySide,
    NonBinary,
    NoValidSplit,
    BadTau,
    BudgetExceedsData,
    WrongTask,
    ZeroDenominator,
    LengthMismatch,
    VersionMismatch,
    SchemaMismatch,
    BadSpec,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &msg)
        : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

    bool is_data_error() const {
        switch (code_) {
        case ErrorCode::MissingColumn:
        case ErrorCode::EmptyDataset:
        case ErrorCode::BadLabel:
        case ErrorCode::TooFewRows:
        case ErrorCode::VersionMismatch:
        case ErrorCode::SchemaMismatch:
        case ErrorCode::BadSpec:
            return true;
        default:
            return false;
        }
    }

  private:
    ErrorCode code_;
};

} // namespace odrf
