#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace smc {

/// 1-based position in a model or formula text.
struct SourceSpan {
    int line = 1;
    int column = 1;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class ErrorCode {
    // model validation
    RowSumInvalid,
    NegativeOrZeroWeight,
    DanglingTarget,
    EmptyDtmcRow,
    // text formats
    SyntaxError,
    // simulation / logic
    BoundTypeMismatch,
    HardCapExceeded,
    TraceTooShort,
    // hypothesis testing
    InvalidParams,
    InvalidStrength,
    PlanSearchExhausted,
    WrongSampleCount,
    AlreadyDecided,
    MaxSamplesExceeded,
    // orchestration
    RegionCollapsed,
    NestedNotSupported,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library is reported as an smc::Error. The code
/// is stable and machine-checkable; the span is set for text input errors.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message,
          std::optional<SourceSpan> span = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    const std::optional<SourceSpan>& span() const noexcept { return span_; }

  private:
    ErrorCode code_;
    std::optional<SourceSpan> span_;
};

}  // namespace smc
