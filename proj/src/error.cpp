#include "smc/error.hpp"

namespace smc {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::RowSumInvalid: return "RowSumInvalid";
    case ErrorCode::NegativeOrZeroWeight: return "NegativeOrZeroWeight";
    case ErrorCode::DanglingTarget: return "DanglingTarget";
    case ErrorCode::EmptyDtmcRow: return "EmptyDtmcRow";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::BoundTypeMismatch: return "BoundTypeMismatch";
    case ErrorCode::HardCapExceeded: return "HardCapExceeded";
    case ErrorCode::TraceTooShort: return "TraceTooShort";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidStrength: return "InvalidStrength";
    case ErrorCode::PlanSearchExhausted: return "PlanSearchExhausted";
    case ErrorCode::WrongSampleCount: return "WrongSampleCount";
    case ErrorCode::AlreadyDecided: return "AlreadyDecided";
    case ErrorCode::MaxSamplesExceeded: return "MaxSamplesExceeded";
    case ErrorCode::RegionCollapsed: return "RegionCollapsed";
    case ErrorCode::NestedNotSupported: return "NestedNotSupported";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

namespace {
std::string decorate(ErrorCode code, const std::string& message,
                     const std::optional<SourceSpan>& span)
{
    std::string out(to_string(code));
    if (span) {
        out += " at line " + std::to_string(span->line) + ", column " +
               std::to_string(span->column);
    }
    out += ": ";
    out += message;
    return out;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<SourceSpan> span)
    : std::runtime_error(decorate(code, message, span)), code_(code), span_(span)
{
}

}  // namespace smc
