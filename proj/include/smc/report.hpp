#pragma once

#include <string>

#include "smc/verify.hpp"

namespace smc {

inline constexpr int kReportSchema = 1;

/// Single JSON object, newline-terminated. Without `timing` the wall time
/// is left out so equal runs render byte-identically.
std::string render_report_json(const Report& report, bool timing = true);

/// Human-readable summary: verdict, samples, effective thresholds per level.
std::string render_report_text(const Report& report, bool timing = true);

std::int64_t total_samples(const Report& report);

}  // namespace smc
