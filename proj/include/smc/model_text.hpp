#pragma once

#include <string>
#include <string_view>

#include "smc/formula.hpp"
#include "smc/model.hpp"

namespace smc {

/// Parses the line-oriented model format:
///
///     dtmc | ctmc
///     states N
///     init S
///     label NAME S1 S2 ...     (zero or more)
///     trans FROM TO WEIGHT     (WEIGHT: probability for dtmc, rate for ctmc)
///
/// '#' starts a comment. Validation errors carry the span of the offending row.
ValidatedModel parse_model(std::string_view text);

/// Reads and parses a model file. I/O failures raise ErrorCode::Io.
ValidatedModel load_model(const std::string& path);

/// Canonical text for a model; parse_model(render_model(m)) reproduces m.
std::string render_model(const Model& model);

/// State formula grammar, loosest binding first:
///
///     state := state "|" state | state "&" state | "!" state
///            | atom | "true" | "false" | "(" state ")"
///            | "P" cmp real "[" path "]"          cmp in >= > < <=
///     path  := "X" state | state "U<=" bound state
///            | "F<=" bound state | "G<=" bound state
///     bound := integer (steps) | real "t" (time)
///
/// F and G are desugared; P< and P<= become !P>=, P> becomes P>=.
/// Prob nodes are numbered in pre-order starting from 0.
FormulaPtr parse_formula(std::string_view text);

/// Parses a bare path formula (no surrounding P operator).
PathFormula parse_path_formula(std::string_view text);

std::string render_formula(const Formula& f);
std::string render_path(const PathFormula& p);

/// Shortest decimal text that reads back to the same double, without exponent.
std::string format_real(double value);

}  // namespace smc
