#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "smc/error.hpp"

namespace smc {

struct StateId {
    std::uint32_t index = 0;

    constexpr StateId() = default;
    constexpr explicit StateId(std::uint32_t i) : index(i) {}

    friend constexpr auto operator<=>(const StateId&, const StateId&) = default;
};

/// One outgoing edge. `weight` is a probability for a DTMC and a rate for a CTMC.
struct Transition {
    StateId target;
    double weight = 0.0;

    friend bool operator==(const Transition&, const Transition&) = default;
};

using Labels = std::map<std::string, std::set<StateId>, std::less<>>;

struct Dtmc {
    std::uint32_t n_states = 0;
    StateId initial;
    std::vector<std::vector<Transition>> rows;
    Labels labels;

    friend bool operator==(const Dtmc&, const Dtmc&) = default;
};

/// Empty rows are absorbing states.
struct Ctmc {
    std::uint32_t n_states = 0;
    StateId initial;
    std::vector<std::vector<Transition>> rows;
    Labels labels;

    friend bool operator==(const Ctmc&, const Ctmc&) = default;
};

using Model = std::variant<Dtmc, Ctmc>;

enum class ModelKind { Dtmc, Ctmc };

std::string_view to_string(ModelKind kind);

/// A model whose invariants have been checked, with DTMC rows normalized to
/// sum to exactly 1 and per-state sampling tables precomputed. Immutable.
class ValidatedModel {
  public:
    const Model& model() const noexcept { return model_; }
    ModelKind kind() const noexcept;
    std::uint32_t n_states() const noexcept { return n_states_; }
    StateId initial() const noexcept { return initial_; }
    const Labels& labels() const noexcept;

    std::span<const Transition> row(StateId s) const { return rows()[s.index]; }

    /// Running sums of the row weights, last entry = row total.
    std::span<const double> cumulative(StateId s) const { return cumulative_[s.index]; }

    /// CTMC: Σ rates of the row (0 for absorbing). DTMC: 1.
    double exit_rate(StateId s) const { return exit_rate_[s.index]; }

    bool is_absorbing(StateId s) const;
    bool is_valid(StateId s) const noexcept { return s.index < n_states_; }

    bool atom_holds(StateId s, std::string_view atom) const;
    bool has_atom(std::string_view atom) const;

  private:
    friend ValidatedModel validate(Model, std::span<const SourceSpan>);

    const std::vector<std::vector<Transition>>& rows() const;

    Model model_;
    std::uint32_t n_states_ = 0;
    StateId initial_;
    std::vector<std::vector<double>> cumulative_;
    std::vector<double> exit_rate_;
    std::unordered_map<std::string, std::vector<bool>> label_bits_;
};

/// Checks every model invariant. `row_spans`, when non-empty, holds one
/// source position per state and is attached to row-level errors.
ValidatedModel validate(Model model, std::span<const SourceSpan> row_spans = {});

/// Unknown atoms are false.
bool atom_holds(const ValidatedModel& model, StateId state, std::string_view atom);

}  // namespace smc
