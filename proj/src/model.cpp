#include "smc/model.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace smc {

namespace {

constexpr double kRowSumTolerance = 1e-9;

double sequential_sum(const std::vector<Transition>& row)
{
    double sum = 0.0;
    for (const auto& t : row) sum += t.weight;
    return sum;
}

// Rescale so that summing the row left to right gives exactly 1.
void normalize_row(std::vector<Transition>& row)
{
    if (sequential_sum(row) == 1.0) return;
    const double total = sequential_sum(row);
    for (auto& t : row) t.weight /= total;
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < row.size(); ++i) head += row[i].weight;
    auto& last = row.back().weight;
    last = 1.0 - head;
    for (int guard = 0; guard < 8; ++guard) {
        const double s = head + last;
        if (s == 1.0) break;
        last = std::nextafter(last, s < 1.0 ? 2.0 : 0.0);
    }
}

template <class Chain>
void check_chain(Chain& chain, bool is_dtmc, std::span<const SourceSpan> row_spans)
{
    auto span_of = [&](std::size_t s) -> std::optional<SourceSpan> {
        if (s < row_spans.size()) return row_spans[s];
        return std::nullopt;
    };

    if (chain.n_states == 0) {
        throw Error(ErrorCode::DanglingTarget, "model has no states");
    }
    if (chain.rows.size() < chain.n_states) chain.rows.resize(chain.n_states);
    if (chain.rows.size() > chain.n_states) {
        throw Error(ErrorCode::DanglingTarget,
                    "transition rows given for " + std::to_string(chain.rows.size()) +
                        " states but model declares " + std::to_string(chain.n_states));
    }
    if (chain.initial.index >= chain.n_states) {
        throw Error(ErrorCode::DanglingTarget,
                    "initial state " + std::to_string(chain.initial.index) + " does not exist");
    }
    for (const auto& [name, states] : chain.labels) {
        for (StateId s : states) {
            if (s.index >= chain.n_states) {
                throw Error(ErrorCode::DanglingTarget, "label '" + name + "' names state " +
                                                           std::to_string(s.index) +
                                                           " which does not exist");
            }
        }
    }

    for (std::size_t s = 0; s < chain.rows.size(); ++s) {
        auto& row = chain.rows[s];
        for (const auto& t : row) {
            if (!(t.weight > 0.0) || !std::isfinite(t.weight)) {
                throw Error(ErrorCode::NegativeOrZeroWeight,
                            "transition " + std::to_string(s) + " -> " +
                                std::to_string(t.target.index) +
                                " must have a positive finite weight",
                            span_of(s));
            }
            if (t.target.index >= chain.n_states) {
                throw Error(ErrorCode::DanglingTarget,
                            "transition " + std::to_string(s) + " -> " +
                                std::to_string(t.target.index) + " targets a missing state",
                            span_of(s));
            }
        }
        if (!is_dtmc) {
            if (!std::isfinite(sequential_sum(row))) {
                throw Error(ErrorCode::NegativeOrZeroWeight,
                            "exit rate of state " + std::to_string(s) + " is not finite",
                            span_of(s));
            }
            continue;
        }
        if (row.empty()) {
            throw Error(ErrorCode::EmptyDtmcRow,
                        "state " + std::to_string(s) + " has no outgoing transitions",
                        span_of(s));
        }
        const double sum = sequential_sum(row);
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            throw Error(ErrorCode::RowSumInvalid,
                        "probabilities of state " + std::to_string(s) + " sum to " +
                            std::to_string(sum),
                        span_of(s));
        }
        normalize_row(row);
    }
}

}  // namespace

std::string_view to_string(ModelKind kind)
{
    return kind == ModelKind::Dtmc ? "dtmc" : "ctmc";
}

ModelKind ValidatedModel::kind() const noexcept
{
    return std::holds_alternative<Dtmc>(model_) ? ModelKind::Dtmc : ModelKind::Ctmc;
}

const Labels& ValidatedModel::labels() const noexcept
{
    return std::visit([](const auto& m) -> const Labels& { return m.labels; }, model_);
}

const std::vector<std::vector<Transition>>& ValidatedModel::rows() const
{
    return std::visit(
        [](const auto& m) -> const std::vector<std::vector<Transition>>& { return m.rows; },
        model_);
}

bool ValidatedModel::is_absorbing(StateId s) const
{
    const auto r = row(s);
    if (kind() == ModelKind::Ctmc) return r.empty();
    return r.size() == 1 && r.front().target == s;
}

bool ValidatedModel::atom_holds(StateId s, std::string_view atom) const
{
    const auto it = label_bits_.find(std::string(atom));
    if (it == label_bits_.end()) return false;
    return s.index < it->second.size() && it->second[s.index];
}

bool ValidatedModel::has_atom(std::string_view atom) const
{
    return label_bits_.contains(std::string(atom));
}

ValidatedModel validate(Model model, std::span<const SourceSpan> row_spans)
{
    if (auto* d = std::get_if<Dtmc>(&model)) {
        check_chain(*d, true, row_spans);
    } else {
        check_chain(std::get<Ctmc>(model), false, row_spans);
    }

    ValidatedModel vm;
    vm.model_ = std::move(model);
    std::visit(
        [&](const auto& m) {
            vm.n_states_ = m.n_states;
            vm.initial_ = m.initial;
            for (const auto& [name, states] : m.labels) {
                std::vector<bool> bits(m.n_states, false);
                for (StateId s : states) bits[s.index] = true;
                vm.label_bits_.emplace(name, std::move(bits));
            }
            vm.cumulative_.reserve(m.rows.size());
            vm.exit_rate_.reserve(m.rows.size());
            for (const auto& row : m.rows) {
                std::vector<double> cum;
                cum.reserve(row.size());
                double acc = 0.0;
                for (const auto& t : row) {
                    acc += t.weight;
                    cum.push_back(acc);
                }
                vm.exit_rate_.push_back(acc);
                vm.cumulative_.push_back(std::move(cum));
            }
        },
        vm.model_);
    if (vm.kind() == ModelKind::Dtmc) {
        for (auto& r : vm.exit_rate_) r = 1.0;
    }
    return vm;
}

bool atom_holds(const ValidatedModel& model, StateId state, std::string_view atom)
{
    return model.atom_holds(state, atom);
}

}  // namespace smc
