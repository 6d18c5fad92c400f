#include "smc/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace smc {

namespace {

std::size_t pick(std::span<const double> cumulative, double u)
{
    // u is uniform on [0, total)
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) return cumulative.size() - 1;
    return static_cast<std::size_t>(it - cumulative.begin());
}

Trace sample_dtmc(const ValidatedModel& model, StateId from, const UniformStream& rng, const DepthBound& bound)
{
    const auto* steps = std::get_if<Steps>(&bound.kind);
    if (!steps) throw Error(ErrorCode::BoundTypeMismatch, "time bounds apply only to CTMCs");
    if (steps->k > bound.hard_cap) {
        throw Error(ErrorCode::HardCapExceeded,
                    "step bound " + std::to_string(steps->k) + " exceeds the hard cap of " +
                        std::to_string(bound.hard_cap));
    }
    Trace trace;
    trace.steps.reserve(steps->k + 1);
    trace.steps.push_back({from, 0.0});
    StateId s = from;
    for (std::uint64_t j = 0; j < steps->k; ++j) {
        const auto row = model.row(s);
        if (row.size() == 1) {
            s = row.front().target;
        } else {
            s = row[pick(model.cumulative(s), rng(j))].target;
        }
        trace.steps.push_back({s, static_cast<double>(j + 1)});
    }
    trace.truncated = true;
    trace.horizon = static_cast<double>(steps->k);
    return trace;
}

Trace sample_ctmc(const ValidatedModel& model, StateId from, const UniformStream& rng, const DepthBound& bound)
{
    const auto* steps = std::get_if<Steps>(&bound.kind);
    const double t_max = steps ? std::numeric_limits<double>::infinity() : std::get<Time>(bound.kind).t;
    const std::uint64_t k_max = steps ? steps->k : std::numeric_limits<std::uint64_t>::max();
    if (steps && steps->k > bound.hard_cap) {
        throw Error(ErrorCode::HardCapExceeded,
                    "step bound " + std::to_string(steps->k) + " exceeds the hard cap of " +
                        std::to_string(bound.hard_cap));
    }

    Trace trace;
    trace.steps.push_back({from, 0.0});
    StateId s = from;
    double now = 0.0;
    for (std::uint64_t j = 0;; ++j) {
        if (model.is_absorbing(s)) {
            trace.truncated = false;
            trace.horizon = std::numeric_limits<double>::infinity();
            return trace;
        }
        if (j >= k_max) {
            trace.horizon = static_cast<double>(k_max);
            return trace;
        }
        if (j >= bound.hard_cap) {
            throw Error(ErrorCode::HardCapExceeded,
                        "CTMC made " + std::to_string(bound.hard_cap) + " jumps before reaching time " +
                            std::to_string(t_max));
        }
        const double rate = model.exit_rate(s);
        const double u_jump = rng(2 * j);
        const double u_time = rng(2 * j + 1);
        const double next = now + -std::log1p(-u_time) / rate;
        if (next > t_max) {
            trace.horizon = t_max;
            return trace;
        }
        s = model.row(s)[pick(model.cumulative(s), u_jump * rate)].target;
        now = next;
        trace.steps.push_back({s, now});
    }
}

[[noreturn]] void trace_error(int line, int column, const std::string& msg)
{
    throw Error(ErrorCode::SyntaxError, msg, SourceSpan{line, column});
}

}  // namespace

Trace sample_path(const ValidatedModel& model, StateId from, const SampleKey& key, const DepthBound& bound)
{
    if (!model.is_valid(from)) {
        throw Error(ErrorCode::DanglingTarget, "start state " + std::to_string(from.index) + " does not exist");
    }
    if (bound.hard_cap < 1) throw Error(ErrorCode::InvalidParams, "hard cap must be at least 1");
    const UniformStream rng(key);
    if (model.kind() == ModelKind::Dtmc) return sample_dtmc(model, from, rng, bound);
    return sample_ctmc(model, from, rng, bound);
}

std::vector<Trace> parse_traces(std::string_view text, ModelKind kind)
{
    std::vector<Trace> traces;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        ++line_no;
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        Trace trace;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
            if (i >= line.size()) break;
            const std::size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
            const std::string_view tok = line.substr(start, i - start);
            const int column = static_cast<int>(start) + 1;

            const auto at = tok.find('@');
            const std::string_view id_text = kind == ModelKind::Ctmc ? tok.substr(0, at) : tok;
            if (kind == ModelKind::Ctmc && at == std::string_view::npos) {
                trace_error(line_no, column, "CTMC trace tokens must look like state@time");
            }
            std::uint32_t id = 0;
            auto res = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
            if (res.ec != std::errc{} || res.ptr != id_text.data() + id_text.size()) {
                trace_error(line_no, column, "invalid state id '" + std::string(tok) + "'");
            }
            double time = static_cast<double>(trace.steps.size());
            if (kind == ModelKind::Ctmc) {
                const std::string_view t = tok.substr(at + 1);
                res = std::from_chars(t.data(), t.data() + t.size(), time);
                if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || !(time >= 0.0)) {
                    trace_error(line_no, column, "invalid time in '" + std::string(tok) + "'");
                }
                if (trace.steps.empty() && time != 0.0) {
                    trace_error(line_no, column, "a trace must start at time 0");
                }
                if (!trace.steps.empty() && time < trace.steps.back().entry_time) {
                    trace_error(line_no, column, "trace times must be non-decreasing");
                }
            }
            trace.steps.push_back({StateId{id}, time});
        }
        if (trace.steps.empty()) continue;
        trace.truncated = true;
        trace.horizon = trace.steps.back().entry_time;
        traces.push_back(std::move(trace));
    }
    return traces;
}

std::vector<Trace> load_traces(const std::string& path, ModelKind kind)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open trace file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_traces(buf.str(), kind);
}

std::string render_trace(const Trace& trace, ModelKind kind)
{
    std::string out;
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(trace.steps[i].state.index);
        if (kind == ModelKind::Ctmc) {
            char buf[64];
            const auto res = std::to_chars(buf, buf + sizeof buf, trace.steps[i].entry_time);
            out += '@';
            out.append(buf, res.ptr);
        }
    }
    return out;
}

}  // namespace smc
