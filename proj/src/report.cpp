#include "smc/report.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

#include "smc/model_text.hpp"

namespace smc {

namespace {

using nlohmann::ordered_json;

std::string_view to_string(CompositionMode m)
{
    return m == CompositionMode::Optimistic ? "optimistic" : "conservative";
}

std::string shortest(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

ordered_json region_json(const Region& r)
{
    return ordered_json{{"p0", r.p0}, {"p1", r.p1}};
}

ordered_json errors_json(const ErrorPair& e)
{
    return ordered_json{{"type1", e.type1}, {"type2", e.type2}};
}

}  // namespace

std::int64_t total_samples(const Report& report)
{
    std::int64_t n = 0;
    for (const auto& l : report.levels) n += l.samples;
    return n;
}

std::string render_report_json(const Report& report, bool timing)
{
    ordered_json j;
    j["schema"] = kReportSchema;
    j["verdict"] = std::string(to_string(report.verdict));
    j["formula"] = report.formula ? render_formula(*report.formula) : std::string();
    j["exact"] = report.exact;
    j["method"] = std::string(to_string(report.method));
    j["composition"] = std::string(to_string(report.composition));
    j["seed"] = report.seed;
    j["errors"] = errors_json(report.errors);
    j["samples_used"] = total_samples(report);

    ordered_json levels = ordered_json::array();
    for (const auto& l : report.levels) {
        ordered_json thresholds = ordered_json::array();
        for (const auto& c : report.checks) {
            if (c.level == l.level && c.tests > 0) {
                thresholds.push_back({{"node", c.node_id}, {"effective", region_json(c.effective)}});
            }
        }
        levels.push_back({{"level", l.level}, {"tests", l.tests}, {"samples", l.samples}, {"thresholds", thresholds}});
    }
    j["levels"] = levels;

    ordered_json checks = ordered_json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"node", c.node_id},
                          {"level", c.level},
                          {"theta", c.theta},
                          {"delta", c.delta},
                          {"region", region_json(c.region)},
                          {"effective", region_json(c.effective)},
                          {"strength", {{"alpha", c.strength.alpha}, {"beta", c.strength.beta}}},
                          {"inner_errors", errors_json(c.inner_errors)},
                          {"tests", c.tests},
                          {"samples", c.samples},
                          {"memo_hits", c.memo_hits},
                          {"accepted_h0", c.accepted_h0}});
    }
    j["checks"] = checks;

    if (report.blackbox) {
        const auto& b = *report.blackbox;
        j["blackbox"] = {{"n", b.n},         {"c", b.c},         {"successes", b.successes},
                         {"theta", b.theta}, {"type1", b.type1}, {"type2", b.type2}};
    }
    j["warnings"] = report.warnings;
    if (timing) j["elapsed_seconds"] = report.elapsed_seconds;
    return j.dump(2) + "\n";
}

std::string render_report_text(const Report& report, bool timing)
{
    std::ostringstream out;
    out << "verdict: " << to_string(report.verdict) << '\n';
    if (report.formula) out << "formula: " << render_formula(*report.formula) << '\n';
    if (report.exact) {
        out << "exact: evaluated on the initial state without sampling\n";
    } else {
        out << "method: " << to_string(report.method) << '\n';
    }
    out << "samples used: " << total_samples(report) << '\n';
    out << "errors: type1=" << shortest(report.errors.type1) << " type2=" << shortest(report.errors.type2) << '\n';
    for (const auto& l : report.levels) {
        out << "level " << l.level << ": tests=" << l.tests << " samples=" << l.samples << '\n';
        for (const auto& c : report.checks) {
            if (c.level != l.level || c.tests == 0) continue;
            out << "  P>=" << format_real(c.theta) << " (node " << c.node_id << "): p0=" << shortest(c.effective.p0)
                << " p1=" << shortest(c.effective.p1);
            if (c.memo_hits > 0) out << " memo_hits=" << c.memo_hits;
            out << '\n';
        }
    }
    if (report.blackbox) {
        const auto& b = *report.blackbox;
        out << "blackbox: n=" << b.n << " c=" << b.c << " successes=" << b.successes
            << " type1=" << shortest(b.type1) << " type2=" << shortest(b.type2) << '\n';
    }
    if (timing) out << "elapsed: " << shortest(report.elapsed_seconds) << " s\n";
    return out.str();
}

}  // namespace smc
