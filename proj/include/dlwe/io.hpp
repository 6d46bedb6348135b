#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "dlwe/field.hpp"
#include "dlwe/matching.hpp"
#include "dlwe/peaks.hpp"
#include "dlwe/predict.hpp"
#include "dlwe/tau.hpp"

namespace dlwe {

using nlohmann::json;

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline json spec_to_json(const SolutionSpec &spec) {
    json g = json::array();
    for (const Complexq &c : spec.gamma) g.push_back({to_string(c.re), to_string(c.im)});
    return json{{"partition", spec.lam.parts()}, {"b", to_string(spec.b)},
                {"omega", to_string(spec.omega)}, {"gamma", g},
                {"n", spec.n}, {"m", spec.m.entries()}, {"mn", spec.mn},
                {"N", spec.N}, {"M", spec.M}};
}

inline json peak_to_json(const Peak &p) {
    json j{{"r", p.r}, {"s", p.s}, {"height", p.height},
           {"kind", to_string(p.kind)}, {"group", p.group}};
    if (!p.refined) j["refined"] = false;
    return j;
}

inline json peakmap_to_json(const PeakMap &map) {
    json peaks = json::array();
    for (const Peak &p : map.peaks) peaks.push_back(peak_to_json(p));
    json j{{"t", map.t},
           {"provenance", to_string(map.provenance)},
           {"spec", spec_to_json(map.spec)},
           {"peaks", peaks}};
    if (map.classified) j["classification_consistent"] = map.classification_consistent;
    if (!map.note.empty()) j["note"] = map.note;
    return j;
}

/// CSV with header "r,s,v", row-major (r outer), LF endings, full precision.
inline void grid_to_csv(const FieldGrid &grid, std::ostream &out) {
    out << "r,s,v\n";
    for (std::size_t i = 0; i < grid.window.nr; ++i) {
        std::string r = format_double(grid.r_at(i));
        for (std::size_t j = 0; j < grid.window.ns; ++j)
            out << r << ',' << format_double(grid.s_at(j)) << ',' << format_double(grid.value(i, j))
                << '\n';
    }
}

inline json tau_term_to_json(const TauTerm &term) {
    return json{{"index", term.index.entries()},
                {"weight", term.weight},
                {"combo", term.combo.to_canonical_string()}};
}

inline json tau_terms_to_json(const std::vector<TauTerm> &terms) {
    json out = json::array();
    for (const TauTerm &t : terms) out.push_back(tau_term_to_json(t));
    return out;
}

inline json pattern_report_to_json(const PatternReport &report) {
    json checks = json::array();
    for (const PatternCheck &c : report.checks)
        checks.push_back(json{{"name", c.name}, {"pass", c.pass}, {"metric", c.metric}, {"note", c.note}});
    return json{{"partition", report.partition}, {"t", report.t}, {"checks", checks}};
}

/// Optimal matching between two peak maps with per-pair distances and
/// summary statistics.
inline json comparison_json(const PeakMap &detected, const PeakMap &predicted) {
    std::vector<Point2> a, b;
    for (const Peak &p : detected.peaks) a.push_back({p.r, p.s});
    for (const Peak &p : predicted.peaks) b.push_back({p.r, p.s});
    auto pairs = match_points(a, b);

    json rows = json::array();
    double total = 0, worst = 0;
    for (const MatchedPair &m : pairs) {
        rows.push_back(json{{"detected", {{"r", a[m.from].r}, {"s", a[m.from].s}}},
                            {"predicted", {{"r", b[m.to].r}, {"s", b[m.to].s}}},
                            {"distance", m.dist}});
        total += m.dist;
        worst = std::max(worst, m.dist);
    }
    double diam = diameter(a);
    double mean = pairs.empty() ? 0.0 : total / static_cast<double>(pairs.size());
    return json{{"pairs", rows},
                {"matched", pairs.size()},
                {"detected_count", a.size()},
                {"predicted_count", b.size()},
                {"mean_distance", mean},
                {"max_distance", worst},
                {"configuration_diameter", diam},
                {"mean_over_diameter", diam > 0 ? mean / diam : 0.0}};
}

}  // namespace dlwe
