#ifndef LABELSPLIT_REPORT_JSON_HPP
#define LABELSPLIT_REPORT_JSON_HPP

#include "labelsplit/evaluator.hpp"
#include "labelsplit/ordering_stats.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

namespace labelsplit {

using Json = nlohmann::ordered_json;

/// Rounds to 12 significant digits so serialised output is stable across platforms.
inline double round_sig12(double v) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline Json to_json(const Label& l) { return Json(l.parts); }

inline Json to_json(const OrderingCounts& c) { return Json::array({c.pos, c.neg}); }

inline Json to_json(const SplitPair& s) {
    Json kids = Json::array();
    for (const auto& c : s.children) kids.push_back(to_json(c));
    return Json{{"parent", to_json(s.parent)}, {"children", std::move(kids)}};
}

inline Json to_json(const TestResult& t) {
    return Json{{"relation", std::string(to_string(t.table.relation))},
                {"context", to_json(t.table.context)},
                {"a1", to_json(t.table.a1)},
                {"a2", to_json(t.table.a2)},
                {"table",
                 {{"a1", to_json(t.table.col_a1)}, {"a2", to_json(t.table.col_a2)}, {"parent", to_json(t.table.parent_col)}}},
                {"p", round_sig12(t.p_value)},
                {"significant", t.significant}};
}

inline Json to_json(const EvaluationReport& r) {
    Json splits = Json::array();
    for (const auto& s : r.split_pairs) splits.push_back(to_json(s));
    Json tests = Json::array();
    for (const auto& t : r.tests) tests.push_back(to_json(t));
    return Json{{"candidate", r.candidate},
                {"split_pairs", std::move(splits)},
                {"m_tests", r.m_tests},
                {"family_size", r.family_size},
                {"corrected_alpha", round_sig12(r.corrected_alpha)},
                {"tests", std::move(tests)},
                {"entropy",
                 {{"total_before", round_sig12(r.entropy.total_before)},
                  {"total_after", round_sig12(r.entropy.total_after)},
                  {"information_gain", round_sig12(r.entropy.information_gain)},
                  {"rig", round_sig12(r.entropy.relative_information_gain)}}},
                {"useful", r.useful},
                {"score", round_sig12(r.score)},
                {"notes", r.notes}};
}

inline Json to_json(const CountRow& row) {
    return Json{{"relation", std::string(to_string(row.relation))},
                {"source", to_json(row.source)},
                {"target", to_json(row.target)},
                {"pos", row.counts.pos},
                {"neg", row.counts.neg}};
}

} // namespace labelsplit

#endif // LABELSPLIT_REPORT_JSON_HPP
