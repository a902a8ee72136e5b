#ifndef LABELSPLIT_RELABEL_HPP
#define LABELSPLIT_RELABEL_HPP

#include "labelsplit/errors.hpp"
#include "labelsplit/event_model.hpp"
#include "labelsplit/time.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace labelsplit {

/// Label = values of the listed attributes.
struct Projection {
    std::vector<std::string> attributes;
};

/// Events labelled `base` become `low` when their local time of day is before `threshold`
/// and `high` otherwise. Other events keep their label.
struct TimeThreshold {
    Label base;
    TimeOfDay threshold{};
    Label low;
    Label high;
    TimeZone timezone;
};

enum class RuleOp { eq, ne, lt, ge };

/// `attribute` may name an event attribute or one of the pseudo attributes
/// "@label" (current label, "+"-joined) and "@time" (local time of day, HH:MM:SS).
struct RuleCondition {
    std::string attribute;
    RuleOp op = RuleOp::eq;
    std::string value;
};

struct Rule {
    std::vector<RuleCondition> conditions; ///< conjunction; empty for the default rule
    std::optional<Label> output;           ///< nullopt keeps the current label
};

inline constexpr std::string_view kKeepLabel = "@label";
inline constexpr std::string_view kTimePseudoAttribute = "@time";

/// Ordered rules; the first rule whose conditions all hold decides the label.
struct RuleSet {
    std::vector<Rule> rules;
    TimeZone timezone;

    /// Line format: `ATTR <op> VALUE [&& ATTR <op> VALUE ...] -> LABEL` with op one of
    /// `=`, `!=`, `<`, `>=` (surrounded by spaces), or `default -> LABEL` as the final rule.
    /// LABEL `@label` keeps the event's current label. Values may be double-quoted.
    static RuleSet parse(std::string_view text, TimeZone tz = TimeZone::utc()) {
        RuleSet set;
        set.timezone = std::move(tz);
        std::istringstream in{std::string(text)};
        std::string line;
        std::size_t n = 0;
        bool saw_default = false;
        while (std::getline(in, line)) {
            ++n;
            const std::string body = trim(line);
            if (body.empty() || body[0] == '#') continue;
            auto fail = [&](const std::string& why) {
                return ConfigError("rule file line " + std::to_string(n) + ": " + why);
            };
            if (saw_default) throw fail("rules after the default rule are unreachable");
            const auto arrow = body.rfind("->");
            if (arrow == std::string::npos) throw fail("missing '-> LABEL'");
            const std::string lhs = trim(body.substr(0, arrow));
            const std::string out = unquote(trim(body.substr(arrow + 2)));
            if (out.empty()) throw fail("empty output label");

            Rule rule;
            if (out != kKeepLabel) rule.output = Label::single(out);
            if (lhs == "default") {
                saw_default = true;
            } else {
                std::size_t start = 0;
                for (;;) {
                    const auto amp = lhs.find("&&", start);
                    const std::string cond = trim(lhs.substr(start, amp == std::string::npos ? amp : amp - start));
                    rule.conditions.push_back(parse_condition(cond, fail));
                    if (amp == std::string::npos) break;
                    start = amp + 2;
                }
            }
            set.rules.push_back(std::move(rule));
        }
        if (set.rules.empty()) throw ConfigError("rule file contains no rules");
        return set;
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    }

    static std::string unquote(const std::string& s) {
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
        return s;
    }

    template <class Fail>
    static RuleCondition parse_condition(const std::string& cond, Fail&& fail) {
        static constexpr std::pair<std::string_view, RuleOp> ops[] = {
            {" != ", RuleOp::ne}, {" >= ", RuleOp::ge}, {" = ", RuleOp::eq}, {" < ", RuleOp::lt}};
        std::size_t best = std::string::npos;
        std::size_t best_len = 0;
        RuleOp op = RuleOp::eq;
        for (const auto& [tok, o] : ops) {
            const auto p = cond.find(tok);
            if (p != std::string::npos && p < best) {
                best = p;
                best_len = tok.size();
                op = o;
            }
        }
        if (best == std::string::npos) throw fail("expected 'ATTR <op> VALUE' in '" + cond + "'");
        RuleCondition c;
        c.attribute = unquote(trim(cond.substr(0, best)));
        c.op = op;
        c.value = unquote(trim(cond.substr(best + best_len)));
        if (c.attribute.empty()) throw fail("empty attribute name");
        return c;
    }
};

namespace detail {

inline std::optional<double> as_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

template <class T>
std::optional<T> try_parse(auto&& fn) {
    try {
        return fn();
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

// -1, 0, 1 ordering of two values for `<` / `>=`
inline int compare_ordered(const std::string& lhs, const std::string& rhs) {
    if (auto a = as_number(lhs), b = as_number(rhs); a && b) return *a < *b ? -1 : (*a > *b ? 1 : 0);
    auto tod = [](const std::string& s) { return try_parse<TimeOfDay>([&] { return parse_time_of_day(s); }); };
    if (auto a = tod(lhs), b = tod(rhs); a && b) return *a < *b ? -1 : (*a > *b ? 1 : 0);
    auto ts = [](const std::string& s) { return try_parse<Timestamp>([&] { return parse_timestamp(s); }); };
    if (auto a = ts(lhs), b = ts(rhs); a && b) return *a < *b ? -1 : (*a > *b ? 1 : 0);
    throw ConfigError("'<' and '>=' need numeric or time operands, got '" + lhs + "' and '" + rhs + "'");
}

} // namespace detail

/// An event-level relabeling lifted to traces. Every kind is length-preserving and
/// prefix-preserving: the label at position i depends only on the event at position i.
class RelabelingFn {
public:
    using Kind = std::variant<Projection, TimeThreshold, RuleSet>;

    RelabelingFn(Kind kind, std::string description)
        : kind_(std::move(kind)), description_(std::move(description)) {}

    static RelabelingFn projection(std::vector<std::string> attributes) {
        std::string d = "projection[";
        for (std::size_t i = 0; i < attributes.size(); ++i) d += (i ? "," : "") + attributes[i];
        d += "]";
        return {Projection{std::move(attributes)}, std::move(d)};
    }

    static RelabelingFn time_threshold(Label base, TimeOfDay threshold, Label low, Label high,
                                       TimeZone tz = TimeZone::utc()) {
        std::string d = "split " + base.str() + " at " + format_time_of_day(threshold) + " into " + low.str() +
                        " / " + high.str();
        return {TimeThreshold{std::move(base), threshold, std::move(low), std::move(high), std::move(tz)},
                std::move(d)};
    }

    static RelabelingFn rules(RuleSet set, std::string description = "rules") {
        return {std::move(set), std::move(description)};
    }

    const Kind& kind() const noexcept { return kind_; }
    const std::string& description() const noexcept { return description_; }

    Label relabel(const Event& e) const {
        return std::visit([&](const auto& k) { return relabel_with(k, e); }, kind_);
    }

private:
    static Label relabel_with(const Projection& p, const Event& e) { return label_of(e, p.attributes); }

    static Label relabel_with(const TimeThreshold& t, const Event& e) {
        if (e.label != t.base) return e.label;
        return time_of_day(e.timestamp, t.timezone) < t.threshold ? t.low : t.high;
    }

    static Label relabel_with(const RuleSet& set, const Event& e) {
        for (const auto& rule : set.rules) {
            const bool match = std::all_of(rule.conditions.begin(), rule.conditions.end(),
                                           [&](const RuleCondition& c) { return holds(c, set, e); });
            if (match) return rule.output ? *rule.output : e.label;
        }
        throw ConfigError("no rule matches event '" + e.id + "' and the rule file has no default");
    }

    static bool holds(const RuleCondition& c, const RuleSet& set, const Event& e) {
        std::string lhs;
        if (c.attribute == kKeepLabel)
            lhs = e.label.str();
        else if (c.attribute == kTimePseudoAttribute)
            lhs = format_time_of_day(time_of_day(e.timestamp, set.timezone));
        else
            lhs = render(e.attribute(c.attribute));
        switch (c.op) {
        case RuleOp::eq: return lhs == c.value;
        case RuleOp::ne: return lhs != c.value;
        case RuleOp::lt: return detail::compare_ordered(lhs, c.value) < 0;
        case RuleOp::ge: return detail::compare_ordered(lhs, c.value) >= 0;
        }
        return false;
    }

    Kind kind_;
    std::string description_;
};

/// l(L): every event relabelled, trace structure, ids and timestamps unchanged.
inline EventLog apply(const RelabelingFn& fn, const EventLog& log) {
    std::vector<Trace> traces;
    traces.reserve(log.size());
    for (const auto& t : log) {
        std::vector<Event> events = t.events();
        for (auto& e : events) e.label = fn.relabel(e);
        traces.emplace_back(t.case_id(), std::move(events));
    }
    return EventLog(std::move(traces));
}

struct Position {
    std::size_t trace = 0;
    std::size_t index = 0;
    friend bool operator==(const Position&, const Position&) = default;
};

/// Two observed prefixes that agree under the refined labelling but not under the base one:
/// the prefixes ending at `first` and `second` would carry the same refined label at their
/// last position but different base labels.
struct RefinementViolation {
    Label refined;
    Label base_first;
    Label base_second;
    Position first;
    Position second;
};

struct RefinementCheck {
    bool is_equal_length_refinement = false;
    bool is_strict = false;
    std::vector<RefinementViolation> violations; ///< at most kMaxReportedViolations
    std::size_t violation_count = 0;
};

inline constexpr std::size_t kMaxReportedViolations = 10;

namespace detail {

inline void require_same_shape(const EventLog& l1, const EventLog& l2) {
    if (l1.size() != l2.size())
        throw RefinementError("logs differ in trace count (" + std::to_string(l1.size()) + " vs " +
                              std::to_string(l2.size()) + ")");
    for (std::size_t t = 0; t < l1.size(); ++t) {
        const auto& a = l1.traces()[t];
        const auto& b = l2.traces()[t];
        if (a.size() != b.size())
            throw RefinementError("trace " + std::to_string(t) + " differs in length (" + std::to_string(a.size()) +
                                  " vs " + std::to_string(b.size()) + ")");
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].id != b[i].id)
                throw RefinementError("trace " + std::to_string(t) + " position " + std::to_string(i) +
                                      ": event ids differ ('" + a[i].id + "' vs '" + b[i].id + "')");
    }
}

} // namespace detail

/// Checks on the observed log whether `l2_log` is an equal-length refinement of `l1_log`
/// (both must be relabelings of the same base log). Since both labelings are event-level,
/// refinement holds iff every refined label maps to exactly one base label; strictness iff
/// some base label maps to two or more refined labels.
inline RefinementCheck check_refinement(const EventLog& l1_log, const EventLog& l2_log) {
    detail::require_same_shape(l1_log, l2_log);
    RefinementCheck result;
    std::map<Label, std::pair<Label, Position>> base_of;
    std::map<Label, std::set<Label>> refined_of;
    std::set<std::pair<Label, Label>> reported;
    for (std::size_t t = 0; t < l1_log.size(); ++t) {
        const auto& coarse = l1_log.traces()[t];
        const auto& fine = l2_log.traces()[t];
        for (std::size_t i = 0; i < coarse.size(); ++i) {
            const Label& a = coarse[i].label;
            const Label& b = fine[i].label;
            refined_of[a].insert(b);
            const auto [it, fresh] = base_of.try_emplace(b, a, Position{t, i});
            if (fresh || it->second.first == a) continue;
            if (!reported.emplace(b, a).second) continue;
            ++result.violation_count;
            if (result.violations.size() < kMaxReportedViolations)
                result.violations.push_back({b, it->second.first, a, it->second.second, Position{t, i}});
        }
    }
    result.is_equal_length_refinement = result.violation_count == 0;
    result.is_strict = std::any_of(refined_of.begin(), refined_of.end(),
                                   [](const auto& kv) { return kv.second.size() >= 2; });
    return result;
}

/// A base label together with the refined labels it was split into.
struct SplitPair {
    Label parent;
    std::vector<Label> children; ///< sorted, at least two

    /// Unordered child pairs (i < j), in lexicographic order.
    std::vector<std::pair<Label, Label>> child_pairs() const {
        std::vector<std::pair<Label, Label>> out;
        for (std::size_t i = 0; i < children.size(); ++i)
            for (std::size_t j = i + 1; j < children.size(); ++j) out.emplace_back(children[i], children[j]);
        return out;
    }

    friend bool operator==(const SplitPair&, const SplitPair&) = default;
};

/// Groups refined labels by the base label at the same position and keeps groups of size >= 2.
/// Throws RefinementError if `l2_log` is not an equal-length refinement of `l1_log`.
inline std::vector<SplitPair> extract_split_set(const EventLog& l1_log, const EventLog& l2_log) {
    const auto check = check_refinement(l1_log, l2_log);
    if (!check.is_equal_length_refinement)
        throw RefinementError("refined log is not an equal-length refinement of the base log");
    std::map<Label, std::set<Label>> groups;
    for (std::size_t t = 0; t < l1_log.size(); ++t) {
        const auto& coarse = l1_log.traces()[t];
        const auto& fine = l2_log.traces()[t];
        for (std::size_t i = 0; i < coarse.size(); ++i) groups[coarse[i].label].insert(fine[i].label);
    }
    std::vector<SplitPair> out;
    for (auto& [parent, kids] : groups)
        if (kids.size() >= 2) out.push_back({parent, std::vector<Label>(kids.begin(), kids.end())});
    return out;
}

} // namespace labelsplit

#endif // LABELSPLIT_RELABEL_HPP
