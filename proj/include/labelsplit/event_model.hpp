#ifndef LABELSPLIT_EVENT_MODEL_HPP
#define LABELSPLIT_EVENT_MODEL_HPP

#include "labelsplit/errors.hpp"
#include "labelsplit/time.hpp"

#include <algorithm>
#include <compare>
#include <cstdio>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace labelsplit {

using AttributeValue = std::variant<std::string, double, Timestamp>;

inline std::string render(const AttributeValue& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else if constexpr (std::is_same_v<T, double>) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.15g", v);
                return buf;
            } else {
                return format_iso8601(v);
            }
        },
        value);
}

/// An event label: a tuple of attribute values. Compared componentwise, ordered lexicographically.
struct Label {
    std::vector<std::string> parts;

    Label() = default;
    explicit Label(std::vector<std::string> p) : parts(std::move(p)) {}
    Label(std::initializer_list<std::string> p) : parts(p) {}

    static Label single(std::string value) { return Label{std::vector<std::string>{std::move(value)}}; }

    /// Splits a "+"-joined rendering back into components.
    static Label parse(std::string_view text) {
        Label l;
        if (text.empty()) return l;
        std::size_t start = 0;
        for (;;) {
            const auto pos = text.find('+', start);
            l.parts.emplace_back(text.substr(start, pos - start));
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
        return l;
    }

    bool empty() const noexcept { return parts.empty(); }

    /// Components joined by "+".
    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) out += '+';
            out += parts[i];
        }
        return out;
    }

    friend auto operator<=>(const Label&, const Label&) = default;
    friend bool operator==(const Label&, const Label&) = default;
};

struct Event {
    std::string id;
    Timestamp timestamp{};
    std::map<std::string, AttributeValue> attributes;
    /// Assigned by a relabeling function; empty for freshly ingested events.
    Label label;

    const AttributeValue& attribute(const std::string& name) const {
        const auto it = attributes.find(name);
        if (it == attributes.end()) throw MissingAttributeError(name, id);
        return it->second;
    }
};

/// Strict weak order on event ids: all-digit ids compare numerically and sort before other ids,
/// which compare lexicographically.
inline bool event_id_less(std::string_view a, std::string_view b) {
    auto numeric = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    auto strip = [](std::string_view s) {
        const auto nz = s.find_first_not_of('0');
        return nz == std::string_view::npos ? std::string_view{} : s.substr(nz);
    };
    const bool na = numeric(a), nb = numeric(b);
    if (na != nb) return na;
    if (na) {
        const auto sa = strip(a), sb = strip(b);
        if (sa.size() != sb.size()) return sa.size() < sb.size();
        if (sa != sb) return sa < sb;
    }
    return a < b;
}

inline bool event_order_less(const Event& a, const Event& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return event_id_less(a.id, b.id);
}

/// A time-ordered sequence of events sharing a case identifier.
class Trace {
public:
    Trace() = default;

    Trace(std::string case_id, std::vector<Event> events)
        : case_id_(std::move(case_id)), events_(std::move(events)) {
        std::stable_sort(events_.begin(), events_.end(), event_order_less);
    }

    const std::string& case_id() const noexcept { return case_id_; }
    const std::vector<Event>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }
    const Event& operator[](std::size_t i) const { return events_[i]; }

    auto begin() const noexcept { return events_.begin(); }
    auto end() const noexcept { return events_.end(); }

    std::vector<Label> labels() const {
        std::vector<Label> out;
        out.reserve(events_.size());
        for (const auto& e : events_) out.push_back(e.label);
        return out;
    }

private:
    std::string case_id_;
    std::vector<Event> events_;
};

/// A multiset of traces. The alphabet is derived once at construction; the log is immutable.
class EventLog {
public:
    EventLog() = default;

    explicit EventLog(std::vector<Trace> traces) : traces_(std::move(traces)) {
        for (const auto& t : traces_)
            for (const auto& e : t) alphabet_.push_back(e.label);
        std::sort(alphabet_.begin(), alphabet_.end());
        alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
    }

    const std::vector<Trace>& traces() const noexcept { return traces_; }
    const std::vector<Label>& alphabet() const noexcept { return alphabet_; }
    std::size_t size() const noexcept { return traces_.size(); }
    bool empty() const noexcept { return traces_.empty(); }

    auto begin() const noexcept { return traces_.begin(); }
    auto end() const noexcept { return traces_.end(); }

    std::size_t event_count() const noexcept {
        return std::accumulate(traces_.begin(), traces_.end(), std::size_t{0},
                               [](std::size_t n, const Trace& t) { return n + t.size(); });
    }

private:
    std::vector<Trace> traces_;
    std::vector<Label> alphabet_;
};

/// Projects an event onto the named attributes, in order.
inline Label label_of(const Event& event, const std::vector<std::string>& projection) {
    Label l;
    l.parts.reserve(projection.size());
    for (const auto& name : projection) l.parts.push_back(render(event.attribute(name)));
    return l;
}

/// Distinct labels of the log in ascending order.
inline std::vector<Label> log_alphabet(const EventLog& log) { return log.alphabet(); }

} // namespace labelsplit

#endif // LABELSPLIT_EVENT_MODEL_HPP
