#ifndef LABELSPLIT_TESTS_SUPPORT_HPP
#define LABELSPLIT_TESTS_SUPPORT_HPP

// Fixtures and independent oracles shared by the unit and acceptance suites. The oracles
// deliberately avoid the library's counting and testing code paths.

#include "labelsplit/labelsplit.hpp"

#include <array>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace labelsplit::testing {

inline std::string data_path(const std::string& name) { return std::string(LABELSPLIT_TEST_DATA_DIR) + "/" + name; }

/// The 26 events of the smart-home example, one trace per (address, day).
inline EventLog home_raw() {
    const std::string text = read_text_file(data_path("smart_home.csv"));
    const CsvSchema schema = CsvSchema::parse(read_text_file(data_path("smart_home.schema")));
    PartitionKeySpec key;
    key.attribute_keys = {"Address"};
    key.calendar_key = CalendarKey::day;
    return partition(parse_csv(text, schema), key);
}

inline EventLog home_sensor() { return apply(RelabelingFn::projection({"Sensor"}), home_raw()); }
inline EventLog home_activity() { return apply(RelabelingFn::projection({"Activity"}), home_raw()); }

inline const Label kBedroom = Label::single("Bedroom motion");
inline const Label kLiving = Label::single("Living room motion");
inline const Label kTossing = Label::single("Tossing & turning");
inline const Label kGettingUp = Label::single("Getting up");

/// Builds a log directly from label sequences; event ids are global 1-based positions and each
/// trace starts on its own day.
inline EventLog log_from_labels(const std::vector<std::vector<std::string>>& traces) {
    std::vector<Trace> out;
    std::size_t id = 1;
    for (std::size_t t = 0; t < traces.size(); ++t) {
        std::vector<Event> events;
        for (std::size_t i = 0; i < traces[t].size(); ++i) {
            Event e;
            e.id = std::to_string(id++);
            e.timestamp = Timestamp{std::chrono::days{static_cast<int>(t)} + std::chrono::minutes{static_cast<int>(i)}};
            e.attributes.emplace("name", traces[t][i]);
            e.label = Label::single(traces[t][i]);
            events.push_back(std::move(e));
        }
        out.emplace_back("case" + std::to_string(t), std::move(events));
    }
    return EventLog(std::move(out));
}

// --- oracles ---------------------------------------------------------------------------------

/// Relation predicate straight from the definitions, by enumerating every other position.
inline bool naive_holds(const std::vector<Label>& s, std::size_t i, OrderingRelation r, const Label& c) {
    const std::size_t n = s.size();
    bool found = false;
    for (std::size_t j = 0; j < n; ++j) {
        if (s[j] != c) continue;
        switch (r) {
        case OrderingRelation::directly_precedes: found |= j == i + 1; break;
        case OrderingRelation::directly_follows: found |= j + 1 == i; break;
        case OrderingRelation::eventually_precedes: found |= j > i; break;
        case OrderingRelation::eventually_follows: found |= j < i; break;
        case OrderingRelation::length_two_loop: found |= j == i + 1 && i + 2 < n && s[i + 2] == s[i] && s[i] != c; break;
        }
    }
    return found;
}

inline OrderingCounts naive_count(const EventLog& log, OrderingRelation r, const Label& b, const Label& c) {
    OrderingCounts out;
    for (const auto& t : log) {
        const auto s = t.labels();
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] == b) ++(naive_holds(s, i, r, c) ? out.pos : out.neg);
    }
    return out;
}

/// Exact binomial coefficients up to n = 60 (fits in 64 bits).
inline std::uint64_t choose(unsigned n, unsigned k) {
    static const auto table = [] {
        std::array<std::array<std::uint64_t, 61>, 61> t{};
        for (unsigned i = 0; i <= 60; ++i) {
            t[i][0] = 1;
            for (unsigned j = 1; j <= i; ++j) t[i][j] = t[i - 1][j - 1] + (j <= i - 1 ? t[i - 1][j] : 0);
        }
        return t;
    }();
    return k > n ? 0 : table[n][k];
}

/// Two-sided Fisher p by enumerating the hypergeometric support with exact integer weights
/// C(n1, x) * C(n2, k - x); a table is included when its weight is at most the observed weight
/// times (1 + 1e-7).
inline double brute_force_fisher(unsigned a1_pos, unsigned a1_neg, unsigned a2_pos, unsigned a2_neg) {
    const unsigned n1 = a1_pos + a1_neg, n2 = a2_pos + a2_neg, k = a1_pos + a2_pos, n = n1 + n2;
    if (n == 0) return 1.0;
    auto weight = [&](unsigned x) -> std::uint64_t {
        if (x > n1 || x > k || k - x > n2) return 0;
        return choose(n1, x) * choose(n2, k - x);
    };
    const long double observed = static_cast<long double>(weight(a1_pos));
    long double included = 0;
    for (unsigned x = 0; x <= k; ++x) {
        const std::uint64_t w = weight(x);
        if (w == 0) continue;
        if (static_cast<long double>(w) <= observed * (1.0L + 1e-7L)) included += static_cast<long double>(w);
    }
    return static_cast<double>(included / static_cast<long double>(choose(n, k)));
}

// --- random logs -----------------------------------------------------------------------------

struct RandomLogSpec {
    std::size_t traces = 20;
    std::size_t min_length = 1;
    std::size_t max_length = 8;
    std::size_t alphabet = 4;
};

/// Random log over labels "L0".."L{alphabet-1}". Each event also carries a "coin" attribute
/// ("h" or "t") drawn independently, usable as an independent refinement key.
inline EventLog random_log(std::mt19937_64& rng, const RandomLogSpec& spec) {
    std::uniform_int_distribution<std::size_t> len(spec.min_length, spec.max_length);
    std::uniform_int_distribution<std::size_t> sym(0, spec.alphabet - 1);
    std::bernoulli_distribution coin(0.5);
    std::vector<Trace> traces;
    std::size_t id = 1;
    for (std::size_t t = 0; t < spec.traces; ++t) {
        std::vector<Event> events;
        const std::size_t n = len(rng);
        for (std::size_t i = 0; i < n; ++i) {
            Event e;
            e.id = std::to_string(id++);
            e.timestamp = Timestamp{std::chrono::days{static_cast<int>(t)} + std::chrono::minutes{static_cast<int>(i)}};
            const std::string name = "L" + std::to_string(sym(rng));
            e.attributes.emplace("name", name);
            e.attributes.emplace("coin", coin(rng) ? std::string("h") : std::string("t"));
            e.label = Label::single(name);
            events.push_back(std::move(e));
        }
        traces.emplace_back("case" + std::to_string(t), std::move(events));
    }
    return EventLog(std::move(traces));
}

/// Splits `target` into "<target>_1"/"<target>_2" by the event's coin attribute.
inline EventLog coin_split(const EventLog& log, const Label& target) {
    RuleSet rules;
    const std::string name = target.str();
    rules.rules.push_back({{{"@label", RuleOp::eq, name}, {"coin", RuleOp::eq, "h"}}, Label::single(name + "_1")});
    rules.rules.push_back({{{"@label", RuleOp::eq, name}}, Label::single(name + "_2")});
    rules.rules.push_back({{}, std::nullopt});
    return apply(RelabelingFn::rules(rules, "coin split of " + name), log);
}

} // namespace labelsplit::testing

namespace labelsplit {

// gtest finds these through argument-dependent lookup
inline void PrintTo(const OrderingCounts& c, std::ostream* os) { *os << '(' << c.pos << ", " << c.neg << ')'; }
inline void PrintTo(const Label& l, std::ostream* os) { *os << '"' << l.str() << '"'; }

} // namespace labelsplit

#endif // LABELSPLIT_TESTS_SUPPORT_HPP
