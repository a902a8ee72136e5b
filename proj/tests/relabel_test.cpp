#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

using namespace labelsplit;
using namespace labelsplit::testing;

namespace {

std::vector<std::vector<Label>> label_sequences(const EventLog& log) {
    std::vector<std::vector<Label>> out;
    for (const auto& t : log) out.push_back(t.labels());
    return out;
}

std::vector<Label> column(const EventLog& raw, const std::string& attribute) {
    std::vector<Label> out;
    for (const auto& t : raw)
        for (const auto& e : t) out.push_back(Label::single(render(e.attribute(attribute))));
    return out;
}

std::vector<Label> flat_labels(const EventLog& log) {
    std::vector<Label> out;
    for (const auto& t : log)
        for (const auto& e : t) out.push_back(e.label);
    return out;
}

// Refinement by definition on prefixes: any two prefixes with equal refined label sequences
// must have equal base label sequences. Besides the observed prefixes, every observed event on
// its own is a valid one-event trace, since both labelings act on single events.
bool prefix_oracle_refines(const EventLog& l1, const EventLog& l2) {
    std::map<std::vector<Label>, std::vector<Label>> seen;
    for (std::size_t t = 0; t < l1.size(); ++t)
        for (std::size_t i = 0; i < l1.traces()[t].size(); ++i) {
            const auto [it, fresh] = seen.emplace(std::vector<Label>{l2.traces()[t][i].label},
                                                  std::vector<Label>{l1.traces()[t][i].label});
            if (!fresh && it->second != std::vector<Label>{l1.traces()[t][i].label}) return false;
        }
    for (std::size_t t = 0; t < l1.size(); ++t) {
        const auto coarse = l1.traces()[t].labels();
        const auto fine = l2.traces()[t].labels();
        for (std::size_t k = 1; k <= fine.size(); ++k) {
            std::vector<Label> fp(fine.begin(), fine.begin() + k), cp(coarse.begin(), coarse.begin() + k);
            const auto [it, fresh] = seen.emplace(fp, cp);
            if (!fresh && it->second != cp) return false;
        }
    }
    return true;
}

const TimeOfDay k0830 = parse_time_of_day("08:30");

} // namespace

TEST(Projection, SensorColumn) {
    EXPECT_EQ(flat_labels(home_sensor()), column(home_raw(), "Sensor"));
}

TEST(Projection, IsIdempotent) {
    const auto once = home_sensor();
    const auto twice = apply(RelabelingFn::projection({"Sensor"}), once);
    EXPECT_EQ(label_sequences(once), label_sequences(twice));
}

TEST(TimeThreshold, ReproducesActivityColumn) {
    const auto fn = RelabelingFn::time_threshold(kBedroom, k0830, kTossing, kGettingUp);
    EXPECT_EQ(fn.description(), "split Bedroom motion at 08:30:00 into Tossing & turning / Getting up");
    EXPECT_EQ(flat_labels(apply(fn, home_sensor())), column(home_raw(), "Activity"));
}

TEST(TimeThreshold, BoundaryGoesHigh) {
    auto log = log_from_labels({{"x", "x"}});
    std::vector<Event> events = log.traces()[0].events();
    events[0].timestamp = Timestamp{std::chrono::hours{8} + std::chrono::minutes{29}};
    events[1].timestamp = Timestamp{std::chrono::hours{8} + std::chrono::minutes{30}};
    const EventLog at(std::vector<Trace>{Trace("c", events)});
    const auto out = apply(RelabelingFn::time_threshold(Label{"x"}, k0830, Label{"lo"}, Label{"hi"}), at);
    EXPECT_EQ(out.traces()[0].labels(), (std::vector<Label>{Label{"lo"}, Label{"hi"}}));
}

TEST(TimeThreshold, UsesLocalTimeOfConfiguredZone) {
    const auto utc = home_sensor();
    // 06:59 UTC is 08:59 at +02:00, so early bedroom events move to the high side
    const auto shifted = apply(
        RelabelingFn::time_threshold(kBedroom, k0830, kTossing, kGettingUp, TimeZone::parse("+02:00")), utc);
    const auto plain = apply(RelabelingFn::time_threshold(kBedroom, k0830, kTossing, kGettingUp), utc);
    std::size_t high_shifted = 0, high_plain = 0;
    for (const auto& l : flat_labels(shifted)) high_shifted += l == kGettingUp;
    for (const auto& l : flat_labels(plain)) high_plain += l == kGettingUp;
    EXPECT_GT(high_shifted, high_plain);
}

TEST(RuleSet, BedroomRulesFileReproducesActivity) {
    const auto rules = RuleSet::parse(read_text_file(data_path("bedroom_rules.txt")));
    ASSERT_EQ(rules.rules.size(), 3u);
    const auto out = apply(RelabelingFn::rules(rules), home_sensor());
    EXPECT_EQ(flat_labels(out), column(home_raw(), "Activity"));
}

TEST(RuleSet, ParsesOperatorsQuotesAndComments) {
    const auto rs = RuleSet::parse("# split on heart rate\n"
                                   "\"Heart rate\" < 70 && Sensor = \"Bedroom motion\" -> calm\n"
                                   "Heart rate >= 70 -> @label\n"
                                   "Sensor != x -> other\n"
                                   "\n"
                                   "default -> rest\n");
    ASSERT_EQ(rs.rules.size(), 4u);
    ASSERT_EQ(rs.rules[0].conditions.size(), 2u);
    EXPECT_EQ(rs.rules[0].conditions[0].attribute, "Heart rate");
    EXPECT_EQ(rs.rules[0].conditions[0].op, RuleOp::lt);
    EXPECT_EQ(rs.rules[0].conditions[0].value, "70");
    EXPECT_EQ(rs.rules[0].conditions[1].value, "Bedroom motion");
    EXPECT_EQ(rs.rules[1].conditions[0].op, RuleOp::ge);
    EXPECT_FALSE(rs.rules[1].output.has_value());
    EXPECT_EQ(rs.rules[2].conditions[0].op, RuleOp::ne);
    EXPECT_TRUE(rs.rules[3].conditions.empty());
    EXPECT_EQ(*rs.rules[3].output, Label{"rest"});
}

TEST(RuleSet, NumericComparisonIsNumeric) {
    const auto rs = RuleSet::parse("Heart rate < 100 -> low\ndefault -> high\n");
    const auto out = apply(RelabelingFn::rules(rs), home_raw());
    for (const auto& t : out)
        for (const auto& e : t) {
            const double hr = std::stod(render(e.attribute("Heart rate")));
            EXPECT_EQ(e.label, hr < 100 ? Label{"low"} : Label{"high"});
        }
}

TEST(RuleSet, SyntaxErrors) {
    EXPECT_THROW(RuleSet::parse("Sensor = a\n"), ConfigError);                     // no arrow
    EXPECT_THROW(RuleSet::parse("Sensor ~ a -> b\n"), ConfigError);               // unknown operator
    EXPECT_THROW(RuleSet::parse("default -> a\nSensor = b -> c\n"), ConfigError); // default not last
    EXPECT_THROW(RuleSet::parse("Sensor = a -> \n"), ConfigError);                // empty output
}

TEST(RuleSet, NoMatchingRuleIsAnError) {
    const auto rs = RuleSet::parse("Sensor = nothing -> x\n");
    EXPECT_THROW(apply(RelabelingFn::rules(rs), home_raw()), ConfigError);
}

TEST(RuleSet, OrderedComparisonOfTextIsAnError) {
    const auto rs = RuleSet::parse("Sensor < abc -> x\ndefault -> y\n");
    EXPECT_THROW(apply(RelabelingFn::rules(rs), home_raw()), ConfigError);
}

TEST(CheckRefinement, ActivityStrictlyRefinesSensor) {
    const auto c = check_refinement(home_sensor(), home_activity());
    EXPECT_TRUE(c.is_equal_length_refinement);
    EXPECT_TRUE(c.is_strict);
    EXPECT_EQ(c.violation_count, 0u);
}

TEST(CheckRefinement, IdentityIsNotStrict) {
    const auto c = check_refinement(home_sensor(), home_sensor());
    EXPECT_TRUE(c.is_equal_length_refinement);
    EXPECT_FALSE(c.is_strict);
}

TEST(CheckRefinement, MergingIsAViolation) {
    const auto base = log_from_labels({{"a", "b"}, {"b", "a"}});
    const auto merged = log_from_labels({{"x", "x"}, {"x", "x"}});
    const auto c = check_refinement(base, merged);
    EXPECT_FALSE(c.is_equal_length_refinement);
    EXPECT_EQ(c.violation_count, 1u);
    ASSERT_EQ(c.violations.size(), 1u);
    EXPECT_EQ(c.violations[0].refined, Label{"x"});
    EXPECT_EQ(c.violations[0].first, (Position{0, 0}));
    EXPECT_EQ(c.violations[0].second, (Position{0, 1}));
    EXPECT_FALSE(prefix_oracle_refines(base, merged));
    // the other direction is a strict refinement
    EXPECT_TRUE(check_refinement(merged, base).is_strict);
}

TEST(CheckRefinement, AgreesWithPrefixOracleOnRandomRelabelings) {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 300; ++round) {
        const auto base = random_log(rng, {6, 1, 5, 3});
        // random label-level map with a smaller image; sometimes merges, sometimes splits by coin
        std::map<std::string, std::string> merge;
        for (int k = 0; k < 3; ++k) merge["L" + std::to_string(k)] = "M" + std::to_string(rng() % 3);
        RuleSet rs;
        for (const auto& [from, to] : merge) {
            if (rng() % 2) rs.rules.push_back({{{"@label", RuleOp::eq, from}, {"coin", RuleOp::eq, "h"}}, Label{to + "h"}});
            rs.rules.push_back({{{"@label", RuleOp::eq, from}}, Label{to}});
        }
        const auto other = apply(RelabelingFn::rules(rs), base);
        EXPECT_EQ(check_refinement(base, other).is_equal_length_refinement, prefix_oracle_refines(base, other));
        EXPECT_EQ(check_refinement(other, base).is_equal_length_refinement, prefix_oracle_refines(other, base));
    }
}

TEST(CheckRefinement, ShapeMismatchThrows) {
    EXPECT_THROW(check_refinement(log_from_labels({{"a"}}), log_from_labels({{"a"}, {"b"}})), RefinementError);
    EXPECT_THROW(check_refinement(log_from_labels({{"a"}}), log_from_labels({{"a", "b"}})), RefinementError);
}

TEST(CheckRefinement, ViolationReportIsCapped) {
    std::vector<std::string> base_trace, merged_trace;
    for (int i = 0; i < 30; ++i) {
        base_trace.push_back("a" + std::to_string(i));
        merged_trace.push_back("m" + std::to_string(i / 2));
    }
    const auto c = check_refinement(log_from_labels({base_trace}), log_from_labels({merged_trace}));
    EXPECT_EQ(c.violation_count, 15u);
    EXPECT_EQ(c.violations.size(), kMaxReportedViolations);
}

TEST(SplitSet, SmartHome) {
    const auto s = extract_split_set(home_sensor(), home_activity());
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].parent, kBedroom);
    EXPECT_EQ(s[0].children, (std::vector<Label>{kGettingUp, kTossing}));
    EXPECT_EQ(s[0].child_pairs().size(), 1u);
}

TEST(SplitSet, IdenticalLogsGiveNothing) {
    EXPECT_TRUE(extract_split_set(home_sensor(), home_sensor()).empty());
}

TEST(SplitSet, ThreeWaySplit) {
    const auto base = log_from_labels({{"a", "a", "a", "b"}});
    const auto refined = log_from_labels({{"a1", "a2", "a3", "b"}});
    const auto s = extract_split_set(base, refined);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].children.size(), 3u);
    EXPECT_EQ(s[0].child_pairs().size(), 3u);
}

TEST(SplitSet, NonRefinementThrows) {
    EXPECT_THROW(extract_split_set(log_from_labels({{"a", "b"}}), log_from_labels({{"x", "x"}})), RefinementError);
}

TEST(Relabel, PrefixPreservingAndTraceOrderInvariant) {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 100; ++round) {
        const auto log = random_log(rng, {});
        const auto refined = coin_split(log, Label{"L1"});
        // relabelling each trace on its own gives the same labels
        for (std::size_t t = 0; t < log.size(); ++t) {
            const EventLog single(std::vector<Trace>{log.traces()[t]});
            EXPECT_EQ(coin_split(single, Label{"L1"}).traces()[0].labels(), refined.traces()[t].labels());
        }
        // reversed trace order gives reversed output
        std::vector<Trace> rev(log.traces().rbegin(), log.traces().rend());
        const auto refined_rev = coin_split(EventLog(rev), Label{"L1"});
        for (std::size_t t = 0; t < log.size(); ++t)
            EXPECT_EQ(refined_rev.traces()[log.size() - 1 - t].labels(), refined.traces()[t].labels());
    }
}

TEST(Relabel, ChildOccurrencesSumToParent) {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 100; ++round) {
        const auto log = random_log(rng, {});
        const auto refined = coin_split(log, Label{"L2"});
        std::size_t parent = 0, kids = 0;
        for (const auto& l : flat_labels(log)) parent += l == Label{"L2"};
        for (const auto& l : flat_labels(refined)) kids += l == Label{"L2_1"} || l == Label{"L2_2"};
        EXPECT_EQ(parent, kids);
    }
}
