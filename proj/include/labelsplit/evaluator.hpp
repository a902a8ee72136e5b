#ifndef LABELSPLIT_EVALUATOR_HPP
#define LABELSPLIT_EVALUATOR_HPP

#include "labelsplit/errors.hpp"
#include "labelsplit/event_model.hpp"
#include "labelsplit/info_gain.hpp"
#include "labelsplit/ordering_stats.hpp"
#include "labelsplit/relabel.hpp"
#include "labelsplit/stat_tests.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace labelsplit {

struct EvaluationConfig {
    double alpha = 0.01;
    std::vector<OrderingRelation> relations = default_relations();
    CorrectionPolicy correction{};
    /// When set, only these labels serve as context labels b.
    std::optional<std::vector<Label>> context_labels;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
        if (relations.empty()) throw ConfigError("at least one ordering relation is required");
    }
};

struct EvaluationReport {
    std::string candidate;
    std::vector<SplitPair> split_pairs;
    std::vector<TestResult> tests;
    EntropyBreakdown entropy;
    bool useful = false;
    double score = 0.0;          ///< relative information gain if useful, else 0
    std::size_t m_tests = 0;     ///< Fisher tests executed for this candidate
    std::size_t family_size = 0; ///< tests in the correction family (m_tests unless corrected per candidate set)
    double corrected_alpha = 0.0;
    std::vector<std::string> notes;
};

/// Sets significance of every test at `corrected_alpha` and derives usefulness and score:
/// useful iff every child pair of every split has at least one significant test.
inline void decide(EvaluationReport& report, double corrected_alpha) {
    report.corrected_alpha = corrected_alpha;
    std::map<std::pair<Label, Label>, bool> pair_significant;
    for (const auto& split : report.split_pairs)
        for (auto& p : split.child_pairs()) pair_significant.emplace(std::move(p), false);
    for (auto& t : report.tests) {
        t.corrected_alpha = corrected_alpha;
        t.significant = t.p_value < corrected_alpha;
        if (t.significant) pair_significant[{t.table.a1, t.table.a2}] = true;
    }
    report.useful = !pair_significant.empty() &&
                    std::all_of(pair_significant.begin(), pair_significant.end(), [](const auto& kv) { return kv.second; });
    report.score = report.useful ? report.entropy.relative_information_gain : 0.0;
}

/// Statistical evaluation of refinement `l2_log` of `l1_log`: one Fisher test per child pair,
/// context label and relation at the corrected significance level; the score is the relative
/// information gain when every child pair differs significantly somewhere, else 0.
inline EvaluationReport evaluate(const EventLog& l1_log, const EventLog& l2_log, const EvaluationConfig& config,
                                 std::string description = {}) {
    config.validate();
    const auto check = check_refinement(l1_log, l2_log);
    if (!check.is_equal_length_refinement) {
        const auto& v = check.violations.front();
        throw RefinementError("refined label '" + v.refined.str() + "' maps to base labels '" + v.base_first.str() +
                              "' and '" + v.base_second.str() + "'");
    }

    EvaluationReport report;
    report.candidate = std::move(description);
    report.split_pairs = extract_split_set(l1_log, l2_log);
    if (report.split_pairs.empty()) {
        report.notes.push_back("refinement is not strict");
        decide(report, config.alpha);
        return report;
    }

    const OrderingIndex coarse(l1_log);
    const OrderingIndex fine(l2_log);
    const std::vector<Label>* filter = config.context_labels ? &*config.context_labels : nullptr;
    std::vector<ContingencyTable> tables;
    for (const auto& split : report.split_pairs) {
        for (const auto& child : split.children)
            if (fine.occurrences(child) < 2)
                report.notes.push_back("label '" + child.str() + "' occurs fewer than twice; tests have little power");
        for (const auto& [a1, a2] : split.child_pairs()) {
            for (auto& t : build_tables(coarse, fine, split, a1, a2, config.relations, filter)) {
                if (t.parent_col.total() == 0) {
                    report.notes.push_back("skipped degenerate " + std::string(to_string(t.relation)) + " table for " +
                                           a1.str() + " / " + a2.str() + " vs " + t.context.str());
                    continue;
                }
                tables.push_back(std::move(t));
            }
        }
    }

    report.tests.reserve(tables.size());
    for (const auto& t : tables) report.tests.push_back(run_test(t, 0.0));
    report.m_tests = report.tests.size();
    report.family_size = report.m_tests;
    report.entropy = relative_information_gain(tables);
    decide(report, config.correction.threshold(config.alpha, report.m_tests));
    return report;
}

struct CandidateGeneration {
    std::vector<RelabelingFn> candidates;
    std::vector<Label> skipped; ///< labels with fewer than two occurrences or a single time of day
};

namespace detail {

inline Label with_suffix(Label l, const std::string& suffix) {
    if (l.parts.empty()) l.parts.emplace_back();
    l.parts.back() += suffix;
    return l;
}

} // namespace detail

/// One candidate per label: occurrences whose local time of day is below the label's median go
/// to "<label>_1", the rest to "<label>_2". Even-sized samples use the lower middle value, so the
/// threshold is always an observed time.
inline CandidateGeneration generate_median_time_candidates(const EventLog& log, const TimeZone& tz = TimeZone::utc()) {
    std::map<Label, std::vector<TimeOfDay>> times;
    for (const auto& t : log)
        for (const auto& e : t) times[e.label].push_back(time_of_day(e.timestamp, tz));

    CandidateGeneration out;
    for (auto& [label, tods] : times) {
        std::sort(tods.begin(), tods.end());
        if (tods.size() < 2 || tods.front() == tods.back()) {
            out.skipped.push_back(label);
            continue;
        }
        const TimeOfDay median = tods[(tods.size() - 1) / 2];
        out.candidates.push_back(RelabelingFn::time_threshold(label, median, detail::with_suffix(label, "_1"),
                                                              detail::with_suffix(label, "_2"), tz));
    }
    return out;
}

namespace detail {

inline EvaluationReport evaluate_candidate(const EventLog& l1_log, const RelabelingFn& fn,
                                           const EvaluationConfig& config) {
    try {
        return evaluate(l1_log, apply(fn, l1_log), config, fn.description());
    } catch (const RefinementError& err) {
        EvaluationReport r;
        r.candidate = fn.description();
        r.notes.push_back(std::string("not a refinement: ") + err.what());
        decide(r, config.alpha);
        return r;
    }
}

} // namespace detail

/// Evaluates every candidate against `l1_log` and sorts by score (descending), then description.
/// Under FamilyScope::per_candidate_set the Bonferroni family spans the tests of all candidates.
/// Candidates are independent and are spread over up to `workers` threads (0: hardware
/// concurrency); the result does not depend on the thread count.
inline std::vector<EvaluationReport> rank_candidates(const EventLog& l1_log, const std::vector<RelabelingFn>& candidates,
                                                     const EvaluationConfig& config, unsigned workers = 0) {
    config.validate();
    std::vector<EvaluationReport> reports(candidates.size());
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, candidates.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < candidates.size(); ++i)
            reports[i] = detail::evaluate_candidate(l1_log, candidates[i], config);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::future<void>> jobs;
        for (unsigned w = 0; w < workers; ++w)
            jobs.push_back(std::async(std::launch::async, [&] {
                for (std::size_t i = next++; i < candidates.size(); i = next++)
                    reports[i] = detail::evaluate_candidate(l1_log, candidates[i], config);
            }));
        for (auto& j : jobs) j.get();
    }
    if (config.correction.scope == FamilyScope::per_candidate_set) {
        std::size_t total = 0;
        for (const auto& r : reports) total += r.m_tests;
        const double corrected = config.correction.threshold(config.alpha, total);
        for (auto& r : reports) {
            r.family_size = total;
            decide(r, corrected);
        }
    }
    std::stable_sort(reports.begin(), reports.end(), [](const EvaluationReport& a, const EvaluationReport& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.candidate < b.candidate;
    });
    return reports;
}

} // namespace labelsplit

#endif // LABELSPLIT_EVALUATOR_HPP
