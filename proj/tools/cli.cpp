#include "cli.hpp"

#include "labelsplit/labelsplit.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace labelsplit::cli {
namespace {

struct InputOptions {
    std::string csv;
    std::string xes;
    std::string csv_schema;
    std::vector<std::string> case_key;
    std::string calendar_key; // empty: "day" unless a case key is given
    std::string timezone = "UTC";
};

struct LabelOptions {
    std::vector<std::string> base_label;
    std::vector<std::string> refined_label;
    std::string rules;
    std::string split_label;
    std::string split_time;
    std::string low_label;
    std::string high_label;
};

struct EvalOptions {
    double alpha = 0.01;
    std::vector<std::string> relations;
    bool length_two_loop = false;
    std::string correction = "bonferroni";
    std::string family_scope = "per_candidate";
    std::vector<std::string> context_labels;
};

struct OutputOptions {
    bool json = false;
    bool pretty = false;
    bool deterministic = false;
    std::uint64_t seed = 0; // accepted for interface stability; nothing is random
};

void add_input_options(CLI::App* sub, InputOptions& in) {
    sub->add_option("--csv", in.csv, "CSV event file");
    sub->add_option("--xes", in.xes, "XES event log");
    sub->add_option("--csv-schema", in.csv_schema, "key=value CSV schema file (default: inferred from header)")
        ;
    sub->add_option("--case-key", in.case_key, "attributes whose values identify a case")->delimiter(',');
    sub->add_option("--calendar-key", in.calendar_key, "calendar part of the case key: none or day")
        ->check(CLI::IsMember({"none", "day"}));
    sub->add_option("--timezone", in.timezone, "timezone for day boundaries and times of day")->capture_default_str();
}

void add_eval_options(CLI::App* sub, EvalOptions& ev) {
    sub->add_option("--alpha", ev.alpha, "significance level")->capture_default_str();
    sub->add_option("--relations", ev.relations, "ordering relations to test (default: the four precede/follow ones)")
        ->delimiter(',');
    sub->add_flag("--length-two-loop", ev.length_two_loop, "also test the length-two-loop relation");
    sub->add_option("--correction", ev.correction, "none or bonferroni")->capture_default_str()
        ->check(CLI::IsMember({"none", "bonferroni"}));
    sub->add_option("--family-scope", ev.family_scope, "per_candidate or per_candidate_set")->capture_default_str();
    sub->add_option("--context-labels", ev.context_labels, "restrict context labels (\"+\" joins components)")
        ->delimiter(',');
}

void add_output_options(CLI::App* sub, OutputOptions& out) {
    sub->add_flag("--json", out.json, "JSON output (default)");
    sub->add_flag("--pretty", out.pretty, "human-readable table instead of JSON");
    sub->add_flag("--deterministic", out.deterministic, "omit run metadata so output is byte-identical");
    sub->add_option("--seed", out.seed, "ignored; the pipeline is deterministic");
}

std::vector<Label> parse_labels(const std::vector<std::string>& items) {
    std::vector<Label> out;
    for (const auto& s : items) out.push_back(Label::parse(s));
    return out;
}

/// Raw events grouped into traces. CSV events carry no label yet; XES events are labelled by name.
EventLog load_log(const InputOptions& in, std::ostream& err) {
    if (in.csv.empty() == in.xes.empty()) throw ConfigError("exactly one of --csv or --xes is required");
    const TimeZone tz = TimeZone::parse(in.timezone);
    PartitionKeySpec key;
    key.attribute_keys = in.case_key;
    key.timezone = tz;
    if (in.calendar_key.empty())
        key.calendar_key = in.case_key.empty() ? CalendarKey::day : CalendarKey::none;
    else
        key.calendar_key = parse_calendar_key(in.calendar_key);

    if (!in.xes.empty()) {
        auto parsed = parse_xes_minimal(read_text_file(in.xes));
        if (parsed.ignored_elements > 0)
            err << "warning: ignored " << parsed.ignored_elements << " unsupported XES element(s) in " << in.xes << "\n";
        if (in.case_key.empty() && in.calendar_key.empty()) return std::move(parsed.log);
        std::vector<Event> events;
        for (const auto& t : parsed.log)
            for (const auto& e : t) events.push_back(e);
        return partition(std::move(events), key);
    }
    const std::string text = read_text_file(in.csv);
    const CsvSchema schema =
        in.csv_schema.empty() ? infer_csv_schema(text) : CsvSchema::parse(read_text_file(in.csv_schema));
    return partition(parse_csv(text, schema, tz), key);
}

/// Base labelling: --base-label projection, or the XES event name when absent.
EventLog base_labelled(const EventLog& raw, const InputOptions& in, const std::vector<std::string>& projection) {
    if (!projection.empty()) return apply(RelabelingFn::projection(projection), raw);
    if (!in.xes.empty()) return raw;
    throw ConfigError("--base-label is required for CSV input");
}

RelabelingFn refined_fn(const LabelOptions& lo, const InputOptions& in) {
    const int given = !lo.refined_label.empty() + !lo.rules.empty() + !lo.split_label.empty();
    if (given != 1) throw ConfigError("give exactly one of --refined-label, --rules or --split-label");
    const TimeZone tz = TimeZone::parse(in.timezone);
    if (!lo.refined_label.empty()) return RelabelingFn::projection(lo.refined_label);
    if (!lo.rules.empty()) return RelabelingFn::rules(RuleSet::parse(read_text_file(lo.rules), tz), "rules " + lo.rules);
    if (lo.split_time.empty()) throw ConfigError("--split-label needs --split-time HH:MM");
    const Label base = Label::parse(lo.split_label);
    const Label low = lo.low_label.empty() ? Label::parse(lo.split_label + "_1") : Label::parse(lo.low_label);
    const Label high = lo.high_label.empty() ? Label::parse(lo.split_label + "_2") : Label::parse(lo.high_label);
    TimeOfDay threshold;
    try {
        threshold = parse_time_of_day(lo.split_time);
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
    return RelabelingFn::time_threshold(base, threshold, low, high, tz);
}

EvaluationConfig make_config(const EvalOptions& ev) {
    EvaluationConfig cfg;
    cfg.alpha = ev.alpha;
    if (!ev.relations.empty()) {
        cfg.relations.clear();
        for (const auto& r : ev.relations) cfg.relations.push_back(parse_relation(r));
    }
    if (ev.length_two_loop &&
        std::find(cfg.relations.begin(), cfg.relations.end(), OrderingRelation::length_two_loop) == cfg.relations.end())
        cfg.relations.push_back(OrderingRelation::length_two_loop);
    cfg.correction.kind = parse_correction_kind(ev.correction);
    cfg.correction.scope = parse_family_scope(ev.family_scope);
    if (!ev.context_labels.empty()) cfg.context_labels = parse_labels(ev.context_labels);
    cfg.validate();
    return cfg;
}

std::string human_label(const Label& l) {
    std::string s = l.str();
    if (l.parts.size() == 1 && s.find('+') != std::string::npos) return "\"" + s + "\"";
    return s;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

void print_pretty(std::ostream& out, const EvaluationReport& r) {
    out << "candidate: " << r.candidate << "\n";
    for (const auto& s : r.split_pairs) {
        out << "split: " << human_label(s.parent) << " ->";
        for (const auto& c : s.children) out << " " << human_label(c);
        out << "\n";
    }
    out << "tests: " << r.m_tests << " (family " << r.family_size << "), corrected alpha " << fmt_double(r.corrected_alpha)
        << "\n";
    if (!r.tests.empty()) {
        out << std::left << std::setw(22) << "relation" << std::setw(26) << "context" << std::setw(12) << "a1 +/-"
            << std::setw(12) << "a2 +/-" << std::setw(12) << "parent +/-" << std::setw(12) << "p"
            << "sig\n";
        for (const auto& t : r.tests) {
            auto cell = [](const OrderingCounts& c) { return std::to_string(c.pos) + "/" + std::to_string(c.neg); };
            out << std::left << std::setw(22) << to_string(t.table.relation) << std::setw(26)
                << human_label(t.table.context) << std::setw(12) << cell(t.table.col_a1) << std::setw(12)
                << cell(t.table.col_a2) << std::setw(12) << cell(t.table.parent_col) << std::setw(12)
                << fmt_double(t.p_value) << (t.significant ? "*" : "") << "\n";
        }
    }
    out << "entropy before " << fmt_double(r.entropy.total_before) << " bits, after "
        << fmt_double(r.entropy.total_after) << " bits, relative gain " << fmt_double(r.entropy.relative_information_gain)
        << "\n";
    out << "useful: " << (r.useful ? "yes" : "no") << ", score " << fmt_double(r.score) << "\n";
    for (const auto& n : r.notes) out << "note: " << n << "\n";
}

Json with_run_metadata(Json j, const OutputOptions& o) {
    if (!o.deterministic) {
        const auto now = std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
        j["generated_at"] = format_iso8601(now);
    }
    return j;
}

int cmd_evaluate(const InputOptions& in, const LabelOptions& lo, const EvalOptions& ev, const OutputOptions& oo,
                 std::ostream& out, std::ostream& err) {
    const EvaluationConfig cfg = make_config(ev);
    const EventLog raw = load_log(in, err);
    const EventLog l1 = base_labelled(raw, in, lo.base_label);
    const RelabelingFn fn = refined_fn(lo, in);
    const EventLog l2 = apply(fn, l1);
    const auto report = evaluate(l1, l2, cfg, fn.description());
    if (oo.pretty)
        print_pretty(out, report);
    else
        out << with_run_metadata(to_json(report), oo).dump(2) << "\n";
    return kSuccess;
}

int cmd_scan(const InputOptions& in, const LabelOptions& lo, const EvalOptions& ev, const OutputOptions& oo,
             std::ostream& out, std::ostream& err) {
    const EvaluationConfig cfg = make_config(ev);
    const EventLog l1 = base_labelled(load_log(in, err), in, lo.base_label);
    const auto gen = generate_median_time_candidates(l1, TimeZone::parse(in.timezone));
    const auto reports = rank_candidates(l1, gen.candidates, cfg);
    if (oo.pretty) {
        for (const auto& l : gen.skipped) out << "skipped: " << human_label(l) << "\n";
        for (std::size_t i = 0; i < reports.size(); ++i) {
            out << "#" << (i + 1) << " ";
            print_pretty(out, reports[i]);
            out << "\n";
        }
        return kSuccess;
    }
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(with_run_metadata(to_json(r), oo));
    out << arr.dump(2) << "\n";
    return kSuccess;
}

int cmd_stats(const InputOptions& in, const std::vector<std::string>& label, const EvalOptions& ev,
              const std::vector<std::string>& sources, const std::vector<std::string>& targets, bool self,
              const std::string& format, std::ostream& out, std::ostream& err) {
    std::vector<OrderingRelation> rels;
    for (const auto& r : ev.relations) rels.push_back(parse_relation(r));
    if (rels.empty()) rels.assign(kAllRelations.begin(), kAllRelations.end());
    const EventLog log = base_labelled(load_log(in, err), in, label);
    const OrderingIndex index(log);
    const auto src = parse_labels(sources);
    const auto tgt = parse_labels(targets);
    const auto rows = dump_counts(index, rels, sources.empty() ? nullptr : &src, targets.empty() ? nullptr : &tgt, self);
    if (format == "json") {
        Json arr = Json::array();
        for (const auto& row : rows) arr.push_back(to_json(row));
        out << arr.dump(2) << "\n";
    } else {
        out << csv::write_row({"relation", "source", "target", "pos", "neg"});
        for (const auto& row : rows)
            out << csv::write_row({std::string(to_string(row.relation)), row.source.str(), row.target.str(),
                                   std::to_string(row.counts.pos), std::to_string(row.counts.neg)});
    }
    return kSuccess;
}

int cmd_gen_candidates(const InputOptions& in, const std::vector<std::string>& base_label, std::ostream& out,
                       std::ostream& err) {
    const TimeZone tz = TimeZone::parse(in.timezone);
    const EventLog l1 = base_labelled(load_log(in, err), in, base_label);
    const auto gen = generate_median_time_candidates(l1, tz);
    Json cands = Json::array();
    for (const auto& fn : gen.candidates) {
        const auto& t = std::get<TimeThreshold>(fn.kind());
        cands.push_back(Json{{"description", fn.description()},
                             {"label", to_json(t.base)},
                             {"threshold", format_time_of_day(t.threshold)},
                             {"low", to_json(t.low)},
                             {"high", to_json(t.high)}});
    }
    Json skipped = Json::array();
    for (const auto& l : gen.skipped) skipped.push_back(to_json(l));
    out << Json{{"timezone", tz.name()}, {"candidates", std::move(cands)}, {"skipped", std::move(skipped)}}.dump(2)
        << "\n";
    return kSuccess;
}

int cmd_convert(const InputOptions& in, const std::vector<std::string>& label, const std::string& output,
                std::ostream& out, std::ostream& err) {
    std::string text;
    if (!in.csv.empty()) {
        if (label.empty()) throw ConfigError("--label is required to convert CSV to XES");
        text = write_xes(apply(RelabelingFn::projection(label), load_log(in, err)));
    } else {
        text = write_csv(load_log(in, err));
    }
    if (output.empty()) {
        out << text;
    } else {
        std::ofstream f(output, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + output + "'");
        f << text;
    }
    return kSuccess;
}

// Simple key=value config: keys are long option names without "--". Options already on the
// command line win.
void merge_config_file(std::vector<std::string>& args, CLI::App& app) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return;
    const auto sub_it = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
    if (sub_it == args.end()) throw ConfigError("--config needs a subcommand");
    CLI::App* sub = app.get_subcommand_no_throw(*sub_it);
    if (!sub) return; // CLI11 reports the unknown subcommand

    std::istringstream file(read_text_file(path));
    std::string line;
    std::size_t n = 0;
    while (std::getline(file, line)) {
        ++n;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(n) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto l = s.find_first_not_of(" \t\r");
            return l == std::string::npos ? std::string{} : s.substr(l, s.find_last_not_of(" \t\r") - l + 1);
        };
        const std::string key = "--" + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const CLI::Option* opt = sub->get_option_no_throw(key);
        if (!opt) throw ConfigError(path + ":" + std::to_string(n) + ": unknown option '" + key + "'");
        const bool on_cmdline = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == key || a.rfind(key + "=", 0) == 0;
        });
        if (on_cmdline) continue;
        if (opt->get_expected_min() == 0) {
            if (value == "true" || value == "1" || value == "yes") args.push_back(key);
        } else {
            args.push_back(key);
            args.push_back(value);
        }
    }
}

} // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Statistical evaluation of label refinements for process discovery", "labelsplit"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key=value file with option defaults (command line wins)");

    InputOptions in;
    LabelOptions lo;
    EvalOptions ev;
    OutputOptions oo;
    std::vector<std::string> stat_label, sources, targets, convert_label;
    bool self = false;
    std::string format = "csv", output;

    auto* evaluate_cmd = app.add_subcommand("evaluate", "evaluate one refinement of the base labelling");
    add_input_options(evaluate_cmd, in);
    add_eval_options(evaluate_cmd, ev);
    add_output_options(evaluate_cmd, oo);
    evaluate_cmd->add_option("--base-label", lo.base_label, "attributes forming the base label")->delimiter(',');
    evaluate_cmd->add_option("--refined-label", lo.refined_label, "attributes forming the refined label")->delimiter(',');
    evaluate_cmd->add_option("--rules", lo.rules, "rule file producing the refined label");
    evaluate_cmd->add_option("--split-label", lo.split_label, "base label to split by time of day");
    evaluate_cmd->add_option("--split-time", lo.split_time, "HH:MM threshold; events at or after it get the high label");
    evaluate_cmd->add_option("--low-label", lo.low_label, "label before the threshold (default <label>_1)");
    evaluate_cmd->add_option("--high-label", lo.high_label, "label from the threshold on (default <label>_2)");

    auto* scan_cmd = app.add_subcommand("scan", "generate median time-of-day splits of every label and rank them");
    add_input_options(scan_cmd, in);
    add_eval_options(scan_cmd, ev);
    add_output_options(scan_cmd, oo);
    scan_cmd->add_option("--base-label", lo.base_label, "attributes forming the base label")->delimiter(',');

    auto* stats_cmd = app.add_subcommand("stats", "dump ordering-relation counts");
    add_input_options(stats_cmd, in);
    stats_cmd->add_option("--label", stat_label, "attributes forming the label")->delimiter(',');
    stats_cmd->add_option("--relations", ev.relations, "relations to dump (default: all five)")->delimiter(',');
    stats_cmd->add_option("--sources", sources, "restrict source labels b")->delimiter(',');
    stats_cmd->add_option("--targets", targets, "restrict target labels c")->delimiter(',');
    stats_cmd->add_flag("--self-relations", self, "include b == c rows");
    stats_cmd->add_option("--format", format, "csv or json")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));

    auto* gen_cmd = app.add_subcommand("gen-candidates", "list median time-of-day split candidates");
    add_input_options(gen_cmd, in);
    gen_cmd->add_option("--base-label", lo.base_label, "attributes forming the base label")->delimiter(',');

    auto* convert_cmd = app.add_subcommand("convert", "convert CSV to minimal XES or XES to CSV");
    add_input_options(convert_cmd, in);
    convert_cmd->add_option("--label", convert_label, "attributes forming the event name (CSV input)")->delimiter(',');
    convert_cmd->add_option("--output,-o", output, "output file (default: standard output)");

    std::vector<std::string> args = argv;
    try {
        merge_config_file(args, app);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }

    try {
        if (*evaluate_cmd) return cmd_evaluate(in, lo, ev, oo, out, err);
        if (*scan_cmd) return cmd_scan(in, lo, ev, oo, out, err);
        if (*stats_cmd) return cmd_stats(in, stat_label, ev, sources, targets, self, format, out, err);
        if (*gen_cmd) return cmd_gen_candidates(in, lo.base_label, out, err);
        if (*convert_cmd) return cmd_convert(in, convert_label, output, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n\n";
        for (auto* sub : app.get_subcommands()) err << sub->help();
        return kUsageError;
    } catch (const RefinementError& e) {
        err << "error: " << e.what() << "\n";
        return kRefinementError;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const MissingAttributeError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }
    return kUsageError;
}

} // namespace labelsplit::cli
