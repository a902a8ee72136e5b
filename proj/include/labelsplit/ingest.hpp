#ifndef LABELSPLIT_INGEST_HPP
#define LABELSPLIT_INGEST_HPP

#include "labelsplit/csv.hpp"
#include "labelsplit/errors.hpp"
#include "labelsplit/event_model.hpp"
#include "labelsplit/time.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace labelsplit {

inline constexpr std::string_view kSynthesizeIds = "synthesize";

/// Column layout of a CSV event file.
struct CsvSchema {
    std::string id_column{kSynthesizeIds}; ///< column name, or "synthesize" for 1-based row ids
    std::string timestamp_column;
    std::string timestamp_format{kIsoFormat}; ///< "iso8601" or a strptime(3) pattern
    std::vector<std::string> attribute_columns;
    char delimiter = ',';

    void validate() const {
        if (timestamp_column.empty()) throw ConfigError("csv schema: timestamp_column is required");
        if (attribute_columns.empty()) throw ConfigError("csv schema: attribute_columns must not be empty");
    }

    /// Reads a `key=value` schema file. Keys: id_column, timestamp_column, timestamp_format,
    /// attribute_columns (comma separated), delimiter ("tab" for '\t'). '#' starts a comment.
    static CsvSchema parse(std::string_view text) {
        CsvSchema schema;
        std::istringstream in{std::string(text)};
        std::string line;
        std::size_t n = 0;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string{};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        while (std::getline(in, line)) {
            ++n;
            line = trim(line);
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError("csv schema line " + std::to_string(n) + ": expected key=value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key == "id_column") {
                schema.id_column = value;
            } else if (key == "timestamp_column") {
                schema.timestamp_column = value;
            } else if (key == "timestamp_format") {
                schema.timestamp_format = value;
            } else if (key == "attribute_columns") {
                schema.attribute_columns.clear();
                std::istringstream cols(value);
                std::string col;
                while (std::getline(cols, col, ','))
                    if (auto c = trim(col); !c.empty()) schema.attribute_columns.push_back(c);
            } else if (key == "delimiter") {
                if (value == "tab" || value == "\\t")
                    schema.delimiter = '\t';
                else if (value.size() == 1)
                    schema.delimiter = value[0];
                else
                    throw ConfigError("csv schema: delimiter must be a single character");
            } else {
                throw ConfigError("csv schema: unknown key '" + key + "'");
            }
        }
        schema.validate();
        return schema;
    }
};

/// Derives a schema from the header row: the timestamp column is the first one named
/// "timestamp", "time" or "time:timestamp" (case-insensitive); a column named "id" or "event_id"
/// supplies ids; every other column becomes an attribute.
inline CsvSchema infer_csv_schema(std::string_view text, char delimiter = ',') {
    const auto records = csv::read(text, delimiter);
    if (records.empty()) throw ParseError("csv input has no header row", 1);
    auto lower = [](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        return s;
    };
    CsvSchema schema;
    schema.delimiter = delimiter;
    for (const auto& col : records.front().fields) {
        const auto name = lower(col);
        if (schema.timestamp_column.empty() && (name == "timestamp" || name == "time" || name == "time:timestamp")) {
            schema.timestamp_column = col;
        } else if (schema.id_column == kSynthesizeIds && (name == "id" || name == "event_id")) {
            schema.id_column = col;
        } else {
            schema.attribute_columns.push_back(col);
        }
    }
    if (schema.timestamp_column.empty())
        throw ParseError("cannot infer timestamp column from csv header", 1);
    schema.validate();
    return schema;
}

/// One event per data row. Attribute values are kept as strings.
inline std::vector<Event> parse_csv(std::string_view text, const CsvSchema& schema,
                                    const TimeZone& tz = TimeZone::utc()) {
    schema.validate();
    const auto records = csv::read(text, schema.delimiter);
    if (records.empty()) throw ParseError("csv input has no header row", 1);

    const auto& header = records.front().fields;
    auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ParseError("csv header has no column '" + name + "'", records.front().line);
        return static_cast<std::size_t>(it - header.begin());
    };
    const bool synthesize = schema.id_column == kSynthesizeIds;
    const std::size_t id_col = synthesize ? 0 : column(schema.id_column);
    const std::size_t ts_col = column(schema.timestamp_column);
    std::vector<std::size_t> attr_cols;
    for (const auto& a : schema.attribute_columns) attr_cols.push_back(column(a));

    std::vector<Event> events;
    events.reserve(records.size() - 1);
    std::unordered_set<std::string> seen;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(rec.fields.size()),
                             rec.line);
        Event e;
        e.id = synthesize ? std::to_string(r) : rec.fields[id_col];
        if (!seen.insert(e.id).second) throw ParseError("duplicate event id '" + e.id + "'", rec.line);
        try {
            e.timestamp = parse_timestamp(rec.fields[ts_col], schema.timestamp_format, tz);
        } catch (const ParseError& err) {
            throw ParseError(err.what(), rec.line);
        }
        for (std::size_t k = 0; k < attr_cols.size(); ++k)
            e.attributes.emplace(schema.attribute_columns[k], rec.fields[attr_cols[k]]);
        events.push_back(std::move(e));
    }
    return events;
}

enum class CalendarKey { none, day };

inline CalendarKey parse_calendar_key(std::string_view s) {
    if (s == "none") return CalendarKey::none;
    if (s == "day") return CalendarKey::day;
    throw ConfigError("unknown calendar key '" + std::string(s) + "' (expected none or day)");
}

/// Event partitioning function: events with equal key values form one trace.
struct PartitionKeySpec {
    std::vector<std::string> attribute_keys;
    CalendarKey calendar_key = CalendarKey::none;
    TimeZone timezone; ///< day boundaries are midnight to midnight in this zone

    void validate() const {
        if (attribute_keys.empty() && calendar_key == CalendarKey::none)
            throw ConfigError("partition key needs at least one attribute or a calendar key");
    }
};

inline EventLog partition(std::vector<Event> events, const PartitionKeySpec& key) {
    key.validate();
    std::map<std::vector<std::string>, std::vector<Event>> groups;
    for (auto& e : events) {
        std::vector<std::string> k;
        k.reserve(key.attribute_keys.size() + 1);
        for (const auto& a : key.attribute_keys) k.push_back(render(e.attribute(a)));
        if (key.calendar_key == CalendarKey::day) k.push_back(format_date(local_day(e.timestamp, key.timezone)));
        groups[std::move(k)].push_back(std::move(e));
    }
    std::vector<Trace> traces;
    traces.reserve(groups.size());
    for (auto& [k, evs] : groups) {
        std::string case_id;
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (i) case_id += '|';
            case_id += k[i];
        }
        traces.emplace_back(std::move(case_id), std::move(evs));
    }
    return EventLog(std::move(traces));
}

// --- XES ------------------------------------------------------------------------------------

inline constexpr const char* kXesName = "concept:name";
inline constexpr const char* kXesTimestamp = "time:timestamp";
inline constexpr const char* kXesId = "identity:id";

struct XesParseResult {
    EventLog log;
    std::size_t ignored_elements = 0; ///< unsupported attributes/elements that were skipped
};

/// Reads the log/trace/event skeleton of an XES file. Events are labelled by their
/// concept:name; string attributes are kept, everything else is counted and skipped.
inline XesParseResult parse_xes_minimal(std::string_view text) {
    namespace pt = boost::property_tree;
    pt::ptree doc;
    try {
        std::istringstream in{std::string(text)};
        pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& err) {
        throw ParseError("malformed XML: " + err.message(), err.line());
    }
    const auto root = doc.get_child_optional("log");
    if (!root) throw ParseError("XES document has no <log> root element");

    XesParseResult result;
    std::vector<Trace> traces;
    std::unordered_set<std::string> seen_ids;
    std::size_t next_id = 1;
    std::size_t trace_index = 0;

    for (const auto& [tag, node] : *root) {
        if (tag == "<xmlattr>") continue;
        if (tag != "trace") {
            ++result.ignored_elements;
            continue;
        }
        ++trace_index;
        std::string case_id = std::to_string(trace_index);
        std::vector<Event> events;
        for (const auto& [ttag, tnode] : node) {
            if (ttag == "<xmlattr>") continue;
            if (ttag == "string" && tnode.get("<xmlattr>.key", "") == kXesName) {
                case_id = tnode.get("<xmlattr>.value", case_id);
                continue;
            }
            if (ttag != "event") {
                ++result.ignored_elements;
                continue;
            }
            Event e;
            std::optional<std::string> name, ts, id;
            for (const auto& [etag, enode] : tnode) {
                if (etag == "<xmlattr>") continue;
                const std::string key = enode.get("<xmlattr>.key", "");
                const std::string value = enode.get("<xmlattr>.value", "");
                if (etag == "date" && key == kXesTimestamp) {
                    ts = value;
                } else if (etag == "string" && key == kXesName) {
                    name = value;
                } else if (etag == "string" && key == kXesId) {
                    id = value;
                } else if (etag == "string" && !key.empty()) {
                    e.attributes.emplace(key, value);
                } else {
                    ++result.ignored_elements;
                }
            }
            if (!ts) throw ParseError("event in trace '" + case_id + "' has no " + kXesTimestamp);
            if (!name) throw ParseError("event in trace '" + case_id + "' has no " + kXesName);
            e.timestamp = parse_timestamp(*ts);
            e.attributes.insert_or_assign(kXesName, *name);
            e.label = Label::single(*name);
            e.id = id ? *id : std::to_string(next_id);
            ++next_id;
            if (!seen_ids.insert(e.id).second) throw ParseError("duplicate event id '" + e.id + "'");
            events.push_back(std::move(e));
        }
        traces.emplace_back(std::move(case_id), std::move(events));
    }
    result.log = EventLog(std::move(traces));
    return result;
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace detail

/// Serialises a log in the subset read by parse_xes_minimal. The event label becomes concept:name.
inline std::string write_xes(const EventLog& log) {
    using detail::xml_escape;
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<log xes.version=\"1.0\">\n";
    for (const auto& trace : log) {
        out += "  <trace>\n    <string key=\"concept:name\" value=\"" + xml_escape(trace.case_id()) + "\"/>\n";
        for (const auto& e : trace) {
            out += "    <event>\n";
            out += "      <string key=\"concept:name\" value=\"" + xml_escape(e.label.str()) + "\"/>\n";
            out += "      <date key=\"time:timestamp\" value=\"" + format_iso8601(e.timestamp) + "\"/>\n";
            out += "      <string key=\"identity:id\" value=\"" + xml_escape(e.id) + "\"/>\n";
            for (const auto& [k, v] : e.attributes) {
                if (k == kXesName || k == kXesId || k == kXesTimestamp) continue;
                out += "      <string key=\"" + xml_escape(k) + "\" value=\"" + xml_escape(render(v)) + "\"/>\n";
            }
            out += "    </event>\n";
        }
        out += "  </trace>\n";
    }
    out += "</log>\n";
    return out;
}

inline constexpr std::string_view kCsvCaseColumn = "case_id";
inline constexpr std::string_view kCsvIdColumn = "event_id";
inline constexpr std::string_view kCsvTimestampColumn = "timestamp";
inline constexpr std::string_view kCsvLabelColumn = "label";

/// Flat CSV export: case_id, event_id, timestamp, label, then every attribute name in sorted order.
/// Events without a given attribute get an empty cell.
inline std::string write_csv(const EventLog& log, char delimiter = ',') {
    const std::set<std::string_view> fixed{kCsvCaseColumn, kCsvIdColumn, kCsvTimestampColumn, kCsvLabelColumn};
    std::set<std::string> names;
    for (const auto& t : log)
        for (const auto& e : t)
            for (const auto& [k, v] : e.attributes)
                if (!fixed.count(k)) names.insert(k);

    std::vector<std::string> row{std::string(kCsvCaseColumn), std::string(kCsvIdColumn),
                                 std::string(kCsvTimestampColumn), std::string(kCsvLabelColumn)};
    row.insert(row.end(), names.begin(), names.end());
    std::string out = csv::write_row(row, delimiter);
    for (const auto& t : log) {
        for (const auto& e : t) {
            row = {t.case_id(), e.id, format_iso8601(e.timestamp), e.label.str()};
            for (const auto& n : names) {
                const auto it = e.attributes.find(n);
                row.push_back(it == e.attributes.end() ? std::string{} : render(it->second));
            }
            out += csv::write_row(row, delimiter);
        }
    }
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace labelsplit

#endif // LABELSPLIT_INGEST_HPP
