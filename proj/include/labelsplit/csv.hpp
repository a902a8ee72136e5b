#ifndef LABELSPLIT_CSV_HPP
#define LABELSPLIT_CSV_HPP

#include "labelsplit/errors.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace labelsplit::csv {

struct Record {
    std::size_t line = 0; ///< 1-based line on which the record starts
    std::vector<std::string> fields;
};

/// RFC-4180 reader: quoted fields may contain delimiters, doubled quotes and line breaks.
/// Accepts LF or CRLF line endings and a leading UTF-8 BOM. Blank lines are skipped.
inline std::vector<Record> read(std::string_view text, char delimiter = ',') {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::vector<Record> records;
    Record current;
    std::string field;
    std::size_t line = 1;
    std::size_t i = 0;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool record_open = false;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = current.fields.size() == 1 && current.fields[0].empty();
        if (!blank) records.push_back(std::move(current));
        current = Record{};
        record_open = false;
    };

    while (i < text.size()) {
        const char c = text[i];
        if (!record_open) {
            current.line = line;
            record_open = true;
        }
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                in_quotes = false;
                ++i;
                continue;
            }
            if (c == '\n') ++line;
            field += c;
            ++i;
            continue;
        }
        if (c == '"') {
            if (!field.empty() || field_was_quoted)
                throw ParseError("unexpected quote inside unquoted field", line);
            in_quotes = true;
            field_was_quoted = true;
            ++i;
        } else if (c == delimiter) {
            end_field();
            ++i;
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            end_record();
            ++line;
            i += 2;
        } else if (c == '\n') {
            end_record();
            ++line;
            ++i;
        } else {
            if (field_was_quoted) throw ParseError("characters after closing quote", line);
            field += c;
            ++i;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", current.line);
    if (record_open) end_record();
    return records;
}

inline std::string escape(std::string_view value, char delimiter = ',') {
    const bool needs_quotes = value.find_first_of(std::string{'"', '\n', '\r', delimiter}) != std::string_view::npos ||
                              (!value.empty() && (value.front() == ' ' || value.back() == ' '));
    if (!needs_quotes) return std::string(value);
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string write_row(const std::vector<std::string>& fields, char delimiter = ',') {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += delimiter;
        out += escape(fields[i], delimiter);
    }
    out += '\n';
    return out;
}

} // namespace labelsplit::csv

#endif // LABELSPLIT_CSV_HPP
