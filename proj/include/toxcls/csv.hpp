#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "toxcls/error.hpp"

namespace toxcls {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline bool csv_needs_quoting(std::string_view field) {
    return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

} // namespace detail

/// RFC-4180 reader. Fields may be quoted with `"`; a doubled quote inside a
/// quoted field is a literal quote; quoted fields may span newlines. Records
/// end at LF or CRLF. Malformed quoting raises ParseError with the byte
/// offset of the offending character.
inline std::vector<std::vector<std::string>> parse_csv_records(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    enum class State { FieldStart, Unquoted, Quoted, QuoteSeen };
    State state = State::FieldStart;
    bool record_started = false;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
        record_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        switch (state) {
        case State::FieldStart:
            if (c == '"') {
                state = State::Quoted;
                record_started = true;
            } else if (c == ',') {
                end_field();
                record_started = true;
            } else if (c == '\n') {
                if (record_started || !record.empty()) end_record();
                // A bare newline between records is not a record.
            } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
                if (record_started || !record.empty()) end_record();
                ++i;
            } else {
                field.push_back(c);
                state = State::Unquoted;
                record_started = true;
            }
            break;
        case State::Unquoted:
            if (c == ',') {
                end_field();
                state = State::FieldStart;
            } else if (c == '\n') {
                end_record();
                state = State::FieldStart;
            } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
                end_record();
                state = State::FieldStart;
                ++i;
            } else if (c == '"') {
                throw ParseError("CSV: bare quote inside unquoted field at byte offset " +
                                 std::to_string(i));
            } else {
                field.push_back(c);
            }
            break;
        case State::Quoted:
            if (c == '"') {
                state = State::QuoteSeen;
            } else {
                field.push_back(c);
            }
            break;
        case State::QuoteSeen:
            if (c == '"') {
                field.push_back('"');
                state = State::Quoted;
            } else if (c == ',') {
                end_field();
                state = State::FieldStart;
            } else if (c == '\n') {
                end_record();
                state = State::FieldStart;
            } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
                end_record();
                state = State::FieldStart;
                ++i;
            } else {
                throw ParseError("CSV: unexpected character after closing quote at byte offset " +
                                 std::to_string(i));
            }
            break;
        }
    }
    if (state == State::Quoted)
        throw ParseError("CSV: unterminated quoted field at byte offset " +
                         std::to_string(text.size()));
    if (record_started || !record.empty() || !field.empty()) end_record();
    return records;
}

/// Reads a CSV document whose first record is the header row.
inline CsvTable parse_csv(std::string_view text) {
    auto records = parse_csv_records(text);
    if (records.empty()) throw ParseError("CSV: missing header row");
    CsvTable table;
    table.header = std::move(records.front());
    table.rows.assign(std::make_move_iterator(records.begin() + 1),
                      std::make_move_iterator(records.end()));
    return table;
}

/// Quotes a field only when RFC-4180 requires it.
inline std::string csv_escape(std::string_view field) {
    if (!detail::csv_needs_quoting(field)) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (const char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << csv_escape(fields[i]);
    }
    os << '\n';
}

} // namespace toxcls
