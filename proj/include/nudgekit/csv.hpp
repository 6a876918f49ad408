#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nudgekit/errors.hpp"

// Minimal RFC-4180-ish CSV support: comma delimiter, double-quote quoting
// with "" escapes, UTF-8 passthrough. Enough for the fixture catalogs and
// the exported recommendation/plot files.

namespace nudgekit::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw ValidationError("csv: missing column '" + name + "'");
    }
};

inline std::vector<std::string> parse_line(const std::string& line,
                                           std::size_t line_number) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) {
        throw ValidationError("csv: unterminated quote at line " +
                              std::to_string(line_number));
    }
    fields.push_back(field);
    return fields;
}

inline Table read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open csv file: " + path.string());
    }
    Table table;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = parse_line(line, line_number);
        if (table.header.empty()) {
            table.header = std::move(fields);
        } else {
            if (fields.size() != table.header.size()) {
                throw ValidationError(
                    path.filename().string() + " line " +
                    std::to_string(line_number) + ": expected " +
                    std::to_string(table.header.size()) + " fields, got " +
                    std::to_string(fields.size()));
            }
            table.rows.push_back(std::move(fields));
        }
    }
    if (table.header.empty()) {
        throw ValidationError("csv: empty file " + path.string());
    }
    return table;
}

inline std::string escape_field(const std::string& field) {
    const bool needs_quotes =
        field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string format_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape_field(fields[i]);
    }
    out.push_back('\n');
    return out;
}

inline std::string format_table(const Table& table) {
    std::string out = format_row(table.header);
    for (const auto& row : table.rows) out += format_row(row);
    return out;
}

}  // namespace nudgekit::csv
