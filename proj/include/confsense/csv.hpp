#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "confsense/data_table.hpp"
#include "confsense/errors.hpp"

namespace confsense {

/// Shortest round-trip decimal representation of a double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(field);
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    if (quoted) {
        throw ValidationError("CSV line " + std::to_string(line_no) + ": unterminated quote");
    }
    out.push_back(field);
    return out;
}

inline double parse_double(const std::string& s, std::size_t line_no) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc()) {
        throw ValidationError("CSV line " + std::to_string(line_no) + ": cannot parse number '" +
                              s + "'");
    }
    return v;
}

} // namespace detail

/// Reads a CSV with a mandatory header row. Lines starting with '#' are
/// treated as comments and skipped, so files written by this toolkit can be
/// read back directly.
inline DataTable read_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        header = detail::split_csv_line(line, line_no);
        break;
    }
    if (header.empty()) throw ValidationError("CSV: missing header row");

    std::vector<std::vector<double>> cols(header.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto fields = detail::split_csv_line(line, line_no);
        if (fields.size() != header.size()) {
            throw ValidationError("CSV line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        }
        for (std::size_t j = 0; j < fields.size(); ++j) {
            cols[j].push_back(detail::parse_double(fields[j], line_no));
        }
    }
    return DataTable(std::move(header), std::move(cols));
}

inline DataTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file '" + path + "'");
    return read_csv(in);
}

/// Writes a table as CSV. Any comment lines are emitted first, prefixed '#'.
inline void write_csv(std::ostream& out, const DataTable& table,
                      const std::vector<std::string>& comments = {}) {
    for (const auto& c : comments) out << "# " << c << "\n";
    const auto& names = table.names();
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (j) out << ',';
        out << names[j];
    }
    out << '\n';
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (j) out << ',';
            out << format_double(table.column(j)[i]);
        }
        out << '\n';
    }
}

inline void write_csv_file(const std::string& path, const DataTable& table,
                           const std::vector<std::string>& comments = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file '" + path + "'");
    write_csv(out, table, comments);
}

} // namespace confsense
