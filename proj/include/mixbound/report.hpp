// Bit-stable output: JSON with sorted keys and %.12g numbers, CSV with a
// header row, comma separators and LF line ends.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace mixbound {

using Json = nlohmann::json;  // std::map-backed, so object keys come out sorted

inline std::string format_number(double v) {
    if (!std::isfinite(v)) return "null";
    if (v == 0.0) return "0";  // folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

inline void dump_stable(const Json& j, std::ostringstream& os, int indent, int depth) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{" << nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << "," << nl;
            first = false;
            os << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
            dump_stable(it.value(), os, indent, depth + 1);
        }
        os << nl << close_pad << "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << "[" << nl;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) os << "," << nl;
            os << pad;
            dump_stable(j[i], os, indent, depth + 1);
        }
        os << nl << close_pad << "]";
        return;
    }
    case Json::value_t::number_float: os << format_number(j.get<double>()); return;
    default: os << j.dump(); return;
    }
}

}  // namespace detail

/// Serialized JSON; non-finite numbers become null.
inline std::string to_stable_json(const Json& j, int indent = 2) {
    std::ostringstream os;
    detail::dump_stable(j, os, indent, 0);
    return os.str();
}

/// CSV with one header row. Cells are pre-formatted strings; numbers should go
/// through csv_cell.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row) {
        if (row.size() != header_.size()) throw std::invalid_argument("CsvTable: row width does not match header");
        rows_.push_back(std::move(row));
    }

    void write(std::ostream& os) const {
        write_line(os, header_);
        for (const auto& r : rows_) write_line(os, r);
    }

    std::string str() const {
        std::ostringstream os;
        write(os);
        return os.str();
    }

private:
    static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            const auto& c = cells[i];
            if (c.find_first_of(",\"\n") != std::string::npos) {
                os << '"';
                for (char ch : c) os << (ch == '"' ? "\"\"" : std::string(1, ch));
                os << '"';
            } else {
                os << c;
            }
        }
        os << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string csv_cell(double v) { return std::isfinite(v) ? format_number(v) : (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")); }
inline std::string csv_cell(std::int64_t v) { return std::to_string(v); }
inline std::string csv_cell(int v) { return std::to_string(v); }
inline std::string csv_cell(const std::string& v) { return v; }

}  // namespace mixbound
