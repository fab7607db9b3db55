#include "matmart/table_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace matmart {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

void write_csv_cell(std::ostream& out, const Cell& cell) {
    if (const auto* i = std::get_if<long long>(&cell)) {
        out << *i;
    } else if (const auto* d = std::get_if<double>(&cell)) {
        out << format_double(*d);
    } else if (const auto* b = std::get_if<bool>(&cell)) {
        out << (*b ? "true" : "false");
    } else {
        const std::string& s = std::get<std::string>(cell);
        if (s.find_first_of(",\"\n") != std::string::npos) {
            out << '"';
            for (char c : s) {
                if (c == '"') out << '"';
                out << c;
            }
            out << '"';
        } else {
            out << s;
        }
    }
}

void write_json_string(std::ostream& out, const std::string& s) {
    out << '"';
    for (char c : s) {
        switch (c) {
            case '"': out << "\\\""; break;
            case '\\': out << "\\\\"; break;
            case '\n': out << "\\n"; break;
            case '\r': out << "\\r"; break;
            case '\t': out << "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out << buf;
                } else {
                    out << c;
                }
        }
    }
    out << '"';
}

void write_json_cell(std::ostream& out, const Cell& cell) {
    if (const auto* i = std::get_if<long long>(&cell)) {
        out << *i;
    } else if (const auto* d = std::get_if<double>(&cell)) {
        // JSON has no literal for non-finite values; emit them as strings.
        if (std::isfinite(*d)) {
            out << format_double(*d);
        } else {
            write_json_string(out, format_double(*d));
        }
    } else if (const auto* b = std::get_if<bool>(&cell)) {
        out << (*b ? "true" : "false");
    } else {
        write_json_string(out, std::get<std::string>(cell));
    }
}

}  // namespace

void Table::set_meta(const std::string& key, Cell value) {
    meta_.emplace_back(key, std::move(value));
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw std::invalid_argument("row width does not match columns");
    rows_.push_back(std::move(row));
}

void Table::write_csv(std::ostream& out) const {
    for (size_t c = 0; c < columns_.size(); ++c) {
        if (c) out << ',';
        out << columns_[c];
    }
    out << '\n';
    for (const auto& row : rows_) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            write_csv_cell(out, row[c]);
        }
        out << '\n';
    }
}

void Table::write_json(std::ostream& out) const {
    out << "{\n  \"meta\": {";
    for (size_t i = 0; i < meta_.size(); ++i) {
        if (i) out << ",";
        out << "\n    ";
        write_json_string(out, meta_[i].first);
        out << ": ";
        write_json_cell(out, meta_[i].second);
    }
    out << (meta_.empty() ? "},\n" : "\n  },\n");
    out << "  \"rows\": [";
    for (size_t r = 0; r < rows_.size(); ++r) {
        if (r) out << ",";
        out << "\n    {";
        for (size_t c = 0; c < rows_[r].size(); ++c) {
            if (c) out << ", ";
            write_json_string(out, columns_[c]);
            out << ": ";
            write_json_cell(out, rows_[r][c]);
        }
        out << "}";
    }
    out << (rows_.empty() ? "]\n" : "\n  ]\n");
    out << "}\n";
}

void Table::write(std::ostream& out, const std::string& format) const {
    if (format == "csv") {
        write_csv(out);
    } else if (format == "json") {
        write_json(out);
    } else {
        throw std::invalid_argument("unknown output format: " + format);
    }
}

}  // namespace matmart
