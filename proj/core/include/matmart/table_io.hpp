#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace matmart {

/// One table cell. Doubles are serialized with 17 significant digits so
/// that re-parsing reproduces the in-memory value exactly.
using Cell = std::variant<long long, double, bool, std::string>;

/// Decimal serialization of a double with 17 significant digits.
std::string format_double(double value);

/// Columnar result table with an ordered set of meta key/value pairs.
/// CSV output carries the header and rows only; JSON output wraps the
/// rows in {"meta": {...}, "rows": [...]}.
class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void set_meta(const std::string& key, Cell value);
    void add_row(std::vector<Cell> row);

    const std::vector<std::string>& columns() const { return columns_; }
    size_t row_count() const { return rows_.size(); }

    void write_csv(std::ostream& out) const;
    void write_json(std::ostream& out) const;

    /// Writes in the requested format ("csv" or "json").
    void write(std::ostream& out, const std::string& format) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, Cell>> meta_;
    std::vector<std::vector<Cell>> rows_;
};

}  // namespace matmart
