#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace levq {

/// Numeric table written as CSV: "# key=value" metadata lines, a header,
/// then rows with doubles printed to 17 significant digits.
class Table {
public:
    using Cell = std::variant<double, std::string>;

    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    Table& meta(const std::string& key, const std::string& value);
    Table& meta(const std::string& key, double value);
    /// Throws Error(invalid_argument) when the row width differs from the header.
    void add(std::vector<Cell> row);

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
    const std::vector<std::pair<std::string, std::string>>& metadata() const noexcept { return meta_; }

    void write(std::ostream& os) const;
    std::string str() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::vector<Cell>> rows_;
};

std::string format_double(double v);

}  // namespace levq
