#include "levq/csv.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include "levq/error.hpp"

namespace levq {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Table& Table::meta(const std::string& key, const std::string& value) {
    meta_.emplace_back(key, value);
    return *this;
}

Table& Table::meta(const std::string& key, double value) { return meta(key, format_double(value)); }

void Table::add(std::vector<Cell> row) {
    require(row.size() == columns_.size(), ErrorKind::invalid_argument, "table row width does not match header");
    rows_.push_back(std::move(row));
}

void Table::write(std::ostream& os) const {
    for (const auto& [k, v] : meta_) os << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            if (const auto* d = std::get_if<double>(&row[i])) os << format_double(*d);
            else os << std::get<std::string>(row[i]);
        }
        os << "\n";
    }
}

std::string Table::str() const {
    std::ostringstream os;
    write(os);
    return os.str();
}

}  // namespace levq
