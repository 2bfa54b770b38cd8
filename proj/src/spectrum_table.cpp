#include "nlse/spectrum_table.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

namespace nlse {

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

SpectrumTable::SpectrumTable(std::string axis_name, std::vector<double> axis)
    : axis_name_(std::move(axis_name)), axis_(std::move(axis)) {
    if (axis_.empty())
        throw ConfigError("spectrum axis must be nonempty");
}

void SpectrumTable::add_column(const std::string& name) {
    if (columns_.count(name))
        throw ConfigError("duplicate column: " + name);
    column_order_.push_back(name);
    columns_[name].resize(axis_.size());
}

std::vector<SpectrumTable::Cell>& SpectrumTable::col(const std::string& name) {
    auto it = columns_.find(name);
    if (it == columns_.end())
        throw ConfigError("unknown column: " + name);
    return it->second;
}

const std::vector<SpectrumTable::Cell>& SpectrumTable::col(const std::string& name) const {
    auto it = columns_.find(name);
    if (it == columns_.end())
        throw ConfigError("unknown column: " + name);
    return it->second;
}

void SpectrumTable::set(const std::string& column, std::size_t row, double value) {
    auto& c = col(column);
    c.at(row) = Cell{value, false};
}

void SpectrumTable::mask(const std::string& column, std::size_t row) {
    col(column).at(row).masked = true;
}

double SpectrumTable::get(const std::string& column, std::size_t row) const {
    const auto& cell = col(column).at(row);
    if (cell.masked)
        throw NumericalError("reading masked cell in column " + column);
    return cell.value;
}

bool SpectrumTable::is_masked(const std::string& column, std::size_t row) const {
    return col(column).at(row).masked;
}

std::vector<std::string> SpectrumTable::column_names() const { return column_order_; }

void SpectrumTable::set_metadata(const std::string& key, const std::string& value) {
    metadata_[key] = value;
}

void SpectrumTable::set_metadata(const std::string& key, double value) {
    metadata_[key] = format_double(value);
}

std::string SpectrumTable::to_csv() const {
    std::ostringstream out;
    out << axis_name_;
    for (const auto& name : column_order_) out << ',' << name;
    out << '\n';
    for (std::size_t r = 0; r < axis_.size(); ++r) {
        out << format_double(axis_[r]);
        for (const auto& name : column_order_) {
            const auto& cell = columns_.at(name)[r];
            out << ',';
            if (!cell.masked) out << format_double(cell.value);
        }
        out << '\n';
    }
    return out.str();
}

std::string SpectrumTable::metadata_json() const {
    nlohmann::ordered_json j;
    j["axis"] = axis_name_;
    j["rows"] = axis_.size();
    nlohmann::ordered_json meta;
    for (const auto& [k, v] : metadata_) meta[k] = v;
    j["metadata"] = meta;
    return j.dump(2);
}

} // namespace nlse
