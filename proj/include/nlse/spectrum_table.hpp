#ifndef NLSE_SPECTRUM_TABLE_HPP
#define NLSE_SPECTRUM_TABLE_HPP

#include <map>
#include <string>
#include <vector>

#include "nlse/types.hpp"

namespace nlse {

/// Sweep results: one axis, named real-valued columns of equal length, and a
/// metadata block that is carried into the JSON sidecar untouched.
/// Cells may be masked (e.g. antiresonances, non-converged sweep points); a
/// masked cell serializes as an empty CSV field.
class SpectrumTable {
public:
    SpectrumTable(std::string axis_name, std::vector<double> axis);

    void add_column(const std::string& name);
    void set(const std::string& column, std::size_t row, double value);
    void mask(const std::string& column, std::size_t row);

    double get(const std::string& column, std::size_t row) const;
    bool is_masked(const std::string& column, std::size_t row) const;

    const std::string& axis_name() const { return axis_name_; }
    const std::vector<double>& axis() const { return axis_; }
    std::vector<std::string> column_names() const;
    std::size_t rows() const { return axis_.size(); }

    void set_metadata(const std::string& key, const std::string& value);
    void set_metadata(const std::string& key, double value);
    const std::map<std::string, std::string>& metadata() const { return metadata_; }

    /// Header row: axis name then column names; one data row per axis value.
    /// Numbers in shortest round-trip decimal form.
    std::string to_csv() const;

    /// Metadata sidecar (parameters, solver tag) as a JSON object string.
    std::string metadata_json() const;

private:
    struct Cell {
        double value = 0.0;
        bool masked = true;
    };
    std::string axis_name_;
    std::vector<double> axis_;
    std::vector<std::string> column_order_;
    std::map<std::string, std::vector<Cell>> columns_;
    std::map<std::string, std::string> metadata_;

    std::vector<Cell>& col(const std::string& name);
    const std::vector<Cell>& col(const std::string& name) const;
};

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

} // namespace nlse

#endif
