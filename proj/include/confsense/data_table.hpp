#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "confsense/errors.hpp"

namespace confsense {

/// Columnar table of doubles with named columns. Immutable after
/// construction apart from add_column; all values are required to be finite.
class DataTable {
public:
    DataTable() = default;

    DataTable(std::vector<std::string> names, std::vector<std::vector<double>> columns)
        : names_(std::move(names)), columns_(std::move(columns)) {
        if (names_.size() != columns_.size()) {
            throw ValidationError("DataTable: names and columns differ in count");
        }
        n_rows_ = columns_.empty() ? 0 : columns_.front().size();
        for (std::size_t j = 0; j < names_.size(); ++j) {
            register_name(names_[j], j);
            check_column(names_[j], columns_[j]);
        }
    }

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    bool has_column(std::string_view name) const {
        return index_.find(std::string(name)) != index_.end();
    }

    std::size_t column_index(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) {
            throw ValidationError("DataTable: no column named '" + std::string(name) + "'");
        }
        return it->second;
    }

    const std::vector<double>& column(std::string_view name) const {
        return columns_[column_index(name)];
    }
    const std::vector<double>& column(std::size_t j) const { return columns_.at(j); }

    std::span<const double> col(std::string_view name) const { return column(name); }

    void add_column(const std::string& name, std::vector<double> values) {
        if (columns_.empty()) n_rows_ = values.size();
        check_column(name, values);
        register_name(name, names_.size());
        names_.push_back(name);
        columns_.push_back(std::move(values));
    }

private:
    void register_name(const std::string& name, std::size_t j) {
        if (name.empty()) throw ValidationError("DataTable: empty column name");
        if (!index_.emplace(name, j).second) {
            throw ValidationError("DataTable: duplicate column name '" + name + "'");
        }
    }

    void check_column(const std::string& name, const std::vector<double>& v) const {
        if (v.size() != n_rows_) {
            throw ValidationError("DataTable: column '" + name + "' has wrong length");
        }
        for (double x : v) {
            if (!std::isfinite(x)) {
                throw ValidationError("DataTable: non-finite value in column '" + name + "'");
            }
        }
    }

    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t n_rows_ = 0;
};

/// Checks that a column holds only 0/1 and returns the treated count.
inline std::size_t count_binary_ones(std::span<const double> col, std::string_view what) {
    std::size_t ones = 0;
    for (double v : col) {
        if (v == 1.0) {
            ++ones;
        } else if (v != 0.0) {
            throw ValidationError(std::string(what) + " column must be binary 0/1");
        }
    }
    return ones;
}

} // namespace confsense
