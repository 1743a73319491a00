#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fwlog {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_{rows}, cols_{cols}, data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    /// Appends a row; the first row fixes the column count of an empty matrix.
    void push_row(std::span<const double> values);

    std::span<const double> values() const noexcept { return data_; }
    std::span<double> values() noexcept { return data_; }

    /// Rows picked by index, in the given order (duplicates allowed).
    Matrix select_rows(std::span<const std::size_t> indices) const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace fwlog
