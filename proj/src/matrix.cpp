#include "fwlog/matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace fwlog {

void Matrix::push_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) {
        cols_ = values.size();
    } else if (values.size() != cols_) {
        throw std::invalid_argument("Matrix::push_row: column count mismatch");
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto src = row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace fwlog
