#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kge/errors.hpp"

namespace kge {

/// Dense row-major matrix of doubles. Rows are handed out as spans; all
/// embedding code works row-wise.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    std::span<double> row(std::size_t i) {
        if (i >= rows_) throw IndexError("row " + std::to_string(i) + " out of range");
        return {data_.data() + i * cols_, cols_};
    }
    std::span<const double> row(std::size_t i) const {
        if (i >= rows_) throw IndexError("row " + std::to_string(i) + " out of range");
        return {data_.data() + i * cols_, cols_};
    }

    double& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace kge
