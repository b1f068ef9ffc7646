// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aqua {

// Dense row-major matrix of doubles; the universal numeric carrier.
class Matrix {
  public:
    Matrix() = default;

    // zero-filled
    Matrix(std::size_t rows, std::size_t cols);

    // takes ownership of `data`; throws ShapeError on length mismatch and
    // ParameterError if any entry is NaN/Inf
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    // grows by one row; throws ShapeError if the span length is not cols()
    void append_row(std::span<const double> values);

    // drops the given rows; positions must be sorted ascending and unique
    void remove_rows(std::span<const std::size_t> positions);

    bool operator==(const Matrix& other) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Plain triple-loop product with IEEE double accumulation in k order.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

// row-vector times matrix: returns v * m (length m.cols())
std::vector<double> vecmat(std::span<const double> v, const Matrix& m);

double dot(std::span<const double> a, std::span<const double> b);

// largest |entry|
double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace aqua
