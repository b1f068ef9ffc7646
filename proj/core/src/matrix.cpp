// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aqua/error.hpp"

namespace aqua {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("matrix data length " + std::to_string(data_.size()) + " != " +
                         std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    for (double x : data_) {
        if (!std::isfinite(x)) {
            throw ParameterError("matrix entries must be finite");
        }
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

void Matrix::append_row(std::span<const double> values) {
    if (values.size() != cols_) {
        throw ShapeError("row length " + std::to_string(values.size()) + " != cols " +
                         std::to_string(cols_));
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

void Matrix::remove_rows(std::span<const std::size_t> positions) {
    if (positions.empty()) {
        return;
    }
    std::size_t write = 0;
    std::size_t next = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
        if (next < positions.size() && positions[next] == r) {
            ++next;
            continue;
        }
        if (write != r) {
            std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_), cols_,
                        data_.begin() + static_cast<std::ptrdiff_t>(write * cols_));
        }
        ++write;
    }
    if (next != positions.size()) {
        throw ParameterError("remove_rows: positions out of range or unsorted");
    }
    rows_ = write;
    data_.resize(rows_ * cols_);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " * " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc += a(i, k) * b(k, j);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(j, i) = a(i, j);
        }
    }
    return out;
}

std::vector<double> vecmat(std::span<const double> v, const Matrix& m) {
    if (v.size() != m.rows()) {
        throw ShapeError("vecmat length " + std::to_string(v.size()) + " != rows " +
                         std::to_string(m.rows()));
    }
    std::vector<double> out(m.cols(), 0.0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) {
            acc += v[k] * m(k, j);
        }
        out[j] = acc;
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ShapeError("dot length mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double x : a.data()) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("max_abs_diff shape mismatch");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    }
    return m;
}

}  // namespace aqua
