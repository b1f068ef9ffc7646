// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aqua/error.hpp"

namespace aqua {

namespace {

// Column-major workspace so the hot loops stride by 1.
struct ColumnStore {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // column-major

    double* col(std::size_t j) { return data.data() + j * rows; }
    const double* col(std::size_t j) const { return data.data() + j * rows; }
};

double col_dot(const ColumnStore& m, std::size_t p, std::size_t q) {
    const double* a = m.col(p);
    const double* b = m.col(q);
    double acc = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

void rotate_cols(ColumnStore& m, std::size_t p, std::size_t q, double c, double s) {
    double* a = m.col(p);
    double* b = m.col(q);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double ai = a[i];
        const double bi = b[i];
        a[i] = c * ai - s * bi;
        b[i] = s * ai + c * bi;
    }
}

}  // namespace

SvdResult svd(const Matrix& a, const SvdOptions& options) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m == 0 || n == 0) {
        throw ParameterError("svd: matrix must have at least one row and one column");
    }
    for (double x : a.data()) {
        if (!std::isfinite(x)) {
            throw ParameterError("svd: entries must be finite");
        }
    }

    // Pad with zero rows when m < n so the column space is full height; the
    // padding changes neither A^T A nor the accumulated rotations.
    const std::size_t work_rows = std::max(m, n);
    ColumnStore w{work_rows, n, std::vector<double>(work_rows * n, 0.0)};
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            w.col(j)[i] = a(i, j);
        }
    }
    ColumnStore v{n, n, std::vector<double>(n * n, 0.0)};
    for (std::size_t j = 0; j < n; ++j) {
        v.col(j)[j] = 1.0;
    }

    // Columns this far below the matrix scale belong to the numerical null
    // space; excluding them keeps rank-deficient input from cycling. The
    // squared Frobenius norm is rotation-invariant, so the floor is fixed.
    double total_sq = 0.0;
    for (double x : w.data) {
        total_sq += x * x;
    }
    const double negligible = 1e-30 * total_sq;

    int sweep = 0;
    bool converged = (n == 1);
    while (!converged && sweep < options.max_sweeps) {
        ++sweep;
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = col_dot(w, p, q);
                const double app = col_dot(w, p, p);
                const double aqq = col_dot(w, q, q);
                if (app <= negligible || aqq <= negligible) {
                    continue;
                }
                if (std::abs(apq) <= options.threshold * std::sqrt(app * aqq)) {
                    continue;
                }
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                rotate_cols(w, p, q, c, s);
                rotate_cols(v, p, q, c, s);
                rotated = true;
            }
        }
        converged = !rotated;
    }
    if (!converged) {
        throw NumericError("svd: no convergence after " + std::to_string(sweep) + " sweeps");
    }

    std::vector<double> sigma(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        sigma[j] = std::sqrt(col_dot(w, j, j));
    }

    // Sort by sigma descending, original column order on ties.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&sigma](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    SvdResult out;
    out.sigma.resize(n);
    out.u = Matrix(m, n);
    out.v = Matrix(n, n);
    for (std::size_t jj = 0; jj < n; ++jj) {
        const std::size_t src = order[jj];
        out.sigma[jj] = sigma[src];

        // Sign convention: the dominant entry of each V column is non-negative.
        std::size_t pivot = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double mag = std::abs(v.col(src)[i]);
            if (mag > best) {
                best = mag;
                pivot = i;
            }
        }
        const double flip = (v.col(src)[pivot] < 0.0) ? -1.0 : 1.0;

        for (std::size_t i = 0; i < n; ++i) {
            out.v(i, jj) = flip * v.col(src)[i];
        }
        if (sigma[src] > 0.0) {
            const double inv = flip / sigma[src];
            for (std::size_t i = 0; i < m; ++i) {
                out.u(i, jj) = w.col(src)[i] * inv;
            }
        }
    }
    return out;
}

}  // namespace aqua
