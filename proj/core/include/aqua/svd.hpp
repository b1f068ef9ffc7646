// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "aqua/matrix.hpp"

namespace aqua {

// A = U * diag(sigma) * V^T with sigma non-increasing.
//
// u is m x n thin (columns for vanished singular values are zero rows of
// noise-free zeros, so the reconstruction identity still holds exactly);
// v is n x n orthogonal. Sign convention: in each column of v the entry of
// largest magnitude (lowest index on ties) is non-negative.
struct SvdResult {
    Matrix u;
    std::vector<double> sigma;
    Matrix v;
};

struct SvdOptions {
    double threshold = 1e-14;  // relative off-diagonal tolerance
    int max_sweeps = 60;
};

// One-sided (Hestenes) Jacobi with cyclic sweeps. Deterministic for
// identical input bytes. Throws NumericError if the sweep limit is hit,
// ParameterError for empty or non-finite input.
SvdResult svd(const Matrix& a, const SvdOptions& options = {});

}  // namespace aqua
