// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "aqua/mac_counter.hpp"

namespace aqua {

// Break-even condition for the approximate path: it wins once the
// sequence length i+1 strictly exceeds d_head^2 / (d_head - k). first_win
// is empty when k == d_head (the advantage never materializes).
struct BreakEven {
    double boundary = 0.0;
    std::optional<std::uint64_t> first_win;
};

// Throws ParameterError unless 1 <= k <= d_head.
BreakEven analytic_break_even(std::size_t d_head, std::size_t k);

// Exact MAC totals for an n_steps decode: per step t (1-based) the
// standard path scores cost t*d and the approximate path pays 2*d^2 for
// the two vector projections plus t*k for the scores.
struct CostReport {
    std::size_t d_head = 0;
    std::size_t k = 0;
    std::size_t n_steps = 0;
    std::uint64_t macs_std = 0;
    std::uint64_t macs_aqua_fixed = 0;
    std::uint64_t macs_aqua_variable = 0;
    BreakEven analytic;
    // smallest t where the approximate step is cheaper: t*(d-k) > 2*d^2
    std::optional<std::uint64_t> counted_step_threshold;
    // smallest t where the running totals cross
    std::optional<std::uint64_t> counted_cumulative_threshold;
};

CostReport count_decode(std::size_t d_head, std::size_t k, std::size_t n_steps);

// Analytic MAC estimate for an m x n SVD via the cheaper of the two gram
// routes: n^2 m + n^3 against m^2 n + m^3.
struct SvdCost {
    std::uint64_t via_gram_cols = 0;  // n^2 m + n^3
    std::uint64_t via_gram_rows = 0;  // m^2 n + m^3
    int chosen_path = 1;              // 1 = columns (n x n gram), 2 = rows
    std::uint64_t macs = 0;
};

SvdCost svd_cost(std::size_t m, std::size_t n);

}  // namespace aqua
