// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/costmodel.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "aqua/error.hpp"

namespace aqua {

BreakEven analytic_break_even(std::size_t d_head, std::size_t k) {
    if (d_head < 1 || k < 1 || k > d_head) {
        throw ParameterError("break_even: need 1 <= k <= d_head, got k=" + std::to_string(k) +
                             " d_head=" + std::to_string(d_head));
    }
    const std::uint64_t d = d_head;
    BreakEven result;
    if (k == d_head) {
        result.boundary = std::numeric_limits<double>::infinity();
        return result;
    }
    const std::uint64_t saving = d - k;
    result.boundary = static_cast<double>(d * d) / static_cast<double>(saving);
    // smallest integer strictly above the boundary; integer division
    // floors, so +1 covers both the fractional and the exact case
    result.first_win = (d * d) / saving + 1;
    return result;
}

CostReport count_decode(std::size_t d_head, std::size_t k, std::size_t n_steps) {
    if (n_steps < 1) {
        throw ParameterError("count_decode: n_steps must be >= 1");
    }
    CostReport report;
    report.d_head = d_head;
    report.k = k;
    report.n_steps = n_steps;
    report.analytic = analytic_break_even(d_head, k);

    const std::uint64_t d = d_head;
    const std::uint64_t fixed_per_step = 2 * d * d;
    std::uint64_t cum_std = 0;
    std::uint64_t cum_aqua = 0;

    // Sweep far enough to locate both crossovers even when the request is
    // shorter; for k < d the per-step gap grows by d - k every step, so
    // they are guaranteed to appear within the horizon below.
    std::uint64_t horizon = n_steps;
    if (k < d) {
        horizon = std::max<std::uint64_t>(horizon, 4 * d * d / (d - k) + 2);
    }
    for (std::uint64_t t = 1; t <= horizon; ++t) {
        const std::uint64_t step_std = t * d;
        const std::uint64_t step_aqua = fixed_per_step + t * k;
        cum_std += step_std;
        cum_aqua += step_aqua;
        if (t <= n_steps) {
            report.macs_std += step_std;
            report.macs_aqua_fixed += fixed_per_step;
            report.macs_aqua_variable += t * k;
        }
        if (!report.counted_step_threshold && step_aqua < step_std) {
            report.counted_step_threshold = t;
        }
        if (!report.counted_cumulative_threshold && cum_aqua < cum_std) {
            report.counted_cumulative_threshold = t;
        }
        if (report.counted_step_threshold && report.counted_cumulative_threshold &&
            t >= n_steps) {
            break;
        }
    }
    return report;
}

SvdCost svd_cost(std::size_t m, std::size_t n) {
    if (m < 1 || n < 1) {
        throw ParameterError("svd_cost: dimensions must be >= 1");
    }
    const std::uint64_t mm = m;
    const std::uint64_t nn = n;
    SvdCost cost;
    cost.via_gram_cols = nn * nn * mm + nn * nn * nn;
    cost.via_gram_rows = mm * mm * nn + mm * mm * mm;
    if (cost.via_gram_cols <= cost.via_gram_rows) {
        cost.chosen_path = 1;
        cost.macs = cost.via_gram_cols;
    } else {
        cost.chosen_path = 2;
        cost.macs = cost.via_gram_rows;
    }
    return cost;
}

}  // namespace aqua
