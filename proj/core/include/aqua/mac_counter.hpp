// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace aqua {

// Exact operation counts, incremented at the site that performs the work.
// Multiply-accumulates are the unit of the cost model; selection
// comparisons and element moves are tracked separately and never enter
// the break-even comparison.
struct MacCounter {
    std::uint64_t projection_macs = 0;  // q/k rotations into the calibrated basis
    std::uint64_t score_macs = 0;       // query-key dot products
    std::uint64_t select_comparisons = 0;
    std::uint64_t slice_moves = 0;

    std::uint64_t total_macs() const { return projection_macs + score_macs; }
};

}  // namespace aqua
