// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aqua/mac_counter.hpp"

namespace aqua {

// k distinct indices, ascending; every selected |value| >= every unselected.
struct TopKResult {
    std::vector<std::size_t> indices;
    std::size_t k = 0;
};

// Largest-|value| selection with lowest-index tie break. Throws
// ParameterError unless 1 <= k <= v.size().
TopKResult top_k_by_magnitude(std::span<const double> v, std::size_t k,
                              MacCounter* counter = nullptr);

// softmax(s / scale) with max subtraction; output sums to 1. Throws
// ParameterError for an empty vector or a non-positive scale.
std::vector<double> softmax_scaled(std::span<const double> s, double scale);

}  // namespace aqua
