// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aqua/error.hpp"

namespace aqua {

TopKResult top_k_by_magnitude(std::span<const double> v, std::size_t k, MacCounter* counter) {
    if (k < 1 || k > v.size()) {
        throw ParameterError("top_k: k=" + std::to_string(k) + " out of range for length " +
                             std::to_string(v.size()));
    }
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);

    std::uint64_t comparisons = 0;
    // (|value| desc, index asc) is a total order, so the selected set is
    // unique and nth_element is deterministic.
    auto before = [&](std::size_t a, std::size_t b) {
        ++comparisons;
        const double ma = std::abs(v[a]);
        const double mb = std::abs(v[b]);
        if (ma != mb) {
            return ma > mb;
        }
        return a < b;
    };
    if (k < idx.size()) {
        std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k) - 1,
                         idx.end(), before);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    if (counter != nullptr) {
        counter->select_comparisons += comparisons;
    }
    return TopKResult{std::move(idx), k};
}

std::vector<double> softmax_scaled(std::span<const double> s, double scale) {
    if (s.empty()) {
        throw ParameterError("softmax: empty input");
    }
    if (!(scale > 0.0)) {
        throw ParameterError("softmax: scale must be positive");
    }
    double m = s[0];
    for (double x : s) {
        m = std::max(m, x);
    }
    std::vector<double> out(s.size());
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = std::exp((s[i] - m) / scale);
        total += out[i];
    }
    for (double& x : out) {
        x /= total;
    }
    return out;
}

}  // namespace aqua
