// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/attention.hpp"

#include <cmath>
#include <string>

#include "aqua/error.hpp"
#include "aqua/numeric.hpp"

namespace aqua {

void KVCache::append(std::span<const double> key, std::span<const double> value) {
    if (key.size() != d_head() || value.size() != d_head()) {
        throw ShapeError("cache append: expected d_head=" + std::to_string(d_head()));
    }
    keys_.append_row(key);
    values_.append_row(value);
}

AttentionStep attend_exact(std::span<const double> q, const KVCache& cache,
                           MacCounter* counter) {
    const std::size_t d = cache.d_head();
    if (q.size() != d) {
        throw ShapeError("attend: query length " + std::to_string(q.size()) +
                         " != d_head " + std::to_string(d));
    }
    if (cache.size() == 0) {
        throw ShapeError("attend: cache is empty");
    }

    AttentionStep step;
    step.scores.resize(cache.size());
    for (std::size_t i = 0; i < cache.size(); ++i) {
        step.scores[i] = dot(q, cache.keys().row(i));
    }
    if (counter != nullptr) {
        counter->score_macs += static_cast<std::uint64_t>(cache.size()) * d;
    }

    step.weights = softmax_scaled(step.scores, std::sqrt(static_cast<double>(d)));

    step.context.assign(d, 0.0);
    for (std::size_t i = 0; i < cache.size(); ++i) {
        const auto value = cache.values().row(i);
        const double w = step.weights[i];
        for (std::size_t j = 0; j < d; ++j) {
            step.context[j] += w * value[j];
        }
    }
    return step;
}

}  // namespace aqua
