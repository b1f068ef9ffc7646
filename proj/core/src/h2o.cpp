// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/h2o.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aqua/error.hpp"

namespace aqua {

void H2OConfig::validate() const {
    if (!(h2o_ratio > 0.0) || h2o_ratio > 1.0) {
        throw ParameterError("h2o_ratio must be in (0, 1]");
    }
    if (recent_fraction < 0.0 || recent_fraction > 1.0) {
        throw ParameterError("recent_fraction must be in [0, 1]");
    }
}

H2OState::H2OState(const H2OConfig& config) : config_(config) { config_.validate(); }

void H2OState::update(std::span<const double> weights) {
    if (weights.size() != live_ids_.size() + 1) {
        throw ShapeError("h2o update: " + std::to_string(weights.size()) +
                         " weights for " + std::to_string(live_ids_.size()) + " live tokens");
    }
    for (std::size_t i = 0; i < live_ids_.size(); ++i) {
        accumulated_[i] += weights[i];
    }
    live_ids_.push_back(next_id_++);
    accumulated_.push_back(weights.back());
}

EvictionResult H2OState::evict(std::uint64_t current_length) {
    const auto budget = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(
               std::ceil(config_.h2o_ratio * static_cast<double>(current_length))));

    EvictionResult result;
    if (live_ids_.size() <= budget) {
        return result;
    }

    const auto protected_count = std::min<std::uint64_t>(
        static_cast<std::uint64_t>(
            std::ceil(config_.recent_fraction * static_cast<double>(budget))),
        budget);
    const std::size_t first_protected = live_ids_.size() - protected_count;
    const std::size_t heavy_slots = static_cast<std::size_t>(budget - protected_count);

    // rank the unprotected positions by accumulated mass, newer wins ties
    std::vector<std::size_t> order(first_protected);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
        if (accumulated_[a] != accumulated_[b]) {
            return accumulated_[a] > accumulated_[b];
        }
        return live_ids_[a] > live_ids_[b];
    });

    std::vector<bool> keep(live_ids_.size(), false);
    for (std::size_t i = first_protected; i < live_ids_.size(); ++i) {
        keep[i] = true;
    }
    for (std::size_t i = 0; i < heavy_slots && i < order.size(); ++i) {
        keep[order[i]] = true;
    }

    std::vector<std::uint64_t> kept_ids;
    std::vector<double> kept_acc;
    for (std::size_t i = 0; i < live_ids_.size(); ++i) {
        if (keep[i]) {
            kept_ids.push_back(live_ids_[i]);
            kept_acc.push_back(accumulated_[i]);
        } else {
            result.ids.push_back(live_ids_[i]);
            result.positions.push_back(i);
        }
    }
    live_ids_ = std::move(kept_ids);
    accumulated_ = std::move(kept_acc);
    return result;
}

HybridStepResult aqua_h2o_step(std::span<const double> q, std::span<const double> k,
                               std::span<const double> v, ProjectedKVCache& cache,
                               const Matrix& projection, const AquaConfig& aqua_config,
                               H2OState& state, MacCounter* counter) {
    if (cache.size() != state.live_ids().size()) {
        throw ShapeError("hybrid step: cache rows != live tokens");
    }
    if (v.size() != cache.d_head()) {
        throw ShapeError("hybrid step: value length != d_head");
    }

    HybridStepResult result;
    AquaStepResult step = aqua_step(q, k, cache, projection, aqua_config, counter);
    cache.append_value(v);
    result.scores = std::move(step.scores);
    result.selected = std::move(step.selected);
    result.weights = aqua_weights(result.scores, aqua_config, cache.d_head());

    if (state.config().exact_accumulation) {
        std::vector<double> q_hat = vecmat(q, projection);
        q_hat.resize(cache.d_eff());
        const std::vector<double> full = full_coordinate_scores(q_hat, cache);
        state.update(aqua_weights(full, aqua_config, cache.d_head()));
    } else {
        state.update(result.weights);
    }

    EvictionResult evicted = state.evict(state.tokens_seen());
    if (!evicted.positions.empty()) {
        cache.remove_rows(evicted.positions);
    }

    // context over survivors, with their weight mass renormalized
    std::vector<double> surviving_weights;
    surviving_weights.reserve(cache.size());
    {
        std::size_t next_evicted = 0;
        for (std::size_t i = 0; i < result.weights.size(); ++i) {
            if (next_evicted < evicted.positions.size() &&
                evicted.positions[next_evicted] == i) {
                ++next_evicted;
                continue;
            }
            surviving_weights.push_back(result.weights[i]);
        }
    }
    double mass = 0.0;
    for (double w : surviving_weights) {
        mass += w;
    }
    result.context.assign(cache.d_head(), 0.0);
    for (std::size_t row = 0; row < cache.size(); ++row) {
        const auto value = cache.values().row(row);
        const double w = surviving_weights[row] / mass;
        for (std::size_t j = 0; j < value.size(); ++j) {
            result.context[j] += w * value[j];
        }
    }
    result.evicted = std::move(evicted.ids);
    return result;
}

}  // namespace aqua
