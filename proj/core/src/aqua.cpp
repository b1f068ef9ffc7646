// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/aqua.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aqua/error.hpp"

namespace aqua {

void AquaConfig::validate() const {
    if (!(k_ratio > 0.0) || k_ratio > 1.0) {
        throw ParameterError("k_ratio must be in (0, 1]");
    }
    if (s_ratio < 0.0 || !(s_ratio < 1.0)) {
        throw ParameterError("s_ratio must be in [0, 1)");
    }
}

std::size_t AquaConfig::effective_dim(std::size_t d_head) const {
    const auto sliced = static_cast<std::size_t>(
        std::ceil(s_ratio * static_cast<double>(d_head)));
    return d_head - sliced;
}

std::size_t AquaConfig::top_k(std::size_t d_head) const {
    const std::size_t d_eff = effective_dim(d_head);
    if (d_eff == 0) {
        throw ParameterError("s_ratio leaves no effective dimensions for d_head " +
                             std::to_string(d_head));
    }
    const auto rounded = static_cast<std::size_t>(
        std::floor(k_ratio * static_cast<double>(d_eff) + 0.5));
    return std::clamp<std::size_t>(rounded, 1, d_eff);
}

double effective_ratio(const AquaConfig& config) {
    config.validate();
    return (1.0 - config.s_ratio) * config.k_ratio;
}

void ProjectedKVCache::append_key(std::span<const double> key_hat) {
    keys_hat_.append_row(key_hat);
}

void ProjectedKVCache::append_value(std::span<const double> value) {
    values_.append_row(value);
}

void ProjectedKVCache::remove_rows(std::span<const std::size_t> positions) {
    keys_hat_.remove_rows(positions);
    if (values_.rows() > 0) {
        values_.remove_rows(positions);
    }
}

AquaStepResult aqua_step(std::span<const double> q, std::span<const double> k,
                         ProjectedKVCache& cache, const Matrix& projection,
                         const AquaConfig& config, MacCounter* counter) {
    config.validate();
    const std::size_t d = projection.rows();
    if (projection.cols() != d) {
        throw ShapeError("projection must be square");
    }
    if (q.size() != d || k.size() != d) {
        throw ShapeError("aqua step: q/k length " + std::to_string(q.size()) + "/" +
                         std::to_string(k.size()) + " != d_head " + std::to_string(d));
    }
    const std::size_t d_eff = config.effective_dim(d);
    if (d_eff == 0) {
        throw ParameterError("s_ratio leaves no effective dimensions");
    }
    if (cache.d_eff() != d_eff) {
        throw ShapeError("cache width " + std::to_string(cache.d_eff()) +
                         " != effective dim " + std::to_string(d_eff));
    }

    std::vector<double> q_hat = vecmat(q, projection);
    std::vector<double> k_hat = vecmat(k, projection);
    if (counter != nullptr) {
        counter->projection_macs += 2 * static_cast<std::uint64_t>(d) * d;
    }
    q_hat.resize(d_eff);  // static slice drops the trailing coordinates
    k_hat.resize(d_eff);
    cache.append_key(k_hat);

    const std::size_t k_dims = config.top_k(d);
    AquaStepResult result;
    if (config.selection == SelectionMode::Magnitude) {
        result.selected = top_k_by_magnitude(q_hat, k_dims, counter).indices;
    } else {
        result.selected.resize(k_dims);
        std::iota(result.selected.begin(), result.selected.end(), 0);
    }

    const Matrix& keys = cache.keys_hat();
    result.scores.resize(keys.rows());
    for (std::size_t row = 0; row < keys.rows(); ++row) {
        const auto key_row = keys.row(row);
        double acc = 0.0;
        for (std::size_t j : result.selected) {
            acc += q_hat[j] * key_row[j];
        }
        result.scores[row] = acc;
    }
    if (counter != nullptr) {
        counter->score_macs += static_cast<std::uint64_t>(keys.rows()) * k_dims;
        counter->slice_moves += static_cast<std::uint64_t>(keys.rows()) * k_dims;
    }
    return result;
}

std::vector<double> aqua_weights(std::span<const double> scores, const AquaConfig& config,
                                 std::size_t d_head) {
    config.validate();
    const double scale = (config.scale_mode == ScaleMode::SqrtDHead)
                             ? std::sqrt(static_cast<double>(d_head))
                             : std::sqrt(static_cast<double>(config.top_k(d_head)));
    return softmax_scaled(scores, scale);
}

std::vector<double> full_coordinate_scores(std::span<const double> q_hat_eff,
                                           const ProjectedKVCache& cache) {
    if (q_hat_eff.size() != cache.d_eff()) {
        throw ShapeError("full_coordinate_scores: query width mismatch");
    }
    std::vector<double> scores(cache.size());
    for (std::size_t row = 0; row < cache.size(); ++row) {
        scores[row] = dot(q_hat_eff, cache.keys_hat().row(row));
    }
    return scores;
}

}  // namespace aqua
