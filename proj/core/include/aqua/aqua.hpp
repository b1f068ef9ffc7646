// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aqua/mac_counter.hpp"
#include "aqua/matrix.hpp"
#include "aqua/numeric.hpp"

namespace aqua {

enum class ScaleMode { SqrtDHead, SqrtK };
enum class SelectionMode { Magnitude, FirstKSlice };

// Knobs of the approximate decode step. k_ratio drives the dynamic
// dimension selection; s_ratio > 0 additionally drops the trailing
// projected coordinates before keys are cached (the memory variant).
struct AquaConfig {
    double k_ratio = 1.0;   // (0, 1]
    double s_ratio = 0.0;   // [0, 1)
    ScaleMode scale_mode = ScaleMode::SqrtDHead;
    SelectionMode selection = SelectionMode::Magnitude;

    void validate() const;

    // dimensions surviving the static slice: d_head - ceil(s_ratio * d_head)
    std::size_t effective_dim(std::size_t d_head) const;

    // clamp(round-half-up(k_ratio * effective_dim), 1, effective_dim)
    std::size_t top_k(std::size_t d_head) const;
};

// net fraction of original dimensions used: (1 - s_ratio) * k_ratio
double effective_ratio(const AquaConfig& config);

// Key rows live in projected (and possibly sliced) coordinates; value rows
// stay in original coordinates and are never projected.
class ProjectedKVCache {
  public:
    ProjectedKVCache(std::size_t d_head, std::size_t d_eff)
        : keys_hat_(0, d_eff), values_(0, d_head) {}

    std::size_t size() const { return keys_hat_.rows(); }
    std::size_t d_eff() const { return keys_hat_.cols(); }
    std::size_t d_head() const { return values_.cols(); }

    void append_key(std::span<const double> key_hat);
    void append_value(std::span<const double> value);
    void remove_rows(std::span<const std::size_t> positions);

    const Matrix& keys_hat() const { return keys_hat_; }
    const Matrix& values() const { return values_; }

  private:
    Matrix keys_hat_;
    Matrix values_;
};

struct AquaStepResult {
    std::vector<double> scores;          // one per cached key, current last
    std::vector<std::size_t> selected;   // retained coordinate indices, ascending
};

// One approximate decode step: project q and k through `projection`, slice
// to the effective dimensions, cache the key, pick the top-k coordinates
// of the projected query, and score every cached key on that subset. The
// caller appends the value row separately if it needs context vectors.
AquaStepResult aqua_step(std::span<const double> q, std::span<const double> k,
                         ProjectedKVCache& cache, const Matrix& projection,
                         const AquaConfig& config, MacCounter* counter = nullptr);

// Softmax over approximate scores; the scale is sqrt(d_head) or sqrt(k)
// depending on config.scale_mode.
std::vector<double> aqua_weights(std::span<const double> scores, const AquaConfig& config,
                                 std::size_t d_head);

// Scores recomputed over all effective coordinates of the projected query
// (no top-k); exact when s_ratio == 0 by rotational invariance.
std::vector<double> full_coordinate_scores(std::span<const double> q_hat_eff,
                                           const ProjectedKVCache& cache);

}  // namespace aqua
