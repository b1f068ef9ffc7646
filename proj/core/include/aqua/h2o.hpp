// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aqua/aqua.hpp"
#include "aqua/mac_counter.hpp"

namespace aqua {

struct H2OConfig {
    double h2o_ratio = 1.0;        // live budget as a fraction of tokens seen, (0, 1]
    double recent_fraction = 0.5;  // share of the budget reserved for newest tokens, [0, 1]
    // accumulate weights recomputed over all effective coordinates instead
    // of the top-k approximate ones (selection/output weights unchanged)
    bool exact_accumulation = false;

    void validate() const;
};

struct EvictionResult {
    std::vector<std::uint64_t> ids;        // evicted token ids
    std::vector<std::size_t> positions;    // their former live positions, ascending
};

// Heavy-hitter bookkeeping for one sequence: per-live-token accumulated
// attention mass plus the eviction policy. Single-writer.
class H2OState {
  public:
    explicit H2OState(const H2OConfig& config);

    const H2OConfig& config() const { return config_; }
    std::span<const std::uint64_t> live_ids() const { return live_ids_; }
    std::span<const double> accumulated() const { return accumulated_; }
    std::uint64_t tokens_seen() const { return next_id_; }

    // Adds one step's weights: entry i goes to live token i, the last
    // entry belongs to the just-arrived token, which becomes live.
    void update(std::span<const double> weights);

    // Enforces budget max(1, ceil(h2o_ratio * current_length)): the newest
    // ceil(recent_fraction * budget) live tokens are protected, remaining
    // slots keep the largest accumulators (newer token wins ties). Evicted
    // tokens are gone for good.
    EvictionResult evict(std::uint64_t current_length);

  private:
    H2OConfig config_;
    std::vector<std::uint64_t> live_ids_;  // ascending
    std::vector<double> accumulated_;      // aligned with live_ids_
    std::uint64_t next_id_ = 0;
};

struct HybridStepResult {
    std::vector<double> scores;           // approximate, over pre-step live set + current
    std::vector<double> weights;          // softmax of scores (same alignment)
    std::vector<double> context;          // from surviving values, weights renormalized
    std::vector<std::size_t> selected;    // coordinates used for the scores
    std::vector<std::uint64_t> evicted;   // token ids dropped this step
};

// Approximate scores feed the heavy-hitter accumulators, eviction trims
// cache and state together, and the context uses the survivors only.
HybridStepResult aqua_h2o_step(std::span<const double> q, std::span<const double> k,
                               std::span<const double> v, ProjectedKVCache& cache,
                               const Matrix& projection, const AquaConfig& aqua_config,
                               H2OState& state, MacCounter* counter = nullptr);

}  // namespace aqua
