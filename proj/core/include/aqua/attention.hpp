// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aqua/mac_counter.hpp"
#include "aqua/matrix.hpp"

namespace aqua {

struct HeadConfig {
    std::size_t d_model = 0;
    std::size_t d_head = 0;
    std::size_t n_q_heads = 1;  // query heads sharing one key/value head
};

// Per-head store of past key and value rows, in original coordinates.
// Single-writer; read-only snapshots are safe to share.
class KVCache {
  public:
    explicit KVCache(std::size_t d_head) : keys_(0, d_head), values_(0, d_head) {}

    std::size_t size() const { return keys_.rows(); }
    std::size_t d_head() const { return keys_.cols(); }

    void append(std::span<const double> key, std::span<const double> value);

    const Matrix& keys() const { return keys_; }
    const Matrix& values() const { return values_; }

  private:
    Matrix keys_;
    Matrix values_;
};

// One decode step: scores over the whole cache, softmax weights, context.
struct AttentionStep {
    std::vector<double> scores;
    std::vector<double> weights;
    std::vector<double> context;
};

// Classic attention for one head: S = q K^T, A = softmax(S / sqrt(d_head)),
// c = A V. The cache must already contain the current token's key/value.
AttentionStep attend_exact(std::span<const double> q, const KVCache& cache,
                           MacCounter* counter = nullptr);

}  // namespace aqua
