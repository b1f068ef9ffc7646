// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aqua/aqua.hpp"
#include "aqua/calibration.hpp"
#include "aqua/matrix.hpp"
#include "aqua/synth.hpp"

namespace aqua {

// Normalized gap between a vector's norm and the norm of its retained
// projected components: | ||v|| - ||vP[I]|| | / ||v||. Zero vectors map
// to 0 by convention. Bounded by [0, 1] for orthogonal projections.
double info_loss(std::span<const double> v, const Matrix& projection,
                 std::span<const std::size_t> retained);

// Index set for a selection mode over an already-projected vector.
std::vector<std::size_t> select_indices(std::span<const double> v_hat, SelectionMode mode,
                                        std::size_t k);

struct OverlapSample {
    double rho = 0.0;              // |top-K magnitude  /\  first K' indices| / K
    std::size_t top_k_magnitude = 0;   // K
    std::size_t top_k_pca = 0;         // K'
};

// Intersection proportion between the K largest-|v| coordinates and the
// first K' coordinates of the variance-ordered basis.
OverlapSample overlap_rho(std::span<const double> v, std::size_t top_k_magnitude,
                          std::size_t top_k_pca);

struct DistributionRow {
    std::string stream;        // "calib" or "eval" (caller-provided labels)
    std::size_t k = 0;
    SelectionMode mode = SelectionMode::Magnitude;
    std::string source;        // "q0", "q1", ..., or "key"
    double mean_loss = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

// Mean information loss per (stream, k, mode, source kind), pooled over
// all bundle entries. Query/key records only; both streams must match the
// bundle's d_head. Deterministic aggregation order.
std::vector<DistributionRow> compare_distributions(
    const ProjectionBundle& bundle, std::span<const ActivationRecord> stream_a,
    std::span<const ActivationRecord> stream_b, std::span<const std::size_t> ks,
    std::span<const SelectionMode> modes, const std::string& label_a = "calib",
    const std::string& label_b = "eval");

const char* selection_mode_name(SelectionMode mode);

}  // namespace aqua
