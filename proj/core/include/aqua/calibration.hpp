// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "aqua/matrix.hpp"
#include "aqua/synth.hpp"

namespace aqua {

// Stacked activation matrix for one (layer, group): one M-row block per
// query head, then one M-row block for the shared key head.
struct CalibrationMatrix {
    std::uint32_t layer = 0;
    std::uint32_t group = 0;
    std::size_t m_per_source = 0;
    Matrix data;  // ((n_q_heads + 1) * m_per_source) x d_head
};

// Downsamples each source to exactly m_per_source rows by seeded reservoir
// sampling; value records are ignored. Throws CapacityError naming the
// first source that comes up short.
CalibrationMatrix build_calibration_matrix(std::span<const ActivationRecord> records,
                                           std::uint32_t layer, std::uint32_t group,
                                           std::size_t m_per_source, std::uint64_t sample_seed,
                                           std::size_t n_q_heads);

struct CalibrationResult {
    Matrix projection;          // right singular vectors, d x d
    std::vector<double> sigma;  // non-increasing
    bool rank_deficient = false;
};

// Global SVD of the stacked matrix; the projection inherits the SVD sign
// convention, so calibration output is byte-reproducible.
CalibrationResult calibrate(const CalibrationMatrix& matrix);

struct BundleEntry {
    Matrix projection;
    std::vector<double> sigma;
    std::uint32_t m_per_source = 0;
    std::uint64_t source_fingerprint = 0;

    bool operator==(const BundleEntry&) const = default;
};

using LayerGroup = std::pair<std::uint32_t, std::uint32_t>;

// Per-(layer, group) projections plus provenance; the map keeps entries in
// deterministic (layer, group) order however they were produced.
struct ProjectionBundle {
    std::uint32_t d_head = 0;
    std::map<LayerGroup, BundleEntry> entries;

    bool operator==(const ProjectionBundle&) const = default;
};

// --- bundle files -----------------------------------------------------------
//
// Layout: magic "AQPB", u32 version=1, u32 d_head, u32 n_entries; per
// entry: u32 layer, u32 group, u32 m_per_source, u64 source_fingerprint,
// d_head f64 sigma, d_head^2 f64 projection row-major. All little-endian.

void save_bundle(const ProjectionBundle& bundle, const std::filesystem::path& path);

// Verifies magic/version/dims, projection orthogonality (max deviation
// from identity <= 1e-10) and sigma ordering; violations raise
// IntegrityError, malformed files FormatError/TruncationError.
ProjectionBundle load_bundle(const std::filesystem::path& path);

// largest |(P^T P - I)| entry; the orthogonality score used everywhere
double orthogonality_defect(const Matrix& p);

}  // namespace aqua
