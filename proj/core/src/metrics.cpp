// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "aqua/error.hpp"
#include "aqua/numeric.hpp"

namespace aqua {

namespace {

double norm2(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) {
        acc += x * x;
    }
    return std::sqrt(acc);
}

}  // namespace

double info_loss(std::span<const double> v, const Matrix& projection,
                 std::span<const std::size_t> retained) {
    if (retained.empty()) {
        throw ParameterError("info_loss: retained index set must be non-empty");
    }
    const std::vector<double> v_hat = vecmat(v, projection);
    for (std::size_t j : retained) {
        if (j >= v_hat.size()) {
            throw ParameterError("info_loss: retained index out of range");
        }
    }
    const double full = norm2(v);
    if (full == 0.0) {
        return 0.0;
    }
    double kept_sq = 0.0;
    for (std::size_t j : retained) {
        kept_sq += v_hat[j] * v_hat[j];
    }
    return std::abs(full - std::sqrt(kept_sq)) / full;
}

std::vector<std::size_t> select_indices(std::span<const double> v_hat, SelectionMode mode,
                                        std::size_t k) {
    if (mode == SelectionMode::Magnitude) {
        return top_k_by_magnitude(v_hat, k).indices;
    }
    if (k < 1 || k > v_hat.size()) {
        throw ParameterError("select_indices: k out of range");
    }
    std::vector<std::size_t> indices(k);
    std::iota(indices.begin(), indices.end(), 0);
    return indices;
}

OverlapSample overlap_rho(std::span<const double> v, std::size_t top_k_magnitude,
                          std::size_t top_k_pca) {
    if (top_k_pca < 1 || top_k_pca > v.size()) {
        throw ParameterError("overlap_rho: K' out of range");
    }
    const TopKResult mag = top_k_by_magnitude(v, top_k_magnitude);
    std::size_t hits = 0;
    for (std::size_t j : mag.indices) {
        if (j < top_k_pca) {
            ++hits;
        }
    }
    return OverlapSample{static_cast<double>(hits) / static_cast<double>(top_k_magnitude),
                         top_k_magnitude, top_k_pca};
}

const char* selection_mode_name(SelectionMode mode) {
    return mode == SelectionMode::Magnitude ? "magnitude" : "slice";
}

namespace {

struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
    double std_error() const {
        if (n < 2) {
            return 0.0;
        }
        const double m = mean();
        const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) /
                                             static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

std::string source_name(const ActivationRecord& rec) {
    if (rec.kind == ActivationKind::Key) {
        return "key";
    }
    return "q" + std::to_string(rec.head);
}

void accumulate_stream(const ProjectionBundle& bundle,
                       std::span<const ActivationRecord> stream, const std::string& label,
                       std::span<const std::size_t> ks, std::span<const SelectionMode> modes,
                       std::map<std::tuple<std::string, std::size_t, int, std::string>,
                                Accumulator>& cells) {
    bool any = false;
    for (const ActivationRecord& rec : stream) {
        if (rec.kind == ActivationKind::Value) {
            continue;
        }
        const auto it = bundle.entries.find({rec.layer, rec.group});
        if (it == bundle.entries.end()) {
            continue;
        }
        if (rec.data.size() != bundle.d_head) {
            throw ShapeError("stream record width != bundle d_head");
        }
        any = true;
        const Matrix& p = it->second.projection;
        const std::vector<double> v_hat = vecmat(rec.data, p);
        const double full = norm2(rec.data);
        const std::string source = source_name(rec);

        for (SelectionMode mode : modes) {
            for (std::size_t k : ks) {
                const std::vector<std::size_t> retained = select_indices(v_hat, mode, k);
                double kept_sq = 0.0;
                for (std::size_t j : retained) {
                    kept_sq += v_hat[j] * v_hat[j];
                }
                const double loss =
                    full == 0.0 ? 0.0 : std::abs(full - std::sqrt(kept_sq)) / full;
                cells[{label, k, static_cast<int>(mode), source}].add(loss);
            }
        }
    }
    if (!any) {
        throw CapacityError("stream '" + label + "' has no usable records for this bundle");
    }
}

}  // namespace

std::vector<DistributionRow> compare_distributions(
    const ProjectionBundle& bundle, std::span<const ActivationRecord> stream_a,
    std::span<const ActivationRecord> stream_b, std::span<const std::size_t> ks,
    std::span<const SelectionMode> modes, const std::string& label_a,
    const std::string& label_b) {
    for (std::size_t k : ks) {
        if (k < 1 || k > bundle.d_head) {
            throw ParameterError("compare_distributions: k out of range");
        }
    }
    std::map<std::tuple<std::string, std::size_t, int, std::string>, Accumulator> cells;
    accumulate_stream(bundle, stream_a, label_a, ks, modes, cells);
    accumulate_stream(bundle, stream_b, label_b, ks, modes, cells);

    std::vector<DistributionRow> rows;
    rows.reserve(cells.size());
    for (const auto& [key, acc] : cells) {
        rows.push_back(DistributionRow{std::get<0>(key), std::get<1>(key),
                                       static_cast<SelectionMode>(std::get<2>(key)),
                                       std::get<3>(key), acc.mean(), acc.std_error(), acc.n});
    }
    return rows;
}

}  // namespace aqua
