// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aqua/error.hpp"
#include "aqua/rng.hpp"
#include "aqua/svd.hpp"
#include "aqua/wire.hpp"

namespace aqua {

namespace {

constexpr std::uint8_t kBundleMagic[4] = {0x41, 0x51, 0x50, 0x42};  // "AQPB"

// Classic reservoir sampling (algorithm R) with a per-source generator so
// the result does not depend on how sources interleave in the stream.
class Reservoir {
  public:
    Reservoir(std::size_t capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {}

    void offer(const std::vector<double>& row) {
        if (rows_.size() < capacity_) {
            rows_.push_back(row);
        } else {
            const std::uint64_t j = rng_.next_u64() % (seen_ + 1);
            if (j < capacity_) {
                rows_[static_cast<std::size_t>(j)] = row;
            }
        }
        ++seen_;
    }

    std::size_t seen() const { return seen_; }
    const std::vector<std::vector<double>>& rows() const { return rows_; }

  private:
    std::size_t capacity_;
    Rng rng_;
    std::size_t seen_ = 0;
    std::vector<std::vector<double>> rows_;
};

}  // namespace

CalibrationMatrix build_calibration_matrix(std::span<const ActivationRecord> records,
                                           std::uint32_t layer, std::uint32_t group,
                                           std::size_t m_per_source, std::uint64_t sample_seed,
                                           std::size_t n_q_heads) {
    if (m_per_source < 1 || n_q_heads < 1) {
        throw ParameterError("m_per_source and n_q_heads must be >= 1");
    }

    // sources 0..n_q_heads-1: query heads; source n_q_heads: the key head
    std::vector<Reservoir> sources;
    sources.reserve(n_q_heads + 1);
    for (std::size_t s = 0; s <= n_q_heads; ++s) {
        sources.emplace_back(m_per_source, derive_seed(sample_seed, (static_cast<std::uint64_t>(
                                               layer) << 40) ^ (static_cast<std::uint64_t>(group)
                                               << 20) ^ s));
    }

    std::size_t d_head = 0;
    for (const ActivationRecord& rec : records) {
        if (rec.layer != layer || rec.group != group || rec.kind == ActivationKind::Value) {
            continue;
        }
        if (d_head == 0) {
            d_head = rec.data.size();
        } else if (rec.data.size() != d_head) {
            throw ShapeError("inconsistent record width in calibration stream");
        }
        if (rec.kind == ActivationKind::Query) {
            if (rec.head >= n_q_heads) {
                throw ShapeError("query head " + std::to_string(rec.head) +
                                 " outside group of " + std::to_string(n_q_heads));
            }
            sources[rec.head].offer(rec.data);
        } else {
            sources[n_q_heads].offer(rec.data);
        }
    }

    for (std::size_t s = 0; s <= n_q_heads; ++s) {
        if (sources[s].seen() < m_per_source) {
            const std::string name =
                (s < n_q_heads) ? ("query head " + std::to_string(s)) : std::string("key head");
            throw CapacityError("calibration needs " + std::to_string(m_per_source) + " " + name +
                                " records for layer " + std::to_string(layer) + " group " +
                                std::to_string(group) + ", got " +
                                std::to_string(sources[s].seen()));
        }
    }

    CalibrationMatrix out{layer, group, m_per_source, Matrix(0, d_head)};
    for (std::size_t s = 0; s <= n_q_heads; ++s) {
        for (const auto& row : sources[s].rows()) {
            out.data.append_row(row);
        }
    }
    return out;
}

CalibrationResult calibrate(const CalibrationMatrix& matrix) {
    CalibrationResult result;
    result.rank_deficient = matrix.data.rows() < matrix.data.cols();
    SvdResult decomposition = svd(matrix.data);
    result.projection = std::move(decomposition.v);
    result.sigma = std::move(decomposition.sigma);
    return result;
}

double orthogonality_defect(const Matrix& p) {
    const Matrix gram = matmul(transpose(p), p);
    return max_abs_diff(gram, Matrix::identity(p.cols()));
}

void save_bundle(const ProjectionBundle& bundle, const std::filesystem::path& path) {
    const std::size_t d = bundle.d_head;
    std::vector<std::uint8_t> bytes;
    bytes.insert(bytes.end(), std::begin(kBundleMagic), std::end(kBundleMagic));
    wire::put_u32(bytes, 1);
    wire::put_u32(bytes, bundle.d_head);
    wire::put_u32(bytes, static_cast<std::uint32_t>(bundle.entries.size()));
    for (const auto& [key, entry] : bundle.entries) {
        if (entry.projection.rows() != d || entry.projection.cols() != d ||
            entry.sigma.size() != d) {
            throw ShapeError("bundle entry dimensions disagree with d_head");
        }
        wire::put_u32(bytes, key.first);
        wire::put_u32(bytes, key.second);
        wire::put_u32(bytes, entry.m_per_source);
        wire::put_u64(bytes, entry.source_fingerprint);
        for (double s : entry.sigma) {
            wire::put_f64(bytes, s);
        }
        for (double x : entry.projection.data()) {
            wire::put_f64(bytes, x);
        }
    }
    wire::write_file(path, bytes);
}

ProjectionBundle load_bundle(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = wire::read_file(path);
    wire::Reader r(bytes);

    for (std::uint8_t expected : kBundleMagic) {
        if (r.get_u8() != expected) {
            throw FormatError("bad magic: not a projection bundle");
        }
    }
    const std::uint32_t version = r.get_u32();
    if (version != 1) {
        throw FormatError("unsupported bundle version " + std::to_string(version));
    }
    ProjectionBundle bundle;
    bundle.d_head = r.get_u32();
    if (bundle.d_head == 0) {
        throw FormatError("bundle d_head must be >= 1");
    }
    const std::uint32_t n_entries = r.get_u32();
    const std::size_t d = bundle.d_head;

    for (std::uint32_t e = 0; e < n_entries; ++e) {
        const std::uint32_t layer = r.get_u32();
        const std::uint32_t group = r.get_u32();
        BundleEntry entry;
        entry.m_per_source = r.get_u32();
        entry.source_fingerprint = r.get_u64();
        entry.sigma.resize(d);
        for (double& s : entry.sigma) {
            s = r.get_f64();
        }
        std::vector<double> p(d * d);
        for (double& x : p) {
            x = r.get_f64();
        }
        try {
            entry.projection = Matrix(d, d, std::move(p));
        } catch (const ParameterError&) {
            throw IntegrityError("bundle entry (" + std::to_string(layer) + ", " +
                                 std::to_string(group) + "): non-finite projection payload");
        }

        for (std::size_t j = 0; j < d; ++j) {
            if (!std::isfinite(entry.sigma[j]) || entry.sigma[j] < 0.0 ||
                (j + 1 < d && entry.sigma[j] < entry.sigma[j + 1])) {
                throw IntegrityError("bundle entry (" + std::to_string(layer) + ", " +
                                     std::to_string(group) + "): invalid sigma sequence");
            }
        }
        const double defect = orthogonality_defect(entry.projection);
        if (!(defect <= 1e-10)) {
            throw IntegrityError("bundle entry (" + std::to_string(layer) + ", " +
                                 std::to_string(group) + "): projection not orthogonal, defect=" +
                                 std::to_string(defect));
        }
        if (!bundle.entries.emplace(LayerGroup{layer, group}, std::move(entry)).second) {
            throw FormatError("duplicate bundle entry (" + std::to_string(layer) + ", " +
                              std::to_string(group) + ")");
        }
    }
    if (!r.at_end()) {
        throw FormatError("trailing bytes after last bundle entry at offset " +
                          std::to_string(r.offset()));
    }
    return bundle;
}

}  // namespace aqua
