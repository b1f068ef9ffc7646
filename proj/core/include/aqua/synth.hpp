// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "aqua/attention.hpp"
#include "aqua/matrix.hpp"
#include "aqua/rng.hpp"

namespace aqua {

enum class ActivationKind : std::uint8_t { Query = 0, Key = 1, Value = 2 };

// head index used by key/value records, which belong to the whole group
inline constexpr std::uint32_t kSharedHead = 0xFFFFFFFFu;

struct ActivationRecord {
    std::uint32_t layer = 0;
    std::uint32_t group = 0;
    std::uint32_t head = kSharedHead;  // query head within the group, or kSharedHead
    ActivationKind kind = ActivationKind::Query;
    std::vector<double> data;

    bool operator==(const ActivationRecord&) const = default;
};

// Seeded stand-in for a pretrained model's per-head activations. Vectors
// are drawn through a fixed anisotropic linear map applied to standard
// normals, so the population covariance of each (layer, group) has
// eigenvalues proportional to spectrum_decay^j.
//
// The map's eigenvectors depend only on (layer, group, d_head); the seed
// re-draws the data and jitters the spectrum. Two specs that differ only
// in seed therefore share principal axes but not sample statistics,
// which is the knob the cross-distribution comparisons turn.
struct ToyHeadSpec {
    std::uint64_t seed = 0;
    HeadConfig head;
    double spectrum_decay = 0.85;  // in (0, 1]; 1 = isotropic
    std::size_t n_layers = 1;
    std::size_t n_groups = 1;
};

// 64-bit digest of everything that determines the stream's bytes.
std::uint64_t stream_fingerprint(const ToyHeadSpec& spec);

// Stateful single-consumer generator. Each token yields, per (layer,
// group): one Query record per query head, then one shared Key and one
// shared Value record.
class ToyStream {
  public:
    explicit ToyStream(const ToyHeadSpec& spec);

    const ToyHeadSpec& spec() const { return spec_; }
    std::size_t records_per_token() const;

    // appends this token's records to `out`
    void next_token(std::vector<ActivationRecord>& out);

  private:
    struct GroupModel {
        Matrix rotation;            // d x d orthogonal, seed-independent
        std::vector<double> scale;  // sqrt of covariance eigenvalues
        Rng rng;
    };

    void draw(GroupModel& model, std::vector<double>& out);

    ToyHeadSpec spec_;
    std::vector<GroupModel> groups_;  // layer-major
};

std::vector<ActivationRecord> generate_stream(const ToyHeadSpec& spec, std::size_t n_tokens);

// --- activation dump files ------------------------------------------------
//
// Layout: magic "AQAC", u32 version=1, u32 d_head, u32 n_layers,
// u32 n_groups, u32 n_q_heads, then per record: u32 layer, u32 group,
// u32 head (0xFFFFFFFF for K/V), u8 kind, 3 pad bytes, d_head f64.
// All little-endian.

struct DumpHeader {
    std::uint32_t version = 1;
    std::uint32_t d_head = 0;
    std::uint32_t n_layers = 0;
    std::uint32_t n_groups = 0;
    std::uint32_t n_q_heads = 0;

    bool operator==(const DumpHeader&) const = default;
};

struct ActivationDump {
    DumpHeader header;
    std::vector<ActivationRecord> records;
};

void write_dump(const std::filesystem::path& path, const DumpHeader& header,
                std::span<const ActivationRecord> records);

// Validates magic/version/dimensions and every record against the header.
ActivationDump read_dump(const std::filesystem::path& path);

std::uint64_t dump_fingerprint(const DumpHeader& header, std::size_t n_records);

}  // namespace aqua
