// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/synth.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "aqua/error.hpp"
#include "aqua/wire.hpp"

namespace aqua {

namespace {

// Salt for the structural part of the generator (rotations), kept apart
// from the data seed so that different seeds share eigenvectors.
constexpr std::uint64_t kRotationSalt = 0x51a71a711a5a1a17ULL;

constexpr std::uint8_t kDumpMagic[4] = {0x41, 0x51, 0x41, 0x43};  // "AQAC"

std::uint64_t group_tag(std::uint32_t layer, std::uint32_t group) {
    return (static_cast<std::uint64_t>(layer) << 32) | group;
}

// Orthogonal matrix from modified Gram-Schmidt over seeded normals.
Matrix random_rotation(std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix q(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> col(d);
        while (true) {
            for (double& x : col) {
                x = rng.normal();
            }
            for (std::size_t prev = 0; prev < j; ++prev) {
                double proj = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    proj += q(i, prev) * col[i];
                }
                for (std::size_t i = 0; i < d; ++i) {
                    col[i] -= proj * q(i, prev);
                }
            }
            double norm = 0.0;
            for (double x : col) {
                norm += x * x;
            }
            norm = std::sqrt(norm);
            if (norm > 1e-8) {
                for (std::size_t i = 0; i < d; ++i) {
                    q(i, j) = col[i] / norm;
                }
                break;
            }
        }
    }
    return q;
}

void validate_spec(const ToyHeadSpec& spec) {
    if (!(spec.spectrum_decay > 0.0) || spec.spectrum_decay > 1.0) {
        throw ParameterError("spectrum_decay must be in (0, 1]");
    }
    if (spec.head.d_head < 1 || spec.head.n_q_heads < 1 || spec.n_layers < 1 ||
        spec.n_groups < 1) {
        throw ParameterError("toy spec dimensions must be >= 1");
    }
}

}  // namespace

std::uint64_t stream_fingerprint(const ToyHeadSpec& spec) {
    std::vector<std::uint8_t> bytes;
    wire::put_u64(bytes, spec.seed);
    wire::put_u64(bytes, spec.head.d_head);
    wire::put_u64(bytes, spec.head.n_q_heads);
    wire::put_u64(bytes, spec.n_layers);
    wire::put_u64(bytes, spec.n_groups);
    wire::put_u64(bytes, std::bit_cast<std::uint64_t>(spec.spectrum_decay));
    return wire::fnv1a(bytes);
}

ToyStream::ToyStream(const ToyHeadSpec& spec) : spec_(spec) {
    validate_spec(spec_);
    const std::size_t d = spec_.head.d_head;
    groups_.reserve(spec_.n_layers * spec_.n_groups);
    for (std::uint32_t layer = 0; layer < spec_.n_layers; ++layer) {
        for (std::uint32_t group = 0; group < spec_.n_groups; ++group) {
            const std::uint64_t tag = group_tag(layer, group);
            GroupModel model{
                random_rotation(d, derive_seed(derive_seed(kRotationSalt, tag), d)),
                std::vector<double>(d),
                Rng(derive_seed(spec_.seed, tag)),
            };
            // Spectrum: decay^j with a seeded log-space jitter that
            // vanishes as decay -> 1 so the isotropic case stays exact.
            Rng jitter(derive_seed(derive_seed(spec_.seed, tag), 0x5eedULL));
            const double half_width = 0.5 * (1.0 - spec_.spectrum_decay);
            for (std::size_t j = 0; j < d; ++j) {
                const double eps = half_width * (2.0 * jitter.uniform() - 1.0);
                const double eigenvalue = std::pow(spec_.spectrum_decay,
                                                   static_cast<double>(j)) * std::exp(eps);
                model.scale[j] = std::sqrt(eigenvalue);
            }
            groups_.push_back(std::move(model));
        }
    }
}

std::size_t ToyStream::records_per_token() const {
    return spec_.n_layers * spec_.n_groups * (spec_.head.n_q_heads + 2);
}

void ToyStream::draw(GroupModel& model, std::vector<double>& out) {
    const std::size_t d = spec_.head.d_head;
    std::vector<double> z(d);
    for (std::size_t j = 0; j < d; ++j) {
        z[j] = model.scale[j] * model.rng.normal();
    }
    out.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            acc += model.rotation(i, j) * z[j];
        }
        out[i] = acc;
    }
}

void ToyStream::next_token(std::vector<ActivationRecord>& out) {
    std::vector<double> v;
    for (std::uint32_t layer = 0; layer < spec_.n_layers; ++layer) {
        for (std::uint32_t group = 0; group < spec_.n_groups; ++group) {
            GroupModel& model = groups_[layer * spec_.n_groups + group];
            for (std::uint32_t h = 0; h < spec_.head.n_q_heads; ++h) {
                draw(model, v);
                out.push_back({layer, group, h, ActivationKind::Query, v});
            }
            draw(model, v);
            out.push_back({layer, group, kSharedHead, ActivationKind::Key, v});
            draw(model, v);
            out.push_back({layer, group, kSharedHead, ActivationKind::Value, v});
        }
    }
}

std::vector<ActivationRecord> generate_stream(const ToyHeadSpec& spec, std::size_t n_tokens) {
    if (n_tokens < 1) {
        throw ParameterError("n_tokens must be >= 1");
    }
    ToyStream stream(spec);
    std::vector<ActivationRecord> records;
    records.reserve(n_tokens * stream.records_per_token());
    for (std::size_t t = 0; t < n_tokens; ++t) {
        stream.next_token(records);
    }
    return records;
}

void write_dump(const std::filesystem::path& path, const DumpHeader& header,
                std::span<const ActivationRecord> records) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(24 + records.size() * (16 + 8 * header.d_head));
    bytes.insert(bytes.end(), std::begin(kDumpMagic), std::end(kDumpMagic));
    wire::put_u32(bytes, header.version);
    wire::put_u32(bytes, header.d_head);
    wire::put_u32(bytes, header.n_layers);
    wire::put_u32(bytes, header.n_groups);
    wire::put_u32(bytes, header.n_q_heads);
    for (const ActivationRecord& rec : records) {
        if (rec.data.size() != header.d_head) {
            throw ShapeError("dump record vector length != header d_head");
        }
        wire::put_u32(bytes, rec.layer);
        wire::put_u32(bytes, rec.group);
        wire::put_u32(bytes, rec.head);
        wire::put_u8(bytes, static_cast<std::uint8_t>(rec.kind));
        wire::put_u8(bytes, 0);
        wire::put_u8(bytes, 0);
        wire::put_u8(bytes, 0);
        for (double x : rec.data) {
            wire::put_f64(bytes, x);
        }
    }
    wire::write_file(path, bytes);
}

ActivationDump read_dump(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = wire::read_file(path);
    wire::Reader r(bytes);

    for (std::uint8_t expected : kDumpMagic) {
        if (r.get_u8() != expected) {
            throw FormatError("bad magic: not an activation dump");
        }
    }
    ActivationDump dump;
    dump.header.version = r.get_u32();
    if (dump.header.version != 1) {
        throw FormatError("unsupported dump version " + std::to_string(dump.header.version));
    }
    dump.header.d_head = r.get_u32();
    dump.header.n_layers = r.get_u32();
    dump.header.n_groups = r.get_u32();
    dump.header.n_q_heads = r.get_u32();
    if (dump.header.d_head == 0) {
        throw FormatError("dump header d_head must be >= 1");
    }

    while (!r.at_end()) {
        ActivationRecord rec;
        rec.layer = r.get_u32();
        rec.group = r.get_u32();
        rec.head = r.get_u32();
        const std::uint8_t kind = r.get_u8();
        if (kind > 2) {
            throw FormatError("record kind " + std::to_string(kind) + " at byte offset " +
                              std::to_string(r.offset() - 1));
        }
        rec.kind = static_cast<ActivationKind>(kind);
        r.skip(3);
        if (rec.layer >= dump.header.n_layers || rec.group >= dump.header.n_groups) {
            throw FormatError("record layer/group out of range at byte offset " +
                              std::to_string(r.offset()));
        }
        if (rec.kind == ActivationKind::Query) {
            if (rec.head >= dump.header.n_q_heads) {
                throw FormatError("query head out of range at byte offset " +
                                  std::to_string(r.offset()));
            }
        } else if (rec.head != kSharedHead) {
            throw FormatError("key/value record must use the shared-head sentinel, byte offset " +
                              std::to_string(r.offset()));
        }
        rec.data.resize(dump.header.d_head);
        for (double& x : rec.data) {
            x = r.get_f64();
        }
        dump.records.push_back(std::move(rec));
    }
    return dump;
}

std::uint64_t dump_fingerprint(const DumpHeader& header, std::size_t n_records) {
    std::vector<std::uint8_t> bytes;
    wire::put_u32(bytes, header.version);
    wire::put_u32(bytes, header.d_head);
    wire::put_u32(bytes, header.n_layers);
    wire::put_u32(bytes, header.n_groups);
    wire::put_u32(bytes, header.n_q_heads);
    wire::put_u64(bytes, n_records);
    return wire::fnv1a(bytes);
}

}  // namespace aqua
