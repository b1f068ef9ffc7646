// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace aqua::cli {

inline constexpr const char* kToolName = "aqua";
inline constexpr const char* kToolVersion = "0.1.0";

// Sidecar record of one CLI invocation: the full configuration, a digest
// of it, and checksums of what was written. Deliberately timestamp-free
// so repeated runs are byte-identical.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config;
    std::vector<std::string> inputs;
    std::map<std::string, std::string> outputs;  // path -> fnv1a checksum of bytes
    std::map<std::string, std::string> notes;

    // hex FNV-1a over the command plus the sorted key=value config lines
    std::string digest() const;

    void add_output_checksum(const std::filesystem::path& path);

    // serialized next to the primary artifact as <artifact>.manifest.json
    void write(const std::filesystem::path& artifact_path) const;
};

std::string to_hex(std::uint64_t value);

}  // namespace aqua::cli
