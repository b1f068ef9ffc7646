// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include "manifest.hpp"

#include <json.hpp>

#include "aqua/wire.hpp"

namespace aqua::cli {

std::string to_hex(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

std::string RunManifest::digest() const {
    std::string canonical = command;
    canonical += '\n';
    for (const auto& [key, value] : config) {
        canonical += key;
        canonical += '=';
        canonical += value;
        canonical += '\n';
    }
    return to_hex(wire::fnv1a(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(canonical.data()), canonical.size())));
}

void RunManifest::add_output_checksum(const std::filesystem::path& path) {
    const auto bytes = wire::read_file(path);
    outputs[path.string()] = to_hex(wire::fnv1a(bytes));
}

void RunManifest::write(const std::filesystem::path& artifact_path) const {
    nlohmann::json doc;
    doc["tool"] = kToolName;
    doc["version"] = kToolVersion;
    doc["command"] = command;
    doc["digest"] = digest();
    doc["config"] = config;
    doc["inputs"] = inputs;
    doc["outputs"] = outputs;
    doc["notes"] = notes;
    const std::string text = doc.dump(2) + "\n";
    wire::write_file(artifact_path.string() + ".manifest.json",
                     std::span<const std::uint8_t>(
                         reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace aqua::cli
