// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace aqua::cli {

// Shortest round-trip decimal form; deterministic for a given libc++/libstdc++.
std::string format_double(double value);
std::string format_u64(std::uint64_t value);

// Three decimals, half rounded away from zero (the reporting convention
// for ratio tables, where 0.5625 prints as 0.563).
std::string format_fixed3(double value);

// CSV with a '#' manifest comment line, a fixed header, LF endings, UTF-8.
// Column order is part of the tool's interface.
class CsvWriter {
  public:
    CsvWriter(std::string manifest_digest, std::vector<std::string> columns);

    void row(std::span<const std::string> cells);
    void row(std::initializer_list<std::string> cells) {
        row(std::span<const std::string>(cells.begin(), cells.size()));
    }

    const std::string& body() const { return body_; }

    // throws IoError on failure
    void write(const std::filesystem::path& path) const;

  private:
    std::size_t n_columns_;
    std::string body_;
};

}  // namespace aqua::cli
