// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "aqua/error.hpp"
#include "aqua/wire.hpp"

namespace aqua::cli {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string format_u64(std::uint64_t value) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string format_fixed3(double value) {
    const double magnitude = std::abs(value);
    const auto mills = static_cast<long long>(std::floor(magnitude * 1000.0 + 0.5));
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%s%lld.%03lld", value < 0.0 ? "-" : "", mills / 1000,
                  mills % 1000);
    return buf;
}

CsvWriter::CsvWriter(std::string manifest_digest, std::vector<std::string> columns)
    : n_columns_(columns.size()) {
    body_ = "# manifest " + manifest_digest + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) {
            body_ += ',';
        }
        body_ += columns[i];
    }
    body_ += '\n';
}

void CsvWriter::row(std::span<const std::string> cells) {
    if (cells.size() != n_columns_) {
        throw ShapeError("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(n_columns_));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) {
            body_ += ',';
        }
        body_ += cells[i];
    }
    body_ += '\n';
}

void CsvWriter::write(const std::filesystem::path& path) const {
    wire::write_file(path, std::span<const std::uint8_t>(
                               reinterpret_cast<const std::uint8_t*>(body_.data()),
                               body_.size()));
}

}  // namespace aqua::cli
