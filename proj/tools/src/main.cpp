// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

int main(int argc, char** argv) { return aqua::cli::run(argc, argv); }
