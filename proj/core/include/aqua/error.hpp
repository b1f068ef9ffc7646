// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace aqua {

// Base of all library errors. Subclasses map onto the CLI exit codes.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Operand dimensions do not line up (matmul, cache append, ...).
class ShapeError : public Error {
  public:
    using Error::Error;
};

// A scalar argument is out of its documented range.
class ParameterError : public Error {
  public:
    using Error::Error;
};

// Numerical procedure failed (e.g. SVD sweep limit exceeded).
class NumericError : public Error {
  public:
    using Error::Error;
};

// A binary file does not match its declared format (magic, version, dims).
class FormatError : public Error {
  public:
    using Error::Error;
};

// File ended mid-record; carries the byte offset in the message.
class TruncationError : public FormatError {
  public:
    using FormatError::FormatError;
};

// A stream ran out of records before a sampling quota was met.
class CapacityError : public Error {
  public:
    using Error::Error;
};

// Loaded data fails a consistency check (orthogonality, ordering).
class IntegrityError : public Error {
  public:
    using Error::Error;
};

// Filesystem-level failure (open, read, write).
class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace aqua
