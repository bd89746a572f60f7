// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace laughlin {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad parameters, non-canonical configs, length mismatch.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configured size cap (particle number, sector dimension, memory) was hit.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// A numerical cross-check failed (e.g. two routes to the same quantity disagree).
class VerificationFailure : public Error {
 public:
  using Error::Error;
};

/// Cache file problems: unreadable, version/metadata mismatch, checksum failure.
class CacheError : public Error {
 public:
  using Error::Error;
};

/// Infinite-volume quantity requested from a renewal model whose tail is not small.
class UnconvergedModel : public Error {
 public:
  using Error::Error;
};

}  // namespace laughlin
