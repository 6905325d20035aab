// Copyright (c) 2026, the svault authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace svault {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violated a documented constraint.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// Timestamps were not in the required order.
class OrderingError : public Error {
 public:
  using Error::Error;
};

/// An operation that requires at least one point got none.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// A requested timestamp lies outside the covered range (no extrapolation).
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// Not enough data to satisfy the operation's minimum requirements.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// The sensor is not registered / not present.
class UnknownSensorError : public Error {
 public:
  using Error::Error;
};

/// Attempted to write into a day that has already been sealed.
class SealedSegmentError : public Error {
 public:
  using Error::Error;
};

/// A (sensor, timestamp) slot already holds a different value.
class ConflictError : public Error {
 public:
  using Error::Error;
};

/// The day is not fully in the past yet.
class NotSealableError : public Error {
 public:
  using Error::Error;
};

/// The day has no open points to seal.
class NothingToSealError : public Error {
 public:
  using Error::Error;
};

/// Stored bytes failed validation (bad magic, bad checksum, torn write).
class CorruptionError : public Error {
 public:
  using Error::Error;
};

/// A catalog write would leave a dangling or inconsistent reference.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// An entity with the same unique key already exists.
class DuplicateError : public Error {
 public:
  using Error::Error;
};

/// Filesystem operation failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input text could not be parsed (file-level failure).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace svault
