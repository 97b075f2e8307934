// Copyright 2026 The QHD Authors
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

namespace qhd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid construction parameters (dimension, bandwidth, hyperparameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operands of a pairwise operation have different dimensions, or an index is
/// outside the valid range.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A scalar argument is outside the domain of the operation (e.g. non-finite).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Cosine similarity requested for a zero-norm vector.
class UndefinedSimilarityError : public Error {
 public:
  using Error::Error;
};

/// A state fed to the encoder contains NaN or Inf.
class EncodingError : public Error {
 public:
  using Error::Error;
};

/// Action index outside the action space.
class ActionError : public Error {
 public:
  using Error::Error;
};

/// An environment was stepped after its episode had already ended.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A regression update produced a non-finite error term.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Value iteration did not reach the requested tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qhd
