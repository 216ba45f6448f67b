// Copyright 2026 The qre Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QRE_ERRORS_HPP
#define QRE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qre {

// Base class for every error thrown by this library. Callers that only want
// "something in qre went wrong" can catch this one type.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Shape or subsystem-layout disagreement between operands.
struct DimensionMismatch : Error {
  using Error::Error;
};

// A matrix that must be Hermitian is not (within tolerance).
struct NotHermitian : Error {
  using Error::Error;
};

// A density matrix failed its invariants (PSD within tolerance, unit trace).
struct InvalidDensityMatrix : Error {
  using Error::Error;
};

// A subsystem index or keep-set is out of range / malformed.
struct InvalidSubsystem : Error {
  using Error::Error;
};

// A numeric parameter is outside its documented domain.
struct ParamOutOfRange : Error {
  using Error::Error;
};

// An operation that requires a bipartite system was given something else.
struct NotBipartite : Error {
  using Error::Error;
};

// A feature schema was requested for a system it does not describe.
struct WrongSystem : Error {
  using Error::Error;
};

// No feature schema (or recipe, etc.) is registered for the requested system.
struct UnsupportedSystem : Error {
  using Error::Error;
};

// Stored artifact does not match the schema the reader expects.
struct SchemaMismatch : Error {
  using Error::Error;
};

// The interior-point solver could not reach the requested accuracy.
struct SolverFailure : Error {
  using Error::Error;
};

// An iterative optimizer hit its iteration cap before converging.
struct NonConvergence : Error {
  using Error::Error;
};

// A pipeline stage was asked to run before its inputs exist on disk.
struct MissingArtifacts : Error {
  using Error::Error;
};

}  // namespace qre

#endif  // QRE_ERRORS_HPP
