// Copyright 2026 The PASS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace pass {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes are incompatible for the requested operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A computation produced a non-finite value.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// An operation was invoked in the wrong order (e.g. backward before forward).
class StateError : public Error {
 public:
  using Error::Error;
};

// Arguments or configuration values violate a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Input data does not match the declared attribute schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// An exhaustive computation exceeds the supported size.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace pass
