// Copyright 2026 The dexchange Authors
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

#ifndef DEXCHANGE_ERRORS_HPP_
#define DEXCHANGE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dexchange {

// Root of every error thrown by the library. Precondition violations that are
// programming errors use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by zero in prime field") {}
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class InconsistentSystem : public Error {
 public:
  using Error::Error;
};

// The requested instance cannot reach collective full rank.
class InfeasibleInstance : public Error {
 public:
  using Error::Error;
};

// Malformed or invalid instance / schedule file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A rate vector violates a cut-set constraint.
class InfeasibleRates : public Error {
 public:
  using Error::Error;
};

class ConstructionFailed : public Error {
 public:
  ConstructionFailed(const std::string& what, int attempts)
      : Error(what), attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

class NotDecodable : public Error {
 public:
  using Error::Error;
};

}  // namespace dexchange

#endif  // DEXCHANGE_ERRORS_HPP_
