// Copyright 2026 The solipsim Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace solipsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Shapes or register dimensions do not line up.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A register name was not found in a layout.
class UnknownRegister : public Error {
  public:
    explicit UnknownRegister(const std::string &name)
        : Error("unknown register '" + name + "'"), name_(name) {}
    [[nodiscard]] const std::string &name() const { return name_; }

  private:
    std::string name_;
};

/// Conditioning on an outcome whose probability is below the impossibility
/// threshold.
class ImpossibleEvent : public Error {
  public:
    using Error::Error;
};

/// A value violates a structural invariant (norm, isometry contract,
/// projector completeness, single-valued records, ...).
class InvariantViolation : public Error {
  public:
    using Error::Error;
};

/// A measure-and-record step found its device or memory register occupied.
class BlankRegisterViolation : public Error {
  public:
    using Error::Error;
};

/// A retrodicted premise refers to a record that was destroyed before the
/// reasoning step and cannot be propagated.
class Unevaluable : public Error {
  public:
    using Error::Error;
};

/// Malformed protocol, chain, or experiment description.
class MalformedInput : public Error {
  public:
    using Error::Error;
};

} // namespace solipsim
