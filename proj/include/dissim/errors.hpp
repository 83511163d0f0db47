// Copyright 2026 The Dissim Authors
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

namespace dissim {

// Invalid device description or malformed input file. Carries a
// path-like locator ("parts[2].duration") so callers can point at the
// offending field.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Integration or conservation failure detected while a computation was
// running (trace drift, conservation loss, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The adaptive integrator underflowed its step size. Reports how far it got.
class StiffnessError : public NumericalError {
 public:
  StiffnessError(const std::string& what, double time_reached)
      : NumericalError(what), time_reached_(time_reached) {}
  double time_reached() const { return time_reached_; }

 private:
  double time_reached_ = 0.0;
};

// Populations climbed into the top truncation level; the chosen cutoff is
// too small for the requested evolution.
class CutoffError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace dissim
