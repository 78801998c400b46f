// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FPSKEW_ERRORS_HPP
#define FPSKEW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fpskew {

/// Empty input, zero spread, zero mean absolute deviation, and similar
/// conditions under which the requested functional is undefined.
class degenerate_error : public std::runtime_error {
 public:
  explicit degenerate_error(const std::string& what) : std::runtime_error(what) {}
};

/// Calibration constraints are rank deficient (e.g. constant auxiliary).
class collinearity_error : public std::runtime_error {
 public:
  explicit collinearity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative solver exhausted its iteration budget.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// Sample allocation cannot satisfy the design constraints.
class allocation_error : public std::runtime_error {
 public:
  explicit allocation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Exhaustive enumeration would exceed the configured sample-count bound.
class enumeration_bound_error : public std::runtime_error {
 public:
  explicit enumeration_bound_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file (CSV population, config).
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fpskew

#endif  // FPSKEW_ERRORS_HPP
