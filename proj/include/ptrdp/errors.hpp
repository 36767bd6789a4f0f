//
// Copyright 2026 The ptr-accountant Authors
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
//

#ifndef PTRDP_ERRORS_HPP_
#define PTRDP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ptrdp {

// Invalid parameters or inconsistent configuration. Maps to CLI exit code 2.
class config_error : public std::invalid_argument {
 public:
  explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

// A tightness condition required by an analytic bound does not hold for the
// requested parameters. Callers typically fall back to a generic bound.
class bound_not_applicable : public std::runtime_error {
 public:
  explicit bound_not_applicable(const std::string& what) : std::runtime_error(what) {}
};

// Numerical machinery failed to converge. Maps to CLI exit code 3.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ptrdp

#endif  // PTRDP_ERRORS_HPP_
