// Copyright 2026 The match-anneal Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace match_anneal {

// Exception taxonomy. The CLI maps these onto exit codes:
//   InputError -> 2, SizeCapError -> 3, InfeasibleError -> 4.

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SizeCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what,
                           std::vector<std::size_t> blocking_users = {})
      : std::runtime_error(what), blocking_users_(std::move(blocking_users)) {}

  const std::vector<std::size_t>& blocking_users() const noexcept {
    return blocking_users_;
  }

 private:
  std::vector<std::size_t> blocking_users_;
};

// A user has fewer than two admissible supporters, so the top-2 encoding
// cannot represent it.
class ApproximationInfeasibleError : public InfeasibleError {
 public:
  ApproximationInfeasibleError(const std::string& what, std::size_t user)
      : InfeasibleError(what, {user}), user_(user) {}

  std::size_t user() const noexcept { return user_; }

 private:
  std::size_t user_;
};

}  // namespace match_anneal
