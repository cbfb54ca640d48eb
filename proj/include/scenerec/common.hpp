// Copyright 2026 the scenerec authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace scenerec {

// Exit-code taxonomy shared by the CLI and the library: usage errors (2),
// contract violations (3), missing upstream artifacts (4).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingUpstreamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractError(msg);
}

}  // namespace scenerec
