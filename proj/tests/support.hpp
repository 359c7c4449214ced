// Copyright 2026 The xattr Authors.
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

// Shared helpers for the GoogleTest suites.

#include <cstdlib>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace xattr::testing {

// Compares `actual` with tests/golden/<name>. With XATTR_UPDATE_GOLDEN=1 the
// file is rewritten instead; review the diff before committing it.
inline ::testing::AssertionResult matches_golden(const std::string& name,
                                                 const std::string& actual) {
  const fs::path path = source_dir() / "tests" / "golden" / name;
  if (const char* update = std::getenv("XATTR_UPDATE_GOLDEN"); update && std::string(update) == "1") {
    write_file(path, actual);
    return ::testing::AssertionSuccess();
  }
  if (!fs::exists(path)) {
    return ::testing::AssertionFailure() << "missing golden file " << path;
  }
  const std::string expected = read_file(path);
  if (expected == actual) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "output differs from " << path << "\n--- expected\n"
                                       << expected << "\n--- actual\n" << actual;
}

}  // namespace xattr::testing
