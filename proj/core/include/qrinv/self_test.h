// Copyright 2026 The qrinv Authors
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

// Built-in oracle checks run by `qrinv verify`.
//
// Each check recomputes a quantity by an independent route (closed form,
// brute-force loop, or exact construction) and compares it with the library.
// The whole suite runs in a few seconds.

#ifndef QRINV_SELF_TEST_H_
#define QRINV_SELF_TEST_H_

#include <string>
#include <vector>

namespace qrinv {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> RunSelfTest();

}  // namespace qrinv

#endif  // QRINV_SELF_TEST_H_
