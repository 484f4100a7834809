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

// Command-line front end.
//
//   qrinv generate    write a matrix- or Markov-game spec
//   qrinv solve-qre   solve a spec's equilibrium
//   qrinv estimate    recover (theta, tau) from observed or sampled play
//   qrinv confset     scan the confidence set on the normalization sphere
//   qrinv experiment  run a named experiment sweep
//   qrinv verify      run the built-in oracle checks
//
// Every subcommand takes --config <json>; command-line flags override the
// matching top-level keys, and the merged configuration is echoed into the
// outputs. Exit codes: 0 success, 2 usage or malformed input, 3 numerical
// failure (a diagnostic JSON object is printed on stderr), 4 I/O failure.

#ifndef QRINV_TOOLS_CLI_H_
#define QRINV_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace qrinv {

// Parses args (args[0] is the program name) and runs one subcommand.
// Returns the process exit status.
int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace qrinv

#endif  // QRINV_TOOLS_CLI_H_
