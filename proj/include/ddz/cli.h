// Copyright 2026 The DouDizhu Lab Authors
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

#ifndef DDZ_CLI_H_
#define DDZ_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace ddz {

enum ExitCode {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfigError = 2,
  kExitIoError = 3,
  kExitCheckpointMismatch = 4,
};

// Entry point of the `ddz` tool. `args` includes the program name. The
// `serve` command blocks until the server stops.
int RunCli(const std::vector<std::string>& args, std::istream& in,
           std::ostream& out, std::ostream& err);

}  // namespace ddz

#endif  // DDZ_CLI_H_
