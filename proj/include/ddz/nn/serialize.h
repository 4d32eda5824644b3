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


#ifndef DDZ_NN_SERIALIZE_H_
#define DDZ_NN_SERIALIZE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "ddz/nn/network.h"

namespace ddz::nn {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Stored hashes disagree with what the caller expects.
class CheckpointMismatchError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

// Little-endian primitives. Readers throw CheckpointError on short input.
void WriteU32(std::ostream& os, std::uint32_t v);
void WriteU64(std::ostream& os, std::uint64_t v);
void WriteF64(std::ostream& os, double v);
void WriteString(std::ostream& os, const std::string& s);
void WriteMatrix(std::ostream& os, const Matrix& m);
std::uint32_t ReadU32(std::istream& is);
std::uint64_t ReadU64(std::istream& is);
double ReadF64(std::istream& is);
std::string ReadString(std::istream& is);
Matrix ReadMatrix(std::istream& is);

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointHeader {
  std::uint32_t version = kCheckpointVersion;
  std::uint64_t spec_hash = 0;
  std::uint64_t layout_hash = 0;
  std::uint64_t counter = 0;
  std::string spec_text;
};

// Header followed by named tensors in storage order.
void WriteNetwork(std::ostream& os, const Network& net);
Network ReadNetwork(std::istream& is);
CheckpointHeader ReadHeader(std::istream& is);

// Writes to a sibling temporary file and renames it into place.
void AtomicWrite(const std::filesystem::path& path,
                 const std::function<void(std::ostream&)>& writer);

void SaveNetwork(const std::filesystem::path& path, const Network& net);
// Expected hashes of 0 are not checked.
Network LoadNetwork(const std::filesystem::path& path,
                    std::uint64_t expected_spec_hash = 0,
                    std::uint64_t expected_layout_hash = 0);
CheckpointHeader ReadCheckpointHeader(const std::filesystem::path& path);

}  // namespace ddz::nn

#endif  // DDZ_NN_SERIALIZE_H_
