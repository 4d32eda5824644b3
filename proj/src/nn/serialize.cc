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


#include "ddz/nn/serialize.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace ddz::nn {
namespace {

constexpr char kMagic[8] = {'D', 'D', 'Z', 'N', 'E', 'T', '0', '1'};

template <typename T>
void WriteLe(std::ostream& os, T v) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  }
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T ReadLe(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw CheckpointError("truncated checkpoint data");
  }
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(bytes[i]) << (8 * i);
  }
  return v;
}

}  // namespace

void WriteU32(std::ostream& os, std::uint32_t v) { WriteLe(os, v); }
void WriteU64(std::ostream& os, std::uint64_t v) { WriteLe(os, v); }
void WriteF64(std::ostream& os, double v) {
  WriteLe(os, std::bit_cast<std::uint64_t>(v));
}
void WriteString(std::ostream& os, const std::string& s) {
  WriteU32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void WriteMatrix(std::ostream& os, const Matrix& m) {
  WriteU32(os, static_cast<std::uint32_t>(m.rows()));
  WriteU32(os, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index k = 0; k < m.size(); ++k) WriteF64(os, m.data()[k]);
}

std::uint32_t ReadU32(std::istream& is) { return ReadLe<std::uint32_t>(is); }
std::uint64_t ReadU64(std::istream& is) { return ReadLe<std::uint64_t>(is); }
double ReadF64(std::istream& is) {
  return std::bit_cast<double>(ReadLe<std::uint64_t>(is));
}
std::string ReadString(std::istream& is) {
  const std::uint32_t n = ReadU32(is);
  if (n > (1u << 26)) throw CheckpointError("implausible string length");
  std::string s(n, '\0');
  if (!is.read(s.data(), n)) throw CheckpointError("truncated string");
  return s;
}
Matrix ReadMatrix(std::istream& is) {
  const std::uint32_t rows = ReadU32(is);
  const std::uint32_t cols = ReadU32(is);
  if (static_cast<std::uint64_t>(rows) * cols > (1ull << 28)) {
    throw CheckpointError("implausible tensor size");
  }
  Matrix m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = ReadF64(is);
  return m;
}

void WriteNetwork(std::ostream& os, const Network& net) {
  os.write(kMagic, sizeof(kMagic));
  WriteU32(os, kCheckpointVersion);
  WriteU64(os, net.spec().Hash());
  WriteU64(os, net.params().layout_hash);
  WriteU64(os, net.params().counter);
  WriteString(os, net.spec().Describe());
  WriteU32(os, static_cast<std::uint32_t>(net.params().tensors.size()));
  for (const auto& [name, m] : net.params().tensors) {
    WriteString(os, name);
    WriteMatrix(os, m);
  }
}

CheckpointHeader ReadHeader(std::istream& is) {
  char magic[sizeof(kMagic)];
  if (!is.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a network checkpoint");
  }
  CheckpointHeader h;
  h.version = ReadU32(is);
  if (h.version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " +
                          std::to_string(h.version));
  }
  h.spec_hash = ReadU64(is);
  h.layout_hash = ReadU64(is);
  h.counter = ReadU64(is);
  h.spec_text = ReadString(is);
  return h;
}

Network ReadNetwork(std::istream& is) {
  const CheckpointHeader h = ReadHeader(is);
  NetworkSpec spec = NetworkSpec::Parse(h.spec_text);
  if (spec.Hash() != h.spec_hash) {
    throw CheckpointError("spec text does not match its hash");
  }
  Parameters params;
  params.layout_hash = h.layout_hash;
  params.counter = h.counter;
  const std::uint32_t n = ReadU32(is);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string name = ReadString(is);
    params.tensors.emplace_back(std::move(name), ReadMatrix(is));
  }
  try {
    return Network(std::move(spec), std::move(params));
  } catch (const ShapeError& e) {
    throw CheckpointError(e.what());
  }
}

void AtomicWrite(const std::filesystem::path& path,
                 const std::function<void(std::ostream&)>& writer) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw CheckpointError("cannot open " + tmp.string());
    writer(os);
    os.flush();
    if (!os) throw CheckpointError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("rename failed: " + path.string());
}

void SaveNetwork(const std::filesystem::path& path, const Network& net) {
  AtomicWrite(path, [&](std::ostream& os) { WriteNetwork(os, net); });
}

Network LoadNetwork(const std::filesystem::path& path,
                    std::uint64_t expected_spec_hash,
                    std::uint64_t expected_layout_hash) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open " + path.string());
  Network net = ReadNetwork(is);
  if (expected_spec_hash != 0 && net.spec().Hash() != expected_spec_hash) {
    throw CheckpointMismatchError(path.string() +
                                  ": network spec hash mismatch");
  }
  if (expected_layout_hash != 0 &&
      net.params().layout_hash != expected_layout_hash) {
    throw CheckpointMismatchError(path.string() +
                                  ": feature layout hash mismatch");
  }
  return net;
}

CheckpointHeader ReadCheckpointHeader(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open " + path.string());
  return ReadHeader(is);
}

}  // namespace ddz::nn
