// Copyright 2026 The steerbench Authors
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

#include "steerbench/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "steerbench/errors.hpp"

namespace steer {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'S', 'T', 'E', 'E', 'R', 'C', 'K', 'P'};

template <typename U>
void put(std::ostream& out, U v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(U));
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class Reader {
 public:
  Reader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

  template <typename U>
  U get() {
    U v;
    read(reinterpret_cast<char*>(&v), sizeof(U));
    return v;
  }

  std::string get_string(std::uint64_t limit = 1ULL << 30) {
    const auto n = get<std::uint64_t>();
    if (n > limit) fail("string length out of range");
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }

  void read(char* dst, std::size_t n) {
    if (!in_.read(dst, static_cast<std::streamsize>(n))) fail("truncated file");
  }

  [[noreturn]] void fail(const std::string& why) const { throw LoadError("checkpoint " + path_ + ": " + why); }

 private:
  std::istream& in_;
  std::string path_;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, Model<float>& model, const KeyValueDoc& extra) {
  KeyValueDoc doc = extra;
  doc.merge(model.config.to_doc("model"));
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("cannot write " + tmp.string());
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kCheckpointVersion);
    put_string(out, doc.str());
    const auto params = parameters(*model.graph);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
      put_string(out, p.name);
      const Tensor<float>& t = p.param->value;
      put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
      for (int d : t.shape()) put<std::int32_t>(out, d);
      out.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(float)));
    }
    if (!out.flush()) throw LoadError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!std::filesystem::is_regular_file(path) || !in) throw LoadError("cannot open checkpoint " + path.string());
  Reader r(in, path.string());
  char magic[8];
  r.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(magic)) != 0) r.fail("not a steerbench checkpoint");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) r.fail("unsupported version " + std::to_string(version));

  LoadedCheckpoint ck;
  ck.doc = KeyValueDoc::parse(r.get_string());
  try {
    ck.model = build_model<float>(ModelConfig::from_doc(ck.doc, "model"));
  } catch (const ConfigError& e) {
    r.fail(std::string("invalid model config: ") + e.what());
  }
  auto params = parameters(*ck.model.graph);
  const auto count = r.get<std::uint32_t>();
  if (count != params.size())
    r.fail("holds " + std::to_string(count) + " tensors, model has " + std::to_string(params.size()));
  for (auto& p : params) {
    const std::string name = r.get_string(4096);
    if (name != p.name) r.fail("expected tensor '" + p.name + "', found '" + name + "'");
    const auto rank = r.get<std::uint32_t>();
    Shape shape(rank);
    for (auto& d : shape) d = r.get<std::int32_t>();
    Tensor<float>& t = p.param->value;
    if (shape != t.shape()) r.fail("tensor '" + name + "' has shape " + shape_str(shape) + ", expected " + shape_str(t.shape()));
    r.read(reinterpret_cast<char*>(t.data()), t.size() * sizeof(float));
  }
  if (in.peek() != std::char_traits<char>::eof()) r.fail("trailing bytes");
  return ck;
}

}  // namespace steer
