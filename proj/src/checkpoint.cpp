/*
 * Copyright 2026 The TGCN Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "tgcn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tgcn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'T', 'G', 'C', 'N', 'C', 'K', 'P', 'T'};

std::uint64_t fnv1a(const char* data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ULL;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void pod(T v) {
    buf_.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void str(const std::string& s) {
    pod<std::uint64_t>(s.size());
    buf_ += s;
  }
  void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  std::string& bytes() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const char* data, std::size_t size) : data_(data), size_(size) {}

  template <typename T>
  T pod() {
    T v;
    std::memcpy(&v, take(sizeof(T)), sizeof(T));
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    const char* p = take(n);
    return std::string(p, n);
  }
  const char* take(std::size_t n) {
    if (n > size_ - pos_) throw CheckpointError("checkpoint truncated");
    const char* p = data_ + pos_;
    pos_ += n;
    return p;
  }
  bool done() const { return pos_ == size_; }

 private:
  const char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

void write_vocab(Writer& w, const Vocabulary& v) {
  w.pod<std::uint64_t>(v.size());
  for (const auto& n : v.names()) w.str(n);
}

Vocabulary read_vocab(Reader& r) {
  const auto n = r.pod<std::uint64_t>();
  std::vector<std::string> names;
  for (std::uint64_t i = 0; i < n; ++i) names.push_back(r.str());
  try {
    return Vocabulary(std::move(names));
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("bad vocabulary in checkpoint: ") + e.what());
  }
}

}  // namespace

RunConfig Checkpoint::run_config() const {
  try {
    return parse_run_config(config_text, "<checkpoint>");
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("stored configuration is invalid: ") + e.what());
  }
}

std::string encode_checkpoint(const Checkpoint& checkpoint) {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.pod<std::uint32_t>(kCheckpointVersion);
  w.str(checkpoint.config_text);
  w.pod<std::uint64_t>(checkpoint.metadata.size());
  for (const auto& [k, v] : checkpoint.metadata) {
    w.str(k);
    w.str(v);
  }
  write_vocab(w, checkpoint.entities);
  write_vocab(w, checkpoint.relations);
  w.pod<std::uint8_t>(checkpoint.augmented ? 1 : 0);
  std::uint64_t count = 0;
  checkpoint.model.visit([&count](const std::string&, const Matrix<float>&) { ++count; });
  w.pod<std::uint64_t>(count);
  checkpoint.model.visit([&w](const std::string& name, const Matrix<float>& m) {
    w.str(name);
    w.pod<std::int64_t>(m.rows());
    w.pod<std::int64_t>(m.cols());
    w.raw(m.data(), static_cast<std::size_t>(m.size()) * sizeof(float));
  });
  const std::uint64_t sum = fnv1a(w.bytes().data(), w.bytes().size());
  w.pod(sum);
  return std::move(w.bytes());
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) + sizeof(std::uint32_t) + sizeof(std::uint64_t) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a checkpoint file (bad magic)");
  }
  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  std::uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + body, sizeof(stored));
  if (stored != fnv1a(bytes.data(), body)) throw CheckpointError("checkpoint checksum mismatch");

  Reader r(bytes.data(), body);
  r.take(sizeof(kMagic));
  const auto version = r.pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.config_text = r.str();
  const auto n_meta = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < n_meta; ++i) {
    std::string k = r.str();
    ck.metadata[k] = r.str();
  }
  ck.entities = read_vocab(r);
  ck.relations = read_vocab(r);
  ck.augmented = r.pod<std::uint8_t>() != 0;

  const RunConfig config = ck.run_config();
  try {
    ck.model = Model<float>::zeros(model_config(config, static_cast<std::int64_t>(ck.entities.size()),
                                                static_cast<std::int64_t>(ck.relations.size())));
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("cannot rebuild model: ") + e.what());
  }
  std::vector<std::pair<std::string, Matrix<float>*>> slots;
  ck.model.visit([&slots](const std::string& name, Matrix<float>& m) { slots.emplace_back(name, &m); });
  const auto count = r.pod<std::uint64_t>();
  if (count != slots.size()) throw CheckpointError("parameter count does not match the stored configuration");
  for (auto& [name, m] : slots) {
    const std::string stored_name = r.str();
    const auto rows = r.pod<std::int64_t>();
    const auto cols = r.pod<std::int64_t>();
    if (stored_name != name || rows != m->rows() || cols != m->cols()) {
      std::ostringstream msg;
      msg << "parameter '" << stored_name << "' " << rows << "x" << cols << " does not match expected '" << name
          << "' " << m->rows() << "x" << m->cols();
      throw CheckpointError(msg.str());
    }
    std::memcpy(m->data(), r.take(static_cast<std::size_t>(m->size()) * sizeof(float)),
                static_cast<std::size_t>(m->size()) * sizeof(float));
  }
  if (!r.done()) throw CheckpointError("trailing bytes in checkpoint");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  const std::string bytes = encode_checkpoint(checkpoint);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

}  // namespace tgcn
