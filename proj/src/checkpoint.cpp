// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "smdn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace smdn {

void ParamStore::add(StoredTensor tensor) {
  if (find(tensor.name)) throw FormatError("checkpoint: duplicate entry " + tensor.name);
  std::uint64_t expected = 1;
  for (auto d : tensor.shape) expected *= d;
  if (expected != tensor.data.size()) throw DimensionError("checkpoint: " + tensor.name + " data/shape mismatch");
  entries_.push_back(std::move(tensor));
}

const StoredTensor* ParamStore::find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const StoredTensor& ParamStore::at(std::string_view name) const {
  const StoredTensor* e = find(name);
  if (!e) throw FormatError("checkpoint: missing entry " + std::string(name));
  return *e;
}

void ParamStore::merge(const ParamStore& other) {
  for (const auto& e : other.entries_) add(e);
}

bool ParamStore::has_prefix(std::string_view prefix) const {
  for (const auto& e : entries_) {
    if (e.name.starts_with(prefix)) return true;
  }
  return false;
}

namespace {

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    need(sizeof(T));
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("checkpoint: truncated file");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const ParamStore& store) {
  std::string out = "SMDN";
  put_le(out, kCheckpointVersion);
  put_le(out, static_cast<std::uint32_t>(store.size()));
  for (const auto& e : store.entries()) {
    put_le(out, static_cast<std::uint32_t>(e.name.size()));
    out += e.name;
    put_le(out, static_cast<std::uint8_t>(e.dtype));
    put_le(out, static_cast<std::uint32_t>(e.shape.size()));
    for (auto d : e.shape) put_le(out, static_cast<std::uint64_t>(d));
    for (double v : e.data) {
      if (e.dtype == DType::kF32) {
        put_le(out, static_cast<float>(v));
      } else {
        put_le(out, v);
      }
    }
  }
  return out;
}

ParamStore decode_checkpoint(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(4) != "SMDN") throw FormatError("checkpoint: bad magic");
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  const auto count = in.get<std::uint32_t>();
  ParamStore store;
  for (std::uint32_t i = 0; i < count; ++i) {
    StoredTensor e;
    const auto name_len = in.get<std::uint32_t>();
    e.name = std::string(in.take(name_len));
    const auto tag = in.get<std::uint8_t>();
    if (tag > 1) throw FormatError("checkpoint: unknown dtype tag in " + e.name);
    e.dtype = static_cast<DType>(tag);
    const auto rank = in.get<std::uint32_t>();
    std::uint64_t n = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      e.shape.push_back(in.get<std::uint64_t>());
      n *= e.shape.back();
    }
    const std::size_t width = e.dtype == DType::kF32 ? 4 : 8;
    if (n > bytes.size() / width) throw FormatError("checkpoint: entry " + e.name + " larger than file");
    e.data.resize(n);
    for (auto& v : e.data) v = e.dtype == DType::kF32 ? static_cast<double>(in.get<float>()) : in.get<double>();
    store.add(std::move(e));
  }
  if (!in.done()) throw FormatError("checkpoint: trailing bytes");
  return store;
}

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot write checkpoint " + path.string());
  const std::string bytes = encode_checkpoint(store);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw ConfigError("failed writing checkpoint " + path.string());
}

ParamStore load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return decode_checkpoint(ss.str());
}

}  // namespace smdn
