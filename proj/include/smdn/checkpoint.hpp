// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Checkpoint container shared by every network.
//
// Layout (all integers little-endian):
//   "SMDN"            4-byte magic
//   u32 version       currently 1
//   u32 entry count
//   per entry:
//     u32 name length, UTF-8 name bytes
//     u8  dtype tag     0 = f32, 1 = f64
//     u32 rank
//     u64 dims[rank]
//     raw data, row-major, little-endian IEEE-754

#ifndef SMDN_CHECKPOINT_HPP_
#define SMDN_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "smdn/errors.hpp"
#include "smdn/tensor.hpp"

namespace smdn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

enum class DType : std::uint8_t { kF32 = 0, kF64 = 1 };

struct StoredTensor {
  std::string name;
  DType dtype = DType::kF32;
  std::vector<std::uint64_t> shape;
  std::vector<double> data;  // row-major; f32 entries are exactly representable
};

/// Named parameter tensors in insertion order.
class ParamStore {
 public:
  void add(StoredTensor tensor);
  const StoredTensor* find(std::string_view name) const;
  const StoredTensor& at(std::string_view name) const;
  const std::vector<StoredTensor>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  void merge(const ParamStore& other);
  bool has_prefix(std::string_view prefix) const;

  template <typename Net>
  void add_net(const Net& net, const std::string& prefix) {
    using S = typename Net::Scalar;
    net.visit([&](const std::string& name, const auto& t) {
      StoredTensor st;
      st.name = prefix + name;
      st.dtype = std::is_same_v<S, double> ? DType::kF64 : DType::kF32;
      using T = std::remove_cvref_t<decltype(t)>;
      if (tensor_rank<T>() == 1) {
        st.shape = {static_cast<std::uint64_t>(t.size())};
      } else {
        st.shape = {static_cast<std::uint64_t>(t.rows()), static_cast<std::uint64_t>(t.cols())};
      }
      st.data.reserve(static_cast<std::size_t>(t.size()));
      for (Index r = 0; r < t.rows(); ++r) {
        for (Index c = 0; c < t.cols(); ++c) st.data.push_back(static_cast<double>(t(r, c)));
      }
      add(std::move(st));
    });
  }

  /// Fills `net` (whose tensors are resized) from entries named prefix + name.
  template <typename Net>
  void load_net(Net& net, const std::string& prefix) const {
    using S = typename Net::Scalar;
    net.visit([&](const std::string& name, auto& t) {
      const StoredTensor& st = at(prefix + name);
      using T = std::remove_cvref_t<decltype(t)>;
      if (tensor_rank<T>() == 1) {
        if (st.shape.size() != 1) throw FormatError("checkpoint: " + st.name + " is not rank 1");
        t.resize(static_cast<Index>(st.shape[0]), 1);
      } else {
        if (st.shape.size() != 2) throw FormatError("checkpoint: " + st.name + " is not rank 2");
        t.resize(static_cast<Index>(st.shape[0]), static_cast<Index>(st.shape[1]));
      }
      std::size_t k = 0;
      for (Index r = 0; r < t.rows(); ++r) {
        for (Index c = 0; c < t.cols(); ++c) t(r, c) = static_cast<S>(st.data[k++]);
      }
    });
  }

 private:
  std::vector<StoredTensor> entries_;
};

std::string encode_checkpoint(const ParamStore& store);
ParamStore decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store);
ParamStore load_checkpoint(const std::filesystem::path& path);

}  // namespace smdn

#endif  // SMDN_CHECKPOINT_HPP_
