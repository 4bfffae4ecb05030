// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "smdn/hashing.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <sstream>

#include "smdn/errors.hpp"

namespace smdn {

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string content_hash(std::string_view bytes) {
  std::string framed = "blob " + std::to_string(bytes.size());
  framed.push_back('\0');
  framed.append(bytes);
  return sha256_hex(framed);
}

std::string file_content_hash(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return content_hash(ss.str());
}

}  // namespace smdn
