// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SMDN_HASHING_HPP_
#define SMDN_HASHING_HPP_

#include <filesystem>
#include <string>
#include <string_view>

namespace smdn {

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// Git-style content hash: SHA-256 over "blob <size>\0" followed by the bytes.
std::string content_hash(std::string_view bytes);

std::string file_content_hash(const std::filesystem::path& path);

}  // namespace smdn

#endif  // SMDN_HASHING_HPP_
