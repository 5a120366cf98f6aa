#pragma once

#include <string>
#include <string_view>

namespace graderalign {

// SHA-256 hex digest of a byte string. Stable across platforms; used for
// cache keys, mock-fixture lookup, and run manifests.
std::string sha256_hex(std::string_view data);

// Digest of a file's contents.
std::string sha256_file(const std::string& path);

}  // namespace graderalign
