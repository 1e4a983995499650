#include "zeroed/core/hash.hpp"

#include <openssl/evp.h>

#include <array>

#include "zeroed/core/error.hpp"

namespace zeroed {

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int b = 0; b < len; ++b) {
    hex.push_back(kHex[digest[b] >> 4]);
    hex.push_back(kHex[digest[b] & 0xF]);
  }
  return hex;
}

}  // namespace zeroed
