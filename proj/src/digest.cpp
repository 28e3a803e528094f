#include "asnkit/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

#include "asnkit/rng.hpp"

namespace asnkit {

static std::array<unsigned char, 32> sha256_raw(std::string_view data) {
  std::array<unsigned char, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("sha256 failed");
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  static const char* hex = "0123456789abcdef";
  auto raw = sha256_raw(data);
  std::string s(64, '0');
  for (std::size_t i = 0; i < raw.size(); ++i) {
    s[2 * i] = hex[raw[i] >> 4];
    s[2 * i + 1] = hex[raw[i] & 0xf];
  }
  return s;
}

std::uint64_t sha256_u64(std::string_view data) {
  auto raw = sha256_raw(data);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | raw[static_cast<std::size_t>(i)];
  return v;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view scope,
                          std::string_view key) {
  std::string buf = std::to_string(master);
  buf.push_back('\x1f');
  buf.append(scope);
  buf.push_back('\x1f');
  buf.append(key);
  return sha256_u64(buf);
}

}  // namespace asnkit
