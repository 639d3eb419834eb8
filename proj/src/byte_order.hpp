#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <vector>

namespace rangenull::detail {

template <typename T>
void put_le(std::vector<unsigned char>& buf, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  buf.insert(buf.end(), bits.begin(), bits.end());
}

template <typename T>
T get_le(const unsigned char* p) {
  std::array<unsigned char, sizeof(T)> bits;
  std::memcpy(bits.data(), p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

}  // namespace rangenull::detail
