#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <type_traits>

namespace prdeep::detail {

template <class T>
T byteswap_if_big(T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&value, bytes, sizeof(T));
  }
  return value;
}

/// Appends the little-endian encoding of `value` to `out`.
template <class T>
void put_le(std::string& out, T value) {
  value = byteswap_if_big(value);
  const auto* p = reinterpret_cast<const char*>(&value);
  out.append(p, sizeof(T));
}

/// Decodes a little-endian value from `p`.
template <class T>
T get_le(const char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return byteswap_if_big(value);
}

}  // namespace prdeep::detail
