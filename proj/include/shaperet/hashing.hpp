#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>

namespace shaperet {

/// Incremental SHA-256. Arithmetic values are fed as their little-endian
/// bytes; strings are length-prefixed so concatenations stay unambiguous.
class Hasher {
 public:
  Hasher();
  ~Hasher();
  Hasher(Hasher&&) noexcept;
  Hasher& operator=(Hasher&&) noexcept;

  Hasher& bytes(std::span<const std::byte> data);
  Hasher& str(std::string_view s);
  template <typename T>
    requires std::is_arithmetic_v<T>
  Hasher& value(T v) {
    return bytes(std::as_bytes(std::span<const T, 1>(&v, 1)));
  }
  Hasher& file(const std::filesystem::path& path);

  /// Full digest as 64 lowercase hex digits.
  std::string hex();
  /// First 16 hex digits, used for cache file names.
  std::string hex16() { return hex().substr(0, 16); }
  std::uint64_t first_u64();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

/// Per-mesh seed: hash of (master seed, mesh id), so adding a mesh leaves
/// every other mesh's seed unchanged.
std::uint64_t derive_seed(std::uint64_t master, std::string_view mesh_id,
                          std::string_view purpose = {});

}  // namespace shaperet
