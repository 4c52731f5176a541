#include "shaperet/hashing.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

static_assert(std::endian::native == std::endian::little, "little-endian host required");

namespace shaperet {

struct Hasher::State {
  EVP_MD_CTX* ctx = nullptr;
  ~State() { EVP_MD_CTX_free(ctx); }
};

Hasher::Hasher() : state_(std::make_unique<State>()) {
  state_->ctx = EVP_MD_CTX_new();
  if (!state_->ctx || EVP_DigestInit_ex(state_->ctx, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 initialization failed");
  }
}

Hasher::~Hasher() = default;
Hasher::Hasher(Hasher&&) noexcept = default;
Hasher& Hasher::operator=(Hasher&&) noexcept = default;

Hasher& Hasher::bytes(std::span<const std::byte> data) {
  if (EVP_DigestUpdate(state_->ctx, data.data(), data.size()) != 1) {
    throw std::runtime_error("SHA-256 update failed");
  }
  return *this;
}

Hasher& Hasher::str(std::string_view s) {
  value(static_cast<std::uint64_t>(s.size()));
  return bytes(std::as_bytes(std::span(s.data(), s.size())));
}

Hasher& Hasher::file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    bytes(std::as_bytes(std::span(buf.data(), static_cast<std::size_t>(in.gcount()))));
  }
  return *this;
}

namespace {

std::array<unsigned char, 32> finish(EVP_MD_CTX* ctx) {
  std::array<unsigned char, 32> out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, out.data(), &len) != 1 || len != out.size()) {
    throw std::runtime_error("SHA-256 finalization failed");
  }
  return out;
}

}  // namespace

std::string Hasher::hex() {
  static constexpr char kDigits[] = "0123456789abcdef";
  const auto d = finish(state_->ctx);
  std::string s;
  for (auto b : d) {
    s += kDigits[b >> 4];
    s += kDigits[b & 15];
  }
  return s;
}

std::uint64_t Hasher::first_u64() {
  const auto d = finish(state_->ctx);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | d[static_cast<std::size_t>(i)];
  return v;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view mesh_id, std::string_view purpose) {
  return Hasher().value(master).str(mesh_id).str(purpose).first_u64();
}

}  // namespace shaperet
