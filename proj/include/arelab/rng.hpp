#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace arelab::rng {

struct PhiloxKey {
  std::uint32_t k0 = 0;
  std::uint32_t k1 = 0;
};

using PhiloxCounter = std::array<std::uint32_t, 4>;

// Philox4x32-10 block function (Salmon et al., SC'11).
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

// Converts the top 52 bits of a 64-bit word to a double in the open interval (0, 1).
double bits_to_open_unit(std::uint64_t bits) noexcept;

// Operation identifiers that separate independent Monte Carlo consumers.
enum class Op : std::uint64_t {
  user = 0,
  np_null = 1,
  np_alternative = 2,
  ks_alternative = 3,
  ks_null = 4,
  moments_null = 5,
  moments_alternative = 6,
  importance = 7,
  sampler = 8,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Counter-based stream. Element i of a stream is a pure function of
// (seed, op, tag, replicate, i): there is no hidden state, so replicates can be
// generated in any order on any thread.
class Stream {
 public:
  Stream(std::uint64_t seed, Op op, std::uint64_t tag, std::uint64_t replicate) noexcept;
  Stream(PhiloxKey key, std::uint64_t stream_id) noexcept : key_(key), id_(stream_id) {}

  PhiloxKey key() const noexcept { return key_; }
  std::uint64_t id() const noexcept { return id_; }

  // Writes elements [offset, offset + out.size()) of the stream.
  void fill_uniforms(std::span<double> out, std::uint64_t offset = 0) const;
  double uniform(std::uint64_t index) const noexcept;

 private:
  PhiloxKey key_;
  std::uint64_t id_;
};

}  // namespace arelab::rng
