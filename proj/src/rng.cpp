#include "arelab/rng.hpp"

#include <bit>
#include <cstring>

#include "arelab/kernels.hpp"

namespace arelab::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey key) noexcept {
  std::uint32_t k0 = key.k0;
  std::uint32_t k1 = key.k1;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

double bits_to_open_unit(std::uint64_t bits) noexcept {
  const std::uint64_t mantissa = (bits >> 12) | 0x3FF0000000000000ull;
  return (std::bit_cast<double>(mantissa) - 1.0) + 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t seed, Op op, std::uint64_t tag, std::uint64_t replicate) noexcept
    : id_(replicate) {
  const std::uint64_t k =
      splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(op) ^ splitmix64(tag)));
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

namespace {

// Element 2b + j of a stream is the j-th double of block b.
inline void block_pair(PhiloxKey key, std::uint64_t id, std::uint64_t block, double& a,
                       double& b) {
  const PhiloxCounter out =
      philox4x32_10({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                     static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32)},
                    key);
  a = bits_to_open_unit((static_cast<std::uint64_t>(out[1]) << 32) | out[0]);
  b = bits_to_open_unit((static_cast<std::uint64_t>(out[3]) << 32) | out[2]);
}

}  // namespace

double Stream::uniform(std::uint64_t index) const noexcept {
  double a, b;
  block_pair(key_, id_, index / 2, a, b);
  return (index % 2 == 0) ? a : b;
}

void Stream::fill_uniforms(std::span<double> out, std::uint64_t offset) const {
  std::size_t pos = 0;
  std::uint64_t index = offset;
  if (out.empty()) return;
  if (index % 2 == 1) {
    out[pos++] = uniform(index++);
  }
  const std::size_t blocks = (out.size() - pos) / 2;
  if (blocks > 0) {
    kernels::active().philox_uniforms(key_.k0, key_.k1, id_, index / 2, out.data() + pos, blocks);
    pos += 2 * blocks;
    index += 2 * blocks;
  }
  if (pos < out.size()) {
    out[pos] = uniform(index);
  }
}

}  // namespace arelab::rng
