#include "tsou/rng.hpp"

namespace tsou {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// SplitMix64 finalizer; spreads the user seed over the full key.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  const std::uint64_t k = mix64(seed);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

void RngStream::refill() {
  const std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(counter_),
      static_cast<std::uint32_t>(counter_ >> 32),
      static_cast<std::uint32_t>(stream_id_),
      static_cast<std::uint32_t>(stream_id_ >> 32)};
  const auto out = philox4x32(ctr, key_);
  buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  index_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (index_ >= 2) {
    refill();
    ++counter_;
  }
  return buffer_[index_++];
}

void RngStream::discard(std::uint64_t n) {
  const std::uint64_t pos = position() + n;
  counter_ = pos / 2;
  index_ = 2;
  if (pos % 2 != 0) {
    refill();
    ++counter_;
    index_ = 1;
  }
}

double uniform(RngStream& stream) {
  return static_cast<double>(stream.next_u64() >> 11) * 0x1.0p-53;
}

double uniform_open(RngStream& stream) {
  return (static_cast<double>(stream.next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace tsou
