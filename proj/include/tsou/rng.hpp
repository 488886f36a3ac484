#pragma once

#include <array>
#include <cstdint>

namespace tsou {

// Counter-based random stream (Philox4x32-10).
//
// The key is derived from the seed and the counter block carries the
// stream id in its upper half, so any (seed, stream_id) pair names an
// independent sequence that can be created without touching any other
// stream. Copying a stream clones its position exactly.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  // Number of 64-bit words consumed so far.
  std::uint64_t position() const { return counter_ * 2 + index_ - 2; }

  std::uint64_t next_u64();
  std::uint64_t operator()() { return next_u64(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  // Moves the stream forward by `n` 64-bit words in O(1).
  void discard(std::uint64_t n);

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint32_t, 2> key_;
  std::uint64_t counter_ = 0;  // blocks generated so far
  unsigned index_ = 2;         // next word within buffer_, 2 == empty
  std::array<std::uint64_t, 2> buffer_{};
};

// Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Uniform on [0, 1) with 53 random bits.
double uniform(RngStream& stream);

// Uniform on (0, 1), never returns 0; for use under logarithms and powers.
double uniform_open(RngStream& stream);

}  // namespace tsou
