#pragma once

// Counter-based random streams. Every (seed, stream, domain) triple names an
// independent stream whose n-th output depends only on n, so paths can be
// simulated in any order or on any number of threads with identical results.

#include <array>
#include <cstdint>

namespace folbm {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  [[nodiscard]] static Counter block(Counter ctr, Key key);
};

/// Stream purposes, mixed into the counter so that, e.g., initial-point
/// draws never reuse driving-noise blocks.
enum class StreamDomain : std::uint32_t {
  noise = 0,
  initial_points = 1,
  auxiliary = 2,
};

class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream,
               StreamDomain domain = StreamDomain::noise);

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller on two uniforms.
  double normal();

 private:
  std::uint64_t next_u64();

  Philox4x32::Key key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
  std::uint64_t block_index_ = 0;
  Philox4x32::Counter buffer_{};
  int buffered_words_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace folbm
