#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace ylab {

// Philox4x64-10 block function (Salmon et al. counter-based generator).
// Pure function of (counter, key); frozen known-answer vectors in
// tests/test_rng.cpp pin the exact output stream.
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key);

// Splittable deterministic RNG. A stream is identified by (seed, stream ids);
// substream(id) derives an independent stream, so replicate r of experiment e
// can use Rng(seed).substream(e).substream(r) and the result is independent of
// scheduling and thread count.
//
// Draw order is part of the contract: uniforms consume one 64-bit word each,
// gaussians are produced in Box-Muller pairs with the second value cached.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

  Rng substream(std::uint64_t id) const;

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();

  // Uniform on (0, 1]; used internally for the Box-Muller log.
  double uniform_pos();

  // Standard normal via Box-Muller.
  double gaussian();

  // Rademacher +-1.
  double rademacher();

  // Centered standard exponential (Exp(1) - 1), the asymmetric noise choice.
  double centered_exponential();

 private:
  Rng() = default;
  void mix_in(std::uint64_t id);
  void refill();

  std::array<std::uint64_t, 2> key_{};
  std::array<std::uint64_t, 2> stream_{};  // high counter words, fixed per stream
  std::uint64_t block_ = 0;                // low counter words, advances per block
  std::array<std::uint64_t, 4> buf_{};
  int buf_pos_ = 4;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace ylab
