#include "ylab/rng.hpp"

#include <cmath>

namespace ylab {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

// Fibonacci-hash based scrambler used to fold stream ids into the key.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key) {
  std::array<std::uint64_t, 4> c = counter;
  std::array<std::uint64_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

Rng::Rng(std::uint64_t seed) {
  key_[0] = splitmix64(seed);
  key_[1] = splitmix64(key_[0] ^ seed);
}

Rng::Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) : Rng(seed) {
  for (std::uint64_t id : stream) mix_in(id);
}

void Rng::mix_in(std::uint64_t id) {
  // Each split perturbs the high counter words; chained splits stay distinct
  // because the fold includes the current stream words.
  stream_[0] = splitmix64(stream_[0] ^ splitmix64(id));
  stream_[1] = splitmix64(stream_[1] + id + 0x632BE59BD9B4E019ull);
}

Rng Rng::substream(std::uint64_t id) const {
  Rng child;
  child.key_ = key_;
  child.stream_ = stream_;
  child.mix_in(id);
  return child;
}

void Rng::refill() {
  ++block_;
  buf_ = philox4x64({block_, 0, stream_[0], stream_[1]}, key_);
  buf_pos_ = 0;
}

std::uint64_t Rng::next_u64() {
  if (buf_pos_ >= 4) refill();
  return buf_[buf_pos_++];
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  const double u1 = uniform_pos();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  cached_gaussian_ = r * std::sin(a);
  has_cached_gaussian_ = true;
  return r * std::cos(a);
}

double Rng::rademacher() { return (next_u64() & 1u) != 0 ? 1.0 : -1.0; }

double Rng::centered_exponential() { return -std::log(uniform_pos()) - 1.0; }

}  // namespace ylab
