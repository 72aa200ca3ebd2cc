#pragma once

#include <cstdint>
#include <random>

namespace hpk {

// splitmix64 step; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed for stream `index` under master `seed`. Streams for different indices
// are decorrelated, so draw i can be generated on any thread.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

// mt19937_64 with platform-independent uniform/normal transforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  static Rng stream(std::uint64_t seed, std::uint64_t index) { return Rng(stream_seed(seed, index)); }

  std::uint64_t next() { return eng_(); }
  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }
  // Standard normal (Box-Muller, second variate cached).
  double normal();

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hpk
