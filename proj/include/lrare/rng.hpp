#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace lrare {

// Per-sample random streams. Sample k always draws from a generator seeded
// by mix(master_seed, k), so its increments never depend on how samples
// are distributed over workers.
struct RngPolicy {
  std::uint64_t master_seed = 0;

  std::uint64_t stream_seed(std::uint64_t sample) const;
};

std::uint64_t splitmix64(std::uint64_t x);

// Standard normal variates from a dedicated 64-bit Mersenne Twister.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  NormalStream(const RngPolicy& policy, std::uint64_t sample)
      : engine_(policy.stream_seed(sample)) {}

  double operator()() { return normal_(engine_); }
  void fill(std::span<double> out) {
    for (double& z : out) z = normal_(engine_);
  }
  double uniform() { return std::uniform_real_distribution<double>()(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace lrare
