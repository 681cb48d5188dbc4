#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hoieval {

// Seeded stream with platform-independent conversions. The std::
// distributions are implementation-defined, which would break
// byte-reproducible reports across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t splitmix64(std::uint64_t x);

// Independent per-(frame, role) stream seed; stable across runs and thread
// counts.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view frame_id,
                          std::uint64_t role);

}  // namespace hoieval
