#pragma once

#include <cstdint>
#include <random>

namespace rset {

// Deterministic random source. mt19937_64 is pinned by the C++ standard, so
// streams are reproducible across platforms and compilers; the uniform and
// normal transforms below are ours for the same reason (the std distribution
// classes are implementation-defined).
class Rng {
 public:
  // Independent substream `stream` of master seed `seed`. The pair is mixed
  // through a splitmix64-style avalanche so that nearby (seed, stream) values
  // give unrelated engine states.
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  double uniform(double a, double b);

  // Standard normal via Box-Muller; the spare deviate is cached.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace rset
