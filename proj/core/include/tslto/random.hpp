#pragma once

// Portable random streams. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; the conversions to doubles are done
// here rather than through <random> distributions (whose algorithms are
// implementation-defined) so a seed yields identical data on every platform:
//   uniform01: (next() >> 11) * 2^-53
//   normal:    Box-Muller on two uniform01 draws, one value per call
//   index(n):  modulo with rejection of the biased tail, unbiased on [0, n)

#include <cstdint>
#include <random>

namespace tslto {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform01();
  double uniform(double low, double high) { return low + (high - low) * uniform01(); }
  double normal(double mean, double stddev);
  std::uint64_t index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace tslto
