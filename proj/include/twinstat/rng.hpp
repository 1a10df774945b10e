#pragma once

#include <cstdint>
#include <random>

namespace twinstat {

/// Derives an independent child seed from (seed, stream) with a splitmix64
/// finalizer. Scan code seeds every point/channel/repetition through this so
/// the noise streams do not depend on evaluation order; that is what makes
/// the OpenMP sweep bit-identical to the serial one.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded stream of N(0, sigma) samples.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, double sigma)
      : engine_(seed), dist_(0.0, sigma > 0.0 ? sigma : 1.0), sigma_(sigma) {}

  double next() { return sigma_ > 0.0 ? dist_(engine_) : 0.0; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_;
  double sigma_;
};

}  // namespace twinstat
