#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace vargram {

// splitmix64 finalizer; used to derive independent seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t x);

// Deterministic sub-stream seed for (master seed, stream id). Every
// parallelizable cell (fold, repeat, test document) gets its own stream so
// results do not depend on execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// FNV-1a 64-bit hash; used for document-id keyed streams and file digests.
std::uint64_t fnv1a64(std::string_view bytes);

// Deterministic RNG wrapper. All sampling goes through uniform01() so that
// output is reproducible bit-for-bit for a given seed, independent of the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in {0, ..., n-1}.
  int uniform_int(int n);

  // Draw from an unnormalized weight vector by inverse CDF over index order
  // with a single uniform draw. Weights must be non-negative with a positive
  // sum.
  int categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace vargram
