#pragma once

#include <cstdint>
#include <random>

namespace distopt {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed for stream `stream` at index `k` under a base seed. Stable across
/// platforms and releases.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t k = 0);

// Stream tags. New tags must be appended, never reordered.
enum class Stream : std::uint64_t {
  kInitialIterates = 1,
  kMonitor = 2,
  kSchedule = 3,
  kPartition = 4,
  kSharing = 5,
  kSampling = 6,
};

/// Platform-stable random source. The std:: distributions are
/// implementation-defined, so uniform/normal are derived directly from the
/// 64-bit engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, Stream stream, std::uint64_t k = 0)
      : engine_(derive_seed(seed, static_cast<std::uint64_t>(stream), k)) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal (Box-Muller, one value per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace distopt
