#pragma once

#include <cstdint>
#include <random>

namespace hom {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of stream `index` under `master`. Distinct indices give unrelated seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Per-trajectory random stream. The same (master_seed, stream_index) pair always
/// reproduces the same sequence, independent of thread count or scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  /// Uniform double in [0, 1) built from the top 53 bits of one 64-bit draw.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
};

}  // namespace hom
