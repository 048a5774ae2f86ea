#pragma once

#include <cstdint>
#include <vector>

namespace fdne {

/// Counter-based splittable random stream.
///
/// A stream is identified by a 128-bit key derived from (seed, stream);
/// output i is a mix of the key and a running counter, so the sequence is a
/// pure function of (seed, stream, i) and independent of scheduling.
/// substream(role) derives a statistically independent child stream with its
/// own counter, which lets one logical seed feed sampling, initialization and
/// shuffling without any coupling between consumers.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  /// Independent child stream; deterministic in (parent key, role).
  RngStream substream(std::uint64_t role) const;

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double next_double();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

  /// Uniform integer in {0, ..., bound-1}; bound >= 1.
  std::size_t below(std::size_t bound);

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  RngStream(std::uint64_t k0, std::uint64_t k1, int);  // raw key

  std::uint64_t key0_;
  std::uint64_t key1_;
  std::uint64_t counter_ = 0;
};

}  // namespace fdne
