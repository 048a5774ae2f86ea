#include "fdne/rng.hpp"

namespace fdne {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Stafford's Mix13 variant of the SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : key0_(mix64(seed + kGolden)), key1_(mix64(mix64(seed) ^ (stream + kGolden))) {}

RngStream::RngStream(std::uint64_t k0, std::uint64_t k1, int) : key0_(k0), key1_(k1) {}

RngStream RngStream::substream(std::uint64_t role) const {
  return RngStream(mix64(key0_ ^ mix64(role + kGolden)), mix64(key1_ + role * kGolden), 0);
}

std::uint64_t RngStream::next_u64() {
  std::uint64_t z = key0_ + (++counter_) * kGolden;
  return mix64(z ^ key1_);
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + next_double() * (hi - lo);
}

std::size_t RngStream::below(std::size_t bound) {
  // bound << 2^64, so the modulo bias is negligible
  return static_cast<std::size_t>(next_u64() % bound);
}

}  // namespace fdne
