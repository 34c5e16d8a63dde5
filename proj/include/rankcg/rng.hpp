#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <utility>
#include <vector>

namespace rankcg {

/// SplitMix64 (Steele, Lea & Flood 2014), version 1 of the generator used by
/// every sampler in this library. The state is a Weyl counter; each output is
/// the counter passed through a fixed 64-bit finalizer, so streams are
/// reproducible across platforms and languages. All derived draws below use
/// only integer arithmetic and IEEE double operations.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Independent stream for (seed, tag, index), e.g. ("train", 0).
  static SplitMix64 stream(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
    for (unsigned char ch : tag) h = (h ^ ch) * 0x100000001b3ULL;
    return SplitMix64(mix(mix(seed) ^ mix(h + kGamma) ^ mix(index + 2 * kGamma)));
  }

  std::uint64_t next() { return mix(state_ += kGamma); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [lo, hi] by rejection (no modulo bias).
  long uniform_int(long lo, long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<long>(next());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do v = next();
    while (v >= limit);
    return lo + static_cast<long>(v % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller; the second variate is discarded so a
  /// draw always consumes exactly two outputs.
  double normal(double mean = 0.0, double sd = 1.0) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Index drawn from unnormalized non-negative weights.
  std::size_t categorical(const std::vector<double>& cumulative) {
    const double u = uniform() * cumulative.back();
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative[mid] > u)
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

  /// Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[static_cast<std::size_t>(uniform_int(0, static_cast<long>(i) - 1))]);
  }

 private:
  std::uint64_t state_;
};

}  // namespace rankcg
