#pragma once

#include <cstdint>
#include <vector>

namespace greenwalk {

/**
 * Counter-based deterministic RNG.
 *
 * draw(i) = mix64(key + GOLDEN * i), where mix64 is the splitmix64 output
 * finalizer. The key is itself derived from (seed, stream, substream) through
 * the same mixer, so any (trajectory, purpose) pair owns an independent
 * stream and a given draw index is reproducible without replaying the stream.
 * This is what makes parallel sampling order-independent: thread scheduling
 * cannot change which numbers a trajectory sees.
 */
class SplitRng {
public:
  SplitRng() = default;

  static std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  /// Independent generator for (seed, stream, substream).
  static SplitRng derive(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t substream = 0) noexcept {
    SplitRng r;
    std::uint64_t k = mix64(seed + GOLDEN);
    k = mix64(k ^ (stream + 0x9e3779b97f4a7c15ULL));
    k = mix64(k ^ (substream + 0x517cc1b727220a95ULL));
    r.key_ = k;
    return r;
  }

  /// Pure counter access; does not disturb the sequential cursor.
  std::uint64_t at(std::uint64_t counter) const noexcept {
    return mix64(key_ + GOLDEN * (counter + 1));
  }

  std::uint64_t next() noexcept { return at(cursor_++); }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() noexcept { return to_unit(next()); }

  double unit_at(std::uint64_t counter) const noexcept { return to_unit(at(counter)); }

  static double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  std::uint64_t cursor() const noexcept { return cursor_; }

private:
  static constexpr std::uint64_t GOLDEN = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_ = 0;
  std::uint64_t cursor_ = 0;
};

/// Inverse-CDF sampler for a fixed finite distribution.
class DiscreteSampler {
public:
  DiscreteSampler() = default;

  explicit DiscreteSampler(const std::vector<double>& weights) {
    cdf_.reserve(weights.size());
    double acc = 0.0;
    for (double w : weights) {
      acc += w;
      cdf_.push_back(acc);
    }
    if (!cdf_.empty()) cdf_.back() = 1.0; // guard the top against rounding
  }

  int sample(double u) const noexcept {
    // branchless-ish linear scan; supports here are tiny (<= a few dozen)
    int i = 0;
    const int n = static_cast<int>(cdf_.size());
    while (i + 1 < n && u >= cdf_[i]) ++i;
    return i;
  }

  std::size_t size() const noexcept { return cdf_.size(); }

private:
  std::vector<double> cdf_;
};

} // namespace greenwalk
