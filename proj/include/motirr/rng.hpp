#pragma once

#include <cstdint>
#include <limits>

namespace motirr {

/// SplitMix64 engine. Satisfies UniformRandomBitGenerator.
///
/// Every trial or atom gets its own engine via `substream`, keyed by
/// (seed, family, index), so results do not depend on the order in which
/// work items are executed.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit SplitMix64(std::uint64_t state = 0) noexcept : state_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Stream families keep trial streams and atom streams disjoint for one seed.
enum class StreamFamily : std::uint64_t {
  protocol_trial = 1,
  unmonitored_atom = 2,
  monitored_atom = 3,
};

constexpr SplitMix64 substream(std::uint64_t seed, StreamFamily family,
                               std::uint64_t index) noexcept {
  std::uint64_t key = SplitMix64::mix(seed ^ 0x6A09E667F3BCC909ULL);
  key = SplitMix64::mix(key ^ (static_cast<std::uint64_t>(family) * 0xD1B54A32D192ED03ULL));
  key = SplitMix64::mix(key + index);
  return SplitMix64{key};
}

}  // namespace motirr
