#ifndef RANKINFER_RNG_HPP
#define RANKINFER_RNG_HPP

#include <cstdint>
#include <limits>

namespace rankinfer {

/// Purpose tags keep the substreams of one replication independent.
enum class StreamTag : std::uint64_t {
  kTruth = 1,
  kGraph = 2,
  kOutcomes = 3,
  kBootstrap = 4,
  kBootstrapUnit = 5,
  kSearch = 6,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based generator: the state is (key, counter) and each output is a
/// hash of both, so a stream is fully determined by (seed, id, tag) and
/// streams can be created in any order.
class Stream {
 public:
  using result_type = std::uint64_t;

  constexpr Stream(std::uint64_t seed, std::uint64_t id = 0,
                   StreamTag tag = StreamTag::kTruth)
      : key_(splitmix64(splitmix64(splitmix64(seed) ^ id) ^
                        static_cast<std::uint64_t>(tag))) {}

  /// Child stream, independent of this one's outputs.
  constexpr Stream split(std::uint64_t id) const {
    Stream child(0);
    child.key_ = splitmix64(key_ ^ splitmix64(id + 0x632be59bd9b4e019ULL));
    return child;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rankinfer

#endif  // RANKINFER_RNG_HPP
