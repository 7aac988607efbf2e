#ifndef SUBMSS_RANDOM_HPP
#define SUBMSS_RANDOM_HPP

#include <cstdint>
#include <random>

namespace submss {

// SplitMix64 finalizer, used to spread (seed, index) pairs across the
// generator's state space.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// One reproducible stream per stochastic entity.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t entity_index)
      : gen_(derive_seed(master_seed, entity_index)) {}

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace submss

#endif  // SUBMSS_RANDOM_HPP
