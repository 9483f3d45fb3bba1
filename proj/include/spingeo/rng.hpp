#pragma once

#include <cstdint>

namespace spingeo {

// Counter-based generator built on the splitmix64 finalizer:
//   out(key, i) = mix64(key + (i+1) * 0x9e3779b97f4a7c15).
// Streams derived with split() are independent for distinct labels, and a
// generator is fully determined by (key, counter), so sequences are
// reproducible across platforms and languages.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key = 0) : key_(key) {}

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ull);
  }

  // uniform in [0,1), 53 mantissa bits
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [-1,1)
  double symmetric() { return 2.0 * uniform() - 1.0; }

  CounterRng split(std::uint64_t label) const {
    return CounterRng(mix64(key_ ^ mix64(label + 0x9e3779b97f4a7c15ull)));
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace spingeo
