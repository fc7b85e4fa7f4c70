#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ppnn {

// splitmix64 finalizer; also the documented per-trajectory seed mixer:
// seed_traj = mix64(dataset_seed + trajectory_index).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(a + 0x632be59bd9b4e019ULL * b);
}

// Deterministic standard-normal stream: mt19937_64 + Box-Muller, independent
// of the standard library's distribution internals.
class GaussianGen {
 public:
  explicit GaussianGen(std::uint64_t seed) : eng_(seed) {}

  double next() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

  double uniform01() {
    return (eng_() >> 11) * 0x1.0p-53;  // 53-bit mantissa in [0,1)
  }

  std::uint64_t next_u64() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_ = false;
};

// Fisher-Yates with an explicit bounded draw, so permutations do not depend
// on std::shuffle internals.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    std::uint64_t r;
    do {
      r = eng();
    } while (r < threshold);
    std::swap(v[i - 1], v[r % bound]);
  }
}

}  // namespace ppnn
