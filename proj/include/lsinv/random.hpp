// Deterministic random streams for the simulation experiments.
//
// A stream is a thin wrapper around mt19937_64 that hands out uniforms in
// [0,1) with a fixed bit-to-double mapping, so identical seeds reproduce
// identical sequences across platforms and compilers.

#pragma once

#include <cstdint>
#include <random>

namespace lsinv {

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  // Uniform draw in [0, 1) with 53 mantissa bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  std::uint64_t next_raw() { return eng_(); }

  // Derives a per-cell seed from a global seed, so experiment cells get
  // independent but reproducible streams.
  static std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t cell_id) {
    // splitmix64 over the combined value
    std::uint64_t z = global_seed + 0x9e3779b97f4a7c15ULL * (cell_id + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static RandomStream for_cell(std::uint64_t global_seed, std::uint64_t cell_id) {
    return RandomStream(derive_seed(global_seed, cell_id));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace lsinv
