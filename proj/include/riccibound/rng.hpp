#pragma once
#include <cstdint>

namespace rb {

// Counter-based generator (splitmix64 over a keyed counter). Sample i of a
// stream is a pure function of (seed, stream, i), so parallel loops produce
// the same draws in any schedule.
struct CounterRng {
  uint64_t seed;
  uint64_t stream;

  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t raw(uint64_t i) const {
    uint64_t h = mix(seed ^ 0x6a09e667f3bcc909ULL);
    h = mix(h ^ stream);
    return mix(h ^ i);
  }

  // Uniform in [0,1). Lane l lets one sample index feed several coordinates.
  double uniform(uint64_t i, uint64_t lane = 0) const {
    uint64_t r = mix(raw(i) ^ (0x9e3779b97f4a7c15ULL * (lane + 1)));
    return (r >> 11) * 0x1.0p-53;
  }
};

}  // namespace rb
