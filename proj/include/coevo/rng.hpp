#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>

#include "coevo/errors.hpp"

namespace coevo {

// Splittable deterministic RNG built on the splitmix64 finalizer.
//
// Every stream is a pure function of the root seed and the chain of
// derive() labels/indices that produced it, so any (iteration, phase, item)
// coordinate regenerates the same draws after a checkpoint resume, and
// per-item streams can be consumed in parallel without ordering effects.
// No std::* distributions are used; their output is implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

  // Child stream keyed by a label. Does not advance this stream.
  Rng derive(std::string_view label) const {
    return Rng(mix(state_ ^ fnv1a(label)), 0);
  }

  // Child stream keyed by an index. Does not advance this stream.
  Rng derive(uint64_t index) const {
    return Rng(mix(state_ ^ mix(index + 0x6a09e667f3bcc909ull)), 0);
  }

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi], inclusive.
  int64_t next_int(int64_t lo, int64_t hi) {
    if (hi < lo) throw InvalidInputError("next_int: hi < lo");
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int64_t>(next_u64() % span);
  }

  // Index sampled proportionally to probs (assumed nonnegative, summing ~1).
  size_t categorical(std::span<const double> probs) {
    if (probs.empty()) throw InvalidInputError("categorical: empty distribution");
    double u = next_double();
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.size() - 1;  // rounding residue
  }

 private:
  Rng(uint64_t raw_state, int) : state_(raw_state) {}

  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  static uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return h;
  }

  uint64_t state_;
};

}  // namespace coevo
