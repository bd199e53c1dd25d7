#pragma once

#include <cstdint>

namespace vinedist {

// Counter-based uniform generator built on the splitmix64 finalizer.
//
// Every draw is a pure function of (seed, stream, counter), so consumers can
// read from disjoint streams in any order (or in parallel) and still produce
// bit-identical results for a given seed. `uniform(i)` returns the i-th value
// of the stream; `next()` walks the stream sequentially.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream * 0x9e3779b97f4a7c15ULL + 0xd1b54a32d192ed03ULL))) {}

    // i-th value of the stream, in the open interval (0, 1)
    double uniform(std::uint64_t i) const {
        const std::uint64_t z = mix(key_ + (i + 1) * 0x9e3779b97f4a7c15ULL);
        return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
    }

    double next() { return uniform(counter_++); }

    std::uint64_t raw(std::uint64_t i) const { return mix(key_ + (i + 1) * 0x9e3779b97f4a7c15ULL); }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace vinedist
