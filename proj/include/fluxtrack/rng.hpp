#pragma once

#include <cstdint>
#include <cmath>
#include <initializer_list>

namespace fluxtrack {

// Counter-based random substreams. Every logical stream is keyed by the
// master seed plus a tuple of ids (stage, interval, particle, ...), so the
// numbers a worker draws never depend on execution order or thread count.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t key = seed;
    for (std::uint64_t id : ids) {
        std::uint64_t s = key ^ (id + 0x9e3779b97f4a7c15ull);
        key = splitmix64_next(s);
    }
    return key;
}

class StreamRng {
public:
    explicit StreamRng(std::uint64_t key) : state_(key) {}

    static StreamRng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
        return StreamRng(derive_key(seed, ids));
    }

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // [0, 1)
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // (0, 1]
    double uniform01_open0() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Box-Muller, one value per call; the partner draw is discarded so a
    // stream's output depends only on the call index.
    double gaussian() {
        const double u1 = uniform01_open0();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t state_;
};

// Stage tags for substream derivation.
namespace rng_stage {
inline constexpr std::uint64_t kTransition = 1;  // + interval, particle
inline constexpr std::uint64_t kResample = 2;    // + interval
inline constexpr std::uint64_t kObsNoise = 3;    // + interval
inline constexpr std::uint64_t kInitPrior = 4;   // + particle
}  // namespace rng_stage

}  // namespace fluxtrack
