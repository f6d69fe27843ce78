#ifndef EWSMOOTH_RNG_HPP
#define EWSMOOTH_RNG_HPP

#include <cmath>
#include <cstdint>

namespace ewsmooth {

// Counter-based stream built on the SplitMix64 mixer. Each stream is keyed
// by (master seed, stream index), so replication r draws the same noise no
// matter which thread runs it or in what order.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : state_(key) {}

    static std::uint64_t derive_key(std::uint64_t master_seed,
                                    std::uint64_t stream,
                                    std::uint64_t purpose = 0) {
        std::uint64_t k = mix(master_seed + 0x9E3779B97F4A7C15ULL);
        k = mix(k ^ (stream + 0xBF58476D1CE4E5B9ULL));
        if (purpose != 0) k = mix(k ^ (purpose + 0x94D049BB133111EBULL));
        return k;
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform on (0,1); never returns 0, safe under log().
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second draw of each pair is cached.
    double next_normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace ewsmooth

#endif
