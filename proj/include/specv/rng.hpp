#pragma once

#include <cmath>
#include <cstdint>

namespace specv {

/// Replication seed: a master key plus a stream index (one stream per MC
/// replication). Substreams (signal vs noise) are derived with disjoint
/// purpose tags, so draws are reproducible independently of execution order.
struct Seed {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;

    Seed with_purpose(std::uint64_t purpose) const;
};

namespace detail {

// SplitMix64 finalizer (Stafford mix13).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a + 0x632be59bd9b4e019ULL * b);
}

}  // namespace detail

inline Seed Seed::with_purpose(std::uint64_t purpose) const {
    return Seed{detail::combine(master, purpose), stream};
}

/// Counter-based generator: the i-th output is a pure function of
/// (key, i), so streams keyed differently are independent and draws do not
/// depend on call interleaving across streams.
class CounterRng {
public:
    explicit CounterRng(const Seed& seed)
        : key_(detail::combine(seed.master, detail::mix64(seed.stream ^ 0xa5a5a5a5a5a5a5a5ULL))) {}

    std::uint64_t next_u64() { return detail::mix64(key_ ^ (counter_++ * 0x9e3779b97f4a7c15ULL)); }

    /// Uniform on (0,1].
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; caches the second draw of each pair.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace specv
