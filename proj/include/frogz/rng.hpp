#pragma once

#include <cstdint>
#include <limits>

namespace frogz {

/// What a random stream is used for. Part of the stream key, so two draws
/// for the same particle but different purposes never share randomness.
enum class Purpose : std::uint8_t {
    Occupancy = 1,
    SurvivalParameter = 2,
    Walk = 3,
    LeftMarginal = 4,
    Coupling = 5,
    Spreaders = 6,
    Radius = 7,
    Generic = 8,
};

/// Coordinates of one random stream.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t replication = 0;
    std::int64_t vertex = 0;
    std::uint64_t particle = 0;
    Purpose purpose = Purpose::Generic;

    SeedSpec with_purpose(Purpose p) const {
        SeedSpec s = *this;
        s.purpose = p;
        return s;
    }
    SeedSpec at(std::int64_t v, std::uint64_t particle_index, Purpose p) const {
        SeedSpec s = *this;
        s.vertex = v;
        s.particle = particle_index;
        s.purpose = p;
        return s;
    }
};

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t absorb(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ mix64(v + kGolden));
}

}  // namespace detail

/// Counter-based stream: the k-th output is a pure function of (key, k).
/// Satisfies UniformRandomBitGenerator so it can drive <random> distributions.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit Stream(const SeedSpec& s) : key_(key_of(s)) {}

    static constexpr std::uint64_t key_of(const SeedSpec& s) {
        std::uint64_t h = detail::mix64(s.master_seed ^ 0x6A09E667F3BCC908ULL);
        h = detail::absorb(h, s.replication);
        h = detail::absorb(h, static_cast<std::uint64_t>(s.vertex));
        h = detail::absorb(h, s.particle);
        h = detail::absorb(h, static_cast<std::uint64_t>(s.purpose));
        return h;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return at(counter_++); }

    /// Random access to the k-th output without advancing.
    result_type at(std::uint64_t k) const {
        return detail::mix64(detail::mix64(key_ + k * detail::kGolden) ^ key_);
    }

    /// Uniform on the open interval (0,1); never returns 0 or 1.
    double uniform() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace frogz
