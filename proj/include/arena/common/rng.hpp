#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace arena {

/// Seeded generator whose draws are identical on every standard library.
/// std::uniform_int_distribution is implementation-defined, so bounded draws
/// use rejection sampling over the raw mt19937_64 output instead.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n)
    {
        if (n == 0)
            throw std::invalid_argument("Rng::below(0)");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        for (;;) {
            const std::uint64_t x = engine_();
            if (x < limit)
                return x % n;
        }
    }

    /// Uniform in [lo, hi], inclusive.
    std::int64_t between(std::int64_t lo, std::int64_t hi)
    {
        const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
        if (span == UINT64_MAX)
            return static_cast<std::int64_t>(engine_());
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + below(span + 1));
    }

    bool chance(std::uint64_t numerator, std::uint64_t denominator)
    {
        return below(denominator) < numerator;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace arena
