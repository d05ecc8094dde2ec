// Portable seeded randomness. The standard distributions are
// implementation-defined, so bounded draws are done here to keep encrypted
// netlists and experiment reports byte-identical across toolchains.

#ifndef SANSCRYPT_RNG_HPP
#define SANSCRYPT_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace sanscrypt {

/// splitmix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix_seed(seed ^ mix_seed(stream))) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, bound); bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
        std::uint64_t x = 0;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

    std::vector<std::uint8_t> bits(std::size_t count) {
        std::vector<std::uint8_t> out(count);
        for (auto& b : out) b = bit();
        return out;
    }

    /// k distinct values from [0, n), in draw order (partial Fisher-Yates).
    std::vector<std::size_t> sample(std::size_t n, std::size_t k) {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        if (k > n) k = n;
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::size_t>(below(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace sanscrypt

#endif
