// XNOR-feedback Fibonacci LFSR used as the back-jumping PRNG.
//
// Cell k holds bit k of the state word (bit 0 is the least significant).
// Each step shifts every cell one position up and loads cell 0 with the
// chained XNOR of the tapped cells; tap position t reads cell t-1. With
// XNOR feedback the all-ones word is the degenerate state, so the all-zero
// reset value of a register bank is a valid seed.

#ifndef SANSCRYPT_LFSR_HPP
#define SANSCRYPT_LFSR_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sanscrypt {

class LfsrError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Maximal-length XNOR tap sets for widths 2..16 (Xilinx XAPP052 table).
std::span<const unsigned> default_taps(unsigned width);

class Lfsr {
public:
    static constexpr unsigned max_width = 63;

    /// Throws LfsrError for bad widths, empty or out-of-range taps, taps not
    /// reaching the last cell, or an all-ones seed.
    Lfsr(unsigned width, std::vector<unsigned> taps, std::uint64_t seed);
    /// Uses default_taps(width).
    Lfsr(unsigned width, std::uint64_t seed);

    [[nodiscard]] unsigned width() const { return width_; }
    [[nodiscard]] const std::vector<unsigned>& taps() const { return taps_; }
    [[nodiscard]] std::uint64_t state() const { return state_; }
    [[nodiscard]] std::uint64_t mask() const { return (std::uint64_t{1} << width_) - 1; }

    /// Feedback bit the next step shifts into cell 0.
    [[nodiscard]] std::uint8_t feedback() const;
    /// The register after one clock.
    [[nodiscard]] Lfsr next() const;
    /// Current output word and the register after one clock.
    [[nodiscard]] std::pair<Lfsr, std::uint64_t> step() const { return {next(), state_}; }

    bool operator==(const Lfsr&) const = default;

private:
    unsigned width_;
    std::vector<unsigned> taps_;
    std::uint64_t state_;
};

/// Length of the state cycle through g.state(); enumerates, so width <= 20.
std::uint64_t period(const Lfsr& g);

}  // namespace sanscrypt

#endif
