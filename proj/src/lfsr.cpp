#include "sanscrypt/lfsr.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace sanscrypt {

namespace {

const std::array<std::vector<unsigned>, 17> kTapTable = {{
    {},
    {},
    {2, 1},
    {3, 2},
    {4, 3},
    {5, 3},
    {6, 5},
    {7, 6},
    {8, 6, 5, 4},
    {9, 5},
    {10, 7},
    {11, 9},
    {12, 6, 4, 1},
    {13, 4, 3, 1},
    {14, 5, 3, 1},
    {15, 14},
    {16, 15, 13, 4},
}};

}  // namespace

std::span<const unsigned> default_taps(unsigned width) {
    if (width < 2 || width >= kTapTable.size()) {
        throw LfsrError("no built-in tap set for width " + std::to_string(width) + " (2..16 available)");
    }
    return kTapTable[width];
}

Lfsr::Lfsr(unsigned width, std::vector<unsigned> taps, std::uint64_t seed)
    : width_(width), taps_(std::move(taps)), state_(seed) {
    if (width_ < 1 || width_ > max_width) throw LfsrError("LFSR width must be in 1.." + std::to_string(max_width));
    if (taps_.empty()) throw LfsrError("LFSR needs at least one tap");
    for (unsigned t : taps_) {
        if (t < 1 || t > width_) throw LfsrError("tap " + std::to_string(t) + " outside 1.." + std::to_string(width_));
    }
    std::sort(taps_.begin(), taps_.end(), std::greater<>());
    if (std::adjacent_find(taps_.begin(), taps_.end()) != taps_.end()) throw LfsrError("duplicate tap");
    if (taps_.front() != width_) throw LfsrError("highest tap must equal the width");
    if (seed > mask()) throw LfsrError("seed wider than the register");
    if (seed == mask()) throw LfsrError("all-ones seed is the XNOR-LFSR lock-up state");
}

Lfsr::Lfsr(unsigned width, std::uint64_t seed) : Lfsr(width, [&] {
    auto t = default_taps(width);
    return std::vector<unsigned>(t.begin(), t.end());
}(), seed) {}

std::uint8_t Lfsr::feedback() const {
    // Chained two-input XNORs: t1 XNOR t2 XNOR ... ; a single tap passes through.
    std::uint8_t fb = static_cast<std::uint8_t>((state_ >> (taps_[0] - 1)) & 1U);
    for (std::size_t k = 1; k < taps_.size(); ++k) {
        const auto bit = static_cast<std::uint8_t>((state_ >> (taps_[k] - 1)) & 1U);
        fb = static_cast<std::uint8_t>(!(fb ^ bit));
    }
    return fb;
}

Lfsr Lfsr::next() const {
    Lfsr out = *this;
    out.state_ = ((state_ << 1) | feedback()) & mask();
    return out;
}

std::uint64_t period(const Lfsr& g) {
    if (g.width() > 20) throw LfsrError("period enumeration limited to width <= 20");
    std::vector<std::uint32_t> first_seen(std::size_t{1} << g.width(), 0);
    Lfsr cur = g;
    for (std::uint32_t step = 1;; ++step) {
        auto& slot = first_seen[cur.state()];
        if (slot != 0) return step - slot;
        slot = step;
        cur = cur.next();
    }
}

}  // namespace sanscrypt
