// Encryption parameters, the exported key schedule, and the offline replay
// of the back-jumping controller that a trusted key manager runs.

#ifndef SANSCRYPT_SCHEDULE_HPP
#define SANSCRYPT_SCHEDULE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sanscrypt/lfsr.hpp"
#include "sanscrypt/netlist.hpp"

namespace sanscrypt {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct EncryptConfig {
    unsigned lfsr_width = 5;
    std::optional<std::vector<unsigned>> lfsr_taps;
    unsigned enc_out_width = 3;
    unsigned key_len = 8;
    unsigned sbj_bits = 2;
    double coverage = 0.2;
    std::uint64_t master_seed = 1;

    /// Throws ConfigError on out-of-range fields.
    void validate() const;
    [[nodiscard]] std::vector<unsigned> resolved_taps() const;

    bool operator==(const EncryptConfig&) const = default;
};

/// K[s_bj][p]: the p-th input pattern of the key sequence for chain s_bj.
using KeyTable = std::vector<std::vector<Bits>>;

struct KeySchedule {
    static constexpr int current_version = 1;

    int version = current_version;
    std::string circuit;
    unsigned n = 0;
    std::vector<unsigned> taps;
    std::uint64_t reset_seed = 0;
    unsigned c = 0;
    unsigned l = 0;
    std::size_t i = 0;
    KeyTable key_table;
    std::uint64_t master_seed = 0;
    EncryptConfig config;

    [[nodiscard]] Lfsr reset_lfsr() const { return Lfsr(n, taps, reset_seed); }
    /// Throws ConfigError when the table shape disagrees with c, l, i.
    void validate() const;

    bool operator==(const KeySchedule&) const = default;
};

/// s_bj = the low l bits of r.
constexpr std::uint64_t derive_sbj(std::uint64_t r, unsigned l) {
    return l >= 64 ? r : (r & ((std::uint64_t{1} << l) - 1));
}

/// Hex rendering of a bit pattern, bit 0 = least significant, most
/// significant digit first, ceil(width/4) lower-case digits.
std::string bits_to_hex(const Bits& bits);
/// Inverse of bits_to_hex; rejects bad digits and set bits beyond width.
Bits hex_to_bits(std::string_view hex, std::size_t width);

std::string config_to_json(const EncryptConfig& cfg);
EncryptConfig config_from_json(std::string_view text);
EncryptConfig load_config(const std::filesystem::path& path);

std::string schedule_to_json(const KeySchedule& sched);
KeySchedule schedule_from_json(std::string_view text);
KeySchedule load_schedule(const std::filesystem::path& path);

/// One authentication window as the hardware experiences it when every key
/// sequence is applied on time.
struct AuthWindow {
    std::uint64_t start = 0;      ///< first cycle of the window (encrypted mode)
    std::uint64_t chain = 0;      ///< s_bj whose key sequence is expected
    std::uint64_t functional = 0; ///< functional cycles after the window (t_bj)
};

/// Replays the LFSR/counter behaviour offline. Reset puts the design in
/// chain 0; the window that completes on cycle t latches
/// t_bj = max(r(t+1), 1) and the back-jump after the t_bj-th functional
/// cycle u selects chain r(u+1) mod 2^l, where r(t) is the LFSR word on
/// cycle t.
class BackJumpTimeline {
public:
    explicit BackJumpTimeline(const KeySchedule& sched);

    /// Next window in time order.
    AuthWindow next();

private:
    unsigned c_;
    unsigned l_;
    Lfsr lfsr_;                  ///< LFSR word on cycle `cycle_`
    std::uint64_t cycle_ = 0;
    std::uint64_t next_start_ = 0;
    std::uint64_t next_chain_ = 0;

    void advance_to(std::uint64_t cycle);
};

/// The first windows whose start is below `horizon`.
std::vector<AuthWindow> auth_windows(const KeySchedule& sched, std::uint64_t horizon);

}  // namespace sanscrypt

#endif
