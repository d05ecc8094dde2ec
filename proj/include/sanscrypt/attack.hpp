// Oracle-guided sequential SAT attack on encrypted netlists.
//
// For authentication window q the encrypted netlist is unrolled from reset
// through the end of the window plus an observation horizon. Earlier
// windows carry their recovered key patterns, functional gaps carry fixed
// attacker probes, and the window-q inputs are free. Two key copies share
// one distinguishing input sequence over the observation frames; each
// distinguishing sequence is answered by the oracle and added back as an
// input/output constraint until no two keys can be told apart.

#ifndef SANSCRYPT_ATTACK_HPP
#define SANSCRYPT_ATTACK_HPP

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sanscrypt/netlist.hpp"
#include "sanscrypt/schedule.hpp"

namespace sanscrypt {

class AttackError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Black-box working chip: every query starts from reset and returns one
/// output vector per applied input vector. Reentrant.
class Oracle {
public:
    explicit Oracle(Netlist hidden);
    Oracle(const Oracle&) = delete;
    Oracle& operator=(const Oracle&) = delete;

    [[nodiscard]] std::vector<Bits> query(std::span<const Bits> inputs) const;
    [[nodiscard]] std::size_t input_width() const { return hidden_.inputs().size(); }
    [[nodiscard]] std::size_t output_width() const { return hidden_.outputs().size(); }
    [[nodiscard]] std::uint64_t queries() const { return queries_.load(); }

private:
    Netlist hidden_;
    mutable std::atomic<std::uint64_t> queries_{0};
};

enum class WindowStatus { Recovered, NoConsistentKey, BudgetExhausted };
std::string to_string(WindowStatus s);

struct RecoveredWindow {
    std::uint64_t start = 0;
    std::vector<Bits> key;  ///< one input vector per authentication cycle
};

struct WindowAttack {
    std::size_t index = 0;
    std::uint64_t start = 0;
    std::size_t observe_frames = 0;
    std::size_t frames = 0;  ///< unrolled depth of the instance
    WindowStatus status = WindowStatus::NoConsistentKey;
    std::vector<Bits> key;
    std::size_t dip_iterations = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
    std::size_t variables = 0;
    double seconds = 0.0;
};

/// Incremental attacker state: the windows fixed so far and the probes
/// driven on functional cycles.
class KeyRecovery {
public:
    KeyRecovery(const Netlist& enc, const Oracle& oracle, unsigned key_len, std::uint64_t seed);

    /// Attacks the window that starts at `start` (which must lie after every
    /// accepted window) observing `observe` functional cycles after it.
    /// conflict_budget < 0 is unlimited.
    WindowAttack attack_window(std::uint64_t start, std::size_t observe, std::int64_t conflict_budget) const;
    void accept(RecoveredWindow w);

    [[nodiscard]] const std::vector<RecoveredWindow>& accepted() const { return fixed_; }
    /// Attacker probe applied on functional cycle `t`.
    [[nodiscard]] Bits probe(std::uint64_t t) const;

private:
    const Netlist& enc_;
    const Oracle& oracle_;
    unsigned c_;
    std::uint64_t seed_;
    std::vector<RecoveredWindow> fixed_;
};

struct AttackOptions {
    std::vector<std::uint64_t> window_starts;  ///< known timing
    unsigned key_len = 0;
    std::size_t max_seq = 1;
    std::int64_t conflict_budget = -1;  ///< per window
    std::size_t observe_frames = 8;     ///< horizon for the last known window
    std::uint64_t seed = 1;
};

struct AttackResult {
    std::vector<WindowAttack> windows;
    bool truncated = false;  ///< a budget ran out
};

AttackResult recover_key_sequences(const Netlist& enc, const Oracle& oracle, const AttackOptions& opts);

/// Window start cycles from a key schedule.
std::vector<std::uint64_t> schedule_window_starts(const KeySchedule& sched, std::size_t count);
/// Window start cycles read off the netlist itself: the registers named
/// `<prefix>0..` are simulated from reset (their sequence does not depend
/// on the inputs) and replayed through the back-jump timing rule.
std::vector<std::uint64_t> derive_window_starts(const Netlist& enc, unsigned key_len, std::size_t count,
                                                const std::string& prefix = "sc_lfsr_");

/// True when replaying `windows` on the encrypted netlist, with random
/// inputs on every other cycle up to `horizon`, reproduces the oracle's
/// outputs on all functional cycles for every one of `probes` sequences.
bool oracle_consistent(const Netlist& enc, const Oracle& oracle, std::span<const RecoveredWindow> windows,
                       unsigned key_len, std::size_t horizon, std::size_t probes, std::uint64_t seed);

void write_attack_report(std::ostream& out, const AttackResult& r);

}  // namespace sanscrypt

#endif
