// Cycle-accurate zero-delay simulation and the trusted key manager.
//
// Reset convention: every DFF holds 0 on cycle 0. Each cycle evaluates the
// combinational logic on the applied inputs, records the outputs (same-cycle
// observation), then latches the next state.

#ifndef SANSCRYPT_SIMULATOR_HPP
#define SANSCRYPT_SIMULATOR_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sanscrypt/netlist.hpp"
#include "sanscrypt/schedule.hpp"

namespace sanscrypt {

class SimulationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct CycleTag {
    enum class Phase { Auth, Workload };
    Phase phase = Phase::Workload;
    std::uint64_t index = 0;  ///< workload vector consumed; 0 for Auth cycles

    static CycleTag auth() { return {Phase::Auth, 0}; }
    static CycleTag workload(std::uint64_t idx) { return {Phase::Workload, idx}; }
    [[nodiscard]] bool is_workload() const { return phase == Phase::Workload; }
    bool operator==(const CycleTag&) const = default;
};

struct Stimulus {
    std::vector<Bits> vectors;
    std::vector<CycleTag> tags;

    /// Plain workload: vector t is workload index t.
    static Stimulus from_workload(std::vector<Bits> vectors);
};

struct Trace {
    std::vector<Bits> inputs;
    std::vector<Bits> outputs;
    std::vector<Bits> states;  ///< DFF values during the cycle
    std::vector<std::string> probe_names;
    std::vector<Bits> probes;  ///< values of probe_names per cycle

    [[nodiscard]] std::size_t cycles() const { return outputs.size(); }
    bool operator==(const Trace&) const = default;
};

/// Throws SimulationError when the stimulus is shorter than `cycles` or a
/// vector has the wrong width, and std::out_of_range for unknown probes.
Trace simulate(const Netlist& nl, const Stimulus& stim, std::size_t cycles,
               std::span<const std::string> probe_nets = {});

/// Fills one word per primary input for the given cycle; bit lane k of each
/// word belongs to independent run k.
using LaneDriver = std::function<void(std::size_t cycle, std::span<std::uint64_t> input_words)>;

/// Runs 64 independent simulations at once and returns [cycle][output] words.
std::vector<std::vector<std::uint64_t>> simulate_lanes(const Netlist& nl, const LaneDriver& drive, std::size_t cycles);

/// Key-manager stimulus: K[chain] during every authentication window, the
/// workload vectors in order during every functional cycle.
Stimulus trusted_user_stimulus(const KeySchedule& sched, std::span<const Bits> workload, std::size_t cycles);

/// Tags only; identical for every workload of the same schedule.
std::vector<CycleTag> trusted_user_tags(const KeySchedule& sched, std::size_t cycles);

/// Fraction of differing output bits over the masked cycles.
double hamming_distance(const Trace& a, const Trace& b, std::span<const std::size_t> mask);

/// One line per cycle: index, hex inputs, hex outputs, hex DFF state.
void write_trace_text(std::ostream& out, const Trace& trace);
/// Value-change dump of primary inputs, outputs and DFFs.
void write_vcd(std::ostream& out, const Netlist& nl, const Trace& trace);

}  // namespace sanscrypt

#endif
