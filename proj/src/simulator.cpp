#include "sanscrypt/simulator.hpp"

#include <ostream>

namespace sanscrypt {

Stimulus Stimulus::from_workload(std::vector<Bits> vectors) {
    Stimulus s;
    s.tags.reserve(vectors.size());
    for (std::size_t t = 0; t < vectors.size(); ++t) s.tags.push_back(CycleTag::workload(t));
    s.vectors = std::move(vectors);
    return s;
}

Trace simulate(const Netlist& nl, const Stimulus& stim, std::size_t cycles, std::span<const std::string> probe_nets) {
    if (stim.vectors.size() < cycles) {
        throw SimulationError("stimulus provides " + std::to_string(stim.vectors.size()) + " vectors, " +
                              std::to_string(cycles) + " cycles requested");
    }
    std::vector<NetId> probe_ids;
    for (const auto& p : probe_nets) probe_ids.push_back(nl.id_of(p));

    const std::size_t n_in = nl.inputs().size();
    const std::size_t n_ff = nl.dffs().size();
    std::vector<std::uint64_t> values(nl.net_count(), 0);
    Bits state(n_ff, 0);

    Trace trace;
    trace.probe_names.assign(probe_nets.begin(), probe_nets.end());
    trace.inputs.reserve(cycles);
    trace.outputs.reserve(cycles);
    trace.states.reserve(cycles);
    for (std::size_t t = 0; t < cycles; ++t) {
        const Bits& vec = stim.vectors[t];
        if (vec.size() != n_in) {
            throw SimulationError("stimulus vector " + std::to_string(t) + " has width " + std::to_string(vec.size()) +
                                  ", netlist has " + std::to_string(n_in) + " inputs");
        }
        for (std::size_t k = 0; k < n_in; ++k) values[nl.input_id(k)] = vec[k] & 1U;
        for (std::size_t k = 0; k < n_ff; ++k) values[nl.dff_q_id(k)] = state[k];
        eval_words(nl, values);

        Bits outs(nl.outputs().size());
        for (std::size_t k = 0; k < outs.size(); ++k) outs[k] = static_cast<std::uint8_t>(values[nl.output_id(k)] & 1U);
        Bits probes(probe_ids.size());
        for (std::size_t k = 0; k < probes.size(); ++k) probes[k] = static_cast<std::uint8_t>(values[probe_ids[k]] & 1U);

        trace.inputs.push_back(vec);
        trace.outputs.push_back(std::move(outs));
        trace.states.push_back(state);
        trace.probes.push_back(std::move(probes));
        for (std::size_t k = 0; k < n_ff; ++k) state[k] = static_cast<std::uint8_t>(values[nl.dff_d_id(k)] & 1U);
    }
    return trace;
}

std::vector<std::vector<std::uint64_t>> simulate_lanes(const Netlist& nl, const LaneDriver& drive, std::size_t cycles) {
    const std::size_t n_in = nl.inputs().size();
    const std::size_t n_ff = nl.dffs().size();
    const std::size_t n_out = nl.outputs().size();
    std::vector<std::uint64_t> values(nl.net_count(), 0);
    std::vector<std::uint64_t> state(n_ff, 0);
    std::vector<std::uint64_t> in_words(n_in, 0);
    std::vector<std::vector<std::uint64_t>> outputs(cycles, std::vector<std::uint64_t>(n_out, 0));

    for (std::size_t t = 0; t < cycles; ++t) {
        drive(t, in_words);
        for (std::size_t k = 0; k < n_in; ++k) values[nl.input_id(k)] = in_words[k];
        for (std::size_t k = 0; k < n_ff; ++k) values[nl.dff_q_id(k)] = state[k];
        eval_words(nl, values);
        for (std::size_t k = 0; k < n_out; ++k) outputs[t][k] = values[nl.output_id(k)];
        for (std::size_t k = 0; k < n_ff; ++k) state[k] = values[nl.dff_d_id(k)];
    }
    return outputs;
}

std::vector<CycleTag> trusted_user_tags(const KeySchedule& sched, std::size_t cycles) {
    std::vector<CycleTag> tags;
    tags.reserve(cycles);
    BackJumpTimeline timeline(sched);
    std::uint64_t workload_idx = 0;
    while (tags.size() < cycles) {
        const auto w = timeline.next();
        for (unsigned p = 0; p < sched.c && tags.size() < cycles; ++p) tags.push_back(CycleTag::auth());
        for (std::uint64_t f = 0; f < w.functional && tags.size() < cycles; ++f) {
            tags.push_back(CycleTag::workload(workload_idx++));
        }
    }
    return tags;
}

Stimulus trusted_user_stimulus(const KeySchedule& sched, std::span<const Bits> workload, std::size_t cycles) {
    sched.validate();
    Stimulus stim;
    stim.vectors.reserve(cycles);
    stim.tags.reserve(cycles);
    BackJumpTimeline timeline(sched);
    std::uint64_t workload_idx = 0;
    while (stim.tags.size() < cycles) {
        const auto w = timeline.next();
        for (unsigned p = 0; p < sched.c && stim.tags.size() < cycles; ++p) {
            stim.vectors.push_back(sched.key_table[w.chain][p]);
            stim.tags.push_back(CycleTag::auth());
        }
        for (std::uint64_t f = 0; f < w.functional && stim.tags.size() < cycles; ++f) {
            if (workload_idx >= workload.size()) {
                throw SimulationError("workload has " + std::to_string(workload.size()) +
                                      " vectors, more are needed to fill " + std::to_string(cycles) + " cycles");
            }
            const Bits& vec = workload[workload_idx];
            if (vec.size() != sched.i) {
                throw SimulationError("workload vector width " + std::to_string(vec.size()) +
                                      " differs from the key schedule's input width " + std::to_string(sched.i));
            }
            stim.vectors.push_back(vec);
            stim.tags.push_back(CycleTag::workload(workload_idx++));
        }
    }
    return stim;
}

double hamming_distance(const Trace& a, const Trace& b, std::span<const std::size_t> mask) {
    if (mask.empty()) throw SimulationError("hamming distance over an empty cycle mask");
    std::size_t width = 0;
    std::size_t differing = 0;
    for (auto t : mask) {
        if (t >= a.outputs.size() || t >= b.outputs.size()) throw SimulationError("mask cycle beyond trace length");
        const Bits& x = a.outputs[t];
        const Bits& y = b.outputs[t];
        if (x.size() != y.size()) throw SimulationError("traces have different output widths");
        width = x.size();
        for (std::size_t k = 0; k < x.size(); ++k) differing += (x[k] != y[k]);
    }
    if (width == 0) throw SimulationError("traces have no outputs");
    return static_cast<double>(differing) / static_cast<double>(width * mask.size());
}

namespace {

std::string hex_or_dash(const Bits& bits) { return bits.empty() ? "-" : bits_to_hex(bits); }

std::string vcd_id(std::size_t k) {
    std::string id;
    do {
        id.push_back(static_cast<char>('!' + k % 94));
        k /= 94;
    } while (k != 0);
    return id;
}

}  // namespace

void write_trace_text(std::ostream& out, const Trace& trace) {
    out << "# cycle inputs outputs state\n";
    for (std::size_t t = 0; t < trace.cycles(); ++t) {
        out << t << ' ' << hex_or_dash(trace.inputs[t]) << ' ' << hex_or_dash(trace.outputs[t]) << ' '
            << hex_or_dash(trace.states[t]) << '\n';
    }
}

void write_vcd(std::ostream& out, const Netlist& nl, const Trace& trace) {
    struct Signal {
        std::string name;
        std::string id;
    };
    std::vector<Signal> sigs;
    for (const auto& n : nl.inputs()) sigs.push_back({n, vcd_id(sigs.size())});
    for (const auto& n : nl.outputs()) sigs.push_back({n, vcd_id(sigs.size())});
    for (const auto& ff : nl.dffs()) sigs.push_back({ff.q, vcd_id(sigs.size())});

    out << "$timescale 1ns $end\n$scope module " << nl.name() << " $end\n";
    for (const auto& s : sigs) out << "$var wire 1 " << s.id << ' ' << s.name << " $end\n";
    out << "$upscope $end\n$enddefinitions $end\n";

    std::vector<int> last(sigs.size(), -1);
    for (std::size_t t = 0; t < trace.cycles(); ++t) {
        out << '#' << t << '\n';
        std::size_t k = 0;
        auto emit = [&](const Bits& bits) {
            for (auto v : bits) {
                if (last[k] != v) {
                    out << static_cast<int>(v) << sigs[k].id << '\n';
                    last[k] = v;
                }
                ++k;
            }
        };
        emit(trace.inputs[t]);
        emit(trace.outputs[t]);
        emit(trace.states[t]);
    }
    out << '#' << trace.cycles() << '\n';
}

}  // namespace sanscrypt
