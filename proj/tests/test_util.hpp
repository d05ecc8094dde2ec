// Shared fixtures and independent reference models for the unit tests.

#ifndef SANSCRYPT_TEST_UTIL_HPP
#define SANSCRYPT_TEST_UTIL_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sanscrypt/bench.hpp"
#include "sanscrypt/netlist.hpp"
#include "sanscrypt/rng.hpp"

namespace testutil {

using sanscrypt::Bits;
using sanscrypt::GateKind;
using sanscrypt::NetlistData;

inline std::string bench_dir() { return SANSCRYPT_BENCH_DIR; }

inline sanscrypt::Netlist s27() { return sanscrypt::read_bench_file(bench_dir() + "/s27.bench"); }

inline const char* kToggle =
    "INPUT(en)\n"
    "OUTPUT(q)\n"
    "q = DFF(nq)\n"
    "nq = NOT(q)\n"
    "unused = AND(en, q)\n";

/// Two inputs, two outputs, one DFF; every gate is observable.
inline const char* kToy2 =
    "INPUT(a)\n"
    "INPUT(b)\n"
    "OUTPUT(z)\n"
    "OUTPUT(y)\n"
    "q = DFF(n1)\n"
    "n1 = XOR(a, q)\n"
    "n2 = NAND(n1, b)\n"
    "n3 = NOR(a, q)\n"
    "n4 = OR(n2, b)\n"
    "z = AND(n2, n3)\n"
    "y = XNOR(n4, n1)\n";

/// Evaluates one net by recursive descent over the gate list, looking
/// gates up by name. Shares nothing with the library's topological engine.
class NaiveEvaluator {
public:
    explicit NaiveEvaluator(const NetlistData& d) : d_(d) {
        for (std::size_t g = 0; g < d.gates.size(); ++g) by_out_[d.gates[g].out] = g;
    }

    std::map<std::string, int> run(const Bits& inputs, const Bits& state) const {
        std::map<std::string, int> memo;
        for (std::size_t k = 0; k < d_.inputs.size(); ++k) memo[d_.inputs[k]] = inputs[k];
        for (std::size_t k = 0; k < d_.dffs.size(); ++k) memo[d_.dffs[k].q] = state[k];
        for (const auto& g : d_.gates) value(g.out, memo);
        return memo;
    }

    std::pair<Bits, Bits> step(const Bits& inputs, const Bits& state) const {
        auto memo = run(inputs, state);
        Bits outs, next;
        for (const auto& o : d_.outputs) outs.push_back(static_cast<std::uint8_t>(memo.at(o)));
        for (const auto& ff : d_.dffs) next.push_back(static_cast<std::uint8_t>(memo.at(ff.d)));
        return {outs, next};
    }

private:
    int value(const std::string& net, std::map<std::string, int>& memo) const {
        if (auto it = memo.find(net); it != memo.end()) return it->second;
        const auto& g = d_.gates[by_out_.at(net)];
        std::vector<int> v;
        for (const auto& in : g.ins) v.push_back(value(in, memo));
        int r = 0;
        switch (g.kind) {
            case GateKind::Buff: r = v[0]; break;
            case GateKind::Not: r = !v[0]; break;
            case GateKind::And:
            case GateKind::Nand:
                r = 1;
                for (int x : v) r = r && x;
                if (g.kind == GateKind::Nand) r = !r;
                break;
            case GateKind::Or:
            case GateKind::Nor:
                r = 0;
                for (int x : v) r = r || x;
                if (g.kind == GateKind::Nor) r = !r;
                break;
            case GateKind::Xor:
            case GateKind::Xnor:
                r = 0;
                for (int x : v) r ^= x;
                if (g.kind == GateKind::Xnor) r = !r;
                break;
        }
        memo[net] = r;
        return r;
    }

    const NetlistData& d_;
    std::map<std::string, std::size_t> by_out_;
};

/// Reference cycle loop on top of NaiveEvaluator: outputs per cycle.
inline std::vector<Bits> naive_simulate(const NetlistData& d, const std::vector<Bits>& inputs) {
    NaiveEvaluator ev(d);
    Bits state(d.dffs.size(), 0);
    std::vector<Bits> outs;
    for (const auto& in : inputs) {
        auto [o, next] = ev.step(in, state);
        outs.push_back(o);
        state = next;
    }
    return outs;
}

/// Random valid netlist: gates read only earlier nets, DFFs read any net.
inline NetlistData random_netlist(sanscrypt::Rng& rng, std::size_t n_in, std::size_t n_ff, std::size_t n_gates,
                                  std::size_t n_out) {
    static constexpr GateKind kinds[] = {GateKind::And, GateKind::Nand, GateKind::Or,  GateKind::Nor,
                                         GateKind::Xor, GateKind::Xnor, GateKind::Not, GateKind::Buff};
    NetlistData d;
    d.name = "rnd";
    std::vector<std::string> nets;
    for (std::size_t k = 0; k < n_in; ++k) nets.push_back(d.inputs.emplace_back("i" + std::to_string(k)));
    for (std::size_t k = 0; k < n_ff; ++k) nets.push_back("q" + std::to_string(k));
    for (std::size_t g = 0; g < n_gates; ++g) {
        const GateKind kind = kinds[rng.below(8)];
        std::size_t arity = sanscrypt::is_unary(kind) ? 1 : 2 + rng.below(3);
        std::vector<std::string> ins;
        for (std::size_t a = 0; a < arity; ++a) ins.push_back(nets[rng.below(nets.size())]);
        const std::string out = "g" + std::to_string(g);
        d.gates.push_back({out, kind, ins});
        nets.push_back(out);
    }
    for (std::size_t k = 0; k < n_ff; ++k) d.dffs.push_back({"q" + std::to_string(k), nets[rng.below(nets.size())]});
    const auto picks = rng.sample(nets.size(), n_out);
    for (auto p : picks) d.outputs.push_back(nets[p]);
    return d;
}

}  // namespace testutil

#endif
