#include "sanscrypt/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <unordered_set>

namespace sanscrypt {

std::string_view to_string(GateKind kind) {
    switch (kind) {
        case GateKind::And: return "AND";
        case GateKind::Nand: return "NAND";
        case GateKind::Or: return "OR";
        case GateKind::Nor: return "NOR";
        case GateKind::Xor: return "XOR";
        case GateKind::Xnor: return "XNOR";
        case GateKind::Not: return "NOT";
        case GateKind::Buff: return "BUFF";
    }
    return "?";
}

std::optional<GateKind> gate_kind_from_string(std::string_view word) {
    std::string up(word);
    for (char& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (up == "AND") return GateKind::And;
    if (up == "NAND") return GateKind::Nand;
    if (up == "OR") return GateKind::Or;
    if (up == "NOR") return GateKind::Nor;
    if (up == "XOR") return GateKind::Xor;
    if (up == "XNOR") return GateKind::Xnor;
    if (up == "NOT" || up == "INV") return GateKind::Not;
    if (up == "BUFF" || up == "BUF") return GateKind::Buff;
    return std::nullopt;
}

bool is_unary(GateKind kind) { return kind == GateKind::Not || kind == GateKind::Buff; }

Netlist::Netlist(NetlistData data) : data_(std::move(data)) {
    using K = NetlistError::Kind;
    const std::size_t n_nets = data_.inputs.size() + data_.dffs.size() + data_.gates.size();
    names_.reserve(n_nets);
    index_.reserve(n_nets * 2);

    auto define = [&](const std::string& net) {
        auto [it, inserted] = index_.emplace(net, static_cast<NetId>(names_.size()));
        if (!inserted) throw NetlistError(K::DuplicateDefinition, net, "net '" + net + "' is defined more than once");
        names_.push_back(net);
    };
    for (const auto& in : data_.inputs) define(in);
    for (const auto& ff : data_.dffs) define(ff.q);
    for (const auto& g : data_.gates) define(g.out);

    auto resolve = [&](const std::string& net, const std::string& user) {
        auto it = index_.find(net);
        if (it == index_.end()) {
            throw NetlistError(K::UndefinedNet, net, "net '" + net + "' used by '" + user + "' is never defined");
        }
        return it->second;
    };

    fanin_offset_.reserve(data_.gates.size() + 1);
    fanin_offset_.push_back(0);
    for (const auto& g : data_.gates) {
        const bool ok = is_unary(g.kind) ? g.ins.size() == 1 : g.ins.size() >= 2;
        if (!ok) {
            throw NetlistError(K::BadArity, g.out,
                               "gate '" + g.out + "' of kind " + std::string(to_string(g.kind)) + " has " +
                                   std::to_string(g.ins.size()) + " inputs");
        }
        for (const auto& in : g.ins) fanin_.push_back(resolve(in, g.out));
        fanin_offset_.push_back(fanin_.size());
    }
    dff_d_.reserve(data_.dffs.size());
    for (const auto& ff : data_.dffs) dff_d_.push_back(resolve(ff.d, ff.q));

    std::unordered_set<std::string> seen_outputs;
    for (const auto& out : data_.outputs) {
        if (!seen_outputs.insert(out).second) {
            throw NetlistError(K::DuplicateOutput, out, "output '" + out + "' is listed more than once");
        }
        output_ids_.push_back(resolve(out, "OUTPUT"));
    }

    // Kahn's algorithm over gate-to-gate edges; sources are inputs and DFF outputs.
    const NetId first_gate = gate_out_id(0);
    std::vector<std::uint32_t> pending(data_.gates.size(), 0);
    std::vector<std::vector<std::uint32_t>> readers(data_.gates.size());
    for (std::uint32_t g = 0; g < data_.gates.size(); ++g) {
        for (NetId in : gate_fanin(g)) {
            if (in >= first_gate) {
                ++pending[g];
                readers[in - first_gate].push_back(g);
            }
        }
    }
    std::deque<std::uint32_t> ready;
    for (std::uint32_t g = 0; g < data_.gates.size(); ++g) {
        if (pending[g] == 0) ready.push_back(g);
    }
    topo_.reserve(data_.gates.size());
    while (!ready.empty()) {
        const auto g = ready.front();
        ready.pop_front();
        topo_.push_back(g);
        for (auto r : readers[g]) {
            if (--pending[r] == 0) ready.push_back(r);
        }
    }
    if (topo_.size() != data_.gates.size()) {
        auto stuck = std::find_if(pending.begin(), pending.end(), [](auto p) { return p != 0; });
        const auto& net = data_.gates[static_cast<std::size_t>(stuck - pending.begin())].out;
        throw NetlistError(K::CombinationalCycle, net, "combinational cycle through net '" + net + "'");
    }
}

CircuitStats Netlist::stats() const {
    return {data_.inputs.size(), data_.outputs.size(), data_.dffs.size(), data_.gates.size()};
}

std::optional<NetId> Netlist::find(std::string_view net) const {
    auto it = index_.find(std::string(net));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

NetId Netlist::id_of(std::string_view net) const {
    auto id = find(net);
    if (!id) throw std::out_of_range("unknown net '" + std::string(net) + "'");
    return *id;
}

std::vector<std::string> Netlist::dangling_nets() const {
    std::vector<bool> used(net_count(), false);
    for (NetId id : fanin_) used[id] = true;
    for (NetId id : dff_d_) used[id] = true;
    for (NetId id : output_ids_) used[id] = true;
    std::vector<std::string> out;
    for (std::size_t g = 0; g < data_.gates.size(); ++g) {
        if (!used[gate_out_id(g)]) out.push_back(data_.gates[g].out);
    }
    return out;
}

void eval_words(const Netlist& nl, std::span<std::uint64_t> values) {
    const auto& gates = nl.gates();
    for (auto g : nl.topo_order()) {
        auto fanin = nl.gate_fanin(g);
        std::uint64_t acc = values[fanin[0]];
        const GateKind kind = gates[g].kind;
        switch (kind) {
            case GateKind::And:
            case GateKind::Nand:
                for (std::size_t k = 1; k < fanin.size(); ++k) acc &= values[fanin[k]];
                break;
            case GateKind::Or:
            case GateKind::Nor:
                for (std::size_t k = 1; k < fanin.size(); ++k) acc |= values[fanin[k]];
                break;
            case GateKind::Xor:
            case GateKind::Xnor:
                for (std::size_t k = 1; k < fanin.size(); ++k) acc ^= values[fanin[k]];
                break;
            case GateKind::Not:
            case GateKind::Buff:
                break;
        }
        if (kind == GateKind::Nand || kind == GateKind::Nor || kind == GateKind::Xnor || kind == GateKind::Not) {
            acc = ~acc;
        }
        values[nl.gate_out_id(g)] = acc;
    }
}

CombResult eval_comb(const Netlist& nl, std::span<const std::uint8_t> inputs, std::span<const std::uint8_t> state) {
    if (inputs.size() != nl.inputs().size() || state.size() != nl.dffs().size()) {
        throw std::invalid_argument("eval_comb: assignment width does not match the netlist");
    }
    std::vector<std::uint64_t> values(nl.net_count(), 0);
    for (std::size_t k = 0; k < inputs.size(); ++k) values[nl.input_id(k)] = inputs[k] & 1U;
    for (std::size_t k = 0; k < state.size(); ++k) values[nl.dff_q_id(k)] = state[k] & 1U;
    eval_words(nl, values);

    CombResult result;
    result.outputs.reserve(nl.outputs().size());
    for (std::size_t k = 0; k < nl.outputs().size(); ++k) {
        result.outputs.push_back(static_cast<std::uint8_t>(values[nl.output_id(k)] & 1U));
    }
    result.next_state.reserve(nl.dffs().size());
    for (std::size_t k = 0; k < nl.dffs().size(); ++k) {
        result.next_state.push_back(static_cast<std::uint8_t>(values[nl.dff_d_id(k)] & 1U));
    }
    return result;
}

}  // namespace sanscrypt
