#include "sanscrypt/unroll.hpp"

#include <stdexcept>

namespace sanscrypt {

UnrolledCircuit::UnrolledCircuit(const Netlist& base, std::size_t frames) : base_(&base), frames_(frames) {
    if (frames == 0) throw std::invalid_argument("unroll needs at least one frame");
    const std::size_t n_in = base.inputs().size();
    const std::size_t n_ff = base.dffs().size();
    nodes_.push_back({UnrolledNode::Kind::Const0, GateKind::Buff, {}, 0, 0});
    frame_map_.assign(frames, std::vector<NodeId>(base.net_count(), 0));

    for (std::size_t t = 0; t < frames; ++t) {
        auto& map = frame_map_[t];
        for (std::size_t k = 0; k < n_in; ++k) {
            map[base.input_id(k)] = static_cast<NodeId>(nodes_.size());
            nodes_.push_back({UnrolledNode::Kind::Input, GateKind::Buff, {}, static_cast<std::uint32_t>(t), base.input_id(k)});
        }
        for (std::size_t k = 0; k < n_ff; ++k) {
            map[base.dff_q_id(k)] = t == 0 ? NodeId{0} : frame_map_[t - 1][base.dff_d_id(k)];
        }
        for (auto g : base.topo_order()) {
            UnrolledNode n{UnrolledNode::Kind::Gate, base.gates()[g].kind, {}, static_cast<std::uint32_t>(t),
                           base.gate_out_id(g)};
            for (auto in : base.gate_fanin(g)) n.fanin.push_back(map[in]);
            map[base.gate_out_id(g)] = static_cast<NodeId>(nodes_.size());
            nodes_.push_back(std::move(n));
            ++gate_count_;
        }
    }
}

std::vector<std::uint8_t> UnrolledCircuit::evaluate_nodes(std::span<const Bits> frame_inputs) const {
    if (frame_inputs.size() != frames_) throw std::invalid_argument("one input vector per frame is required");
    std::vector<std::uint8_t> v(nodes_.size(), 0);
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        const auto& n = nodes_[id];
        switch (n.kind) {
            case UnrolledNode::Kind::Const0:
                v[id] = 0;
                break;
            case UnrolledNode::Kind::Input: {
                const Bits& vec = frame_inputs[n.frame];
                if (vec.size() != base_->inputs().size()) throw std::invalid_argument("frame input width mismatch");
                v[id] = vec[n.net] & 1U;
                break;
            }
            case UnrolledNode::Kind::Gate: {
                std::uint8_t acc = v[n.fanin[0]];
                for (std::size_t k = 1; k < n.fanin.size(); ++k) {
                    const std::uint8_t x = v[n.fanin[k]];
                    switch (n.gate) {
                        case GateKind::And:
                        case GateKind::Nand: acc &= x; break;
                        case GateKind::Or:
                        case GateKind::Nor: acc |= x; break;
                        default: acc ^= x; break;
                    }
                }
                const bool invert = n.gate == GateKind::Nand || n.gate == GateKind::Nor || n.gate == GateKind::Xnor ||
                                    n.gate == GateKind::Not;
                v[id] = invert ? acc ^ 1U : acc;
                break;
            }
        }
    }
    return v;
}

std::vector<Bits> UnrolledCircuit::evaluate(std::span<const Bits> frame_inputs) const {
    const auto v = evaluate_nodes(frame_inputs);
    std::vector<Bits> out(frames_, Bits(base_->outputs().size()));
    for (std::size_t t = 0; t < frames_; ++t) {
        for (std::size_t k = 0; k < out[t].size(); ++k) out[t][k] = v[output(t, k)];
    }
    return out;
}

UnrolledCircuit unroll(const Netlist& nl, std::size_t frames) { return UnrolledCircuit(nl, frames); }

}  // namespace sanscrypt
