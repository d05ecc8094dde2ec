// Time-frame expansion of a sequential netlist into one combinational graph.

#ifndef SANSCRYPT_UNROLL_HPP
#define SANSCRYPT_UNROLL_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "sanscrypt/netlist.hpp"

namespace sanscrypt {

using NodeId = std::uint32_t;

struct UnrolledNode {
    enum class Kind { Input, Const0, Gate };
    Kind kind = Kind::Input;
    GateKind gate = GateKind::Buff;
    std::vector<NodeId> fanin;
    std::uint32_t frame = 0;
    NetId net = 0;  ///< base net this node copies
};

/// Node 0 is the reset constant; frame t's DFF outputs alias frame t-1's
/// next-state nodes, so only inputs and gates are replicated.
class UnrolledCircuit {
public:
    UnrolledCircuit(const Netlist& base, std::size_t frames);

    [[nodiscard]] const Netlist& base() const { return *base_; }
    [[nodiscard]] std::size_t frames() const { return frames_; }
    [[nodiscard]] std::span<const UnrolledNode> nodes() const { return nodes_; }
    [[nodiscard]] std::size_t gate_count() const { return gate_count_; }

    /// Node carrying base net `net` in frame `t`.
    [[nodiscard]] NodeId node(std::size_t t, NetId net) const { return frame_map_[t][net]; }
    [[nodiscard]] NodeId input(std::size_t t, std::size_t k) const { return node(t, base_->input_id(k)); }
    [[nodiscard]] NodeId output(std::size_t t, std::size_t k) const { return node(t, base_->output_id(k)); }
    [[nodiscard]] NodeId state(std::size_t t, std::size_t k) const { return node(t, base_->dff_q_id(k)); }
    [[nodiscard]] NodeId next_state(std::size_t t, std::size_t k) const { return node(t, base_->dff_d_id(k)); }

    /// Evaluates every node for the given per-frame input vectors and
    /// returns the per-frame primary outputs.
    [[nodiscard]] std::vector<Bits> evaluate(std::span<const Bits> frame_inputs) const;
    [[nodiscard]] std::vector<std::uint8_t> evaluate_nodes(std::span<const Bits> frame_inputs) const;

private:
    const Netlist* base_;
    std::size_t frames_;
    std::size_t gate_count_ = 0;
    std::vector<UnrolledNode> nodes_;
    std::vector<std::vector<NodeId>> frame_map_;
};

/// Throws std::invalid_argument when frames is 0. The base netlist must
/// outlive the result.
UnrolledCircuit unroll(const Netlist& nl, std::size_t frames);

}  // namespace sanscrypt

#endif
