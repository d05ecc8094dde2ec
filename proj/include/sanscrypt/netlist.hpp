// Gate-level sequential netlist IR shared by every stage of the toolkit.

#ifndef SANSCRYPT_NETLIST_HPP
#define SANSCRYPT_NETLIST_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sanscrypt {

/// One bit per element, always 0 or 1.
using Bits = std::vector<std::uint8_t>;

enum class GateKind { And, Nand, Or, Nor, Xor, Xnor, Not, Buff };

std::string_view to_string(GateKind kind);
/// Case-insensitive lookup; accepts BUF as an alias of BUFF.
std::optional<GateKind> gate_kind_from_string(std::string_view word);
bool is_unary(GateKind kind);

struct Gate {
    std::string out;
    GateKind kind = GateKind::Buff;
    std::vector<std::string> ins;

    bool operator==(const Gate&) const = default;
};

struct Dff {
    std::string q;
    std::string d;

    bool operator==(const Dff&) const = default;
};

/// Unvalidated netlist contents; the mutable form transforms work on.
struct NetlistData {
    std::string name;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<Gate> gates;
    std::vector<Dff> dffs;

    bool operator==(const NetlistData&) const = default;
};

struct CircuitStats {
    std::size_t n_inputs = 0;
    std::size_t n_outputs = 0;
    std::size_t n_dffs = 0;
    std::size_t n_gates = 0;

    bool operator==(const CircuitStats&) const = default;
};

class NetlistError : public std::runtime_error {
public:
    enum class Kind { DuplicateDefinition, UndefinedNet, CombinationalCycle, BadArity, DuplicateOutput };

    NetlistError(Kind kind, std::string net, const std::string& what)
        : std::runtime_error(what), kind_(kind), net_(std::move(net)) {}

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] const std::string& net() const { return net_; }

private:
    Kind kind_;
    std::string net_;
};

using NetId = std::uint32_t;

/// Validated, immutable netlist.
///
/// Net ids are dense: primary inputs first, then DFF outputs, then gate
/// outputs, each group in declaration order. The constructor checks every
/// structural invariant and precomputes a topological gate order.
class Netlist {
public:
    explicit Netlist(NetlistData data);

    [[nodiscard]] const std::string& name() const { return data_.name; }
    [[nodiscard]] const std::vector<std::string>& inputs() const { return data_.inputs; }
    [[nodiscard]] const std::vector<std::string>& outputs() const { return data_.outputs; }
    [[nodiscard]] const std::vector<Gate>& gates() const { return data_.gates; }
    [[nodiscard]] const std::vector<Dff>& dffs() const { return data_.dffs; }
    [[nodiscard]] const NetlistData& data() const { return data_; }
    [[nodiscard]] CircuitStats stats() const;

    [[nodiscard]] std::size_t net_count() const { return names_.size(); }
    [[nodiscard]] const std::string& net_name(NetId id) const { return names_[id]; }
    [[nodiscard]] std::optional<NetId> find(std::string_view net) const;
    /// Throws std::out_of_range for unknown nets.
    [[nodiscard]] NetId id_of(std::string_view net) const;

    [[nodiscard]] NetId input_id(std::size_t k) const { return static_cast<NetId>(k); }
    [[nodiscard]] NetId dff_q_id(std::size_t k) const { return static_cast<NetId>(data_.inputs.size() + k); }
    [[nodiscard]] NetId gate_out_id(std::size_t g) const {
        return static_cast<NetId>(data_.inputs.size() + data_.dffs.size() + g);
    }
    [[nodiscard]] NetId dff_d_id(std::size_t k) const { return dff_d_[k]; }
    [[nodiscard]] NetId output_id(std::size_t k) const { return output_ids_[k]; }
    [[nodiscard]] std::span<const NetId> gate_fanin(std::size_t g) const {
        return {fanin_.data() + fanin_offset_[g], fanin_offset_[g + 1] - fanin_offset_[g]};
    }
    /// Gate indices in an order where every gate follows its fan-in.
    [[nodiscard]] std::span<const std::uint32_t> topo_order() const { return topo_; }

    /// Gate outputs that feed nothing: no gate, DFF or primary output.
    [[nodiscard]] std::vector<std::string> dangling_nets() const;

    bool operator==(const Netlist& other) const { return data_ == other.data_; }

private:
    NetlistData data_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, NetId> index_;
    std::vector<NetId> fanin_;
    std::vector<std::size_t> fanin_offset_;
    std::vector<NetId> dff_d_;
    std::vector<NetId> output_ids_;
    std::vector<std::uint32_t> topo_;
};

struct CombResult {
    Bits outputs;
    Bits next_state;
};

/// Single combinational evaluation: one value per primary input and per DFF.
CombResult eval_comb(const Netlist& nl, std::span<const std::uint8_t> inputs,
                     std::span<const std::uint8_t> state);

/// Word-parallel evaluation: every bit lane is an independent assignment.
/// `values` holds one word per net; inputs and DFF outputs must be filled
/// in, gate outputs are overwritten.
void eval_words(const Netlist& nl, std::span<std::uint64_t> values);

}  // namespace sanscrypt

#endif
