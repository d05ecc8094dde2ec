// Clause databases, Tseitin gate encodings and DIMACS I/O.

#ifndef SANSCRYPT_CNF_HPP
#define SANSCRYPT_CNF_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sanscrypt/unroll.hpp"

namespace sanscrypt {

/// DIMACS literal: +v / -v for variable v >= 1.
using Lit = int;
using Clause = std::vector<Lit>;

struct VarOrigin {
    std::uint32_t frame = 0;
    std::string net;  ///< empty for auxiliary variables
};

struct Cnf {
    int num_vars = 0;
    std::vector<Clause> clauses;
    std::vector<VarOrigin> annotations;  ///< index v-1 describes variable v

    int new_var(VarOrigin origin = {}) {
        annotations.push_back(std::move(origin));
        return ++num_vars;
    }
    /// Throws std::invalid_argument for an empty clause or an undeclared variable.
    void add(Clause clause);
};

/// Clauses forcing `out` to equal kind(ins). Sink needs `int new_var()` for
/// the chain variables of wide XOR/XNOR gates and `void add(Clause)`.
template <typename Sink>
void encode_gate(Sink& sink, GateKind kind, Lit out, std::span<const Lit> ins) {
    switch (kind) {
        case GateKind::Buff:
            sink.add({-out, ins[0]});
            sink.add({out, -ins[0]});
            return;
        case GateKind::Not:
            sink.add({-out, -ins[0]});
            sink.add({out, ins[0]});
            return;
        case GateKind::And:
        case GateKind::Nand: {
            const Lit y = kind == GateKind::And ? out : -out;
            Clause big{y};
            for (Lit a : ins) {
                sink.add({-y, a});
                big.push_back(-a);
            }
            sink.add(std::move(big));
            return;
        }
        case GateKind::Or:
        case GateKind::Nor: {
            const Lit y = kind == GateKind::Or ? out : -out;
            Clause big{-y};
            for (Lit a : ins) {
                sink.add({y, -a});
                big.push_back(a);
            }
            sink.add(std::move(big));
            return;
        }
        case GateKind::Xor:
        case GateKind::Xnor: {
            Lit acc = ins[0];
            for (std::size_t k = 1; k < ins.size(); ++k) {
                const bool last = k + 1 == ins.size();
                Lit y = last ? (kind == GateKind::Xor ? out : -out) : Lit{sink.new_var()};
                const Lit b = ins[k];
                sink.add({-y, acc, b});
                sink.add({-y, -acc, -b});
                sink.add({y, -acc, b});
                sink.add({y, acc, -b});
                acc = y;
            }
            return;
        }
    }
}

/// One variable per unrolled node (the reset constant included), the gate
/// clauses of every frame, then one unit clause per assumption.
Cnf to_cnf(const UnrolledCircuit& u, std::span<const Lit> assumptions = {});

class DimacsError : public std::runtime_error {
public:
    DimacsError(std::size_t line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

void write_dimacs(std::ostream& out, const Cnf& f);
std::string to_dimacs(const Cnf& f);
/// Accepts `c` comment lines and clauses spanning lines; annotations are left empty.
Cnf parse_dimacs(const std::string& text);

}  // namespace sanscrypt

#endif
