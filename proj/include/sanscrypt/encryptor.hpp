// Sporadic-authentication sequential encryption of a `.bench` netlist.
//
// The emitted design adds, next to the original circuit:
//   * an ENC-FSM with one key-checking chain per back-jumping state s_bj,
//     c progress states per chain and a single functional state `auth`;
//   * a back-jumping controller: free-running XNOR LFSR, n-bit counter and
//     a latched period t_bj;
//   * shadow registers that snapshot the original state on every
//     back-jump and restore it on re-authentication;
//   * an XOR corruption network driven by the m-bit word enc_out.
// Everything is lowered to the .bench gate primitives and DFFs.

#ifndef SANSCRYPT_ENCRYPTOR_HPP
#define SANSCRYPT_ENCRYPTOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sanscrypt/netlist.hpp"
#include "sanscrypt/rng.hpp"
#include "sanscrypt/schedule.hpp"

namespace sanscrypt {

struct EncFsmSpec {
    /// [s_bj][p] input pattern expected in chain s_bj at progress p.
    KeyTable key_table;
    /// [s_bj][p] corruption word driven in encrypted state (s_bj, p).
    std::vector<std::vector<std::uint64_t>> enc_out_table;
    unsigned enc_out_width = 0;
};

/// Fills the key table with uniform random patterns of `input_width` bits
/// and the enc_out table with random words that are nonzero on the low
/// `live_bits` bits (0 means all m bits) and differ between consecutive
/// states of a chain whenever more than one admissible word exists.
EncFsmSpec build_enc_fsm(std::size_t input_width, const EncryptConfig& cfg, Rng& rng, unsigned live_bits = 0);

struct XorSite {
    std::string net;       ///< original gate-output net, now driven by the XOR
    std::string pre_net;   ///< renamed net carrying the uncorrupted value
    unsigned enc_bit = 0;  ///< enc_out bit controlling the site

    bool operator==(const XorSite&) const = default;
};

/// ceil(coverage * n_gates) clamped to [1, n_gates]; `clamped` reports a
/// request beyond the available nets.
std::size_t xor_site_count(std::size_t n_gates, double coverage, bool* clamped = nullptr);

struct XorInsertion {
    /// Original netlist plus XOR gates; the m enc_out nets are appended as
    /// extra primary inputs.
    Netlist netlist;
    std::vector<XorSite> sites;
    std::vector<std::string> enc_out_inputs;
    bool clamped = false;
};

/// Picks distinct gate-output nets uniformly at random and routes every
/// reader of each through XOR(net, enc_out[j]), j round-robin over 0..m-1.
XorInsertion insert_xor(const Netlist& nl, unsigned enc_out_width, double coverage, Rng& rng);

struct EncryptionReport {
    std::vector<XorSite> sites;
    bool clamped = false;
    std::size_t added_gates = 0;
    std::size_t added_dffs = 0;

    // Net names of the inserted registers and signals, for inspection.
    std::string auth_reg;
    std::vector<std::string> sbj_regs;
    std::vector<std::string> progress_regs;
    std::vector<std::string> lfsr_regs;
    std::vector<std::string> counter_regs;
    std::vector<std::string> period_regs;
    std::vector<std::string> shadow_regs;  ///< aligned with the original DFF order
    std::vector<std::string> enc_out_nets;
    std::string auth_entry_net;
    std::string back_jump_net;
};

struct EncryptedDesign {
    Netlist netlist;
    KeySchedule schedule;
    EncFsmSpec fsm;
    EncryptionReport report;
};

/// Deterministic in (nl, cfg). Throws ConfigError for invalid parameters or
/// a netlist without inputs or gates.
EncryptedDesign encrypt(const Netlist& nl, const EncryptConfig& cfg);

std::string report_to_json(const EncryptedDesign& design);

}  // namespace sanscrypt

#endif
