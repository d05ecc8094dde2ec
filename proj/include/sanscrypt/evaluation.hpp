// Corruptibility experiments, analytic security/overhead models and
// structural overhead reporting.

#ifndef SANSCRYPT_EVALUATION_HPP
#define SANSCRYPT_EVALUATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sanscrypt/encryptor.hpp"
#include "sanscrypt/netlist.hpp"
#include "sanscrypt/schedule.hpp"
#include "sanscrypt/simulator.hpp"

namespace sanscrypt {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Case 1: key manager applies every sequence on time. Case 2: no key is
/// ever applied. Case 3: only the reset sequence K[0], then plain workload.
enum class CaseId { Case1 = 1, Case2 = 2, Case3 = 3 };

std::string to_string(CaseId id);
CaseId case_from_int(int k);

struct HdReport {
    std::string circuit;
    EncryptConfig config;
    CaseId case_id = CaseId::Case1;
    std::size_t n_vectors = 0;
    std::size_t cycles = 0;
    std::uint64_t seed = 0;
    std::size_t mask_cycles = 0;
    double mean_hd = 0.0;
    std::vector<double> run_hd;
};

/// Workload vector `index` of random run `run`; the stream for a run depends
/// only on (seed, run).
class WorkloadStream {
public:
    WorkloadStream(std::uint64_t seed, std::uint64_t run, std::size_t width);
    Bits next();

private:
    Rng rng_;
    std::size_t width_;
};

/// Cycles the key manager spends in functional mode (the HD mask shared by
/// all three cases). Throws SimulationError when it is empty.
std::vector<std::size_t> functional_mask(const KeySchedule& sched, std::size_t cycles);

/// Simulates `n_vectors` random workloads on both circuits and averages the
/// output Hamming distance over the functional mask. Runs are evaluated 64
/// at a time in bit lanes and may be spread over worker threads; results
/// do not depend on the worker count.
HdReport run_case(const Netlist& orig, const Netlist& enc, const KeySchedule& sched, CaseId case_id,
                  std::size_t n_vectors, std::size_t cycles, std::uint64_t seed, unsigned workers = 0);
HdReport run_case(const Netlist& orig, const EncryptedDesign& enc, CaseId case_id, std::size_t n_vectors,
                  std::size_t cycles, std::uint64_t seed, unsigned workers = 0);

/// Encrypted-design stimulus and golden index for one run of a case, as
/// used by run_case; exposed so the lane engine can be cross-checked.
struct CaseStimulus {
    Stimulus encrypted;                      ///< vectors applied to the encrypted netlist
    std::vector<Bits> workload;              ///< vectors applied to the original netlist
    std::vector<std::size_t> mask;           ///< cycles that are scored
    std::vector<std::size_t> golden_index;   ///< workload index compared at each mask cycle
};
CaseStimulus case_stimulus(const KeySchedule& sched, CaseId case_id, std::size_t cycles, std::uint64_t seed,
                           std::uint64_t run);

/// N_prng * 2^(i*c - 1) with N_prng = 2^n; exact.
BigInt brute_force_effort(unsigned key_bits, unsigned cycles, unsigned prng_bits);
/// t_a / 2^(n-1); exact.
Rational cycle_delay_overhead(std::uint64_t t_a, unsigned prng_bits);

struct DelayPoint {
    std::uint64_t t_a = 0;
    unsigned prng_bits = 0;
    Rational overhead;
};
/// Average cycle-delay overhead curves; defaults reproduce t_a in {8,16,64,128}.
std::vector<DelayPoint> cycle_delay_sweep(const std::vector<std::uint64_t>& t_a_values = {8, 16, 64, 128},
                                          unsigned min_bits = 1, unsigned max_bits = 16);

/// Scientific rendering with `digits` significant digits, e.g. "5.93e79".
std::string to_scientific(const BigInt& value, unsigned digits = 3);

struct OverheadReport {
    CircuitStats original;
    CircuitStats encrypted;
    std::size_t added_gates = 0;
    std::size_t added_dffs = 0;
    double gate_overhead_pct = 0.0;
    std::optional<double> dff_overhead_pct;  ///< empty when the original has no DFF
    std::size_t xor_sites = 0;
    double achieved_coverage = 0.0;
    /// Shadow registers + LFSR + counter + ENC-FSM state bits.
    std::size_t min_added_dffs = 0;
};
OverheadReport overhead_report(const Netlist& orig, const EncryptedDesign& enc);

std::string hd_reports_to_json(const std::vector<HdReport>& reports);
std::string hd_reports_to_csv(const std::vector<HdReport>& reports);
std::string overhead_to_json(const OverheadReport& r);

}  // namespace sanscrypt

#endif
