#include "sanscrypt/evaluation.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace sanscrypt {

std::string to_string(CaseId id) { return "case" + std::to_string(static_cast<int>(id)); }

CaseId case_from_int(int k) {
    if (k < 1 || k > 3) throw std::invalid_argument("case must be 1, 2 or 3");
    return static_cast<CaseId>(k);
}

WorkloadStream::WorkloadStream(std::uint64_t seed, std::uint64_t run, std::size_t width)
    : rng_(seed, run), width_(width) {}

Bits WorkloadStream::next() { return rng_.bits(width_); }

std::vector<std::size_t> functional_mask(const KeySchedule& sched, std::size_t cycles) {
    std::vector<std::size_t> mask;
    const auto tags = trusted_user_tags(sched, cycles);
    for (std::size_t t = 0; t < tags.size(); ++t) {
        if (tags[t].is_workload()) mask.push_back(t);
    }
    if (mask.empty()) {
        throw SimulationError("no functional cycles within " + std::to_string(cycles) + " cycles; increase the horizon");
    }
    return mask;
}

namespace {

/// Per-cycle plan shared by the scalar and lane paths. For every cycle,
/// either a fixed key pattern or a workload index is applied.
struct CasePlan {
    std::vector<const Bits*> key;           ///< non-null on key cycles
    std::vector<std::size_t> workload_idx;  ///< valid when key is null
    std::vector<std::size_t> mask;
    std::vector<std::size_t> golden_idx;
    std::size_t workload_len = 0;
};

CasePlan plan_case(const KeySchedule& sched, CaseId case_id, std::size_t cycles) {
    CasePlan plan;
    plan.mask = functional_mask(sched, cycles);
    plan.key.assign(cycles, nullptr);
    plan.workload_idx.assign(cycles, 0);
    switch (case_id) {
        case CaseId::Case1: {
            BackJumpTimeline timeline(sched);
            std::size_t t = 0;
            std::size_t w_idx = 0;
            while (t < cycles) {
                const auto w = timeline.next();
                for (unsigned p = 0; p < sched.c && t < cycles; ++p) plan.key[t++] = &sched.key_table[w.chain][p];
                for (std::uint64_t f = 0; f < w.functional && t < cycles; ++f) plan.workload_idx[t++] = w_idx++;
            }
            plan.workload_len = w_idx;
            break;
        }
        case CaseId::Case2:
            for (std::size_t t = 0; t < cycles; ++t) plan.workload_idx[t] = t;
            plan.workload_len = cycles;
            break;
        case CaseId::Case3:
            for (std::size_t t = 0; t < cycles; ++t) {
                if (t < sched.c) plan.key[t] = &sched.key_table[0][t];
                else plan.workload_idx[t] = t - sched.c;
            }
            plan.workload_len = cycles > sched.c ? cycles - sched.c : 0;
            break;
    }
    for (auto t : plan.mask) plan.golden_idx.push_back(plan.workload_idx[t]);
    return plan;
}

void check_pair(const Netlist& orig, const Netlist& enc, const KeySchedule& sched) {
    if (orig.inputs() != enc.inputs() || orig.outputs() != enc.outputs()) {
        throw SimulationError("encrypted netlist ports differ from the original");
    }
    if (sched.i != orig.inputs().size()) throw SimulationError("key schedule input width does not match the netlist");
}

}  // namespace

CaseStimulus case_stimulus(const KeySchedule& sched, CaseId case_id, std::size_t cycles, std::uint64_t seed,
                           std::uint64_t run) {
    const CasePlan plan = plan_case(sched, case_id, cycles);
    CaseStimulus out;
    WorkloadStream stream(seed, run, sched.i);
    for (std::size_t k = 0; k < plan.workload_len; ++k) out.workload.push_back(stream.next());
    for (std::size_t t = 0; t < cycles; ++t) {
        if (plan.key[t]) {
            out.encrypted.vectors.push_back(*plan.key[t]);
            out.encrypted.tags.push_back(CycleTag::auth());
        } else {
            out.encrypted.vectors.push_back(out.workload[plan.workload_idx[t]]);
            out.encrypted.tags.push_back(CycleTag::workload(plan.workload_idx[t]));
        }
    }
    out.mask = plan.mask;
    out.golden_index = plan.golden_idx;
    return out;
}

HdReport run_case(const Netlist& orig, const Netlist& enc, const KeySchedule& sched, CaseId case_id,
                  std::size_t n_vectors, std::size_t cycles, std::uint64_t seed, unsigned workers) {
    sched.validate();
    check_pair(orig, enc, sched);
    if (n_vectors == 0) throw SimulationError("run_case needs at least one workload");
    const CasePlan plan = plan_case(sched, case_id, cycles);
    const std::size_t golden_len = *std::max_element(plan.golden_idx.begin(), plan.golden_idx.end()) + 1;
    const std::size_t width = sched.i;
    const std::size_t n_out = orig.outputs().size();
    const std::size_t batches = (n_vectors + 63) / 64;

    std::vector<double> run_hd(n_vectors, 0.0);
    auto run_batch = [&](std::size_t batch) {
        const std::size_t first = batch * 64;
        const std::size_t lanes = std::min<std::size_t>(64, n_vectors - first);
        // words[idx][k]: workload vector idx, input k, one lane per run.
        std::vector<std::vector<std::uint64_t>> words(plan.workload_len, std::vector<std::uint64_t>(width, 0));
        for (std::size_t lane = 0; lane < lanes; ++lane) {
            WorkloadStream stream(seed, first + lane, width);
            for (std::size_t idx = 0; idx < plan.workload_len; ++idx) {
                const Bits v = stream.next();
                for (std::size_t k = 0; k < width; ++k) words[idx][k] |= std::uint64_t{v[k]} << lane;
            }
        }
        const auto golden = simulate_lanes(
            orig, [&](std::size_t t, std::span<std::uint64_t> in) { std::copy(words[t].begin(), words[t].end(), in.begin()); },
            golden_len);
        const auto observed = simulate_lanes(
            enc,
            [&](std::size_t t, std::span<std::uint64_t> in) {
                if (const Bits* key = plan.key[t]) {
                    for (std::size_t k = 0; k < width; ++k) in[k] = (*key)[k] ? ~std::uint64_t{0} : 0;
                } else {
                    const auto& w = words[plan.workload_idx[t]];
                    std::copy(w.begin(), w.end(), in.begin());
                }
            },
            cycles);
        std::vector<std::size_t> diff(lanes, 0);
        for (std::size_t m = 0; m < plan.mask.size(); ++m) {
            const auto& enc_row = observed[plan.mask[m]];
            const auto& gold_row = golden[plan.golden_idx[m]];
            for (std::size_t o = 0; o < n_out; ++o) {
                std::uint64_t x = enc_row[o] ^ gold_row[o];
                while (x) {
                    const auto lane = static_cast<std::size_t>(std::countr_zero(x));
                    if (lane < lanes) ++diff[lane];
                    x &= x - 1;
                }
            }
        }
        const double denom = static_cast<double>(n_out * plan.mask.size());
        for (std::size_t lane = 0; lane < lanes; ++lane) run_hd[first + lane] = static_cast<double>(diff[lane]) / denom;
    };

    if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, batches));
    if (workers <= 1) {
        for (std::size_t b = 0; b < batches; ++b) run_batch(b);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t b = w; b < batches; b += workers) run_batch(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    HdReport report;
    report.circuit = sched.circuit;
    report.config = sched.config;
    report.case_id = case_id;
    report.n_vectors = n_vectors;
    report.cycles = cycles;
    report.seed = seed;
    report.mask_cycles = plan.mask.size();
    double sum = 0.0;
    for (double h : run_hd) sum += h;
    report.mean_hd = sum / static_cast<double>(n_vectors);
    report.run_hd = std::move(run_hd);
    return report;
}

HdReport run_case(const Netlist& orig, const EncryptedDesign& enc, CaseId case_id, std::size_t n_vectors,
                  std::size_t cycles, std::uint64_t seed, unsigned workers) {
    return run_case(orig, enc.netlist, enc.schedule, case_id, n_vectors, cycles, seed, workers);
}

BigInt brute_force_effort(unsigned key_bits, unsigned cycles, unsigned prng_bits) {
    const std::uint64_t exponent = std::uint64_t{key_bits} * cycles;
    if (exponent == 0) throw std::invalid_argument("brute_force_effort needs i*c >= 1");
    BigInt effort = 1;
    effort <<= static_cast<unsigned>(prng_bits + exponent - 1);
    return effort;
}

Rational cycle_delay_overhead(std::uint64_t t_a, unsigned prng_bits) {
    if (prng_bits < 1) throw std::invalid_argument("cycle_delay_overhead needs n >= 1");
    BigInt mean_period = 1;
    mean_period <<= (prng_bits - 1);
    return Rational(BigInt(t_a), mean_period);
}

std::vector<DelayPoint> cycle_delay_sweep(const std::vector<std::uint64_t>& t_a_values, unsigned min_bits,
                                          unsigned max_bits) {
    std::vector<DelayPoint> out;
    for (auto ta : t_a_values) {
        for (unsigned n = min_bits; n <= max_bits; ++n) out.push_back({ta, n, cycle_delay_overhead(ta, n)});
    }
    return out;
}

std::string to_scientific(const BigInt& value, unsigned digits) {
    if (digits == 0) digits = 1;
    std::string dec = value.str();
    bool negative = false;
    if (!dec.empty() && dec[0] == '-') {
        negative = true;
        dec.erase(0, 1);
    }
    long exponent = static_cast<long>(dec.size()) - 1;
    std::string mant = dec.substr(0, std::min<std::size_t>(digits, dec.size()));
    if (dec.size() > digits && dec[digits] >= '5') {
        int pos = static_cast<int>(mant.size()) - 1;
        while (pos >= 0 && mant[static_cast<std::size_t>(pos)] == '9') mant[static_cast<std::size_t>(pos--)] = '0';
        if (pos < 0) {
            mant.insert(mant.begin(), '1');
            mant.pop_back();
            ++exponent;
        } else {
            ++mant[static_cast<std::size_t>(pos)];
        }
    }
    while (mant.size() < digits) mant.push_back('0');
    std::string out = negative ? "-" : "";
    out += mant.substr(0, 1);
    if (mant.size() > 1) out += "." + mant.substr(1);
    return out + "e" + std::to_string(exponent);
}

OverheadReport overhead_report(const Netlist& orig, const EncryptedDesign& enc) {
    OverheadReport r;
    r.original = orig.stats();
    r.encrypted = enc.netlist.stats();
    r.added_gates = r.encrypted.n_gates - r.original.n_gates;
    r.added_dffs = r.encrypted.n_dffs - r.original.n_dffs;
    r.gate_overhead_pct = 100.0 * static_cast<double>(r.added_gates) / static_cast<double>(r.original.n_gates);
    if (r.original.n_dffs > 0) {
        r.dff_overhead_pct = 100.0 * static_cast<double>(r.added_dffs) / static_cast<double>(r.original.n_dffs);
    }
    r.xor_sites = enc.report.sites.size();
    r.achieved_coverage = static_cast<double>(r.xor_sites) / static_cast<double>(r.original.n_gates);
    const auto& s = enc.schedule;
    const std::size_t fsm_bits = 1 + enc.report.sbj_regs.size() + enc.report.progress_regs.size();
    r.min_added_dffs = r.original.n_dffs + 2 * std::size_t{s.n} + fsm_bits;
    return r;
}

std::string hd_reports_to_json(const std::vector<HdReport>& reports) {
    using nlohmann::json;
    json arr = json::array();
    for (const auto& r : reports) {
        json j;
        j["circuit"] = r.circuit;
        j["config"] = json::parse(config_to_json(r.config));
        j["case"] = static_cast<int>(r.case_id);
        j["n_vectors"] = r.n_vectors;
        j["cycles"] = r.cycles;
        j["seed"] = r.seed;
        j["mask_cycles"] = r.mask_cycles;
        j["mean_hd"] = r.mean_hd;
        j["run_hd"] = r.run_hd;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::string hd_reports_to_csv(const std::vector<HdReport>& reports) {
    std::ostringstream out;
    out << "circuit,coverage,case,n_vectors,cycles,seed,mask_cycles,mean_hd\n";
    char buf[64];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%.6f", r.mean_hd);
        out << r.circuit << ',' << r.config.coverage << ',' << static_cast<int>(r.case_id) << ',' << r.n_vectors << ','
            << r.cycles << ',' << r.seed << ',' << r.mask_cycles << ',' << buf << '\n';
    }
    return out.str();
}

std::string overhead_to_json(const OverheadReport& r) {
    using nlohmann::json;
    auto stats = [](const CircuitStats& s) {
        return json{{"inputs", s.n_inputs}, {"outputs", s.n_outputs}, {"dffs", s.n_dffs}, {"gates", s.n_gates}};
    };
    json j;
    j["original"] = stats(r.original);
    j["encrypted"] = stats(r.encrypted);
    j["added_gates"] = r.added_gates;
    j["added_dffs"] = r.added_dffs;
    j["gate_overhead_pct"] = r.gate_overhead_pct;
    j["dff_overhead_pct"] = r.dff_overhead_pct ? json(*r.dff_overhead_pct) : json(nullptr);
    j["xor_sites"] = r.xor_sites;
    j["achieved_coverage"] = r.achieved_coverage;
    j["min_added_dffs"] = r.min_added_dffs;
    return j.dump(2) + "\n";
}

}  // namespace sanscrypt
