// sanscrypt: encrypt, simulate, evaluate and attack .bench netlists.
//
// Exit codes: 0 success, 1 usage error, 2 input error, 3 resource budget
// exhausted.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sanscrypt/attack.hpp"
#include "sanscrypt/bench.hpp"
#include "sanscrypt/cnf.hpp"
#include "sanscrypt/encryptor.hpp"
#include "sanscrypt/evaluation.hpp"
#include "sanscrypt/simulator.hpp"
#include "sanscrypt/unroll.hpp"

namespace sc = sanscrypt;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;
constexpr std::uint64_t kDefaultSeed = 2020;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

sc::Netlist load_netlist(const std::string& path) {
    auto nl = sc::read_bench_file(path);
    for (const auto& net : nl.dangling_nets()) std::cerr << "warning: " << path << ": net '" << net << "' drives nothing\n";
    return nl;
}

int cmd_stats(const std::string& bench) {
    const auto nl = load_netlist(bench);
    const auto s = nl.stats();
    std::cout << nl.name() << ' ' << s.n_inputs << '/' << s.n_outputs << '/' << s.n_dffs << '/' << s.n_gates
              << "  (inputs/outputs/dffs/gates)\n";
    return 0;
}

struct EncryptArgs {
    std::string bench, config, out, keys, report;
};

int cmd_encrypt(const EncryptArgs& a) {
    const auto nl = load_netlist(a.bench);
    const auto cfg = sc::load_config(a.config);
    const auto design = sc::encrypt(nl, cfg);
    write_file(a.out, sc::emit_bench(design.netlist));
    write_file(a.keys, sc::schedule_to_json(design.schedule));
    if (!a.report.empty()) write_file(a.report, sc::report_to_json(design));
    const auto ov = sc::overhead_report(nl, design);
    if (design.report.clamped) std::cerr << "warning: coverage clamped to the gate count\n";
    std::cout << "xor_sites " << design.report.sites.size() << "\nadded_gates " << ov.added_gates << "\nadded_dffs "
              << ov.added_dffs << '\n';
    return 0;
}

struct SimulateArgs {
    std::string bench, keys, vcd;
    int case_id = 1;
    std::size_t cycles = 64;
    std::uint64_t seed = kDefaultSeed;
};

int cmd_simulate(const SimulateArgs& a) {
    const auto nl = load_netlist(a.bench);
    sc::Stimulus stim;
    if (!a.keys.empty()) {
        const auto sched = sc::load_schedule(a.keys);
        stim = sc::case_stimulus(sched, sc::case_from_int(a.case_id), a.cycles, a.seed, 0).encrypted;
    } else {
        sc::WorkloadStream stream(a.seed, 0, nl.inputs().size());
        std::vector<sc::Bits> vecs;
        for (std::size_t t = 0; t < a.cycles; ++t) vecs.push_back(stream.next());
        stim = sc::Stimulus::from_workload(std::move(vecs));
    }
    const auto trace = sc::simulate(nl, stim, a.cycles);
    sc::write_trace_text(std::cout, trace);
    if (!a.vcd.empty()) {
        std::ostringstream vcd;
        sc::write_vcd(vcd, nl, trace);
        write_file(a.vcd, vcd.str());
    }
    return 0;
}

struct EvalArgs {
    std::string orig, enc, keys, csv, json;
    std::vector<int> cases{1, 2, 3};
    std::size_t vectors = 1000;
    std::size_t cycles = 500;
    std::uint64_t seed = kDefaultSeed;
    unsigned workers = 0;
};

int cmd_eval(const EvalArgs& a) {
    const auto orig = load_netlist(a.orig);
    const auto enc = load_netlist(a.enc);
    const auto sched = sc::load_schedule(a.keys);
    std::vector<int> cases = a.cases;
    std::sort(cases.begin(), cases.end());
    cases.erase(std::unique(cases.begin(), cases.end()), cases.end());
    std::vector<sc::HdReport> reports;
    for (int k : cases) {
        reports.push_back(sc::run_case(orig, enc, sched, sc::case_from_int(k), a.vectors, a.cycles, a.seed, a.workers));
    }
    for (const auto& r : reports) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", r.mean_hd);
        std::cout << sc::to_string(r.case_id) << " mean_hd " << buf << " (" << r.n_vectors << " runs, " << r.mask_cycles
                  << " scored cycles)\n";
    }
    if (!a.csv.empty()) write_file(a.csv, sc::hd_reports_to_csv(reports));
    if (!a.json.empty()) write_file(a.json, sc::hd_reports_to_json(reports));
    return 0;
}

struct AttackArgs {
    std::string enc, oracle, timing, dimacs;
    unsigned c = 0;
    std::size_t max_seq = 3;
    std::int64_t budget = -1;
    std::size_t observe = 8;
    std::uint64_t seed = kDefaultSeed;
};

int cmd_attack(const AttackArgs& a) {
    const auto enc = load_netlist(a.enc);
    sc::Oracle oracle(load_netlist(a.oracle));
    std::optional<sc::KeySchedule> sched;
    sc::AttackOptions opts;
    opts.max_seq = a.max_seq;
    opts.conflict_budget = a.budget;
    opts.observe_frames = a.observe;
    opts.seed = a.seed;
    if (a.timing == "derive") {
        if (a.c == 0) throw std::invalid_argument("--keys-timing derive needs --c");
        opts.key_len = a.c;
        opts.window_starts = sc::derive_window_starts(enc, a.c, a.max_seq + 1);
    } else {
        sched = sc::load_schedule(a.timing);
        if (a.c != 0 && a.c != sched->c) throw std::invalid_argument("--c disagrees with the key schedule");
        opts.key_len = sched->c;
        opts.window_starts = sc::schedule_window_starts(*sched, a.max_seq + 1);
    }
    if (!a.dimacs.empty()) {
        const std::size_t frames = opts.window_starts.size() > 1 ? opts.window_starts[1] : opts.key_len + opts.observe_frames;
        std::ostringstream out;
        sc::write_dimacs(out, sc::to_cnf(sc::unroll(enc, frames)));
        write_file(a.dimacs, out.str());
    }
    const auto result = sc::recover_key_sequences(enc, oracle, opts);
    sc::write_attack_report(std::cout, result);
    std::cout << "# oracle queries " << oracle.queries() << '\n';
    if (sched) {
        sc::BackJumpTimeline timeline(*sched);
        for (const auto& w : result.windows) {
            const auto truth = timeline.next();
            if (w.status != sc::WindowStatus::Recovered) break;
            const bool match = w.key == sched->key_table[truth.chain];
            std::cout << "# window " << w.index << " chain " << truth.chain << (match ? " matches" : " differs from")
                      << " the key schedule\n";
        }
    }
    return result.truncated ? kExitBudget : 0;
}

int cmd_brute_force(unsigned i, unsigned c, unsigned n) {
    const auto effort = sc::brute_force_effort(i, c, n);
    std::cout << "2^" << (n + i * c - 1) << " = " << effort.str() << " (~" << sc::to_scientific(effort) << ")\n";
    return 0;
}

std::string percent(const sc::Rational& r) {
    const sc::Rational scaled = r * 100;
    const double v = static_cast<double>(scaled);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f%%", v);
    return buf;
}

int cmd_cycle_delay(std::uint64_t ta, unsigned n, bool sweep) {
    if (sweep) {
        std::cout << "t_a,n,overhead,percent\n";
        for (const auto& p : sc::cycle_delay_sweep()) {
            std::cout << p.t_a << ',' << p.prng_bits << ',' << p.overhead.str() << ',' << percent(p.overhead) << '\n';
        }
        return 0;
    }
    const auto ov = sc::cycle_delay_overhead(ta, n);
    std::cout << "overhead " << ov.str() << " = " << percent(ov) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential logic encryption with sporadic authentication"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    std::string stats_bench;
    auto* stats = app.add_subcommand("stats", "Print input/output/DFF/gate counts of a .bench netlist");
    stats->add_option("bench", stats_bench, ".bench netlist")->required();

    EncryptArgs ea;
    auto* encrypt = app.add_subcommand("encrypt", "Encrypt a netlist and write the encrypted netlist and key schedule");
    encrypt->add_option("bench", ea.bench, "Input .bench netlist")->required();
    encrypt->add_option("--config", ea.config, "Encryption parameters (JSON)")->required();
    encrypt->add_option("--out", ea.out, "Encrypted .bench output")->required();
    encrypt->add_option("--keys", ea.keys, "Key schedule output (JSON)")->required();
    encrypt->add_option("--report", ea.report, "Structural report output (JSON)");

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Print a cycle trace; with --keys drive a key-manager case");
    simulate->add_option("bench", sa.bench, ".bench netlist")->required();
    simulate->add_option("--keys", sa.keys, "Key schedule (JSON)");
    simulate->add_option("--case", sa.case_id, "1: keys on time, 2: no keys, 3: reset key only")
        ->check(CLI::Range(1, 3))
        ->capture_default_str();
    simulate->add_option("--cycles", sa.cycles, "Cycles to simulate")->capture_default_str();
    simulate->add_option("--seed", sa.seed, "Workload seed")->capture_default_str();
    simulate->add_option("--vcd", sa.vcd, "Value-change dump output");

    EvalArgs va;
    auto* eval = app.add_subcommand("eval-hd", "Mean output Hamming distance against the original netlist");
    eval->add_option("orig", va.orig, "Original .bench netlist")->required();
    eval->add_option("enc", va.enc, "Encrypted .bench netlist")->required();
    eval->add_option("--keys", va.keys, "Key schedule (JSON)")->required();
    eval->add_option("--cases", va.cases, "Comma-separated cases")->delimiter(',')->check(CLI::Range(1, 3))->capture_default_str();
    eval->add_option("--vectors", va.vectors, "Random workloads per case")->check(CLI::PositiveNumber)->capture_default_str();
    eval->add_option("--cycles", va.cycles, "Cycles per workload")->check(CLI::PositiveNumber)->capture_default_str();
    eval->add_option("--seed", va.seed, "Workload seed")->capture_default_str();
    eval->add_option("--csv", va.csv, "CSV output");
    eval->add_option("--json", va.json, "JSON output with per-run values");
    eval->add_option("--workers", va.workers, "Worker threads (0: hardware concurrency)")->capture_default_str();

    AttackArgs aa;
    auto* attack = app.add_subcommand("attack", "Recover key sequences with an oracle-guided SAT attack");
    attack->add_option("enc", aa.enc, "Encrypted .bench netlist")->required();
    attack->add_option("--oracle", aa.oracle, "Working-chip model (.bench)")->required();
    attack->add_option("--keys-timing", aa.timing, "Key schedule giving the window timing, or 'derive'")->required();
    attack->add_option("--c", aa.c, "Key sequence length (needed with derive)");
    attack->add_option("--max-seq", aa.max_seq, "Key sequences to recover")->check(CLI::PositiveNumber)->capture_default_str();
    attack->add_option("--budget", aa.budget, "Conflict budget per sequence (-1: unlimited)")->capture_default_str();
    attack->add_option("--observe", aa.observe, "Observation cycles after the last known window")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    attack->add_option("--seed", aa.seed, "Probe and solver seed")->capture_default_str();
    attack->add_option("--dimacs", aa.dimacs, "Write the unrolled window-0 instance as DIMACS CNF");

    auto* model = app.add_subcommand("model", "Analytic security and overhead models");
    model->require_subcommand(1);
    unsigned bf_i = 0;
    unsigned bf_c = 0;
    unsigned bf_n = 0;
    auto* brute = model->add_subcommand("brute-force", "Average brute-force attack effort N_prng * 2^(i*c-1)");
    brute->add_option("--i", bf_i, "Primary inputs")->required()->check(CLI::PositiveNumber);
    brute->add_option("--c", bf_c, "Key sequence length")->required()->check(CLI::PositiveNumber);
    brute->add_option("--n", bf_n, "LFSR width")->required()->check(CLI::Range(0U, 1U << 20));
    std::uint64_t cd_ta = 0;
    unsigned cd_n = 0;
    bool cd_sweep = false;
    auto* delay = model->add_subcommand("cycle-delay", "Average cycle-delay overhead t_a / 2^(n-1)");
    auto* ta_opt = delay->add_option("--ta", cd_ta, "Authentication cycles per back-jump");
    auto* n_opt = delay->add_option("--n", cd_n, "LFSR width")->check(CLI::Range(1U, 1U << 20));
    delay->add_flag("--sweep", cd_sweep, "Print t_a in {8,16,64,128} against n = 1..16");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*stats) return cmd_stats(stats_bench);
        if (*encrypt) return cmd_encrypt(ea);
        if (*simulate) return cmd_simulate(sa);
        if (*eval) return cmd_eval(va);
        if (*attack) return cmd_attack(aa);
        if (*brute) return cmd_brute_force(bf_i, bf_c, bf_n);
        if (*delay) {
            if (!cd_sweep && (ta_opt->count() == 0 || n_opt->count() == 0)) {
                std::cerr << "cycle-delay needs --ta and --n, or --sweep\n";
                return kExitUsage;
            }
            return cmd_cycle_delay(cd_ta, cd_n, cd_sweep);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitUsage;
}
