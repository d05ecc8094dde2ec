#include <doctest.h>

#include <sstream>

#include "sanscrypt/attack.hpp"
#include "sanscrypt/bench.hpp"
#include "sanscrypt/encryptor.hpp"
#include "test_util.hpp"

using namespace sanscrypt;

namespace {

struct Toy {
    Netlist orig;
    EncryptedDesign design;
    std::vector<AuthWindow> windows;
};

/// i=2, c=2, l=1, n=3 toy; taps {3,1} give every window a functional gap of
/// at least two cycles.
Toy make_toy(std::uint64_t seed = 1) {
    auto orig = parse_bench(testutil::kToy2, "toy2");
    EncryptConfig cfg;
    cfg.lfsr_width = 3;
    cfg.lfsr_taps = std::vector<unsigned>{3, 1};
    cfg.key_len = 2;
    cfg.sbj_bits = 1;
    cfg.enc_out_width = 2;
    cfg.coverage = 0.5;
    cfg.master_seed = seed;
    auto design = encrypt(orig, cfg);
    BackJumpTimeline tl(design.schedule);
    std::vector<AuthWindow> ws;
    for (int k = 0; k < 5; ++k) ws.push_back(tl.next());
    return {std::move(orig), std::move(design), std::move(ws)};
}

std::vector<Bits> candidate(unsigned code, unsigned c, std::size_t i) {
    std::vector<Bits> key(c, Bits(i));
    for (unsigned p = 0; p < c; ++p) {
        for (std::size_t k = 0; k < i; ++k) key[p][k] = (code >> (p * i + k)) & 1U;
    }
    return key;
}

/// Candidates for window q that, with earlier windows at their true keys,
/// reproduce the original circuit on every functional cycle before window
/// q+1 for 64 random gap sequences. Both sides use the reference interpreter.
std::vector<std::vector<Bits>> consistent_candidates(const Toy& toy, std::size_t q) {
    const auto& s = toy.design.schedule;
    const std::size_t horizon = toy.windows[q + 1].start;
    std::vector<std::vector<Bits>> found;
    for (unsigned code = 0; code < (1U << (s.i * s.c)); ++code) {
        const auto key = candidate(code, s.c, s.i);
        bool ok = true;
        for (std::uint64_t probe = 0; probe < 64 && ok; ++probe) {
            Rng rng(4242, probe);
            std::vector<Bits> applied, workload;
            std::vector<std::size_t> functional;
            for (std::size_t t = 0; t < horizon; ++t) {
                const Bits* k = nullptr;
                for (std::size_t w = 0; w <= q; ++w) {
                    if (t >= toy.windows[w].start && t < toy.windows[w].start + s.c) {
                        const auto p = t - toy.windows[w].start;
                        k = w == q ? &key[p] : &s.key_table[toy.windows[w].chain][p];
                    }
                }
                if (k) {
                    applied.push_back(*k);
                } else {
                    applied.push_back(rng.bits(s.i));
                    workload.push_back(applied.back());
                    functional.push_back(t);
                }
            }
            const auto enc = testutil::naive_simulate(toy.design.netlist.data(), applied);
            const auto gold = testutil::naive_simulate(toy.orig.data(), workload);
            for (std::size_t f = 0; f < functional.size() && ok; ++f) ok = enc[functional[f]] == gold[f];
        }
        if (ok) found.push_back(key);
    }
    return found;
}

}  // namespace

TEST_CASE("oracle answers from reset and counts queries") {
    const auto toy = make_toy();
    Oracle oracle(toy.orig);
    CHECK(oracle.input_width() == 2);
    CHECK(oracle.output_width() == 2);
    const std::vector<Bits> seq{{1, 0}, {0, 1}, {1, 1}};
    const auto a = oracle.query(seq);
    const auto b = oracle.query(seq);
    CHECK(a == b);
    CHECK(a == testutil::naive_simulate(toy.orig.data(), seq));
    CHECK(oracle.queries() == 2);
    const std::vector<Bits> bad{{1, 0, 1}};
    CHECK_THROWS_AS((void)oracle.query(bad), AttackError);
    Oracle other(testutil::s27());
    CHECK_THROWS_AS(KeyRecovery(toy.design.netlist, other, 2, 1), AttackError);
}

TEST_CASE("toy window 0: recovered key is K[0] and the only consistent candidate of 16") {
    const auto toy = make_toy();
    REQUIRE(toy.design.schedule.i == 2);
    Oracle oracle(toy.orig);
    AttackOptions opts;
    opts.key_len = 2;
    opts.window_starts = schedule_window_starts(toy.design.schedule, 2);
    opts.seed = 5;
    const auto r = recover_key_sequences(toy.design.netlist, oracle, opts);
    REQUIRE(r.windows.size() == 1);
    REQUIRE(r.windows[0].status == WindowStatus::Recovered);
    CHECK(r.windows[0].key == toy.design.schedule.key_table[0]);
    const auto brute = consistent_candidates(toy, 0);
    REQUIRE(brute.size() == 1);
    CHECK(brute[0] == r.windows[0].key);
    CHECK(r.windows[0].dip_iterations >= 1);
    CHECK_FALSE(r.truncated);
}

TEST_CASE("later windows recover the key of the chain selected at each back-jump") {
    for (std::uint64_t seed : {1, 2}) {
        const auto toy = make_toy(seed);
        Oracle oracle(toy.orig);
        AttackOptions opts;
        opts.key_len = 2;
        opts.max_seq = 3;
        opts.window_starts = schedule_window_starts(toy.design.schedule, 4);
        opts.seed = 5;
        const auto r = recover_key_sequences(toy.design.netlist, oracle, opts);
        REQUIRE(r.windows.size() == 3);
        std::vector<RecoveredWindow> recovered;
        for (std::size_t q = 0; q < 3; ++q) {
            CAPTURE(q);
            REQUIRE(r.windows[q].status == WindowStatus::Recovered);
            CHECK(r.windows[q].start == toy.windows[q].start);
            CHECK(r.windows[q].key == toy.design.schedule.key_table[toy.windows[q].chain]);
            const auto brute = consistent_candidates(toy, q);
            REQUIRE(brute.size() == 1);
            CHECK(brute[0] == r.windows[q].key);
            recovered.push_back({r.windows[q].start, r.windows[q].key});
        }
        // Replaying the recovered sequences matches the oracle on 1000 random probe sequences.
        CHECK(oracle_consistent(toy.design.netlist, oracle, recovered, 2, toy.windows[3].start, 1000, 31));
        // A single wrong bit breaks consistency.
        auto broken = recovered;
        broken[1].key[0][0] ^= 1U;
        CHECK_FALSE(oracle_consistent(toy.design.netlist, oracle, broken, 2, toy.windows[3].start, 1000, 31));
    }
}

TEST_CASE("window 1 attacked at wrong offsets yields no oracle-consistent key") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto toy = make_toy(seed);
        Oracle oracle(toy.orig);
        KeyRecovery kr(toy.design.netlist, oracle, 2, 5);
        const auto w0 = kr.attack_window(0, toy.windows[1].start - 2, -1);
        REQUIRE(w0.status == WindowStatus::Recovered);
        kr.accept({0, w0.key});
        const auto truth = toy.windows[1].start;
        const auto horizon = toy.windows[2].start;
        for (std::uint64_t s = 2; s + 2 < horizon; ++s) {
            const auto w = kr.attack_window(s, horizon - s - 2, 50000);
            REQUIRE(w.status != WindowStatus::BudgetExhausted);
            bool consistent = false;
            if (w.status == WindowStatus::Recovered) {
                const std::vector<RecoveredWindow> ws{{0, w0.key}, {s, w.key}};
                consistent = oracle_consistent(toy.design.netlist, oracle, ws, 2, horizon, 1000, 77);
            }
            CAPTURE(seed);
            CAPTURE(s);
            CHECK(consistent == (s == truth));
        }
    }
}

TEST_CASE("per-window effort grows with unrolled depth on the toy design") {
    const auto toy = make_toy();
    Oracle oracle(toy.orig);
    AttackOptions opts;
    opts.key_len = 2;
    opts.max_seq = 3;
    opts.window_starts = schedule_window_starts(toy.design.schedule, 4);
    opts.seed = 5;
    const auto r = recover_key_sequences(toy.design.netlist, oracle, opts);
    REQUIRE(r.windows.size() == 3);
    for (std::size_t q = 1; q < 3; ++q) {
        CHECK(r.windows[q].frames > r.windows[q - 1].frames);
        CHECK(r.windows[q].conflicts >= r.windows[q - 1].conflicts);
    }
}

TEST_CASE("derived window starts match the key schedule") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto toy = make_toy(seed);
        CHECK(derive_window_starts(toy.design.netlist, 2, 6) == schedule_window_starts(toy.design.schedule, 6));
    }
    EncryptConfig cfg;
    cfg.master_seed = 3;
    const auto d = encrypt(testutil::s27(), cfg);
    CHECK(derive_window_starts(d.netlist, cfg.key_len, 5) == schedule_window_starts(d.schedule, 5));
    CHECK_THROWS((void)derive_window_starts(testutil::s27(), 2, 3));
}

TEST_CASE("budget exhaustion is reported and truncates the run") {
    const auto toy = make_toy();
    Oracle oracle(toy.orig);
    AttackOptions opts;
    opts.key_len = 2;
    opts.max_seq = 3;
    opts.window_starts = schedule_window_starts(toy.design.schedule, 4);
    opts.conflict_budget = 0;
    const auto r = recover_key_sequences(toy.design.netlist, oracle, opts);
    REQUIRE(r.windows.size() == 1);
    CHECK(r.windows[0].status == WindowStatus::BudgetExhausted);
    CHECK(r.truncated);
    std::ostringstream out;
    write_attack_report(out, r);
    CHECK(out.str().starts_with("# window start observe frames status dips conflicts decisions seconds key\n"));
    CHECK(out.str().find("budget-exhausted") != std::string::npos);
    CHECK(out.str().find("# truncated") != std::string::npos);
}

TEST_CASE("attack input validation") {
    const auto toy = make_toy();
    Oracle oracle(toy.orig);
    AttackOptions opts;
    opts.key_len = 2;
    CHECK_THROWS_AS((void)recover_key_sequences(toy.design.netlist, oracle, opts), AttackError);
    opts.window_starts = {1, 8};
    CHECK_THROWS_AS((void)recover_key_sequences(toy.design.netlist, oracle, opts), AttackError);
    opts.window_starts = {0, 2};
    opts.max_seq = 2;
    CHECK_THROWS_AS((void)recover_key_sequences(toy.design.netlist, oracle, opts), AttackError);
    KeyRecovery kr(toy.design.netlist, oracle, 2, 1);
    CHECK_THROWS_AS((void)kr.attack_window(0, 0, -1), AttackError);
    CHECK_THROWS_AS(kr.accept({0, {{0, 0}}}), AttackError);
    kr.accept({0, {{0, 0}, {1, 1}}});
    CHECK_THROWS_AS((void)kr.attack_window(1, 2, -1), AttackError);
    CHECK(kr.probe(5) == kr.probe(5));
    CHECK(to_string(WindowStatus::Recovered) == "recovered");
}

TEST_SUITE("effort-vs-depth") {
    TEST_CASE("window effort is nondecreasing as the observation span grows") {
        const auto toy = make_toy();
        Oracle oracle(toy.orig);
        KeyRecovery kr(toy.design.netlist, oracle, 2, 5);
        for (std::size_t q = 0; q < 2; ++q) kr.accept({toy.windows[q].start, toy.design.schedule.key_table[toy.windows[q].chain]});
        const std::size_t start = toy.windows[2].start;
        const std::size_t span = toy.windows[3].start - start - 2;
        REQUIRE(span >= 4);
        std::uint64_t prev = 0;
        for (std::size_t obs = 1; obs <= span; ++obs) {
            const auto w = kr.attack_window(start, obs, -1);
            CAPTURE(obs);
            CAPTURE(w.conflicts);
            CHECK(w.status == WindowStatus::Recovered);
            CHECK(w.conflicts >= prev);
            prev = w.conflicts;
        }
    }
}
