#include <doctest.h>

#include "sanscrypt/bench.hpp"
#include "sanscrypt/encryptor.hpp"
#include "sanscrypt/schedule.hpp"
#include "test_util.hpp"

using namespace sanscrypt;

TEST_CASE("derive_sbj keeps the low l bits") {
    CHECK(derive_sbj(0b1101, 2) == 1);
    for (std::uint64_t r = 0; r < 32; ++r) CHECK(derive_sbj(r, 5) == r);
    for (unsigned l = 1; l <= 8; ++l) CHECK(derive_sbj(0, l) == 0);
    static_assert(derive_sbj(0b1101, 2) == 1);
}

TEST_CASE("hex patterns put bit 0 in the least significant digit") {
    CHECK(bits_to_hex({1, 0, 0, 0}) == "1");
    CHECK(bits_to_hex({0, 0, 0, 0, 1}) == "10");
    CHECK(bits_to_hex({1, 1, 1, 1, 1, 1}) == "3f");
    CHECK(hex_to_bits("3f", 6) == Bits{1, 1, 1, 1, 1, 1});
    CHECK(hex_to_bits("0x10", 5) == Bits{0, 0, 0, 0, 1});
    CHECK_THROWS_AS((void)hex_to_bits("40", 6), ConfigError);
    CHECK_THROWS_AS((void)hex_to_bits("g", 4), ConfigError);
    CHECK_THROWS_AS((void)hex_to_bits("", 4), ConfigError);
    Rng rng(5);
    for (int k = 0; k < 200; ++k) {
        const auto width = 1 + rng.below(40);
        const auto b = rng.bits(width);
        CHECK(hex_to_bits(bits_to_hex(b), width) == b);
    }
}

TEST_CASE("config JSON round trip and validation") {
    EncryptConfig cfg;
    cfg.lfsr_width = 7;
    cfg.lfsr_taps = std::vector<unsigned>{7, 6};
    cfg.coverage = 0.15;
    cfg.master_seed = 99;
    CHECK(config_from_json(config_to_json(cfg)) == cfg);
    CHECK(config_from_json("{}") == EncryptConfig{});
    CHECK_THROWS_AS((void)config_from_json(R"({"bogus": 1})"), ConfigError);
    CHECK_THROWS_AS((void)config_from_json(R"({"coverage": 0})"), ConfigError);
    CHECK_THROWS_AS((void)config_from_json(R"({"coverage": 1.5})"), ConfigError);
    CHECK_THROWS_AS((void)config_from_json(R"({"sbj_bits": 6, "lfsr_width": 5})"), ConfigError);
    CHECK_THROWS_AS((void)config_from_json(R"({"key_len": 0})"), ConfigError);
    CHECK_THROWS_AS((void)config_from_json(R"({"enc_out_width": 0})"), ConfigError);
    CHECK_THROWS_AS((void)config_from_json(R"({"lfsr_width": 3, "lfsr_taps": [2, 1]})"), ConfigError);
    CHECK_THROWS_AS((void)config_from_json("not json"), ConfigError);
}

TEST_CASE("key schedule JSON round trip") {
    EncryptConfig cfg;
    const auto design = encrypt(testutil::s27(), cfg);
    const auto text = schedule_to_json(design.schedule);
    const auto back = schedule_from_json(text);
    CHECK(back == design.schedule);
    CHECK(schedule_to_json(back) == text);
    CHECK(back.key_table.size() == 4);
    CHECK(back.key_table[0].size() == 8);
    CHECK(back.i == 4);
}

TEST_CASE("key schedule shape errors") {
    const auto design = encrypt(testutil::s27(), EncryptConfig{});
    auto bad = design.schedule;
    bad.key_table.pop_back();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = design.schedule;
    bad.key_table[1].pop_back();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = design.schedule;
    bad.key_table[0][0].push_back(0);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = design.schedule;
    bad.version = 9;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

namespace {

/// Direct replay over a precomputed LFSR word table r[t].
std::vector<AuthWindow> reference_windows(const KeySchedule& s, std::uint64_t horizon) {
    std::vector<std::uint64_t> r;
    Lfsr g = s.reset_lfsr();
    for (std::uint64_t t = 0; t < horizon + (std::uint64_t{1} << s.n) + 4 * s.c; ++t) {
        r.push_back(g.state());
        g = g.next();
    }
    std::vector<AuthWindow> out;
    std::uint64_t start = 0;
    std::uint64_t chain = 0;
    while (start < horizon) {
        const std::uint64_t end = start + s.c - 1;
        const std::uint64_t tbj = std::max<std::uint64_t>(r[end + 1], 1);
        out.push_back({start, chain, tbj});
        const std::uint64_t last = end + tbj;
        chain = r[last + 1] % (std::uint64_t{1} << s.l);
        start = last + 1;
    }
    return out;
}

}  // namespace

TEST_CASE("timeline matches a direct replay of the LFSR word table") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        EncryptConfig cfg;
        cfg.master_seed = seed;
        cfg.lfsr_width = 3 + static_cast<unsigned>(seed % 4);
        cfg.sbj_bits = 1 + static_cast<unsigned>(seed % 2);
        cfg.key_len = 1 + static_cast<unsigned>(seed % 5);
        const auto s = encrypt(testutil::s27(), cfg).schedule;
        const auto got = auth_windows(s, 2000);
        const auto want = reference_windows(s, 2000);
        REQUIRE(got.size() == want.size());
        for (std::size_t k = 0; k < got.size(); ++k) {
            CHECK(got[k].start == want[k].start);
            CHECK(got[k].chain == want[k].chain);
            CHECK(got[k].functional == want[k].functional);
        }
    }
}

TEST_CASE("first window is chain 0 at cycle 0") {
    const auto s = encrypt(testutil::s27(), EncryptConfig{}).schedule;
    BackJumpTimeline tl(s);
    const auto w = tl.next();
    CHECK(w.start == 0);
    CHECK(w.chain == 0);
    CHECK(w.functional >= 1);
    const auto w2 = tl.next();
    CHECK(w2.start == w.start + s.c + w.functional);
}
