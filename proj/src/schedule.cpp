#include "sanscrypt/schedule.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sanscrypt {

using nlohmann::json;

namespace {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json config_json(const EncryptConfig& cfg) {
    json j;
    j["lfsr_width"] = cfg.lfsr_width;
    j["lfsr_taps"] = cfg.lfsr_taps ? json(*cfg.lfsr_taps) : json(nullptr);
    j["enc_out_width"] = cfg.enc_out_width;
    j["key_len"] = cfg.key_len;
    j["sbj_bits"] = cfg.sbj_bits;
    j["coverage"] = cfg.coverage;
    j["master_seed"] = cfg.master_seed;
    return j;
}

EncryptConfig config_from(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const char* known[] = {"lfsr_width", "lfsr_taps", "enc_out_width", "key_len",
                                  "sbj_bits",   "coverage",  "master_seed"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw ConfigError("unknown config field '" + key + "'");
        }
    }
    EncryptConfig cfg;
    cfg.lfsr_width = j.value("lfsr_width", cfg.lfsr_width);
    if (j.contains("lfsr_taps") && !j["lfsr_taps"].is_null()) cfg.lfsr_taps = j["lfsr_taps"].get<std::vector<unsigned>>();
    cfg.enc_out_width = j.value("enc_out_width", cfg.enc_out_width);
    cfg.key_len = j.value("key_len", cfg.key_len);
    cfg.sbj_bits = j.value("sbj_bits", cfg.sbj_bits);
    cfg.coverage = j.value("coverage", cfg.coverage);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.validate();
    return cfg;
}

}  // namespace

void EncryptConfig::validate() const {
    if (lfsr_width < 1 || lfsr_width > 32) throw ConfigError("lfsr_width must be in 1..32");
    if (enc_out_width < 1 || enc_out_width > 64) throw ConfigError("enc_out_width must be in 1..64");
    if (key_len < 1) throw ConfigError("key_len must be at least 1");
    if (sbj_bits < 1 || sbj_bits > lfsr_width) throw ConfigError("sbj_bits must be in 1..lfsr_width");
    if (sbj_bits > 16) throw ConfigError("sbj_bits above 16 would need a key table of more than 65536 chains");
    if (!(coverage > 0.0 && coverage <= 1.0)) throw ConfigError("coverage must be in (0, 1]");
    try {
        (void)Lfsr(lfsr_width, resolved_taps(), 0);
    } catch (const LfsrError& e) {
        throw ConfigError(std::string("bad LFSR parameters: ") + e.what());
    }
}

std::vector<unsigned> EncryptConfig::resolved_taps() const {
    if (lfsr_taps) return *lfsr_taps;
    try {
        auto t = default_taps(lfsr_width);
        return {t.begin(), t.end()};
    } catch (const LfsrError& e) {
        throw ConfigError(e.what());
    }
}

void KeySchedule::validate() const {
    if (version != current_version) throw ConfigError("unsupported key schedule version " + std::to_string(version));
    if (c < 1 || l < 1 || l > 16 || i < 1) throw ConfigError("key schedule has invalid c, l or i");
    try {
        (void)reset_lfsr();
    } catch (const LfsrError& e) {
        throw ConfigError(std::string("key schedule LFSR: ") + e.what());
    }
    if (key_table.size() != (std::size_t{1} << l)) throw ConfigError("key table must have 2^l chains");
    for (const auto& chain : key_table) {
        if (chain.size() != c) throw ConfigError("every key sequence must have c patterns");
        for (const auto& pat : chain) {
            if (pat.size() != i) throw ConfigError("key pattern width differs from i");
        }
    }
}

std::string bits_to_hex(const Bits& bits) {
    static const char* digits = "0123456789abcdef";
    const std::size_t n_digits = std::max<std::size_t>(1, (bits.size() + 3) / 4);
    std::string out(n_digits, '0');
    for (std::size_t d = 0; d < n_digits; ++d) {
        unsigned v = 0;
        for (std::size_t b = 0; b < 4; ++b) {
            const std::size_t idx = d * 4 + b;
            if (idx < bits.size() && bits[idx]) v |= 1U << b;
        }
        out[n_digits - 1 - d] = digits[v];
    }
    return out;
}

Bits hex_to_bits(std::string_view hex, std::size_t width) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    if (hex.empty()) throw ConfigError("empty hex pattern");
    Bits bits(width, 0);
    const std::size_t n = hex.size();
    for (std::size_t d = 0; d < n; ++d) {
        const char ch = hex[n - 1 - d];
        unsigned v = 0;
        if (ch >= '0' && ch <= '9') v = static_cast<unsigned>(ch - '0');
        else if (ch >= 'a' && ch <= 'f') v = static_cast<unsigned>(ch - 'a' + 10);
        else if (ch >= 'A' && ch <= 'F') v = static_cast<unsigned>(ch - 'A' + 10);
        else throw ConfigError("bad hex digit '" + std::string(1, ch) + "'");
        for (std::size_t b = 0; b < 4; ++b) {
            if (!((v >> b) & 1U)) continue;
            const std::size_t idx = d * 4 + b;
            if (idx >= width) throw ConfigError("hex pattern '" + std::string(hex) + "' exceeds width " + std::to_string(width));
            bits[idx] = 1;
        }
    }
    return bits;
}

std::string config_to_json(const EncryptConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

EncryptConfig config_from_json(std::string_view text) {
    try {
        return config_from(json::parse(text));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

EncryptConfig load_config(const std::filesystem::path& path) { return config_from_json(read_text(path)); }

std::string schedule_to_json(const KeySchedule& sched) {
    json j;
    j["version"] = sched.version;
    j["circuit"] = sched.circuit;
    j["n"] = sched.n;
    j["taps"] = sched.taps;
    j["reset_seed"] = sched.reset_seed;
    j["c"] = sched.c;
    j["l"] = sched.l;
    j["i"] = sched.i;
    json table = json::array();
    for (const auto& chain : sched.key_table) {
        json seq = json::array();
        for (const auto& pat : chain) seq.push_back(bits_to_hex(pat));
        table.push_back(std::move(seq));
    }
    j["key_table"] = std::move(table);
    j["master_seed"] = sched.master_seed;
    j["config"] = config_json(sched.config);
    return j.dump(2) + "\n";
}

KeySchedule schedule_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        KeySchedule s;
        s.version = j.at("version").get<int>();
        s.circuit = j.at("circuit").get<std::string>();
        s.n = j.at("n").get<unsigned>();
        s.taps = j.at("taps").get<std::vector<unsigned>>();
        s.reset_seed = j.value("reset_seed", std::uint64_t{0});
        s.c = j.at("c").get<unsigned>();
        s.l = j.at("l").get<unsigned>();
        s.i = j.at("i").get<std::size_t>();
        for (const auto& seq : j.at("key_table")) {
            std::vector<Bits> chain;
            for (const auto& pat : seq) chain.push_back(hex_to_bits(pat.get<std::string>(), s.i));
            s.key_table.push_back(std::move(chain));
        }
        s.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("config")) s.config = config_from(j["config"]);
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("key schedule: ") + e.what());
    }
}

KeySchedule load_schedule(const std::filesystem::path& path) { return schedule_from_json(read_text(path)); }

BackJumpTimeline::BackJumpTimeline(const KeySchedule& sched)
    : c_(sched.c), l_(sched.l), lfsr_(sched.reset_lfsr()) {}

void BackJumpTimeline::advance_to(std::uint64_t cycle) {
    while (cycle_ < cycle) {
        lfsr_ = lfsr_.next();
        ++cycle_;
    }
}

AuthWindow BackJumpTimeline::next() {
    AuthWindow w;
    w.start = next_start_;
    w.chain = next_chain_;
    const std::uint64_t completes = w.start + c_ - 1;
    advance_to(completes + 1);
    w.functional = std::max<std::uint64_t>(lfsr_.state(), 1);
    const std::uint64_t last_functional = completes + w.functional;
    advance_to(last_functional + 1);
    next_chain_ = derive_sbj(lfsr_.state(), l_);
    next_start_ = last_functional + 1;
    return w;
}

std::vector<AuthWindow> auth_windows(const KeySchedule& sched, std::uint64_t horizon) {
    std::vector<AuthWindow> out;
    BackJumpTimeline timeline(sched);
    for (;;) {
        auto w = timeline.next();
        if (w.start >= horizon) break;
        out.push_back(w);
    }
    return out;
}

}  // namespace sanscrypt
