#include "sanscrypt/encryptor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <unordered_set>

#include <json.hpp>

namespace sanscrypt {

namespace {

std::uint64_t low_mask(unsigned bits) { return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1; }

/// Appends primitive gates and DFFs to a NetlistData under collision-free names.
class LogicBuilder {
public:
    explicit LogicBuilder(NetlistData& data) : data_(data) {
        for (const auto& n : data.inputs) used_.insert(n);
        for (const auto& ff : data.dffs) used_.insert(ff.q);
        for (const auto& g : data.gates) used_.insert(g.out);
    }

    std::string fresh(const std::string& base) {
        if (used_.insert(base).second) return base;
        for (std::size_t k = 1;; ++k) {
            auto candidate = base + "_" + std::to_string(k);
            if (used_.insert(candidate).second) return candidate;
        }
    }

    std::string gate(GateKind kind, std::vector<std::string> ins, const std::string& base = {}) {
        auto out = base.empty() ? anonymous() : fresh(base);
        data_.gates.push_back({out, kind, std::move(ins)});
        return out;
    }

    /// `name` must already be reserved through fresh().
    void gate_named(const std::string& name, GateKind kind, std::vector<std::string> ins) {
        data_.gates.push_back({name, kind, std::move(ins)});
    }

    void dff(const std::string& q, const std::string& d) { data_.dffs.push_back({q, d}); }

    const std::string& inv(const std::string& net) {
        auto it = inverted_.find(net);
        if (it == inverted_.end()) it = inverted_.emplace(net, gate(GateKind::Not, {net})).first;
        return it->second;
    }

    std::string all(std::vector<std::string> ins) {
        if (ins.empty()) return const1();
        if (ins.size() == 1) return ins.front();
        return gate(GateKind::And, std::move(ins));
    }

    std::string any(std::vector<std::string> ins) {
        if (ins.empty()) return const0();
        if (ins.size() == 1) return ins.front();
        return gate(GateKind::Or, std::move(ins));
    }

    std::string mux(const std::string& sel, const std::string& when1, const std::string& when0) {
        return any({all({sel, when1}), all({inv(sel), when0})});
    }

    /// Literal that is 1 exactly when `net` equals `bit`.
    std::string literal(const std::string& net, bool bit) { return bit ? net : inv(net); }

    std::string const0() {
        if (const0_.empty()) const0_ = gate(GateKind::Xor, {anchor(), anchor()}, "sc_zero");
        return const0_;
    }
    std::string const1() {
        if (const1_.empty()) const1_ = gate(GateKind::Xnor, {anchor(), anchor()}, "sc_one");
        return const1_;
    }

    /// Ripple incrementer: returns bits of (value + 1) mod 2^width.
    std::vector<std::string> increment(const std::vector<std::string>& value) {
        std::vector<std::string> out;
        std::string carry;
        for (std::size_t b = 0; b < value.size(); ++b) {
            if (b == 0) {
                out.push_back(inv(value[0]));
                carry = value[0];
            } else {
                out.push_back(gate(GateKind::Xor, {value[b], carry}));
                if (b + 1 < value.size()) carry = all({value[b], carry});
            }
        }
        return out;
    }

private:
    std::string anonymous() {
        for (;;) {
            auto candidate = "sc_n" + std::to_string(counter_++);
            if (used_.insert(candidate).second) return candidate;
        }
    }
    const std::string& anchor() const { return data_.inputs.front(); }

    NetlistData& data_;
    std::unordered_set<std::string> used_;
    std::map<std::string, std::string> inverted_;
    std::string const0_;
    std::string const1_;
    std::size_t counter_ = 0;
};

std::vector<XorSite> insert_sites(NetlistData& data, LogicBuilder& b, const std::vector<std::string>& enc_out,
                                  std::size_t original_gates, std::size_t k, Rng& rng) {
    std::vector<XorSite> sites;
    const auto picks = rng.sample(original_gates, k);
    for (std::size_t s = 0; s < picks.size(); ++s) {
        const auto j = static_cast<unsigned>(s % enc_out.size());
        const std::string net = data.gates[picks[s]].out;
        const std::string pre = b.fresh("sc_pre_" + net);
        data.gates[picks[s]].out = pre;
        b.gate_named(net, GateKind::Xor, {pre, enc_out[j]});
        sites.push_back({net, pre, j});
    }
    return sites;
}

std::vector<std::string> reserve_bank(LogicBuilder& b, const std::string& base, std::size_t count) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < count; ++k) names.push_back(b.fresh(base + "_" + std::to_string(k)));
    return names;
}

}  // namespace

EncFsmSpec build_enc_fsm(std::size_t input_width, const EncryptConfig& cfg, Rng& rng, unsigned live_bits) {
    cfg.validate();
    const std::size_t chains = std::size_t{1} << cfg.sbj_bits;
    const unsigned m = cfg.enc_out_width;
    const unsigned live = (live_bits == 0) ? m : std::min(live_bits, m);
    const std::uint64_t full = low_mask(m);
    const std::uint64_t live_mask = low_mask(live);
    // Only m = live = 1 leaves a single admissible word.
    const bool can_alternate = !(m == 1 && live == 1);

    EncFsmSpec spec;
    spec.enc_out_width = m;
    spec.key_table.assign(chains, {});
    for (auto& chain : spec.key_table) {
        for (unsigned p = 0; p < cfg.key_len; ++p) chain.push_back(rng.bits(input_width));
    }
    spec.enc_out_table.assign(chains, {});
    for (auto& chain : spec.enc_out_table) {
        for (unsigned p = 0; p < cfg.key_len; ++p) {
            std::uint64_t word = 0;
            do {
                word = rng.next() & full;
            } while ((word & live_mask) == 0 || (can_alternate && p > 0 && word == chain.back()));
            chain.push_back(word);
        }
    }
    return spec;
}

std::size_t xor_site_count(std::size_t n_gates, double coverage, bool* clamped) {
    // The epsilon keeps products such as 0.15 * 20 = 3.0000000000000004 at 3.
    auto k = static_cast<std::size_t>(std::max(0.0, std::ceil(coverage * static_cast<double>(n_gates) - 1e-9)));
    bool clip = false;
    if (k > n_gates) {
        k = n_gates;
        clip = true;
    }
    if (k == 0 && n_gates > 0) k = 1;
    if (clamped) *clamped = clip;
    return k;
}

XorInsertion insert_xor(const Netlist& nl, unsigned enc_out_width, double coverage, Rng& rng) {
    if (nl.gates().empty()) throw ConfigError("XOR insertion needs at least one gate");
    if (enc_out_width < 1) throw ConfigError("enc_out width must be at least 1");
    if (!(coverage > 0.0 && coverage <= 1.0)) throw ConfigError("coverage must be in (0, 1]");
    NetlistData data = nl.data();
    LogicBuilder b(data);
    std::vector<std::string> enc = reserve_bank(b, "enc_out", enc_out_width);
    bool clamped = false;
    const auto k = xor_site_count(nl.gates().size(), coverage, &clamped);
    auto sites = insert_sites(data, b, enc, nl.gates().size(), k, rng);
    data.inputs.insert(data.inputs.end(), enc.begin(), enc.end());
    return {Netlist(std::move(data)), std::move(sites), std::move(enc), clamped};
}

EncryptedDesign encrypt(const Netlist& nl, const EncryptConfig& cfg) {
    cfg.validate();
    if (nl.inputs().empty()) throw ConfigError("encryption needs at least one primary input");
    if (nl.gates().empty()) throw ConfigError("encryption needs at least one gate");

    const std::size_t i = nl.inputs().size();
    const unsigned n = cfg.lfsr_width;
    const unsigned m = cfg.enc_out_width;
    const unsigned c = cfg.key_len;
    const unsigned l = cfg.sbj_bits;
    const std::size_t chains = std::size_t{1} << l;
    const auto taps = Lfsr(n, cfg.resolved_taps(), 0).taps();

    Rng rng(cfg.master_seed);
    bool clamped = false;
    const std::size_t k = xor_site_count(nl.gates().size(), cfg.coverage, &clamped);
    EncFsmSpec fsm = build_enc_fsm(i, cfg, rng, static_cast<unsigned>(std::min<std::size_t>(m, k)));

    NetlistData data = nl.data();
    const std::vector<Dff> original_dffs = nl.dffs();
    LogicBuilder b(data);

    EncryptionReport report;
    report.enc_out_nets = reserve_bank(b, "sc_enc_out", m);
    report.sites = insert_sites(data, b, report.enc_out_nets, nl.gates().size(), k, rng);
    report.clamped = clamped;

    const unsigned progress_bits = std::max(1U, static_cast<unsigned>(std::bit_width(c - 1U)));
    report.auth_reg = b.fresh("sc_auth");
    report.sbj_regs = reserve_bank(b, "sc_sbj", l);
    report.progress_regs = reserve_bank(b, "sc_prog", progress_bits);
    report.lfsr_regs = reserve_bank(b, "sc_lfsr", n);
    report.counter_regs = reserve_bank(b, "sc_cnt", n);
    report.period_regs = reserve_bank(b, "sc_tbj", n);
    for (const auto& ff : original_dffs) report.shadow_regs.push_back(b.fresh("sc_shadow_" + ff.q));

    const std::string& auth = report.auth_reg;
    const std::string not_auth = b.inv(auth);

    // ENC-FSM state decoders.
    std::vector<std::string> chain_sel;
    for (std::size_t s = 0; s < chains; ++s) {
        std::vector<std::string> lits;
        for (unsigned bit = 0; bit < l; ++bit) lits.push_back(b.literal(report.sbj_regs[bit], (s >> bit) & 1U));
        chain_sel.push_back(b.all(lits));
    }
    std::vector<std::string> progress_sel;
    for (unsigned p = 0; p < c; ++p) {
        std::vector<std::string> lits;
        for (unsigned bit = 0; bit < progress_bits; ++bit) {
            lits.push_back(b.literal(report.progress_regs[bit], (p >> bit) & 1U));
        }
        progress_sel.push_back(b.all(lits));
    }

    // Key comparison: one product term per (chain, progress) state.
    std::vector<std::string> match_terms;
    std::vector<std::vector<std::string>> state_sel(chains);
    for (std::size_t s = 0; s < chains; ++s) {
        for (unsigned p = 0; p < c; ++p) {
            state_sel[s].push_back(b.all({chain_sel[s], progress_sel[p]}));
            std::vector<std::string> lits{chain_sel[s], progress_sel[p]};
            for (std::size_t in = 0; in < i; ++in) lits.push_back(b.literal(nl.inputs()[in], fsm.key_table[s][p][in]));
            match_terms.push_back(b.all(lits));
        }
    }
    const std::string match = b.any(match_terms);
    const std::string last = progress_sel[c - 1];
    report.auth_entry_net = b.gate(GateKind::And, {not_auth, match, last}, "sc_auth_entry");
    const std::string advance = b.gate(GateKind::And, {not_auth, match, b.inv(last)}, "sc_advance");
    const std::string& auth_entry = report.auth_entry_net;

    // enc_out: table lookup in encrypted mode, zero in auth.
    for (unsigned j = 0; j < m; ++j) {
        std::vector<std::string> hot;
        for (std::size_t s = 0; s < chains; ++s) {
            for (unsigned p = 0; p < c; ++p) {
                if ((fsm.enc_out_table[s][p] >> j) & 1U) hot.push_back(state_sel[s][p]);
            }
        }
        b.gate_named(report.enc_out_nets[j], GateKind::And, {not_auth, b.any(hot)});
    }

    // LFSR: shift up, chained XNOR feedback into cell 0.
    std::vector<std::string> lfsr_next(n);
    {
        std::string fb = report.lfsr_regs[taps[0] - 1];
        for (std::size_t t = 1; t < taps.size(); ++t) fb = b.gate(GateKind::Xnor, {fb, report.lfsr_regs[taps[t] - 1]});
        lfsr_next[0] = fb;
        for (unsigned bit = 1; bit < n; ++bit) lfsr_next[bit] = report.lfsr_regs[bit - 1];
    }

    // Counter and period comparison.
    const auto count_inc = b.increment(report.counter_regs);
    std::vector<std::string> eq_bits;
    for (unsigned bit = 0; bit < n; ++bit) eq_bits.push_back(b.gate(GateKind::Xnor, {count_inc[bit], report.period_regs[bit]}));
    eq_bits.push_back(auth);
    report.back_jump_net = b.gate(GateKind::And, eq_bits, "sc_back_jump");
    const std::string& fire = report.back_jump_net;

    // t_bj = max(LFSR next word, 1).
    const std::string lfsr_zero = n == 1 ? b.inv(lfsr_next[0]) : b.gate(GateKind::Nor, lfsr_next);
    std::vector<std::string> period_value = lfsr_next;
    period_value[0] = b.any({lfsr_next[0], lfsr_zero});

    // Next-state functions.
    b.dff(auth, b.any({auth_entry, b.all({auth, b.inv(fire)})}));
    for (unsigned bit = 0; bit < l; ++bit) {
        b.dff(report.sbj_regs[bit], b.mux(fire, lfsr_next[bit], report.sbj_regs[bit]));
    }
    const auto progress_inc = b.increment(report.progress_regs);
    for (unsigned bit = 0; bit < progress_bits; ++bit) {
        b.dff(report.progress_regs[bit], b.all({advance, progress_inc[bit]}));
    }
    for (unsigned bit = 0; bit < n; ++bit) b.dff(report.lfsr_regs[bit], lfsr_next[bit]);
    for (unsigned bit = 0; bit < n; ++bit) b.dff(report.counter_regs[bit], b.all({auth, count_inc[bit]}));
    for (unsigned bit = 0; bit < n; ++bit) {
        b.dff(report.period_regs[bit], b.mux(auth_entry, period_value[bit], report.period_regs[bit]));
    }
    for (std::size_t r = 0; r < original_dffs.size(); ++r) {
        const std::string& d = original_dffs[r].d;
        b.dff(report.shadow_regs[r], b.mux(fire, d, report.shadow_regs[r]));
        data.dffs[r].d = b.mux(auth_entry, report.shadow_regs[r], d);
    }

    Netlist out(std::move(data));
    report.added_gates = out.gates().size() - nl.gates().size();
    report.added_dffs = out.dffs().size() - nl.dffs().size();

    KeySchedule sched;
    sched.circuit = nl.name();
    sched.n = n;
    sched.taps = taps;
    sched.reset_seed = 0;
    sched.c = c;
    sched.l = l;
    sched.i = i;
    sched.key_table = fsm.key_table;
    sched.master_seed = cfg.master_seed;
    sched.config = cfg;

    return {std::move(out), std::move(sched), std::move(fsm), std::move(report)};
}

std::string report_to_json(const EncryptedDesign& design) {
    using nlohmann::json;
    const auto& r = design.report;
    json j;
    j["circuit"] = design.schedule.circuit;
    json sites = json::array();
    for (const auto& s : r.sites) sites.push_back({{"net", s.net}, {"pre_net", s.pre_net}, {"enc_bit", s.enc_bit}});
    j["xor_sites"] = std::move(sites);
    j["clamped"] = r.clamped;
    j["added_gates"] = r.added_gates;
    j["added_dffs"] = r.added_dffs;
    j["registers"] = {{"auth", r.auth_reg},       {"sbj", r.sbj_regs},         {"progress", r.progress_regs},
                      {"lfsr", r.lfsr_regs},      {"counter", r.counter_regs}, {"period", r.period_regs},
                      {"shadow", r.shadow_regs}};
    j["enc_out_nets"] = r.enc_out_nets;
    json table = json::array();
    for (const auto& chain : design.fsm.enc_out_table) {
        json row = json::array();
        for (auto w : chain) {
            Bits bits(design.fsm.enc_out_width);
            for (unsigned b = 0; b < bits.size(); ++b) bits[b] = static_cast<std::uint8_t>((w >> b) & 1U);
            row.push_back(bits_to_hex(bits));
        }
        table.push_back(std::move(row));
    }
    j["enc_out_table"] = std::move(table);
    return j.dump(2) + "\n";
}

}  // namespace sanscrypt
