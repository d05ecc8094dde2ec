#include "sanscrypt/attack.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <functional>
#include <ostream>

#include "sanscrypt/cnf.hpp"
#include "sanscrypt/rng.hpp"
#include "sanscrypt/simulator.hpp"
#include "sanscrypt/solver.hpp"

namespace sanscrypt {

namespace {

constexpr Lit kTrue = INT_MAX;
constexpr Lit kFalse = -INT_MAX;

Lit constant(bool v) { return v ? kTrue : kFalse; }

/// Frame-by-frame encoder into a live solver. Nets whose value is fixed
/// by constants are folded away instead of receiving a variable.
class FoldingEncoder {
public:
    explicit FoldingEncoder(Solver& s) : solver_(s) {}

    int new_var() { return solver_.new_var(); }
    void add(Clause c) { solver_.add_clause(c); }

    Lit gate(GateKind kind, std::vector<Lit> ins) {
        switch (kind) {
            case GateKind::Buff: return ins[0];
            case GateKind::Not: return -ins[0];
            case GateKind::And: return conj(std::move(ins));
            case GateKind::Nand: return -conj(std::move(ins));
            case GateKind::Or: return -conj(negated(std::move(ins)));
            case GateKind::Nor: return conj(negated(std::move(ins)));
            case GateKind::Xor: return parity(std::move(ins));
            case GateKind::Xnor: return -parity(std::move(ins));
        }
        return kFalse;
    }

    /// Unrolls `nl` from reset for `frames` cycles and returns the output
    /// literals of frames first_out..frames-1.
    std::vector<std::vector<Lit>> run(const Netlist& nl, std::size_t frames,
                                      const std::function<Lit(std::size_t, std::size_t)>& input, std::size_t first_out) {
        const std::size_t n_ff = nl.dffs().size();
        std::vector<Lit> values(nl.net_count(), kFalse);
        std::vector<Lit> state(n_ff, kFalse);
        std::vector<std::vector<Lit>> outs;
        std::vector<Lit> ins;
        for (std::size_t t = 0; t < frames; ++t) {
            for (std::size_t k = 0; k < nl.inputs().size(); ++k) values[nl.input_id(k)] = input(t, k);
            for (std::size_t k = 0; k < n_ff; ++k) values[nl.dff_q_id(k)] = state[k];
            for (auto g : nl.topo_order()) {
                ins.clear();
                for (auto in : nl.gate_fanin(g)) ins.push_back(values[in]);
                values[nl.gate_out_id(g)] = gate(nl.gates()[g].kind, ins);
            }
            if (t >= first_out) {
                std::vector<Lit> row;
                for (std::size_t k = 0; k < nl.outputs().size(); ++k) row.push_back(values[nl.output_id(k)]);
                outs.push_back(std::move(row));
            }
            for (std::size_t k = 0; k < n_ff; ++k) state[k] = values[nl.dff_d_id(k)];
        }
        return outs;
    }

    void require(Lit l, bool value) {
        const Lit want = value ? l : -l;
        if (want == kTrue) return;
        if (want == kFalse) {
            solver_.add_clause(std::span<const Lit>{});
            return;
        }
        solver_.add_clause({want});
    }

private:
    static std::vector<Lit> negated(std::vector<Lit> ins) {
        for (auto& l : ins) l = -l;
        return ins;
    }

    Lit conj(std::vector<Lit> ins) {
        std::vector<Lit> xs;
        for (Lit a : ins) {
            if (a == kFalse) return kFalse;
            if (a != kTrue) xs.push_back(a);
        }
        std::sort(xs.begin(), xs.end(), [](Lit a, Lit b) { return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b; });
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        for (std::size_t k = 1; k < xs.size(); ++k) {
            if (xs[k] == -xs[k - 1]) return kFalse;
        }
        if (xs.empty()) return kTrue;
        if (xs.size() == 1) return xs[0];
        const Lit y = new_var();
        encode_gate(*this, GateKind::And, y, xs);
        return y;
    }

    Lit parity(std::vector<Lit> ins) {
        bool flip = false;
        std::vector<Lit> xs;
        for (Lit a : ins) {
            if (a == kTrue) {
                flip = !flip;
            } else if (a != kFalse) {
                if (a < 0) {
                    flip = !flip;
                    a = -a;
                }
                xs.push_back(a);
            }
        }
        std::sort(xs.begin(), xs.end());
        std::vector<Lit> odd;
        for (std::size_t k = 0; k < xs.size();) {
            std::size_t e = k;
            while (e < xs.size() && xs[e] == xs[k]) ++e;
            if ((e - k) % 2 == 1) odd.push_back(xs[k]);
            k = e;
        }
        Lit y = kFalse;
        if (odd.size() == 1) {
            y = odd[0];
        } else if (odd.size() > 1) {
            y = new_var();
            encode_gate(*this, GateKind::Xor, y, odd);
        }
        return flip ? -y : y;
    }

    Solver& solver_;
};

enum class Role { Fixed, Gap, Free, Observe };

struct FrameRole {
    Role role = Role::Gap;
    std::size_t window = 0;  ///< Fixed: accepted window index
    std::size_t pos = 0;     ///< key cycle or observation index
};

std::vector<FrameRole> frame_roles(std::span<const RecoveredWindow> fixed, unsigned c, std::uint64_t start,
                                   std::size_t observe) {
    const std::size_t frames = start + c + observe;
    std::vector<FrameRole> roles(frames);
    for (std::size_t w = 0; w < fixed.size(); ++w) {
        for (unsigned p = 0; p < c; ++p) roles[fixed[w].start + p] = {Role::Fixed, w, p};
    }
    for (unsigned p = 0; p < c; ++p) roles[start + p] = {Role::Free, 0, p};
    for (std::size_t j = 0; j < observe; ++j) roles[start + c + j] = {Role::Observe, 0, j};
    return roles;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string to_string(WindowStatus s) {
    switch (s) {
        case WindowStatus::Recovered: return "recovered";
        case WindowStatus::NoConsistentKey: return "no-consistent-key";
        case WindowStatus::BudgetExhausted: return "budget-exhausted";
    }
    return "?";
}

Oracle::Oracle(Netlist hidden) : hidden_(std::move(hidden)) {}

std::vector<Bits> Oracle::query(std::span<const Bits> inputs) const {
    for (const auto& v : inputs) {
        if (v.size() != input_width()) {
            throw AttackError("oracle query vector has width " + std::to_string(v.size()) + ", oracle has " +
                              std::to_string(input_width()) + " inputs");
        }
    }
    ++queries_;
    Stimulus stim = Stimulus::from_workload({inputs.begin(), inputs.end()});
    return simulate(hidden_, stim, inputs.size()).outputs;
}

KeyRecovery::KeyRecovery(const Netlist& enc, const Oracle& oracle, unsigned key_len, std::uint64_t seed)
    : enc_(enc), oracle_(oracle), c_(key_len), seed_(seed) {
    if (oracle.input_width() != enc.inputs().size() || oracle.output_width() != enc.outputs().size()) {
        throw AttackError("oracle width mismatch: oracle has " + std::to_string(oracle.input_width()) + "/" +
                          std::to_string(oracle.output_width()) + " inputs/outputs, netlist has " +
                          std::to_string(enc.inputs().size()) + "/" + std::to_string(enc.outputs().size()));
    }
    if (key_len == 0) throw AttackError("key sequence length must be at least 1");
}

Bits KeyRecovery::probe(std::uint64_t t) const { return Rng(seed_, t).bits(enc_.inputs().size()); }

void KeyRecovery::accept(RecoveredWindow w) {
    if (w.key.size() != c_) throw AttackError("accepted key has the wrong length");
    if (!fixed_.empty() && w.start < fixed_.back().start + c_) throw AttackError("accepted window overlaps the previous one");
    fixed_.push_back(std::move(w));
}

WindowAttack KeyRecovery::attack_window(std::uint64_t start, std::size_t observe, std::int64_t conflict_budget) const {
    if (!fixed_.empty() && start < fixed_.back().start + c_) {
        throw AttackError("window start " + std::to_string(start) + " overlaps an accepted window");
    }
    if (observe == 0) throw AttackError("observation horizon must be at least one cycle");
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t width = enc_.inputs().size();
    const std::size_t frames = start + c_ + observe;
    const auto roles = frame_roles(fixed_, c_, start, observe);
    std::vector<Bits> probes(frames);
    for (std::size_t t = 0; t < frames; ++t) {
        if (roles[t].role == Role::Gap) probes[t] = probe(t);
    }

    WindowAttack result;
    result.index = fixed_.size();
    result.start = start;
    result.observe_frames = observe;
    result.frames = frames;

    auto key_vars = [&](Solver& s) {
        std::vector<std::vector<Lit>> k(c_, std::vector<Lit>(width));
        for (auto& row : k) {
            for (auto& v : row) v = s.new_var();
        }
        return k;
    };
    // Input literal of frame t under a key copy and an observation source.
    auto driver = [&](const std::vector<std::vector<Lit>>& key, const std::function<Lit(std::size_t, std::size_t)>& obs) {
        return [&, obs](std::size_t t, std::size_t k) -> Lit {
            const auto& r = roles[t];
            switch (r.role) {
                case Role::Fixed: return constant(fixed_[r.window].key[r.pos][k] != 0);
                case Role::Gap: return constant(probes[t][k] != 0);
                case Role::Free: return key[r.pos][k];
                case Role::Observe: return obs(r.pos, k);
            }
            return kFalse;
        };
    };
    auto const_obs = [](const std::vector<Bits>& x) {
        return [&x](std::size_t j, std::size_t k) { return constant(x[j][k] != 0); };
    };

    std::int64_t used = 0;
    auto remaining = [&]() -> std::int64_t { return conflict_budget < 0 ? -1 : conflict_budget - used; };
    auto account = [&](const Solver& s, std::uint64_t before) {
        used += static_cast<std::int64_t>(s.stats().conflicts - before);
    };

    Solver miter(seed_);
    FoldingEncoder menc(miter);
    const auto ka = key_vars(miter);
    const auto kb = key_vars(miter);
    std::vector<std::vector<Lit>> x(observe, std::vector<Lit>(width));
    for (auto& row : x) {
        for (auto& v : row) v = miter.new_var();
    }
    auto var_obs = [&](std::size_t j, std::size_t k) { return x[j][k]; };
    const auto out_a = menc.run(enc_, frames, driver(ka, var_obs), start + c_);
    const auto out_b = menc.run(enc_, frames, driver(kb, var_obs), start + c_);
    std::vector<Lit> diffs;
    for (std::size_t j = 0; j < observe; ++j) {
        for (std::size_t o = 0; o < out_a[j].size(); ++o) diffs.push_back(menc.gate(GateKind::Xor, {out_a[j][o], out_b[j][o]}));
    }
    const Lit miter_out = diffs.empty() ? kFalse : (diffs.size() == 1 ? diffs[0] : menc.gate(GateKind::Or, diffs));
    menc.require(miter_out, true);

    std::vector<std::pair<std::vector<Bits>, std::vector<Bits>>> dips;
    bool exhausted = false;
    for (;;) {
        if (conflict_budget >= 0 && remaining() <= 0) {
            exhausted = true;
            break;
        }
        const auto before = miter.stats().conflicts;
        const auto r = miter.solve(remaining());
        account(miter, before);
        if (r == SatResult::Unknown) {
            exhausted = true;
            break;
        }
        if (r == SatResult::Unsat) break;
        std::vector<Bits> dip(observe, Bits(width));
        for (std::size_t j = 0; j < observe; ++j) {
            for (std::size_t k = 0; k < width; ++k) dip[j][k] = miter.model_value(x[j][k]) ? 1 : 0;
        }
        std::vector<Bits> seq;
        for (std::size_t t = 0; t < frames; ++t) {
            if (roles[t].role == Role::Gap) seq.push_back(probes[t]);
            if (roles[t].role == Role::Observe) seq.push_back(dip[roles[t].pos]);
        }
        const auto answer = oracle_.query(seq);
        std::vector<Bits> y(answer.end() - static_cast<std::ptrdiff_t>(observe), answer.end());
        for (const auto* key : {&ka, &kb}) {
            const auto outs = menc.run(enc_, frames, driver(*key, const_obs(dip)), start + c_);
            for (std::size_t j = 0; j < observe; ++j) {
                for (std::size_t o = 0; o < outs[j].size(); ++o) menc.require(outs[j][o], y[j][o] != 0);
            }
        }
        dips.emplace_back(std::move(dip), std::move(y));
        ++result.dip_iterations;
    }
    result.conflicts += miter.stats().conflicts;
    result.decisions += miter.stats().decisions;
    result.propagations += miter.stats().propagations;
    result.variables = static_cast<std::size_t>(miter.num_vars());

    if (!exhausted) {
        Solver ex(seed_);
        FoldingEncoder eenc(ex);
        const auto k = key_vars(ex);
        for (const auto& [dip, y] : dips) {
            const auto outs = eenc.run(enc_, frames, driver(k, const_obs(dip)), start + c_);
            for (std::size_t j = 0; j < observe; ++j) {
                for (std::size_t o = 0; o < outs[j].size(); ++o) eenc.require(outs[j][o], y[j][o] != 0);
            }
        }
        const auto r = (conflict_budget >= 0 && remaining() <= 0) ? SatResult::Unknown : ex.solve(remaining());
        account(ex, 0);
        result.conflicts += ex.stats().conflicts;
        result.decisions += ex.stats().decisions;
        result.propagations += ex.stats().propagations;
        if (r == SatResult::Sat) {
            result.status = WindowStatus::Recovered;
            result.key.assign(c_, Bits(width));
            for (unsigned p = 0; p < c_; ++p) {
                for (std::size_t b = 0; b < width; ++b) result.key[p][b] = ex.model_value(k[p][b]) ? 1 : 0;
            }
        } else {
            result.status = r == SatResult::Unsat ? WindowStatus::NoConsistentKey : WindowStatus::BudgetExhausted;
        }
    } else {
        result.status = WindowStatus::BudgetExhausted;
    }
    result.seconds = seconds_since(t0);
    return result;
}

AttackResult recover_key_sequences(const Netlist& enc, const Oracle& oracle, const AttackOptions& opts) {
    if (opts.window_starts.empty()) throw AttackError("known timing needs at least one window start");
    if (opts.window_starts.front() != 0) throw AttackError("the first authentication window starts at reset (cycle 0)");
    KeyRecovery session(enc, oracle, opts.key_len, opts.seed);
    const auto& starts = opts.window_starts;
    AttackResult result;
    const std::size_t count = std::min(opts.max_seq, starts.size());
    for (std::size_t q = 0; q < count; ++q) {
        std::size_t observe = opts.observe_frames;
        if (q + 1 < starts.size()) {
            if (starts[q + 1] <= starts[q] + opts.key_len) {
                throw AttackError("window " + std::to_string(q + 1) + " starts before window " + std::to_string(q) +
                                  " has a functional cycle");
            }
            observe = starts[q + 1] - starts[q] - opts.key_len;
        }
        auto w = session.attack_window(starts[q], observe, opts.conflict_budget);
        w.index = q;
        const auto status = w.status;
        if (status == WindowStatus::Recovered) session.accept({w.start, w.key});
        result.windows.push_back(std::move(w));
        if (status != WindowStatus::Recovered) {
            result.truncated = status == WindowStatus::BudgetExhausted;
            break;
        }
    }
    return result;
}

std::vector<std::uint64_t> schedule_window_starts(const KeySchedule& sched, std::size_t count) {
    BackJumpTimeline timeline(sched);
    std::vector<std::uint64_t> starts;
    for (std::size_t q = 0; q < count; ++q) starts.push_back(timeline.next().start);
    return starts;
}

std::vector<std::uint64_t> derive_window_starts(const Netlist& enc, unsigned key_len, std::size_t count,
                                                const std::string& prefix) {
    if (key_len == 0) throw AttackError("key sequence length must be at least 1");
    std::vector<std::string> regs;
    while (enc.find(prefix + std::to_string(regs.size()))) regs.push_back(prefix + std::to_string(regs.size()));
    if (regs.empty()) throw AttackError("netlist has no register named " + prefix + "0");
    if (regs.size() > 32) throw AttackError("more than 32 generator registers");

    std::vector<std::uint64_t> words;
    auto word = [&](std::uint64_t t) {
        if (t >= words.size()) {
            const std::size_t horizon = std::max<std::size_t>(2 * words.size(), t + 1);
            Stimulus stim = Stimulus::from_workload(std::vector<Bits>(horizon, Bits(enc.inputs().size(), 0)));
            const auto trace = simulate(enc, stim, horizon, regs);
            words.clear();
            for (const auto& p : trace.probes) {
                std::uint64_t w = 0;
                for (std::size_t b = 0; b < p.size(); ++b) w |= std::uint64_t{p[b]} << b;
                words.push_back(w);
            }
        }
        return words[t];
    };

    std::vector<std::uint64_t> starts;
    std::uint64_t s = 0;
    for (std::size_t q = 0; q < count; ++q) {
        starts.push_back(s);
        const std::uint64_t end = s + key_len - 1;
        const std::uint64_t t_bj = std::max<std::uint64_t>(word(end + 1), 1);
        s = end + t_bj + 1;
    }
    return starts;
}

bool oracle_consistent(const Netlist& enc, const Oracle& oracle, std::span<const RecoveredWindow> windows,
                       unsigned key_len, std::size_t horizon, std::size_t probes, std::uint64_t seed) {
    const std::size_t width = enc.inputs().size();
    if (oracle.input_width() != width || oracle.output_width() != enc.outputs().size()) {
        throw AttackError("oracle width mismatch");
    }
    std::vector<const Bits*> key(horizon, nullptr);
    for (const auto& w : windows) {
        if (w.key.size() != key_len) throw AttackError("window key has the wrong length");
        for (unsigned p = 0; p < key_len; ++p) {
            if (w.start + p < horizon) key[w.start + p] = &w.key[p];
        }
    }
    std::vector<std::size_t> functional;
    for (std::size_t t = 0; t < horizon; ++t) {
        if (!key[t]) functional.push_back(t);
    }
    if (functional.empty()) return true;

    for (std::size_t first = 0; first < probes; first += 64) {
        const std::size_t lanes = std::min<std::size_t>(64, probes - first);
        std::vector<std::vector<Bits>> seqs(lanes);
        std::vector<std::vector<std::uint64_t>> words(horizon, std::vector<std::uint64_t>(width, 0));
        for (std::size_t lane = 0; lane < lanes; ++lane) {
            Rng rng(seed, first + lane);
            for (auto t : functional) {
                seqs[lane].push_back(rng.bits(width));
                for (std::size_t k = 0; k < width; ++k) words[t][k] |= std::uint64_t{seqs[lane].back()[k]} << lane;
            }
        }
        const auto observed = simulate_lanes(
            enc,
            [&](std::size_t t, std::span<std::uint64_t> in) {
                if (key[t]) {
                    for (std::size_t k = 0; k < width; ++k) in[k] = (*key[t])[k] ? ~std::uint64_t{0} : 0;
                } else {
                    std::copy(words[t].begin(), words[t].end(), in.begin());
                }
            },
            horizon);
        for (std::size_t lane = 0; lane < lanes; ++lane) {
            const auto golden = oracle.query(seqs[lane]);
            for (std::size_t f = 0; f < functional.size(); ++f) {
                const auto& row = observed[functional[f]];
                for (std::size_t o = 0; o < row.size(); ++o) {
                    if (((row[o] >> lane) & 1U) != golden[f][o]) return false;
                }
            }
        }
    }
    return true;
}

void write_attack_report(std::ostream& out, const AttackResult& r) {
    out << "# window start observe frames status dips conflicts decisions seconds key\n";
    for (const auto& w : r.windows) {
        out << w.index << ' ' << w.start << ' ' << w.observe_frames << ' ' << w.frames << ' ' << to_string(w.status)
            << ' ' << w.dip_iterations << ' ' << w.conflicts << ' ' << w.decisions << ' ' << w.seconds << ' ';
        if (w.key.empty()) {
            out << '-';
        } else {
            for (std::size_t p = 0; p < w.key.size(); ++p) out << (p ? ":" : "") << bits_to_hex(w.key[p]);
        }
        out << '\n';
    }
    if (r.truncated) out << "# truncated: conflict budget exhausted\n";
}

}  // namespace sanscrypt
