#include "sanscrypt/solver.hpp"

#include <algorithm>
#include <stdexcept>

#include "sanscrypt/rng.hpp"

namespace sanscrypt {

namespace {

constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;
constexpr std::uint64_t kRestartBase = 100;

/// Luby sequence 1,1,2,1,1,2,4,... (0-based index).
std::uint64_t luby(std::uint64_t x) {
    std::uint64_t size = 1;
    std::uint64_t seq = 0;
    while (size < x + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        --seq;
        x = x % size;
    }
    return std::uint64_t{1} << seq;
}

}  // namespace

Solver::Solver(std::uint64_t seed) : seed_(seed) {}

int Solver::new_var() {
    const auto v = static_cast<std::uint32_t>(assigns_.size());
    assigns_.push_back(0);
    polarity_.push_back(1);
    level_.push_back(0);
    reason_.push_back(-1);
    double act = 0.0;
    if (seed_ != 0) act = static_cast<double>(mix_seed(seed_ ^ mix_seed(v)) >> 11) * 0x1.0p-53 * 1e-5;
    activity_.push_back(act);
    seen_.push_back(0);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_pos_.push_back(-1);
    heap_insert(v);
    return static_cast<int>(v) + 1;
}

bool Solver::add_clause(std::span<const Lit> lits) {
    if (!ok_) return false;
    std::vector<ILit> c;
    c.reserve(lits.size());
    for (Lit l : lits) {
        if (l == 0 || std::abs(l) > num_vars()) {
            throw std::invalid_argument("literal " + std::to_string(l) + " references an undeclared variable");
        }
        c.push_back(to_ilit(l));
    }
    std::sort(c.begin(), c.end());
    std::vector<ILit> kept;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (k > 0 && c[k] == c[k - 1]) continue;
        if (k > 0 && c[k] == neg(c[k - 1])) return true;  // tautology
        const int val = level_[var(c[k])] == 0 ? value(c[k]) : 0;
        if (val == 1) return true;
        if (val == -1) continue;
        kept.push_back(c[k]);
    }
    if (kept.empty()) {
        ok_ = false;
        return false;
    }
    if (kept.size() == 1) {
        enqueue(kept[0], -1);
        if (propagate() >= 0) ok_ = false;
        return ok_;
    }
    clauses_.push_back({std::move(kept), 0.0, false, false});
    attach(static_cast<std::uint32_t>(clauses_.size() - 1));
    return true;
}

void Solver::add_cnf(const Cnf& f) {
    while (num_vars() < f.num_vars) new_var();
    for (const auto& c : f.clauses) add_clause(c);
}

void Solver::attach(std::uint32_t cref) {
    const auto& c = clauses_[cref].lits;
    watches_[c[0]].push_back({cref, c[1]});
    watches_[c[1]].push_back({cref, c[0]});
}

void Solver::enqueue(ILit l, std::int64_t reason) {
    const auto v = var(l);
    assigns_[v] = (l & 1U) ? -1 : 1;
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(l);
}

std::int64_t Solver::propagate() {
    std::int64_t confl = -1;
    while (qhead_ < trail_.size()) {
        const ILit p = trail_[qhead_++];
        const ILit false_lit = neg(p);
        auto& ws = watches_[false_lit];
        ++stats_.propagations;
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < ws.size()) {
            const Watch w = ws[i];
            if (value(w.blocker) == 1) {
                ws[j++] = ws[i++];
                continue;
            }
            auto& c = clauses_[w.cref];
            if (c.removed) {
                ++i;
                continue;
            }
            auto& lits = c.lits;
            if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
            const ILit first = lits[0];
            if (first != w.blocker && value(first) == 1) {
                ws[j++] = {w.cref, first};
                ++i;
                continue;
            }
            bool moved = false;
            for (std::size_t k = 2; k < lits.size(); ++k) {
                if (value(lits[k]) != -1) {
                    std::swap(lits[1], lits[k]);
                    watches_[lits[1]].push_back({w.cref, first});
                    moved = true;
                    break;
                }
            }
            ++i;
            if (moved) continue;
            ws[j++] = {w.cref, first};
            if (value(first) == -1) {
                confl = w.cref;
                qhead_ = trail_.size();
                while (i < ws.size()) ws[j++] = ws[i++];
            } else {
                enqueue(first, w.cref);
            }
        }
        ws.resize(j);
        if (confl >= 0) break;
    }
    return confl;
}

bool Solver::redundant(ILit l) const {
    // Local minimization: every other literal of the reason is already in
    // the learnt clause or fixed at level 0.
    const auto r = reason_[var(l)];
    if (r < 0) return false;
    const auto& lits = clauses_[static_cast<std::size_t>(r)].lits;
    for (std::size_t k = 1; k < lits.size(); ++k) {
        const auto v = var(lits[k]);
        if (!seen_[v] && level_[v] > 0) return false;
    }
    return true;
}

void Solver::analyze(std::uint32_t confl, std::vector<ILit>& learnt, int& bt_level) {
    learnt.clear();
    learnt.push_back(0);
    int path = 0;
    ILit p = 0;
    bool have_p = false;
    std::size_t index = trail_.size();
    std::int64_t cref = confl;
    do {
        auto& c = clauses_[static_cast<std::size_t>(cref)];
        if (c.learnt) bump_clause(c);
        for (std::size_t k = have_p ? 1 : 0; k < c.lits.size(); ++k) {
            const ILit q = c.lits[k];
            const auto v = var(q);
            if (!seen_[v] && level_[v] > 0) {
                bump_var(v);
                seen_[v] = 1;
                if (level_[v] >= decision_level()) {
                    ++path;
                } else {
                    learnt.push_back(q);
                }
            }
        }
        while (!seen_[var(trail_[--index])]) {
        }
        p = trail_[index];
        have_p = true;
        cref = reason_[var(p)];
        seen_[var(p)] = 0;
        --path;
    } while (path > 0);
    learnt[0] = neg(p);

    std::vector<ILit> to_clear(learnt.begin() + 1, learnt.end());
    std::size_t keep = 1;
    for (std::size_t k = 1; k < learnt.size(); ++k) {
        if (!redundant(learnt[k])) learnt[keep++] = learnt[k];
    }
    learnt.resize(keep);

    bt_level = 0;
    if (learnt.size() > 1) {
        std::size_t max_k = 1;
        for (std::size_t k = 2; k < learnt.size(); ++k) {
            if (level_[var(learnt[k])] > level_[var(learnt[max_k])]) max_k = k;
        }
        std::swap(learnt[1], learnt[max_k]);
        bt_level = level_[var(learnt[1])];
    }
    for (ILit l : to_clear) seen_[var(l)] = 0;
}

void Solver::backtrack(int level) {
    if (decision_level() <= level) return;
    const std::size_t stop = trail_lim_[static_cast<std::size_t>(level)];
    for (std::size_t k = trail_.size(); k-- > stop;) {
        const auto v = var(trail_[k]);
        polarity_[v] = static_cast<std::int8_t>(assigns_[v] < 0 ? 1 : 0);
        assigns_[v] = 0;
        reason_[v] = -1;
        if (heap_pos_[v] < 0) heap_insert(v);
    }
    trail_.resize(stop);
    trail_lim_.resize(static_cast<std::size_t>(level));
    qhead_ = trail_.size();
}

Solver::ILit Solver::pick_branch() {
    while (!heap_.empty()) {
        const auto v = heap_pop();
        if (assigns_[v] == 0) return 2 * v + static_cast<ILit>(polarity_[v]);
    }
    return ~ILit{0};
}

void Solver::bump_var(std::uint32_t v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
        for (auto& a : activity_) a *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos_[v]));
}

void Solver::bump_clause(ClauseData& c) {
    c.activity += clause_inc_;
    if (c.activity > 1e20) {
        for (auto r : learnt_refs_) clauses_[r].activity *= 1e-20;
        clause_inc_ *= 1e-20;
    }
}

bool Solver::locked(std::uint32_t cref) const {
    const auto& c = clauses_[cref];
    const ILit first = c.lits[0];
    return value(first) == 1 && reason_[var(first)] == static_cast<std::int64_t>(cref);
}

void Solver::reduce_db() {
    std::vector<std::uint32_t> live;
    for (auto r : learnt_refs_) {
        if (!clauses_[r].removed) live.push_back(r);
    }
    std::stable_sort(live.begin(), live.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return clauses_[a].activity < clauses_[b].activity; });
    const std::size_t half = live.size() / 2;
    std::vector<std::uint32_t> kept;
    for (std::size_t k = 0; k < live.size(); ++k) {
        auto& c = clauses_[live[k]];
        if (k < half && c.lits.size() > 2 && !locked(live[k])) {
            c.removed = true;
            c.lits.clear();
            c.lits.shrink_to_fit();
        } else {
            kept.push_back(live[k]);
        }
    }
    learnt_refs_ = std::move(kept);
    max_learnts_ *= 1.1;
}

SatResult Solver::solve(std::int64_t conflict_budget) {
    model_.clear();
    if (!ok_) return SatResult::Unsat;
    if (propagate() >= 0) {
        ok_ = false;
        return SatResult::Unsat;
    }
    if (max_learnts_ == 0.0) max_learnts_ = std::max(1000.0, static_cast<double>(clauses_.size()) / 3.0);

    std::int64_t used = 0;
    std::uint64_t restart_index = 0;
    std::uint64_t restart_limit = luby(restart_index) * kRestartBase;
    std::uint64_t since_restart = 0;
    std::vector<ILit> learnt;

    for (;;) {
        const auto confl = propagate();
        if (confl >= 0) {
            ++stats_.conflicts;
            ++used;
            ++since_restart;
            if (decision_level() == 0) {
                ok_ = false;
                return SatResult::Unsat;
            }
            int bt = 0;
            analyze(static_cast<std::uint32_t>(confl), learnt, bt);
            backtrack(bt);
            if (learnt.size() == 1) {
                enqueue(learnt[0], -1);
            } else {
                clauses_.push_back({learnt, 0.0, true, false});
                const auto cref = static_cast<std::uint32_t>(clauses_.size() - 1);
                learnt_refs_.push_back(cref);
                attach(cref);
                bump_clause(clauses_[cref]);
                enqueue(learnt[0], cref);
            }
            ++stats_.learnts;
            var_inc_ /= kVarDecay;
            clause_inc_ /= kClauseDecay;
            if (conflict_budget >= 0 && used >= conflict_budget) {
                backtrack(0);
                return SatResult::Unknown;
            }
            continue;
        }
        if (since_restart >= restart_limit) {
            backtrack(0);
            ++stats_.restarts;
            restart_limit = luby(++restart_index) * kRestartBase;
            since_restart = 0;
            continue;
        }
        if (static_cast<double>(learnt_refs_.size()) >= max_learnts_ + static_cast<double>(trail_.size())) reduce_db();
        const ILit next = pick_branch();
        if (next == ~ILit{0}) {
            model_.assign(assigns_.size(), 0);
            for (std::size_t v = 0; v < assigns_.size(); ++v) model_[v] = static_cast<std::int8_t>(assigns_[v] > 0);
            backtrack(0);
            return SatResult::Sat;
        }
        ++stats_.decisions;
        trail_lim_.push_back(trail_.size());
        enqueue(next, -1);
    }
}

bool Solver::heap_less(std::uint32_t a, std::uint32_t b) const {
    if (activity_[a] != activity_[b]) return activity_[a] > activity_[b];
    return a < b;
}

void Solver::heap_insert(std::uint32_t v) {
    heap_pos_[v] = static_cast<std::int64_t>(heap_.size());
    heap_.push_back(v);
    heap_up(heap_.size() - 1);
}

void Solver::heap_up(std::size_t pos) {
    const auto v = heap_[pos];
    while (pos > 0) {
        const std::size_t parent = (pos - 1) / 2;
        if (!heap_less(v, heap_[parent])) break;
        heap_[pos] = heap_[parent];
        heap_pos_[heap_[pos]] = static_cast<std::int64_t>(pos);
        pos = parent;
    }
    heap_[pos] = v;
    heap_pos_[v] = static_cast<std::int64_t>(pos);
}

void Solver::heap_down(std::size_t pos) {
    const auto v = heap_[pos];
    for (;;) {
        std::size_t child = 2 * pos + 1;
        if (child >= heap_.size()) break;
        if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) ++child;
        if (!heap_less(heap_[child], v)) break;
        heap_[pos] = heap_[child];
        heap_pos_[heap_[pos]] = static_cast<std::int64_t>(pos);
        pos = child;
    }
    heap_[pos] = v;
    heap_pos_[v] = static_cast<std::int64_t>(pos);
}

std::uint32_t Solver::heap_pop() {
    const auto top = heap_.front();
    heap_pos_[top] = -1;
    const auto last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_[0] = last;
        heap_pos_[last] = 0;
        heap_down(0);
    }
    return top;
}

}  // namespace sanscrypt
