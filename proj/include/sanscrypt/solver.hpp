// Incremental CDCL satisfiability solver: two watched literals, first-UIP
// learning, VSIDS branching, phase saving and Luby restarts.

#ifndef SANSCRYPT_SOLVER_HPP
#define SANSCRYPT_SOLVER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "sanscrypt/cnf.hpp"

namespace sanscrypt {

enum class SatResult { Sat, Unsat, Unknown };

struct SolverStats {
    std::uint64_t decisions = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t propagations = 0;
    std::uint64_t restarts = 0;
    std::uint64_t learnts = 0;
};

class Solver {
public:
    /// The seed only perturbs the initial branching order.
    explicit Solver(std::uint64_t seed = 0);

    int new_var();
    [[nodiscard]] int num_vars() const { return static_cast<int>(assigns_.size()); }
    /// May be called between solve() calls. Returns false once the clause
    /// set is known to be unsatisfiable.
    bool add_clause(std::span<const Lit> lits);
    bool add_clause(std::initializer_list<Lit> lits) { return add_clause(std::span<const Lit>(lits.begin(), lits.size())); }
    void add(const Clause& c) { add_clause(c); }
    void add_cnf(const Cnf& f);

    /// conflict_budget < 0 means unlimited; the budget counts conflicts of
    /// this call only. Unknown is returned when it runs out.
    SatResult solve(std::int64_t conflict_budget = -1);

    /// Model value of a variable after Sat.
    [[nodiscard]] bool model_value(int var) const { return model_[static_cast<std::size_t>(var - 1)] != 0; }
    [[nodiscard]] bool model_value_lit(Lit l) const { return l > 0 ? model_value(l) : !model_value(-l); }
    [[nodiscard]] const SolverStats& stats() const { return stats_; }

private:
    using ILit = std::uint32_t;  // 2*var + sign
    struct ClauseData {
        std::vector<ILit> lits;
        double activity = 0.0;
        bool learnt = false;
        bool removed = false;
    };
    struct Watch {
        std::uint32_t cref;
        ILit blocker;
    };

    static ILit to_ilit(Lit l) { return l > 0 ? static_cast<ILit>(2 * (l - 1)) : static_cast<ILit>(2 * (-l - 1) + 1); }
    static std::uint32_t var(ILit l) { return l >> 1; }
    static ILit neg(ILit l) { return l ^ 1U; }
    [[nodiscard]] int value(ILit l) const {  // 1 true, -1 false, 0 unassigned
        const int v = assigns_[var(l)];
        return (l & 1U) ? -v : v;
    }

    void enqueue(ILit l, std::int64_t reason);
    std::int64_t propagate();
    void analyze(std::uint32_t confl, std::vector<ILit>& learnt, int& bt_level);
    [[nodiscard]] bool redundant(ILit l) const;
    void backtrack(int level);
    ILit pick_branch();
    void attach(std::uint32_t cref);
    void bump_var(std::uint32_t v);
    void bump_clause(ClauseData& c);
    void reduce_db();
    [[nodiscard]] int decision_level() const { return static_cast<int>(trail_lim_.size()); }
    [[nodiscard]] bool locked(std::uint32_t cref) const;

    // Binary max-heap over variable activity.
    void heap_insert(std::uint32_t v);
    void heap_up(std::size_t pos);
    void heap_down(std::size_t pos);
    std::uint32_t heap_pop();
    [[nodiscard]] bool heap_less(std::uint32_t a, std::uint32_t b) const;

    bool ok_ = true;
    std::uint64_t seed_;
    std::vector<ClauseData> clauses_;
    std::vector<std::uint32_t> learnt_refs_;
    std::vector<std::vector<Watch>> watches_;
    std::vector<std::int8_t> assigns_;
    std::vector<std::int8_t> polarity_;
    std::vector<int> level_;
    std::vector<std::int64_t> reason_;
    std::vector<double> activity_;
    std::vector<std::uint8_t> seen_;
    std::vector<ILit> trail_;
    std::vector<std::size_t> trail_lim_;
    std::size_t qhead_ = 0;
    std::vector<std::uint32_t> heap_;
    std::vector<std::int64_t> heap_pos_;
    double var_inc_ = 1.0;
    double clause_inc_ = 1.0;
    double max_learnts_ = 0.0;
    std::vector<std::int8_t> model_;
    SolverStats stats_;
};

}  // namespace sanscrypt

#endif
