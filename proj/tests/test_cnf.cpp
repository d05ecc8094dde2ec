#include <doctest.h>

#include <sstream>

#include "sanscrypt/bench.hpp"
#include "sanscrypt/cnf.hpp"
#include "sanscrypt/solver.hpp"
#include "test_util.hpp"

using namespace sanscrypt;

namespace {

/// Clauses added by the gate encodings, i.e. without the reset unit.
std::size_t gate_clauses(const Netlist& nl) { return to_cnf(unroll(nl, 1)).clauses.size() - 1; }

}  // namespace

TEST_CASE("textbook AND and NOT clause sets") {
    const auto and_nl = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\n");
    CHECK(gate_clauses(and_nl) == 3);
    const auto u = unroll(and_nl, 1);
    const auto f = to_cnf(u);
    const Lit y = static_cast<Lit>(u.output(0, 0)) + 1;
    const Lit a = static_cast<Lit>(u.input(0, 0)) + 1;
    const Lit b = static_cast<Lit>(u.input(0, 1)) + 1;
    CHECK(f.clauses[1] == Clause{-y, a});
    CHECK(f.clauses[2] == Clause{-y, b});
    CHECK(f.clauses[3] == Clause{y, -a, -b});
    const std::vector<Lit> assume{a, -b};
    CHECK(to_cnf(u, assume).clauses.size() == f.clauses.size() + 2);

    CHECK(gate_clauses(parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n")) == 2);
    CHECK(gate_clauses(parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\ny = NOR(a, b, c)\n")) == 4);
    CHECK(gate_clauses(parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\ny = XOR(a, b, c)\n")) == 8);
}

TEST_CASE("variables are annotated with frame and net") {
    const auto nl = testutil::s27();
    const auto u = unroll(nl, 2);
    const auto f = to_cnf(u);
    CHECK(f.num_vars >= static_cast<int>(u.nodes().size()));
    CHECK(f.annotations[0].net == "reset0");
    const auto out = u.output(1, 0);
    CHECK(f.annotations[out].frame == 1);
    CHECK(f.annotations[out].net == "G17");
    CHECK(f.clauses[0] == Clause{-1});
}

TEST_CASE("every model decodes to values consistent with evaluation") {
    Rng gen(5);
    for (int trial = 0; trial < 80; ++trial) {
        const Netlist nl(testutil::random_netlist(gen, 1 + gen.below(4), gen.below(3), 1 + gen.below(20), 1 + gen.below(3)));
        const std::size_t T = 1 + gen.below(3);
        const auto u = unroll(nl, T);
        // Constrain a random output bit so the solver has work to do.
        const Lit target = static_cast<Lit>(u.output(T - 1, 0)) + 1;
        const std::vector<Lit> assume{gen.bit() ? target : -target};
        const auto f = to_cnf(u, assume);
        Solver s(static_cast<std::uint64_t>(trial));
        s.add_cnf(f);
        const auto res = s.solve();
        if (res == SatResult::Unsat) continue;
        REQUIRE(res == SatResult::Sat);
        std::vector<Bits> in(T);
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t k = 0; k < nl.inputs().size(); ++k) {
                in[t].push_back(s.model_value(static_cast<int>(u.input(t, k)) + 1) ? 1 : 0);
            }
        }
        const auto values = u.evaluate_nodes(in);
        for (std::size_t v = 0; v < u.nodes().size(); ++v) {
            REQUIRE(values[v] == (s.model_value(static_cast<int>(v) + 1) ? 1 : 0));
        }
    }
}

TEST_CASE("DIMACS text is exact and round-trips") {
    Cnf f;
    f.new_var();
    f.new_var();
    f.new_var();
    f.add({1, -2});
    f.add({3});
    f.add({-1, 2, -3});
    CHECK(to_dimacs(f) == "p cnf 3 3\n1 -2 0\n3 0\n-1 2 -3 0\n");
    const auto back = parse_dimacs("c comment\np cnf 3 3\n1 -2\n 0 3 0\n-1 2 -3 0\n");
    CHECK(back.num_vars == 3);
    CHECK(back.clauses == f.clauses);
    const auto big = to_cnf(unroll(testutil::s27(), 4));
    CHECK(parse_dimacs(to_dimacs(big)).clauses == big.clauses);
    std::ostringstream out;
    write_dimacs(out, big);
    CHECK(out.str() == to_dimacs(big));
}

TEST_CASE("DIMACS and clause errors") {
    CHECK_THROWS_AS((void)parse_dimacs("1 2 0\n"), DimacsError);
    CHECK_THROWS_AS((void)parse_dimacs("p cnf 2 1\n1 3 0\n"), DimacsError);
    CHECK_THROWS_AS((void)parse_dimacs("p cnf 2 2\n1 2 0\n"), DimacsError);
    CHECK_THROWS_AS((void)parse_dimacs("p cnf 2 1\n1 x 0\n"), DimacsError);
    Cnf f;
    f.new_var();
    CHECK_THROWS_AS(f.add({}), std::invalid_argument);
    CHECK_THROWS_AS(f.add({2}), std::invalid_argument);
    CHECK_THROWS_AS(f.add({0}), std::invalid_argument);
}
