#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"

#include "../support/random_program.hpp"
#include "cps/space.hpp"

using namespace cps;

namespace {

std::string slurp(const std::string& rel) {
    std::ifstream in(std::string(CPS_FIXTURES) + "/" + rel);
    REQUIRE_MESSAGE(in.good(), rel);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

InputStructure naked(std::uint32_t n) {
    InputStructure in;
    in.atom_count = n;
    return in;
}

// Active objects recomputed from the definitions with an explicit worklist.
std::set<ObjId> naive_active(Universe& u, const State& s) {
    std::vector<ObjId> work{EMPTY, ONE};
    for (AtomId a = 0; a < u.atom_count(); ++a) work.push_back(u.atom(a));
    for (std::size_t f = 0; f < s.symbol_count(); ++f)
        for (const auto& [args, v] : s.table(static_cast<int>(f))) {
            work.push_back(v);
            work.insert(work.end(), args.begin(), args.end());
        }
    std::set<ObjId> seen;
    while (!work.empty()) {
        const ObjId x = work.back();
        work.pop_back();
        if (!seen.insert(x).second) continue;
        if (u.is_set(x))
            for (ObjId e : u.elements(x)) work.push_back(e);
    }
    return seen;
}

}  // namespace

TEST_CASE("polynomials") {
    const Polynomial p({2, 1});
    CHECK(p(0) == 2);
    CHECK(p(5) == 7);
    CHECK(Polynomial({1, 0, 3})(4) == 49);
    CHECK_THROWS(Polynomial(std::vector<std::uint64_t>(10, 1)));
    CHECK_THROWS(Polynomial({0, 0, 0, 0, 0, 0, 0, 0, 1000})(1u << 20));
}

TEST_CASE("machine files") {
    const PSpaceMachine m = parse_machine(slurp("machines/accept.cps"));
    CHECK(m.bound.coefficients() == std::vector<std::uint64_t>{2, 1});
    CHECK_THROWS(parse_machine("rule: skip\n"));
    CHECK_THROWS(parse_machine("rule: skip\nspace: 1\nspace: 2\n"));
}

TEST_CASE("critical and active objects") {
    auto sig = std::make_shared<Signature>();
    const int f = sig->add_dynamic("f", 1);
    const int g = sig->add_dynamic("g", 1, true);
    Universe u(3);
    const State s0 = initial_state(sig);
    CHECK(critical_objects(u, s0).size() == 5);
    CHECK(active_objects(u, s0).size() == 5);

    const ObjId a0 = u.atom(0), a1 = u.atom(1);
    const ObjId v = u.pair(a0, a1);
    const State s1 = apply(s0, UpdateSet{{Update{{f, {a0}}, v}}});
    auto crit = critical_objects(u, s1);
    CHECK(crit.size() == 6);
    CHECK(std::binary_search(crit.begin(), crit.end(), v));

    const ObjId x = ONE;
    const State s2 = apply(s0, UpdateSet{{Update{{g, {u.singleton(x)}}, ONE}}});
    crit = critical_objects(u, s2);
    CHECK(std::binary_search(crit.begin(), crit.end(), u.singleton(x)));

    const ObjId nested = u.mk_set({a0, u.singleton(a1)});
    const State s3 = apply(s0, UpdateSet{{Update{{f, {EMPTY}}, nested}}});
    const auto act = active_objects(u, s3);
    CHECK(act.size() == 7);
    CHECK(std::binary_search(act.begin(), act.end(), u.singleton(a1)));
}

TEST_CASE("fixture runs") {
    struct Case {
        const char* file;
        Outcome outcome;
    };
    for (const Case c : {Case{"accept.cps", Outcome::Accept}, Case{"reject.cps", Outcome::Reject},
                         Case{"diverge.cps", Outcome::Diverges}, Case{"space.cps", Outcome::SpaceExceeded},
                         Case{"parallel.cps", Outcome::Accept}, Case{"skip.cps", Outcome::Diverges}}) {
        const PSpaceMachine m = parse_machine(slurp(std::string("machines/") + c.file));
        for (std::uint32_t n = 1; n <= 4; ++n) {
            Universe u(n);
            const RunTrace t = run(u, m, naked(n));
            CHECK_MESSAGE(t.outcome == c.outcome, c.file, " n=", n);
            CHECK(t.active_counts[0] == n + 2);
        }
    }
}

TEST_CASE("run examples") {
    Universe u(3);
    const PSpaceMachine acc = parse_machine(slurp("machines/accept.cps"));
    const RunTrace t = run(u, acc, naked(3));
    CHECK(t.outcome == Outcome::Accept);
    CHECK(t.run_length() == 2);

    const RunTrace sk = run(u, parse_machine(slurp("machines/skip.cps")), naked(3));
    CHECK(sk.outcome == Outcome::Diverges);
    CHECK(sk.cycle_length == 1);

    const RunTrace sp = run(u, parse_machine(slurp("machines/space.cps")), naked(3));
    CHECK(sp.outcome == Outcome::SpaceExceeded);
    CHECK(sp.has_witness);
    CHECK(sp.active_counts[sp.exceeded_at] > 5);
    for (std::size_t i = 0; i < sp.run_length(); ++i) CHECK(sp.active_counts[i] <= 5);

    const RunTrace n4 = run(u, parse_machine(slurp("machines/nested.cps")), naked(3));
    CHECK(n4.outcome == Outcome::Accept);

    RunOptions capped;
    capped.max_steps = 3;
    const PSpaceMachine grow =
        parse_machine("signature:\n dynamic s/0\nrule:\n s := Pair(s, s)\nspace: 100\n");
    CHECK(run(u, grow, naked(3), capped).outcome == Outcome::StepCap);
}

TEST_CASE("dynamic errors report the step") {
    Universe u(2);
    const PSpaceMachine m = parse_machine(
        "signature:\n dynamic c/0\nrule:\n if c = 0 then c := 1 else Output := {c} endif\nspace: 10\n");
    try {
        run(u, m, naked(2));
        FAIL("expected a dynamic error");
    } catch (const DynamicError& e) {
        CHECK(e.step() == 1);
    }
}

TEST_CASE("active counts: invariance, truncation, cycles") {
    auto sig = testgen::signature();
    testgen::Gen gen(sig, 23);
    for (int i = 0; i < 60; ++i) {
        const std::uint32_t n = 1 + static_cast<std::uint32_t>(gen.pick(4));
        Universe u(n);
        std::vector<std::string> scope;
        const PSpaceMachine m{Program{sig, gen.rule(3, scope)}, Polynomial({4, 3})};
        const InputStructure in = gen.input(n);
        RunTrace t;
        try {
            t = run(u, m, in, RunOptions{200});
        } catch (const DynamicError&) {
            continue;
        }
        REQUIRE(t.active_counts.size() == t.states.size());
        for (std::size_t j = 0; j < t.states.size(); ++j) {
            const auto act = active_objects(u, t.states[j]);
            const auto naive = naive_active(u, t.states[j]);
            CHECK(act.size() == naive.size());
            CHECK(t.active_counts[j] == act.size());
            const Perm pi = Perm::transposition(n, 0, n - 1);
            CHECK(active_objects(u, permute(u, t.states[j], pi)).size() == act.size());
        }
        for (std::size_t j = 0; j < t.run_length(); ++j) CHECK(t.active_counts[j] <= m.bound(n));
        if (t.outcome == Outcome::SpaceExceeded) CHECK(t.active_counts.back() > m.bound(n));
        if (t.outcome == Outcome::Diverges) {
            // Replay the cycle from its first state.
            State s = t.states[t.cycle_start];
            for (std::size_t k = 0; k < t.cycle_length; ++k) s = step(u, m.program, in, s).first;
            CHECK(s == t.states[t.cycle_start]);
        }
    }
}

TEST_CASE("active structure") {
    auto u = std::make_shared<Universe>(3);
    const PSpaceMachine sk = parse_machine(slurp("machines/skip.cps"));
    const RunTrace t = run(*u, sk, naked(3));
    const Structure st = active_structure(u, t, naked(3));
    CHECK(st.domain.size() == 5);

    const PSpaceMachine nested = parse_machine(slurp("machines/nested.cps"));
    const RunTrace t2 = run(*u, nested, naked(3));
    const Structure st2 = active_structure(u, t2, naked(3));
    for (ObjId x : st2.domain)
        if (u->is_set(x))
            for (ObjId e : u->elements(x)) CHECK(st2.in_domain(e));
    for (const State& s : t2.states)
        for (std::size_t f = 0; f < s.symbol_count(); ++f)
            for (const auto& [args, v] : s.table(static_cast<int>(f))) CHECK(st2.in_domain(v));
}
