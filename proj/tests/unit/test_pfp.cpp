#include <fstream>
#include <sstream>

#include "doctest.h"

#include "../support/upd_check.hpp"
#include "cps/pfp.hpp"

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

struct Env {
    Universe u;
    Signature sig;
    InputStructure in;
    RelTables none;
    TableView view{none};
    EvalContext ctx;
    std::vector<ObjId> domain;

    explicit Env(std::uint32_t n) : u(n), in(naked(n)), ctx(u, sig, in, view) {}
    bool eval(const FormulaPtr& f, Binding b = {}) {
        return eval_formula(FormulaContext{ctx, &none, &domain}, b, *f);
    }
};

const std::vector<std::string> kMachines{"accept", "reject", "diverge", "space", "parallel", "nested", "inconsistent",
                                         "skip", "pairs"};

}  // namespace

TEST_CASE("update formulas of simple rules") {
    auto sig = std::make_shared<Signature>();
    const int f = sig->add_dynamic("f", 0);
    Universe u(2);
    const State s = initial_state(sig);
    const InputStructure in = naked(2);
    const EvalContext ctx(u, *sig, in, s);
    const std::vector<ObjId> domain{EMPTY, ONE};
    const FormulaContext fc{ctx, nullptr, &domain};

    const Program skip{sig, build::skip()};
    CHECK(upd_formula(skip, *skip.rule, f, {}, "y")->kind == Formula::Kind::False);

    const Program set{sig, parse_rule(*sig, "f := true")};
    CHECK(con_formula(set, *set.rule)->kind == Formula::Kind::True);
    const FormulaPtr upd = upd_formula(set, *set.rule, f, {}, "y");
    CHECK(upd->kind == Formula::Kind::Eq);
    for (ObjId y : {EMPTY, ONE, u.atom(0)}) {
        Binding b;
        b.push("y", y);
        CHECK(eval_formula(fc, b, *upd) == (y == ONE));
    }

    const Program clash{sig, parse_rule(*sig, "par f := true f := false endpar")};
    for (ObjId y : {EMPTY, ONE, u.atom(0)}) {
        Binding b;
        b.push("y", y);
        CHECK_FALSE(eval_formula(fc, b, *upd_formula(clash, *clash.rule, f, {}, "y")));
        CHECK(eval_formula(fc, b, *upd_mem_formula(clash, *clash.rule, f, {}, "y")) == (y != u.atom(0)));
    }
}

TEST_CASE("flattening moves dynamic applications into default-0 atoms") {
    auto sig = std::make_shared<Signature>();
    const int f = sig->add_dynamic("f", 1);
    sig->add_dynamic("g", 1);
    sig->add_dynamic("h", 1);
    const Program p{sig, parse_rule(*sig, "f(x) := g(h(x))")};
    int counter = 0;
    const std::string text = print_formula(*u_formula(p, f, {"a"}, "y", counter));
    CHECK(text.find("D_h") != std::string::npos);
    CHECK(text.find("D_g") != std::string::npos);
    CHECK(text.find("_tnf0") != std::string::npos);
    CHECK(text.find("_tnf1") != std::string::npos);
    // No dynamic atoms: flattening is the identity.
    const Program q{sig, parse_rule(*sig, "f(x) := Pair(x, x)")};
    counter = 0;
    CHECK(print_formula(*u_formula(q, f, {"a"}, "y", counter)) == print_formula(*upd_formula(q, *q.rule, f, {"a"}, "y")));
    CHECK(counter == 0);
}

TEST_CASE("formula evaluation examples") {
    Env e(2);
    e.domain = {EMPTY, ONE, e.u.singleton(ONE), e.u.atom(0), e.u.atom(1)};
    std::sort(e.domain.begin(), e.domain.end());
    using namespace build;
    CHECK(e.eval(fo::forall("x", fo::eq(var("x"), var("x")))));
    Binding b;
    b.push("s", e.u.singleton(ONE));
    CHECK(e.eval(fo::holds(builtin(Builtin::In, {truth(), var("s")})), b));
    CHECK_FALSE(e.eval(fo::exists("x", fo::holds(builtin(Builtin::In, {var("x"), empty()})))));
    CHECK(e.eval(fo::exists_in("x", var("s"), fo::eq(var("x"), truth())), b));
    CHECK(e.eval(fo::forall_in("x", empty(), fo::falsity())));
}

TEST_CASE("iteration examples") {
    Env e(2);
    e.domain = {e.u.atom(0), e.u.atom(1)};
    using namespace build;
    PfpSystem full{{PfpRelation{"D", {"x"}, fo::truth()}}};
    PfpResult r = pfp_iterate(full, e.u, e.sig, e.in, e.domain);
    CHECK(r.fixed_point);
    CHECK(r.tables[0].size() == 2);
    CHECK(r.stages.size() == 2);

    PfpSystem flip{{PfpRelation{"D", {"x"}, fo::neg(fo::rel(0, "D", {var("x")}))}}};
    r = pfp_iterate(flip, e.u, e.sig, e.in, e.domain);
    CHECK_FALSE(r.fixed_point);
    CHECK(r.tables[0].empty());
}

TEST_CASE("acceptance verdicts from fixtures") {
    struct Case {
        const char* name;
        Verdict v;
    };
    for (const Case c : {Case{"accept", Verdict::Accept}, Case{"reject", Verdict::Reject},
                         Case{"skip", Verdict::Unknown}, Case{"diverge", Verdict::Unknown},
                         Case{"parallel", Verdict::Accept}}) {
        const PSpaceMachine m = parse_machine(slurp(std::string("machines/") + c.name + ".cps"));
        auto u = std::make_shared<Universe>(3);
        const RunTrace t = run(*u, m, naked(3));
        const LockstepReport r = lockstep(u, m, naked(3), t);
        CHECK_MESSAGE(r.verdict == c.v, c.name);
    }
}

TEST_CASE("stage i equals state i") {
    for (const auto& name : kMachines) {
        const PSpaceMachine m = parse_machine(slurp("machines/" + name + ".cps"));
        for (std::uint32_t n = 2; n <= 4; ++n) {
            auto u = std::make_shared<Universe>(n);
            const RunTrace t = run(*u, m, naked(n));
            const LockstepReport r = lockstep(u, m, naked(n), t);
            CHECK_MESSAGE(r.ok, name, " n=", n);
            CHECK(r.compared == t.run_length());
            if (t.outcome == Outcome::Diverges) {
                for (const auto& table : r.pfp.tables) CHECK(table.empty());
            }
            for (const auto& table : r.pfp.tables)
                for (const Tuple& tup : table) CHECK(tup.back() != EMPTY);
        }
    }
}

TEST_CASE("a halting run's fixed point is its final state") {
    const PSpaceMachine m = parse_machine(slurp("machines/nested.cps"));
    auto u = std::make_shared<Universe>(3);
    const RunTrace t = run(*u, m, naked(3));
    REQUIRE(t.outcome == Outcome::Accept);
    const LockstepReport r = lockstep(u, m, naked(3), t);
    CHECK(r.pfp.fixed_point);
    CHECK(r.pfp.tables == state_tables(t.states.back()));
}

TEST_CASE("update formula soundness on random triples") {
    const auto r = testgen::check_upd_soundness(99, 150);
    CHECK_MESSAGE(r.mismatches == 0, r.first);
    CHECK(r.evaluations > 1000);
}

TEST_CASE("iteration commutes with atom permutations") {
    const PSpaceMachine m = parse_machine(slurp("machines/nested.cps"));
    auto u = std::make_shared<Universe>(3);
    const RunTrace t = run(*u, m, naked(3));
    const Structure st = active_structure(u, t, naked(3));
    const PfpSystem sys = fixed_point_system(m.program);
    const PfpResult base = pfp_iterate(sys, *u, *m.program.signature, naked(3), st.domain);
    for (const Perm& pi : all_perms(3)) {
        std::vector<ObjId> dom;
        for (ObjId x : st.domain) dom.push_back(u->apply_perm(pi, x));
        std::sort(dom.begin(), dom.end());
        const PfpResult moved = pfp_iterate(sys, *u, *m.program.signature, naked(3), dom);
        RelTables want;
        for (const auto& table : base.tables) {
            RelTable out;
            for (Tuple tup : table) {
                for (ObjId& x : tup) x = u->apply_perm(pi, x);
                out.insert(tup);
            }
            want.push_back(out);
        }
        CHECK(moved.tables == want);
    }
}

TEST_CASE("extracted systems match the golden files") {
    for (const auto& name : kMachines) {
        const PSpaceMachine m = parse_machine(slurp("machines/" + name + ".cps"));
        CHECK_MESSAGE(print_system(fixed_point_system(m.program)) == slurp("golden/" + name + ".pfp"), name);
    }
}
