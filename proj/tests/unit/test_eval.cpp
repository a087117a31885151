#include "doctest.h"

#include "../support/random_program.hpp"
#include "cps/eval.hpp"

using namespace cps;

namespace {

struct Fixture {
    std::shared_ptr<Signature> sig = testgen::signature();
    Universe u{3};
    InputStructure in;
    State s = initial_state(sig);

    Fixture() {
        in.atom_count = 3;
        in.relations["E"] = {{0, 1}};
    }

    ObjId term(const std::string& text, Binding b = {}) {
        const EvalContext ctx(u, *sig, in, s);
        return eval_term(ctx, b, *parse_term(*sig, text));
    }
    UpdateSet updates(const std::string& text) {
        const EvalContext ctx(u, *sig, in, s);
        Binding b;
        return update_set(ctx, b, *parse_rule(*sig, text));
    }
    Binding atoms() {
        Binding b;
        b.push("a", u.atom(0));
        b.push("b", u.atom(1));
        b.push("c", u.atom(2));
        return b;
    }
};

Update upd(int sym, Tuple args, ObjId v) { return Update{Location{sym, std::move(args)}, v}; }

}  // namespace

TEST_CASE("initial state") {
    Fixture fx;
    for (std::size_t i = 0; i < fx.s.symbol_count(); ++i) CHECK(fx.s.table(static_cast<int>(i)).empty());
    CHECK(fx.s.lookup(fx.sig->halt(), {}) == EMPTY);
    CHECK_FALSE(fx.s.halted());
    CHECK(fx.in.holds("E", {0, 1}));
    Binding b = fx.atoms();
    CHECK(fx.term("E(a, b)", b) == ONE);
    CHECK(fx.term("E(b, a)", b) == EMPTY);
}

TEST_CASE("background functions") {
    Fixture fx;
    Universe& u = fx.u;
    const ObjId a = u.atom(0), b = u.atom(1), c = u.atom(2);
    CHECK(fx.term("Pair(a, b)", fx.atoms()) == u.pair(a, b));
    CHECK(fx.term("TheUnique({a})", fx.atoms()) == a);
    CHECK(fx.term("TheUnique({a, b})", fx.atoms()) == EMPTY);
    CHECK(fx.term("TheUnique(a)", fx.atoms()) == EMPTY);
    // Union over {a, b1, b2}: the atom contributes nothing.
    CHECK(fx.term("Union({a, {b}, {c, 0}})", fx.atoms()) == u.mk_set({b, c, EMPTY}));
    CHECK(fx.term("Union(a)", fx.atoms()) == EMPTY);
    CHECK(fx.term("{v | v in Atoms and true}") == u.mk_set({a, b, c}));
    CHECK(fx.term("{v | v in a}", fx.atoms()) == EMPTY);
    CHECK(fx.term("(1 and {a})", fx.atoms()) == EMPTY);
    CHECK(fx.term("(1 and 1)") == ONE);
    CHECK(fx.term("(not {a})", fx.atoms()) == EMPTY);
    CHECK(fx.term("(a in {a, b})", fx.atoms()) == ONE);
    CHECK(fx.term("(a in b)", fx.atoms()) == EMPTY);
    CHECK(fx.term("({a} = {a})", fx.atoms()) == ONE);
    CHECK(fx.term("E({a}, b)", fx.atoms()) == EMPTY);
    CHECK(fx.term("3") == u.mk_set({EMPTY, ONE, u.mk_set({EMPTY, ONE})}));
    CHECK(fx.term("f(a)", fx.atoms()) == EMPTY);
}

TEST_CASE("update sets of the rule forms") {
    Fixture fx;
    const int f = *fx.sig->find_dynamic("f");
    CHECK(fx.updates("skip").empty());
    CHECK(fx.updates("Output := true").updates == std::vector<Update>{upd(fx.sig->output(), {}, ONE)});
    const UpdateSet d = fx.updates("forall v in {w | w in Atoms and (not (w = {x | x in Atoms and false}))} do if Pair(v, v) = {v} then skip endif enddo");
    CHECK(d.empty());
    UpdateSet want;
    want.updates = {upd(f, {fx.u.atom(0)}, EMPTY), upd(f, {fx.u.atom(1)}, EMPTY)};
    want.normalize();
    Binding b = fx.atoms();
    const EvalContext ctx(fx.u, *fx.sig, fx.in, fx.s);
    CHECK(update_set(ctx, b, *parse_rule(*fx.sig, "forall v in Pair(a, b) do f(v) := 0 enddo")) == want);
    CHECK(fx.updates("if 0 then Output := true else Halt := true endif").updates ==
          std::vector<Update>{upd(fx.sig->halt(), {}, ONE)});
}

TEST_CASE("consistency") {
    const Update x1 = upd(2, {EMPTY}, ONE), x2 = upd(2, {EMPTY}, ONE), y = upd(2, {EMPTY}, EMPTY);
    CHECK(is_consistent(UpdateSet{}));
    UpdateSet same{{x1, x2}};
    same.normalize();
    CHECK(same.size() == 1);
    CHECK(is_consistent(same));
    UpdateSet clash{{x1, y}};
    clash.normalize();
    CHECK_FALSE(is_consistent(clash));
}

TEST_CASE("applying update sets") {
    Fixture fx;
    const int f = *fx.sig->find_dynamic("f"), p = *fx.sig->find_dynamic("p");
    const ObjId a = fx.u.atom(0), b = fx.u.atom(1);
    CHECK(apply(fx.s, UpdateSet{}) == fx.s);
    State s1 = apply(fx.s, UpdateSet{{upd(f, {a}, b)}});
    CHECK(s1.lookup(f, std::vector<ObjId>{a}) == b);
    UpdateSet clash{{upd(f, {a}, b), upd(f, {a}, a)}};
    clash.normalize();
    CHECK(apply(s1, clash) == s1);
    const State s2 = apply(s1, UpdateSet{{upd(f, {a}, EMPTY)}});
    CHECK(s2.table(f).empty());
    CHECK(s2 == fx.s);
    CHECK_THROWS_AS(apply(fx.s, UpdateSet{{upd(p, {a}, b)}}), DynamicError);
    CHECK_NOTHROW(apply(fx.s, UpdateSet{{upd(p, {a}, ONE)}}));
}

TEST_CASE("steps") {
    Universe u(2);
    InputStructure in;
    in.atom_count = 2;
    const Program skip = parse_program("rule: skip");
    const State s0 = initial_state(skip.signature);
    CHECK(step(u, skip, in, s0).first == s0);

    const Program halt = parse_program("rule: Halt := true");
    CHECK(step(u, halt, in, initial_state(halt.signature)).first.halted());

    // Counter 0 -> 1 -> 2, then no further updates.
    const Program counter = parse_program(
        "signature:\n dynamic c/0\nrule:\n if c = 0 then c := 1 else if c = 1 then c := 2 endif endif\n");
    const int c = *counter.signature->find_dynamic("c");
    State s = initial_state(counter.signature);
    s = step(u, counter, in, s).first;
    CHECK(s.lookup(c, {}) == ONE);
    s = step(u, counter, in, s).first;
    CHECK(s.lookup(c, {}) == u.mk_set({EMPTY, ONE}));
    auto [s3, d3] = step(u, counter, in, s);
    CHECK(d3.empty());
    CHECK(s3 == s);
}

TEST_CASE("input files") {
    const InputStructure in = parse_input("atoms 3\nE a0 a1\nE 1 2\n");
    CHECK(in.atom_count == 3);
    CHECK(in.holds("E", {0, 1}));
    CHECK(in.holds("E", {1, 2}));
    CHECK(parse_input(print_input(in)) == in);
    CHECK_THROWS_AS(parse_input("atomz 3\n"), ParseError);
    CHECK_THROWS_AS(parse_input("atoms 2\nE a0 ax\n"), ParseError);
    Signature sig;
    sig.add_input("E", 2);
    CHECK_THROWS(check_input(sig, parse_input("atoms 2\nE a0 a5\n")));
    CHECK_THROWS(check_input(sig, parse_input("atoms 2\nE a0\n")));
    CHECK_THROWS(check_input(sig, parse_input("atoms 2\nF a0 a1\n")));
}

TEST_CASE("step is equivariant and deterministic") {
    auto sig = testgen::signature();
    testgen::Gen gen(sig, 17);
    std::size_t checked = 0;
    for (std::uint32_t n = 1; n <= 4; ++n) {
        Universe u(n);
        const auto perms = all_perms(n);
        for (int i = 0; i < 40; ++i) {
            std::vector<std::string> scope;
            const Program prog{sig, gen.rule(3, scope)};
            const InputStructure in = gen.input(n);
            const State s = gen.state(u, 2);
            std::optional<State> next;
            try {
                next = step(u, prog, in, s).first;
            } catch (const DynamicError&) {
                continue;
            }
            CHECK(step(u, prog, in, s).first == *next);
            for (std::size_t j = 0; j < perms.size(); j += 1 + perms.size() / 8) {
                const Perm& pi = perms[j];
                const State ps = permute(u, s, pi);
                CHECK(step(u, prog, permute(in, pi), ps).first == permute(u, *next, pi));
                ++checked;
            }
            // No foreign atoms: every stored object lives over the given atoms.
            for (std::size_t f = 0; f < next->symbol_count(); ++f)
                for (const auto& [args, v] : next->table(static_cast<int>(f))) {
                    for (ObjId x : u.tc(v))
                        if (u.is_atom(x)) CHECK(u.atom_index(x) < n);
                    for (ObjId a : args) CHECK(a.id < u.size());
                }
        }
    }
    CHECK(checked > 200);
}
