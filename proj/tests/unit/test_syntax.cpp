#include <algorithm>

#include "doctest.h"

#include "../support/random_program.hpp"
#include "cps/syntax.hpp"

using namespace cps;

namespace {

bool has_diag(const std::vector<Diagnostic>& ds, const std::string& needle) {
    return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.message.find(needle) != std::string::npos; });
}

std::vector<Diagnostic> diags_of(const std::string& text) { return validate(parse_program_unchecked(text)); }

}  // namespace

TEST_CASE("skip program") {
    const Program p = parse_program("rule: skip");
    CHECK(p.rule->kind == Rule::Kind::Skip);
    CHECK(p.signature->dynamics().size() == 2);
}

TEST_CASE("par desugars into forall over numerals with nested ifs") {
    const Program p = parse_program("rule:\n par\n  Halt := true\n  Output := true\n endpar\n");
    const Rule& r = *p.rule;
    REQUIRE(r.kind == Rule::Kind::Forall);
    Universe u(0);
    const State s = initial_state(p.signature);
    const EvalContext ctx(u, *p.signature, InputStructure{}, s);
    Binding b;
    // The range is {1, 2}.
    CHECK(eval_term(ctx, b, *r.terms[0]) == u.mk_set({ONE, u.mk_set({EMPTY, ONE})}));
    REQUIRE(r.first->kind == Rule::Kind::If);
    CHECK(r.first->second->kind == Rule::Kind::If);
    CHECK(same_rule(r, *build::par({build::assign(*p.signature, "Halt", {}, build::truth()),
                                    build::assign(*p.signature, "Output", {}, build::truth())})));
}

TEST_CASE("closedness") {
    CHECK(diags_of("rule: forall v in Atoms do Output := v enddo").empty());
    const auto ds = diags_of("signature:\n dynamic f/1\nrule:\n f(v) := 0\n");
    CHECK(has_diag(ds, "not closed"));
    CHECK(has_diag(ds, "v"));
    CHECK_THROWS_AS(parse_program("signature:\n dynamic f/1\nrule:\n f(v) := 0\n"), ValidationError);
}

TEST_CASE("free variables") {
    Signature sig;
    sig.add_dynamic("f", 1);
    CHECK(free_vars(*parse_term(sig, "v")) == std::set<std::string>{"v"});
    CHECK(free_vars(*parse_term(sig, "{Pair(v, w) | v in s and (v = u)}")) == std::set<std::string>{"s", "u", "w"});
    CHECK(free_vars(*parse_term(sig, "{v | v in Atoms}")).empty());
    CHECK(free_vars(*parse_rule(sig, "f(v) := w")) == std::set<std::string>{"v", "w"});
    CHECK(free_vars(*parse_rule(sig, "forall v in s do f(v) := w enddo")) == std::set<std::string>{"s", "w"});
}

TEST_CASE("validation diagnostics") {
    CHECK(has_diag(diags_of("signature:\n input E/2\nrule:\n E(0, 0) := true\n"), "never updated"));
    CHECK(diags_of("signature:\n input E/2\n dynamic f/1\nrule:\n if E(a0x, 0) then skip endif\n").size() >= 1);
    CHECK(diags_of("signature:\n dynamic f/2\nrule:\n f(0, 0) := {Pair(0, 0)}\n").empty());
    CHECK(has_diag(diags_of("signature:\n dynamic f/2\nrule:\n f(0) := 0\n"), "arity"));
    CHECK(has_diag(diags_of("rule: Nope := 0"), "unknown"));
    CHECK(has_diag(diags_of("rule: forall v in Atoms do Output := {u | u in u} enddo"), "occurs free in its source"));
    CHECK(has_diag(diags_of("signature:\n dynamic r/1 relational\nrule:\n Output := Pair(r(0), 0)\n"),
                   "Boolean position"));
}

TEST_CASE("parse errors carry positions") {
    try {
        parse_program("rule:\n  if true then skip\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.pos().line >= 2);
        CHECK(e.pos().col >= 1);
    }
    CHECK_THROWS_AS(parse_program("signature:\n dynamic f/x\nrule: skip"), ParseError);
    CHECK_THROWS_AS(parse_program("rule: Output := 12345"), ParseError);
}

TEST_CASE("comments and else branches") {
    const Program p = parse_program(
        "# leading comment\nsignature:\n dynamic c/0  # trailing\nrule:\n if c = 0 then c := 1 else c := 0 endif\n");
    CHECK(p.rule->kind == Rule::Kind::If);
    CHECK(p.rule->second->kind == Rule::Kind::Assign);
}

TEST_CASE("print then parse is the identity on random programs") {
    auto sig = testgen::signature();
    testgen::Gen gen(sig, 3);
    for (int i = 0; i < 300; ++i) {
        std::vector<std::string> scope;
        Program p{sig, gen.rule(3, scope)};
        REQUIRE(validate(p).empty());
        const std::string text = print_program(p);
        const Program q = parse_program(text);
        CHECK_MESSAGE(same_rule(*p.rule, *q.rule), text);
        CHECK(print_program(q) == text);
    }
}

TEST_CASE("par has the union of the branch update sets") {
    auto sig = testgen::signature();
    testgen::Gen gen(sig, 5);
    Universe u(3);
    for (int i = 0; i < 300; ++i) {
        const InputStructure in = gen.input(3);
        const State s = gen.state(u, 2);
        std::vector<std::string> scope;
        std::vector<RulePtr> rs;
        for (int j = 0; j < 3; ++j) rs.push_back(gen.rule(2, scope));
        const EvalContext ctx(u, *sig, in, s);
        Binding b;
        UpdateSet want;
        for (const auto& r : rs) {
            const UpdateSet d = update_set(ctx, b, *r);
            want.updates.insert(want.updates.end(), d.updates.begin(), d.updates.end());
        }
        want.normalize();
        CHECK(update_set(ctx, b, *build::par(rs)) == want);
    }
}
