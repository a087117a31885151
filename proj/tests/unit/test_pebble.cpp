#include <sstream>

#include "doctest.h"

#include "cps/pebble.hpp"

using namespace cps;

namespace {

struct Side1 {
    Universe u;
    SupportOracle s{u};
    Fragment f;
    GameStructure g;
    Side1(std::uint32_t n, std::uint32_t k, std::uint32_t r) : u(n), f(build_fragment(s, k, r, 1000000)) {
        g = make_game_structure(u, f.objects);
    }
};

Position place(std::size_t m, std::initializer_list<std::pair<ObjId, ObjId>> pairs) {
    Position p(m);
    std::size_t i = 0;
    for (auto [x, y] : pairs) {
        p.a[i] = x;
        p.b[i] = y;
        ++i;
    }
    return p;
}

}  // namespace

TEST_CASE("partial isomorphisms") {
    Side1 A(3, 1, 1), B(4, 1, 1);
    const ObjId a0 = A.u.atom(0), a1 = A.u.atom(1);
    const ObjId b0 = B.u.atom(0), b1 = B.u.atom(1), b2 = B.u.atom(2);
    CHECK(partial_iso(A.g, B.g, Position(3)));
    CHECK(partial_iso(A.g, B.g, place(3, {{a0, b2}, {a1, b0}})));
    CHECK_FALSE(partial_iso(A.g, B.g, place(3, {{a0, b0}, {a0, b1}})));
    CHECK_FALSE(partial_iso(A.g, B.g, place(3, {{a0, b0}, {a1, b0}})));
    // Membership must agree.
    CHECK(partial_iso(A.g, B.g, place(3, {{a0, b1}, {A.u.singleton(a0), B.u.singleton(b1)}})));
    CHECK_FALSE(partial_iso(A.g, B.g, place(3, {{a0, b1}, {A.u.singleton(a0), B.u.singleton(b2)}})));
    // The constants are pinned.
    CHECK_FALSE(partial_iso(A.g, B.g, place(3, {{EMPTY, b0}})));
    CHECK_FALSE(partial_iso(A.g, B.g, place(3, {{A.u.all_atoms(), EMPTY}})));
    CHECK(partial_iso(A.g, B.g, place(3, {{EMPTY, EMPTY}})));
}

TEST_CASE("duplicator answers") {
    Side1 A(5, 1, 1), B(6, 1, 1);
    Duplicator d(A.g, B.g, 1);
    DuplicatorState st(2);
    CHECK(d.respond(st, Side::A, 0, EMPTY) == EMPTY);
    const ObjId y = d.respond(st, Side::A, 1, A.u.atom(3));
    CHECK(B.u.is_atom(y));
    CHECK(partial_iso(A.g, B.g, st.position));
    const ObjId z = d.respond(st, Side::B, 0, B.u.all_atoms());
    CHECK(z == A.u.all_atoms());
    CHECK(partial_iso(A.g, B.g, st.position));
}

TEST_CASE("identical structures") {
    Side1 A(4, 1, 1), B(4, 1, 1);
    const VerifyReport r = verify_duplicator(A.g, B.g, 1, 2, 3, 10000000);
    CHECK(r.ok);
    CHECK(r.complete);
    CHECK(r.nodes > 0);
}

TEST_CASE("a missing constant is found at once") {
    Side1 A(5, 1, 1), B(6, 1, 1);
    std::vector<ObjId> objs;
    for (ObjId x : B.f.objects)
        if (x != ONE) objs.push_back(x);
    const GameStructure noone = make_game_structure(B.u, objs);
    CHECK_FALSE(noone.has_one);
    const VerifyReport r = verify_duplicator(A.g, noone, 1, 2, 1, 1000000);
    CHECK_FALSE(r.ok);
    REQUIRE(r.counterexample.size() == 1);
    CHECK(r.counterexample[0].spoiler == ONE);
}

TEST_CASE("small fragments are told apart") {
    Side1 A(2, 1, 1), B(3, 1, 1);
    CHECK(verify_duplicator(A.g, B.g, 1, 3, 1, 1000000).ok);
    const SolveReport s = solve_game(A.g, B.g, 3, 3, 10000000);
    CHECK(s.spoiler_wins);
    REQUIRE(s.first_move);
    const SolveReport swapped = solve_game(B.g, A.g, 3, 3, 10000000);
    CHECK(swapped.spoiler_wins);
    CHECK_FALSE(solve_game(A.g, B.g, 3, 1, 10000000).spoiler_wins);
    CHECK_THROWS_AS(solve_game(A.g, B.g, 3, 3, 10), BudgetExceeded);
}

TEST_CASE("strategy and solver agree on large enough fragments") {
    Side1 A(5, 1, 1), B(6, 1, 1);
    const VerifyReport v = verify_duplicator(A.g, B.g, 1, 2, 2, 10000000);
    CHECK(v.ok);
    CHECK(v.complete);
    const VerifyReport w = verify_duplicator(B.g, A.g, 1, 2, 2, 10000000);
    CHECK(w.ok);
    CHECK_FALSE(solve_game(A.g, B.g, 2, 2, 10000000).spoiler_wins);
    const VerifyReport s1 = sample_duplicator(A.g, B.g, 1, 3, 4, 200, 7);
    const VerifyReport s2 = sample_duplicator(A.g, B.g, 1, 3, 4, 200, 7);
    CHECK(s1.ok);
    CHECK(s1.nodes == s2.nodes);
}

TEST_CASE("interactive session") {
    Side1 A(5, 1, 1), B(6, 1, 1);
    std::istringstream in("A 7 a0\nA 0 {a0, a1}\nA 0 a0\nshow\nquit\n");
    std::ostringstream out;
    play(in, out, A.g, B.g, 1, 2);
    const std::string text = out.str();
    CHECK(text.find("pebble index must be in 0..1") != std::string::npos);
    CHECK(text.find("object is not in structure A") != std::string::npos);
    CHECK(text.find("round 1: duplicator answers a") != std::string::npos);
    CHECK(text.find("round 2") == std::string::npos);
}
