#include <random>
#include <set>
#include <string>

#include "doctest.h"

#include "cps/errors.hpp"
#include "cps/hf.hpp"

using namespace cps;

namespace {

// Independent model: a set is its sorted list of normalized element strings.
struct Tree {
    int atom = -1;
    std::vector<Tree> kids;
};

std::string norm(const Tree& t) {
    if (t.atom >= 0) return "a" + std::to_string(t.atom);
    std::set<std::string> ks;
    for (const Tree& k : t.kids) ks.insert(norm(k));
    std::string s = "{";
    for (const auto& k : ks) s += k + ";";
    return s + "}";
}

Tree random_tree(std::mt19937& rng, int atoms, int depth) {
    Tree t;
    if (depth == 0 || rng() % 4 == 0) {
        if (rng() % 3) {
            t.atom = static_cast<int>(rng() % atoms);
            return t;
        }
        return t;  // empty set
    }
    const int n = static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) t.kids.push_back(random_tree(rng, atoms, depth - 1));
    // Duplicates on purpose.
    if (n && rng() % 2) t.kids.push_back(t.kids[0]);
    return t;
}

ObjId build(Universe& u, const Tree& t) {
    if (t.atom >= 0) return u.atom(static_cast<AtomId>(t.atom));
    std::vector<ObjId> es;
    for (const Tree& k : t.kids) es.push_back(build(u, k));
    return u.mk_set(std::move(es));
}

}  // namespace

TEST_CASE("mk_set basics") {
    Universe u(3);
    CHECK(u.mk_set({}) == EMPTY);
    CHECK(u.mk_set({EMPTY, EMPTY}) == ONE);
    const ObjId a = u.atom(0), b = u.atom(1);
    CHECK(u.mk_set({a, b}) == u.mk_set({b, a}));
    CHECK(u.to_literal(EMPTY) == "0");
    CHECK(u.to_literal(ONE) == "1");
}

TEST_CASE("rank") {
    Universe u(2);
    CHECK(u.rank(EMPTY) == 0);
    CHECK(u.rank(u.atom(1)) == 0);
    CHECK(u.rank(u.singleton(ONE)) == 2);
    CHECK(u.rank(u.mk_set({u.atom(0), ONE})) == 2);
}

TEST_CASE("transitive closure examples") {
    Universe u(3);
    CHECK(u.tc(EMPTY) == std::vector<ObjId>{EMPTY});
    CHECK(u.tc(u.atom(2)) == std::vector<ObjId>{u.atom(2)});
    const ObjId a = u.atom(0), b = u.atom(1), sb = u.singleton(b);
    const ObjId x = u.mk_set({a, sb});
    std::vector<ObjId> want{x, a, sb, b};
    std::sort(want.begin(), want.end());
    auto got = u.tc(x);
    std::sort(got.begin(), got.end());
    CHECK(got == want);
}

TEST_CASE("apply_perm examples") {
    Universe u(3);
    const ObjId a = u.atom(0), b = u.atom(1), c = u.atom(2);
    const ObjId x = u.mk_set({a, u.mk_set({a, c})});
    CHECK(u.apply_perm(Perm::identity(3), x) == x);
    CHECK(u.apply_perm(Perm::transposition(3, 0, 1), EMPTY) == EMPTY);
    CHECK(u.apply_perm(Perm::transposition(3, 0, 1), x) == u.mk_set({b, u.mk_set({b, c})}));
}

TEST_CASE("literal round trip") {
    Universe u(3);
    const ObjId x = u.parse_literal("{a0, {a1, {}}, {{}}}");
    CHECK(x == u.mk_set({u.atom(0), u.mk_set({u.atom(1), EMPTY}), ONE}));
    CHECK(u.parse_literal(u.to_literal(x)) == x);
    CHECK(u.parse_literal("1") == ONE);
    CHECK_THROWS_AS(u.parse_literal("{a0,"), ParseError);
    CHECK_THROWS(u.parse_literal("a7"));
}

TEST_CASE("interning agrees with structural equality") {
    std::mt19937 rng(7);
    Universe u(5);
    std::vector<std::pair<std::string, ObjId>> seen;
    for (int i = 0; i < 600; ++i) {
        const Tree t = random_tree(rng, 5, 3);
        seen.emplace_back(norm(t), build(u, t));
    }
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < seen.size(); ++i)
        for (std::size_t j = i; j < seen.size(); ++j)
            if ((seen[i].first == seen[j].first) != (seen[i].second == seen[j].second)) ++mismatches;
    CHECK(mismatches == 0);
}

TEST_CASE("rank, transitivity and permutation properties") {
    std::mt19937 rng(11);
    Universe u(4);
    const auto perms = all_perms(4);
    for (int i = 0; i < 200; ++i) {
        const ObjId x = build(u, random_tree(rng, 4, 3));
        const auto closure = u.tc(x);
        for (ObjId z : closure) {
            if (u.is_atom(z)) continue;
            for (ObjId w : u.elements(z)) {
                CHECK(u.rank(w) < u.rank(z));
                CHECK(std::find(closure.begin(), closure.end(), w) != closure.end());
            }
        }
        const Perm& p = perms[rng() % perms.size()];
        const Perm& q = perms[rng() % perms.size()];
        const ObjId px = u.apply_perm(q, x);
        CHECK(u.apply_perm(p * q, x) == u.apply_perm(p, px));
        CHECK(u.rank(px) == u.rank(x));
        CHECK(u.tc(px).size() == u.tc(x).size());
    }
}

TEST_CASE("canonical order puts atoms first") {
    Universe u(3);
    std::vector<ObjId> xs{u.mk_set({u.atom(2)}), u.atom(1), EMPTY, u.atom(0), ONE};
    u.sort_canonical(xs);
    CHECK(xs[0] == u.atom(0));
    CHECK(xs[1] == u.atom(1));
    CHECK(xs[2] == EMPTY);
}
