#include "cps/pebble.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>

namespace cps {

bool GameStructure::contains(ObjId x) const { return std::binary_search(objects.begin(), objects.end(), x); }

GameStructure make_game_structure(Universe& u, std::vector<ObjId> objects) {
    GameStructure g;
    g.universe = &u;
    std::sort(objects.begin(), objects.end());
    objects.erase(std::unique(objects.begin(), objects.end()), objects.end());
    g.objects = std::move(objects);
    g.has_empty = g.contains(EMPTY);
    g.has_one = g.contains(ONE);
    return g;
}

namespace {

std::vector<std::optional<ObjId>>& side_of(Position& p, Side s) { return s == Side::A ? p.a : p.b; }

}  // namespace

bool partial_iso(const GameStructure& A, const GameStructure& B, const Position& p) {
    std::vector<std::pair<ObjId, ObjId>> pairs;
    if (A.has_empty && B.has_empty) pairs.emplace_back(EMPTY, EMPTY);
    if (A.has_one && B.has_one) pairs.emplace_back(ONE, ONE);
    const std::size_t pinned = pairs.size();
    for (std::size_t i = 0; i < p.a.size(); ++i) {
        if (p.a[i].has_value() != p.b[i].has_value()) return false;
        if (p.a[i]) pairs.emplace_back(*p.a[i], *p.b[i]);
    }
    // A constant present on one side only cannot be matched by anything on the other.
    for (std::size_t i = pinned; i < pairs.size(); ++i) {
        auto [x, y] = pairs[i];
        if ((A.has_empty != B.has_empty) && (A.has_empty ? x == EMPTY : y == EMPTY)) return false;
        if ((A.has_one != B.has_one) && (A.has_one ? x == ONE : y == ONE)) return false;
    }
    const Universe& ua = *A.universe;
    const Universe& ub = *B.universe;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            auto [xi, yi] = pairs[i];
            auto [xj, yj] = pairs[j];
            if ((xi == xj) != (yi == yj)) return false;
            if (ua.contains(xj, xi) != ub.contains(yj, yi)) return false;
        }
    return true;
}

Duplicator::Duplicator(const GameStructure& A, const GameStructure& B, std::uint32_t k)
    : A_(A),
      B_(B),
      k_(k),
      store_(k),
      supp_a_(*A.universe),
      supp_b_(*B.universe),
      build_a_(supp_a_, store_),
      build_b_(supp_b_, store_),
      eval_a_(*A.universe, store_),
      eval_b_(*B.universe, store_) {}

namespace {

// Depth-first over injective tuples, pruning each position against the placed molecules.
bool extend(const Molecule& sigma0, const std::vector<std::pair<const Molecule*, const Molecule*>>& placed,
            std::uint32_t n, Molecule& tau0) {
    const std::size_t p = tau0.size();
    if (p == sigma0.size()) return true;
    for (AtomId c = 0; c < n; ++c) {
        if (std::find(tau0.begin(), tau0.end(), c) != tau0.end()) continue;
        bool ok = true;
        for (auto [home, away] : placed) {
            for (std::size_t q = 0; q < home->size() && ok; ++q)
                ok = ((*home)[q] == sigma0[p]) == ((*away)[q] == c);
            if (!ok) break;
        }
        if (!ok) continue;
        tau0.push_back(c);
        if (extend(sigma0, placed, n, tau0)) return true;
        tau0.pop_back();
    }
    return false;
}

}  // namespace

ObjId Duplicator::respond(DuplicatorState& st, Side s, std::size_t i, ObjId x0) {
    if (i >= st.reps.size()) throw Error("pebble index " + std::to_string(i) + " out of range");
    const bool home_a = s == Side::A;
    FormBuilder& build = home_a ? build_a_ : build_b_;
    FormEvaluator& eval = home_a ? eval_b_ : eval_a_;
    const GameStructure& away = structure(other(s));

    auto [phi0, sigma0] = build.form_of(x0);
    std::vector<std::pair<const Molecule*, const Molecule*>> placed;
    for (std::size_t j = 0; j < st.reps.size(); ++j) {
        if (j == i || !st.reps[j]) continue;
        const PebbleRep& r = *st.reps[j];
        placed.emplace_back(home_a ? &r.a : &r.b, home_a ? &r.b : &r.a);
    }
    Molecule tau0;
    if (!extend(sigma0, placed, away.universe->atom_count(), tau0))
        throw NoExtension("no molecule over " + std::to_string(away.universe->atom_count()) +
                          " atoms matches the configuration of " + std::to_string(placed.size() + 1) +
                          " molecules");
    const ObjId y0 = eval.apply(phi0, tau0);

    PebbleRep rep;
    rep.form = phi0;
    rep.a = home_a ? sigma0 : tau0;
    rep.b = home_a ? tau0 : sigma0;
    st.reps[i] = std::move(rep);
    side_of(st.position, s)[i] = x0;
    side_of(st.position, other(s))[i] = y0;
    return y0;
}

namespace {

struct Verifier {
    const GameStructure& A;
    const GameStructure& B;
    Duplicator dup;
    std::size_t m;
    std::size_t budget;
    VerifyReport report;
    std::vector<Move> trace;

    Verifier(const GameStructure& a, const GameStructure& b, std::uint32_t k, std::size_t m_, std::size_t budget_)
        : A(a), B(b), dup(a, b, k), m(m_), budget(budget_) {}

    // False once a counterexample or an exhausted budget stops the search.
    bool try_move(DuplicatorState& st, Side s, std::size_t i, ObjId x0) {
        if (++report.nodes > budget) {
            report.complete = false;
            return false;
        }
        Move mv{s, i, x0, x0};
        try {
            mv.response = dup.respond(st, s, i, x0);
        } catch (const Error& e) {
            report.ok = false;
            report.error = e.what();
            trace.push_back(mv);
            report.counterexample = trace;
            return false;
        }
        trace.push_back(mv);
        if (!dup.structure(other(s)).contains(mv.response)) {
            report.ok = false;
            report.error = "response lies outside the other structure";
        } else if (!partial_iso(A, B, st.position)) {
            report.ok = false;
            report.error = "position is not a partial isomorphism";
        }
        if (!report.ok) {
            report.counterexample = trace;
            return false;
        }
        return true;
    }

    bool dfs(const DuplicatorState& st, std::size_t depth) {
        if (depth == 0) return true;
        for (Side s : {Side::A, Side::B})
            for (std::size_t i = 0; i < m; ++i)
                for (ObjId x0 : dup.structure(s).objects) {
                    DuplicatorState next = st;
                    const bool ok = try_move(next, s, i, x0) && dfs(next, depth - 1);
                    if (!ok) return false;
                    trace.pop_back();
                }
        return true;
    }
};

}  // namespace

VerifyReport verify_duplicator(const GameStructure& A, const GameStructure& B, std::uint32_t k, std::size_t m,
                               std::size_t depth, std::size_t node_budget) {
    Verifier v(A, B, k, m, node_budget);
    if (!partial_iso(A, B, Position(m))) {
        v.report.ok = false;
        v.report.error = "start position is not a partial isomorphism";
        return v.report;
    }
    v.dfs(DuplicatorState(m), depth);
    return v.report;
}

VerifyReport sample_duplicator(const GameStructure& A, const GameStructure& B, std::uint32_t k, std::size_t m,
                               std::size_t depth, std::size_t samples, std::uint64_t seed) {
    Verifier v(A, B, k, m, static_cast<std::size_t>(-1));
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < samples; ++t) {
        DuplicatorState st(m);
        v.trace.clear();
        for (std::size_t d = 0; d < depth; ++d) {
            const Side s = rng() % 2 ? Side::B : Side::A;
            const std::size_t i = rng() % m;
            const auto& objs = v.dup.structure(s).objects;
            if (!v.try_move(st, s, i, objs[rng() % objs.size()])) return v.report;
        }
    }
    return v.report;
}

// ---------------------------------------------------------------- solver

namespace {

struct Solver {
    const GameStructure& A;
    const GameStructure& B;
    std::size_t m;
    std::size_t budget;
    std::size_t nodes = 0;
    std::map<std::pair<Position, std::size_t>, bool> memo;

    const GameStructure& str(Side s) const { return s == Side::A ? A : B; }

    std::map<std::tuple<int, std::uint32_t, std::size_t>, std::vector<ObjId>> order_cache;

    // Objects of the other side, most similar in rank and cardinality to x0 first.
    const std::vector<ObjId>& answer_order(Side s, ObjId x0) {
        const Universe& uh = *str(s).universe;
        const Universe& ua = *str(other(s)).universe;
        const auto key = std::make_tuple(s == Side::A ? 0 : 1, uh.rank(x0), uh.cardinality(x0));
        auto it = order_cache.find(key);
        if (it != order_cache.end()) return it->second;
        auto score = [&](ObjId y) {
            return std::make_pair(std::abs(int(uh.rank(x0)) - int(ua.rank(y))),
                                  std::abs(static_cast<long>(uh.cardinality(x0)) - static_cast<long>(ua.cardinality(y))));
        };
        std::vector<ObjId> ys = str(other(s)).objects;
        std::stable_sort(ys.begin(), ys.end(), [&](ObjId l, ObjId r) { return score(l) < score(r); });
        return order_cache.emplace(key, std::move(ys)).first->second;
    }

    bool spoiler_wins(const Position& p, std::size_t d, std::optional<Move>* first) {
        if (d == 0) return false;
        auto key = std::make_pair(p, d);
        if (auto it = memo.find(key); it != memo.end() && !first) return it->second;
        bool win = false;
        for (Side s : {Side::A, Side::B}) {
            for (std::size_t i = 0; i < m && !win; ++i)
                for (ObjId x0 : str(s).objects) {
                    bool survives = false;
                    Position q = p;
                    side_of(q, s)[i] = x0;
                    for (ObjId y : answer_order(s, x0)) {
                        side_of(q, other(s))[i] = y;
                        if (++nodes > budget)
                            throw BudgetExceeded("solve_game: more than " + std::to_string(budget) + " nodes");
                        if (!partial_iso(A, B, q)) continue;
                        if (!spoiler_wins(q, d - 1, nullptr)) {
                            survives = true;
                            break;
                        }
                    }
                    if (!survives) {
                        win = true;
                        if (first) *first = Move{s, i, x0, x0};
                        break;
                    }
                }
            if (win) break;
        }
        memo[key] = win;
        return win;
    }
};

}  // namespace

SolveReport solve_game(const GameStructure& A, const GameStructure& B, std::size_t m, std::size_t depth,
                       std::size_t node_budget) {
    Solver s{A, B, m, node_budget, 0, {}, {}};
    SolveReport r;
    const Position start(m);
    if (!partial_iso(A, B, start)) {
        r.spoiler_wins = true;
        return r;
    }
    r.spoiler_wins = s.spoiler_wins(start, depth, &r.first_move);
    r.nodes = s.nodes;
    return r;
}

// ---------------------------------------------------------------- display and play

std::string print_position(const GameStructure& A, const GameStructure& B, const Position& p) {
    std::string out;
    for (std::size_t i = 0; i < p.a.size(); ++i) {
        out += "pebble " + std::to_string(i) + ": ";
        out += p.a[i] ? A.universe->to_literal(*p.a[i]) : std::string("-");
        out += "  |  ";
        out += p.b[i] ? B.universe->to_literal(*p.b[i]) : std::string("-");
        out += "\n";
    }
    return out;
}

void play(std::istream& in, std::ostream& out, const GameStructure& A, const GameStructure& B, std::uint32_t k,
          std::size_t m) {
    Duplicator dup(A, B, k);
    DuplicatorState st(m);
    std::size_t round = 0;
    out << "spoiler vs duplicator, " << m << " pebbles. moves: A i <literal> | B i <literal> | show | quit\n";
    std::string line;
    while (out << "> " << std::flush, std::getline(in, line)) {
        std::istringstream ls(line);
        std::string cmd;
        if (!(ls >> cmd)) continue;
        if (cmd == "quit" || cmd == "exit") break;
        if (cmd == "show") {
            out << print_position(A, B, st.position);
            continue;
        }
        if (cmd == "help") {
            out << "A i <literal>   place pebble i on an object of A\n"
                   "B i <literal>   place pebble i on an object of B\n"
                   "show            print the position\n"
                   "quit            leave\n";
            continue;
        }
        if (cmd != "A" && cmd != "B") {
            out << "unknown command '" << cmd << "'; try help\n";
            continue;
        }
        long idx = -1;
        if (!(ls >> idx) || idx < 0 || static_cast<std::size_t>(idx) >= m) {
            out << "pebble index must be in 0.." << m - 1 << "\n";
            continue;
        }
        std::string lit;
        std::getline(ls, lit);
        const Side s = cmd == "A" ? Side::A : Side::B;
        const GameStructure& home = s == Side::A ? A : B;
        ObjId x0;
        try {
            x0 = home.universe->parse_literal(lit);
        } catch (const Error& e) {
            out << "bad literal: " << e.what() << "\n";
            continue;
        }
        if (!home.contains(x0)) {
            out << "object is not in structure " << cmd << "\n";
            continue;
        }
        DuplicatorState next = st;
        ObjId y0;
        try {
            y0 = dup.respond(next, s, static_cast<std::size_t>(idx), x0);
        } catch (const Error& e) {
            out << "duplicator has no answer: " << e.what() << "\n";
            break;
        }
        st = std::move(next);
        ++round;
        const GameStructure& away = s == Side::A ? B : A;
        out << "round " << round << ": duplicator answers " << away.universe->to_literal(y0) << "\n";
        if (!away.contains(y0) || !partial_iso(A, B, st.position)) {
            out << "spoiler wins: the position is not a partial isomorphism\n";
            break;
        }
    }
}

}  // namespace cps
