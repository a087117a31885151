#pragma once

// m-pebble games on membership structures and the form-based duplicator strategy.

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cps/symmetry.hpp"

namespace cps {

/// A transitive set of objects with membership and the constants 0 and 1 when present.
struct GameStructure {
    Universe* universe = nullptr;
    /// Sorted by handle.
    std::vector<ObjId> objects;
    bool has_empty = false;
    bool has_one = false;

    bool contains(ObjId x) const;
};

GameStructure make_game_structure(Universe& u, std::vector<ObjId> objects);

enum class Side { A, B };
inline Side other(Side s) { return s == Side::A ? Side::B : Side::A; }

/// Pebbles 0..m-1 on both structures; unset entries are unplaced.
struct Position {
    std::vector<std::optional<ObjId>> a;
    std::vector<std::optional<ObjId>> b;

    explicit Position(std::size_t m = 0) : a(m), b(m) {}
    friend auto operator<=>(const Position&, const Position&) = default;
    friend bool operator==(const Position&, const Position&) = default;
};

/// Equality and membership agree between the pebbled pairs, with 0 and 1 pinned as extra pairs.
bool partial_iso(const GameStructure& A, const GameStructure& B, const Position& p);

struct Move {
    Side side = Side::A;
    std::size_t pebble = 0;
    ObjId spoiler;
    ObjId response;
};

struct PebbleRep {
    FormId form = 0;
    Molecule a;
    Molecule b;
};

struct DuplicatorState {
    Position position;
    std::vector<std::optional<PebbleRep>> reps;

    explicit DuplicatorState(std::size_t m = 0) : position(m), reps(m) {}
};

/// Keeps pebbled objects as phi * sigma on A and phi * tau on B with conf(sigma) = conf(tau).
class Duplicator {
public:
    Duplicator(const GameStructure& A, const GameStructure& B, std::uint32_t k);

    /// Places pebble i on x0 in side s and answers on the other side. Throws NoExtension
    /// when the other side has too few atoms for a matching molecule.
    ObjId respond(DuplicatorState& st, Side s, std::size_t i, ObjId x0);

    const GameStructure& structure(Side s) const { return s == Side::A ? A_ : B_; }
    FormStore& forms() { return store_; }

private:
    const GameStructure& A_;
    const GameStructure& B_;
    std::uint32_t k_;
    FormStore store_;
    SupportOracle supp_a_, supp_b_;
    FormBuilder build_a_, build_b_;
    FormEvaluator eval_a_, eval_b_;
};

struct VerifyReport {
    bool ok = true;
    /// Complete traversal; false when the node budget ran out first.
    bool complete = true;
    std::size_t nodes = 0;
    std::vector<Move> counterexample;
    std::string error;
};

/// Every spoiler sequence of length <= depth against the duplicator strategy.
VerifyReport verify_duplicator(const GameStructure& A, const GameStructure& B, std::uint32_t k, std::size_t m,
                               std::size_t depth, std::size_t node_budget);

/// Uniformly drawn spoiler sequences of the given length, for sizes where the full tree is out
/// of reach. Deterministic for a given seed.
VerifyReport sample_duplicator(const GameStructure& A, const GameStructure& B, std::uint32_t k, std::size_t m,
                               std::size_t depth, std::size_t samples, std::uint64_t seed);

struct SolveReport {
    bool spoiler_wins = false;
    std::size_t nodes = 0;
    /// A winning first move for spoiler, when there is one.
    std::optional<Move> first_move;
};

/// Backward induction over positions without using forms: can spoiler force a position that is
/// not a partial isomorphism within depth rounds? Every answer tried counts as a node; throws
/// BudgetExceeded past node_budget.
SolveReport solve_game(const GameStructure& A, const GameStructure& B, std::size_t m, std::size_t depth,
                       std::size_t node_budget);

std::string print_position(const GameStructure& A, const GameStructure& B, const Position& p);

/// Line-oriented session: "A i <literal>", "B i <literal>", "show", "help", "quit".
void play(std::istream& in, std::ostream& out, const GameStructure& A, const GameStructure& B, std::uint32_t k,
          std::size_t m);

}  // namespace cps
