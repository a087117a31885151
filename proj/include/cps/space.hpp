#pragma once

// Active-object accounting, polynomially bounded runs and the accumulated active structure.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cps/eval.hpp"

namespace cps {

class Polynomial {
public:
    static constexpr std::size_t kMaxDegree = 8;

    Polynomial() = default;
    explicit Polynomial(std::vector<std::uint64_t> coeffs);

    /// Exact; throws Error on overflow of 64 bits.
    std::uint64_t operator()(std::uint64_t n) const;
    const std::vector<std::uint64_t>& coefficients() const { return coeffs_; }
    std::string str() const;

private:
    std::vector<std::uint64_t> coeffs_;
};

struct PSpaceMachine {
    Program program;
    Polynomial bound;
};

/// Program text plus one "space: c0 c1 ... cd" line.
PSpaceMachine parse_machine(std::string_view text);

std::vector<ObjId> critical_objects(Universe& u, const State& s);
/// Sorted by handle; transitive.
std::vector<ObjId> active_objects(Universe& u, const State& s);

enum class Outcome { Accept, Reject, SpaceExceeded, Diverges, StepCap };
std::string_view outcome_name(Outcome o);

struct RunTrace {
    std::vector<State> states;
    std::vector<std::size_t> active_counts;
    /// updates[i] takes states[i] to states[i + 1].
    std::vector<UpdateSet> updates;
    Outcome outcome = Outcome::StepCap;
    /// SpaceExceeded: index of the state that broke the bound.
    std::size_t exceeded_at = 0;
    /// Diverges: states[cycle_start] recurs after cycle_length steps.
    std::size_t cycle_start = 0;
    std::size_t cycle_length = 0;
    /// True when the last listed state is a SpaceExceeded witness outside the run.
    bool has_witness = false;

    /// States of the run proper, excluding a SpaceExceeded witness.
    std::size_t run_length() const { return states.size() - (has_witness ? 1 : 0); }
};

struct RunOptions {
    std::size_t max_steps = 100000;
};

RunTrace run(Universe& u, const PSpaceMachine& m, const InputStructure& in, const RunOptions& opt = {});

/// Finite structure for formula evaluation: a transitive domain inside a universe, plus
/// the input relations.
struct Structure {
    std::shared_ptr<Universe> universe;
    InputStructure input;
    /// Sorted by handle.
    std::vector<ObjId> domain;

    bool in_domain(ObjId x) const;
};

/// Union of the active objects of every state in the run (a SpaceExceeded witness is left out).
Structure active_structure(std::shared_ptr<Universe> u, const RunTrace& t, const InputStructure& in);

}  // namespace cps
