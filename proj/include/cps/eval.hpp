#pragma once

// States, term evaluation, update sets and successor states.

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cps/hf.hpp"
#include "cps/syntax.hpp"

namespace cps {

/// Finite structure over the input names: atom count plus relations on atom indices.
struct InputStructure {
    std::uint32_t atom_count = 0;
    std::map<std::string, std::set<std::vector<AtomId>>> relations;

    bool holds(const std::string& name, const std::vector<AtomId>& tuple) const;
    friend bool operator==(const InputStructure&, const InputStructure&) = default;
};

/// "atoms n" followed by one "R a0 a1 ..." line per tuple.
InputStructure parse_input(std::string_view text);
std::string print_input(const InputStructure& in);
/// Throws Error when a relation is undeclared, has a wrong arity, or names an atom >= n.
void check_input(const Signature& sig, const InputStructure& in);
InputStructure permute(const InputStructure& in, const Perm& p);

/// Read access to the dynamic functions, by signature index. Missing entries are EMPTY.
class DynamicView {
public:
    virtual ~DynamicView() = default;
    virtual ObjId lookup(int sym, std::span<const ObjId> args) const = 0;
};

using Table = std::map<Tuple, ObjId>;
struct UpdateSet;

/// Dynamic tables of one state. Values are never EMPTY; tables are shared between
/// successive states when untouched.
class State : public DynamicView {
public:
    State() = default;
    explicit State(std::shared_ptr<const Signature> sig);

    ObjId lookup(int sym, std::span<const ObjId> args) const override;
    const Table& table(int sym) const { return *tables_[sym]; }
    std::size_t symbol_count() const { return tables_.size(); }
    const std::shared_ptr<const Signature>& signature() const { return sig_; }

    bool halted() const { return lookup(0, {}) == ONE; }
    bool output() const { return lookup(1, {}) == ONE; }

    std::size_t hash() const { return hash_; }
    friend bool operator==(const State& a, const State& b);

private:
    friend State apply(const State&, const UpdateSet&);
    friend State permute(Universe&, const State&, const Perm&);
    void rehash();

    std::shared_ptr<const Signature> sig_;
    std::vector<std::shared_ptr<const Table>> tables_;
    std::size_t hash_ = 0;
};

struct StateHash {
    std::size_t operator()(const State& s) const noexcept { return s.hash(); }
};

struct Location {
    int sym = 0;
    Tuple args;
    friend auto operator<=>(const Location&, const Location&) = default;
    friend bool operator==(const Location&, const Location&) = default;
};

struct Update {
    Location loc;
    ObjId value;
    friend auto operator<=>(const Update&, const Update&) = default;
    friend bool operator==(const Update&, const Update&) = default;
};

/// Sorted, duplicate-free list of updates.
struct UpdateSet {
    std::vector<Update> updates;

    void normalize();
    bool empty() const { return updates.empty(); }
    std::size_t size() const { return updates.size(); }
    friend bool operator==(const UpdateSet&, const UpdateSet&) = default;
};

/// Variable assignment; later bindings shadow earlier ones.
class Binding {
public:
    void push(std::string name, ObjId value) { vars_.emplace_back(std::move(name), value); }
    void pop() { vars_.pop_back(); }
    const ObjId* find(std::string_view name) const;
    ObjId get(std::string_view name) const;
    const std::vector<std::pair<std::string, ObjId>>& entries() const { return vars_; }

private:
    std::vector<std::pair<std::string, ObjId>> vars_;
};

struct EvalContext {
    EvalContext(Universe& u, const Signature& sig, const InputStructure& input, const DynamicView& dyn);

    Universe& universe;
    const Signature& signature;
    const InputStructure& input;
    const DynamicView& dynamic;
    /// Input relations resolved by signature index (nullptr when absent from the file).
    std::vector<const std::set<std::vector<AtomId>>*> relations;
};

ObjId eval_term(const EvalContext& ctx, Binding& b, const Term& t);
bool input_holds(const EvalContext& ctx, int sym, std::span<const ObjId> args);

UpdateSet update_set(const EvalContext& ctx, Binding& b, const Rule& r);
bool is_consistent(const UpdateSet& d);

/// S + Δ. Inconsistent sets leave S unchanged. Throws DynamicError when a relational
/// location would receive a non-Boolean value.
State apply(const State& s, const UpdateSet& d);
State initial_state(std::shared_ptr<const Signature> sig);

/// One step of the main rule, also returning the update set that was applied.
std::pair<State, UpdateSet> step(Universe& u, const Program& p, const InputStructure& in, const State& s);

State permute(Universe& u, const State& s, const Perm& p);

std::string print_update_set(const Universe& u, const Signature& sig, const UpdateSet& d);
std::string print_state(const Universe& u, const State& s);

}  // namespace cps
