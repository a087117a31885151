#pragma once

// First-order formulas over the background, update formulas of rules, and simultaneous
// partial fixed points on finite structures.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cps/eval.hpp"
#include "cps/space.hpp"

namespace cps {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    enum class Kind { True, False, Eq, Holds, Rel, Def, Not, And, Or, Exists, Forall, BExists, BForall };

    Kind kind = Kind::True;
    /// Eq: {lhs, rhs}. Holds: {t}, true iff t evaluates to 1. Rel/Def: relation arguments.
    /// BExists/BForall: {range}.
    std::vector<TermPtr> terms;
    /// Free variables of each entry of terms.
    std::vector<std::vector<std::string>> term_vars;
    /// Rel/Def: relation index and display name.
    int rel = -1;
    std::string rel_name;
    /// Quantified variable; for Def the value variable.
    std::string var;
    std::vector<FormulaPtr> subs;
};

/// Constructors fold constants; f_eq of syntactically equal terms is true.
namespace fo {
FormulaPtr truth();
FormulaPtr falsity();
FormulaPtr eq(TermPtr a, TermPtr b);
FormulaPtr holds(TermPtr t);
FormulaPtr rel(int index, std::string name, std::vector<TermPtr> args);
/// rel(index, args ++ [v]) or (v = 0 and no tuple extends args): the default-0 reading of a
/// function stored as a relation.
FormulaPtr def(int index, std::string name, std::vector<TermPtr> args, std::string v);
FormulaPtr neg(FormulaPtr f);
FormulaPtr conj(std::vector<FormulaPtr> fs);
FormulaPtr disj(std::vector<FormulaPtr> fs);
FormulaPtr exists(std::string v, FormulaPtr body);
FormulaPtr forall(std::string v, FormulaPtr body);
FormulaPtr exists_in(std::string v, TermPtr range, FormulaPtr body);
FormulaPtr forall_in(std::string v, TermPtr range, FormulaPtr body);
}  // namespace fo

std::set<std::string> free_vars(const Formula& f);

/// updMem(x, y) and Con(r): true iff ((f, x), y) is in the update set of r and that update
/// set is consistent. Binders from the rule become quantifiers bounded by their range.
FormulaPtr upd_mem_formula(const Program& p, const Rule& r, int f, const std::vector<std::string>& xs,
                           const std::string& y);
FormulaPtr con_formula(const Program& p, const Rule& r);
FormulaPtr upd_formula(const Program& p, const Rule& r, int f, const std::vector<std::string>& xs,
                       const std::string& y);

/// Term normal form: every dynamic application outside comprehensions is moved into a Def
/// atom on a fresh variable _tnf0, _tnf1, ... Dynamic symbol g becomes relation index g.
FormulaPtr flatten(const Program& p, const FormulaPtr& f, int& counter);
FormulaPtr u_formula(const Program& p, int f, const std::vector<std::string>& xs, const std::string& y,
                     int& counter);

struct PfpRelation {
    std::string name;
    std::vector<std::string> params;
    FormulaPtr body;
};

struct PfpSystem {
    std::vector<PfpRelation> relations;
};

std::string relation_name(const Signature& sig, int f);
/// The simultaneous induction for the dynamic symbols of p; relation i belongs to dynamic i.
PfpSystem fixed_point_system(const Program& p);

using RelTable = std::set<Tuple>;
using RelTables = std::vector<RelTable>;

/// Reads relation i as a function: the last coordinate of a tuple extending args, or 0.
class TableView : public DynamicView {
public:
    explicit TableView(const RelTables& t) : tables_(t) {}
    ObjId lookup(int sym, std::span<const ObjId> args) const override;

private:
    const RelTables& tables_;
};

struct FormulaContext {
    const EvalContext& terms;
    /// Interpretations of Rel/Def atoms; may be null when the formula has none.
    const RelTables* relations = nullptr;
    /// Range of unbounded quantifiers, sorted by handle.
    const std::vector<ObjId>* domain = nullptr;
};

bool eval_formula(const FormulaContext& ctx, Binding& b, const Formula& f);

struct PfpResult {
    RelTables tables;
    /// Stages 0, 1, ...; the last one is the fixed point when one was reached.
    std::vector<RelTables> stages;
    bool fixed_point = false;
};

struct PfpOptions {
    std::size_t max_stages = 100000;
    bool keep_stages = true;
};

/// Stage 0 is empty; each stage recomputes every relation from the previous one. Returns the
/// fixed point, or empty tables when a stage repeats first.
PfpResult pfp_iterate(const PfpSystem& sys, Universe& u, const Signature& sig, const InputStructure& in,
                      const std::vector<ObjId>& domain, const PfpOptions& opt = {});

enum class Verdict { Accept, Reject, Unknown };
std::string_view verdict_name(Verdict v);
Verdict acceptance(const RelTables& tables);

/// D tables of a state: (args ++ [value]) for every stored entry.
RelTables state_tables(const State& s);

struct LockstepReport {
    bool ok = true;
    std::size_t compared = 0;
    /// First stage index that differs from its state, when !ok.
    std::size_t first_mismatch = 0;
    PfpResult pfp;
    Verdict verdict = Verdict::Unknown;
};

/// Iterates the system of m on the active structure of its run and compares stage i with S_i
/// for every state of the run.
LockstepReport lockstep(std::shared_ptr<Universe> u, const PSpaceMachine& m, const InputStructure& in,
                        const RunTrace& t);

std::string print_formula(const Formula& f);
std::string print_system(const PfpSystem& sys);

}  // namespace cps
