#pragma once

// Terms, rules and programs of the ASM language, plus the parser and printer.

#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cps/errors.hpp"

namespace cps {

enum class Builtin { Eq, True, False, And, Or, Not, In, Empty, Atoms, Union, TheUnique, Pair };

/// Source spelling of a background name ("=", "and", "Pair", ...).
std::string_view builtin_name(Builtin b);
int builtin_arity(Builtin b);
bool builtin_relational(Builtin b);

struct SymbolDecl {
    std::string name;
    int arity = 0;
    bool relational = false;
};

/// Input relation names and dynamic function names. Halt and Output are always present,
/// both nullary and relational.
class Signature {
public:
    Signature();

    /// Returns the index of the new symbol; throws on duplicates or reserved names.
    int add_input(const std::string& name, int arity);
    int add_dynamic(const std::string& name, int arity, bool relational = false);

    const std::vector<SymbolDecl>& inputs() const { return inputs_; }
    const std::vector<SymbolDecl>& dynamics() const { return dynamics_; }
    std::optional<int> find_input(std::string_view name) const;
    std::optional<int> find_dynamic(std::string_view name) const;

    int halt() const { return 0; }
    int output() const { return 1; }

private:
    std::vector<SymbolDecl> inputs_;
    std::vector<SymbolDecl> dynamics_;
};

/// Names that can never be declared in a signature.
bool is_reserved_name(std::string_view name);

enum class SymKind { Builtin, Input, Dynamic, Unknown };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    enum class Kind { Var, Apply, Comprehension };

    Kind kind = Kind::Var;
    /// Variable name, applied symbol name, or the bound variable of a comprehension.
    std::string name;
    SymKind sym_kind = SymKind::Unknown;
    /// Builtin enum value, input index or dynamic index, depending on sym_kind.
    int sym = -1;
    /// Apply: arguments. Comprehension: {body, source, guard}.
    std::vector<TermPtr> args;
    SourcePos pos;

    Builtin builtin() const { return static_cast<Builtin>(sym); }
    bool is_builtin(Builtin b) const {
        return kind == Kind::Apply && sym_kind == SymKind::Builtin && sym == static_cast<int>(b);
    }
    const TermPtr& body() const { return args[0]; }
    const TermPtr& source() const { return args[1]; }
    const TermPtr& guard() const { return args[2]; }
};

struct Rule;
using RulePtr = std::shared_ptr<const Rule>;

struct Rule {
    enum class Kind { Skip, Assign, If, Forall };

    Kind kind = Kind::Skip;
    /// Assign: target name and its resolution.
    std::string target;
    SymKind target_kind = SymKind::Unknown;
    int sym = -1;
    /// Assign: argument terms followed by the value term. If: {condition}. Forall: {source}.
    std::vector<TermPtr> terms;
    /// Forall variable.
    std::string var;
    /// If: then/else. Forall: first is the body.
    RulePtr first;
    RulePtr second;
    SourcePos pos;

    std::span<const TermPtr> assign_args() const { return {terms.data(), terms.size() - 1}; }
    const TermPtr& assign_value() const { return terms.back(); }
};

struct Program {
    std::shared_ptr<const Signature> signature;
    RulePtr rule;
};

// ---- construction helpers (resolve names against a signature)

namespace build {
TermPtr var(std::string name);
TermPtr builtin(Builtin b, std::vector<TermPtr> args = {});
TermPtr apply(const Signature& sig, const std::string& name, std::vector<TermPtr> args = {});
TermPtr comprehension(TermPtr body, std::string var, TermPtr source, TermPtr guard);
TermPtr truth();
TermPtr falsity();
TermPtr empty();
TermPtr eq(TermPtr a, TermPtr b);
/// Von Neumann numeral i as a term built from 0, Pair and Union.
TermPtr numeral(int i);
/// {t1, ..., tk} as nested Pair/Union applications.
TermPtr enumeration(std::vector<TermPtr> items);

RulePtr skip();
RulePtr assign(const Signature& sig, const std::string& f, std::vector<TermPtr> args, TermPtr value);
RulePtr if_then(TermPtr cond, RulePtr then_rule, RulePtr else_rule = nullptr);
RulePtr forall(std::string var, TermPtr source, RulePtr body);
/// par r1 ... rk endpar, desugared into forall/if over the numerals 1..k.
RulePtr par(std::vector<RulePtr> rules);
}  // namespace build

// ---- analysis

std::set<std::string> free_vars(const Term& t);
std::set<std::string> free_vars(const Rule& r);

/// Structural AST equality, ignoring source positions.
bool same_term(const Term& a, const Term& b);
bool same_rule(const Rule& a, const Rule& b);

/// Empty iff the program is closed, arity-correct, only assigns dynamic names and only
/// uses relational symbols in Boolean positions.
std::vector<Diagnostic> validate(const Program& p);

// ---- text

/// Parses a program file; throws ParseError on syntax errors and ValidationError on
/// diagnostics from validate().
Program parse_program(std::string_view text);
/// Parses without running validate().
Program parse_program_unchecked(std::string_view text);
TermPtr parse_term(const Signature& sig, std::string_view text);
RulePtr parse_rule(const Signature& sig, std::string_view text);

std::string print_term(const Term& t);
std::string print_rule(const Rule& r, int indent = 0);
std::string print_program(const Program& p);

}  // namespace cps
