#include "cps/syntax.hpp"

#include <algorithm>
#include <array>

namespace cps {

namespace {

struct BuiltinInfo {
    std::string_view name;
    int arity;
    bool relational;
};

constexpr std::array<BuiltinInfo, 12> kBuiltins{{
    {"=", 2, true},
    {"true", 0, true},
    {"false", 0, true},
    {"and", 2, true},
    {"or", 2, true},
    {"not", 1, true},
    {"in", 2, true},
    {"0", 0, false},
    {"Atoms", 0, false},
    {"Union", 1, false},
    {"TheUnique", 1, false},
    {"Pair", 2, false},
}};

constexpr std::array<std::string_view, 27> kReserved{
    "skip",   "if",    "then",      "else",  "endif", "forall",  "in",      "do",     "enddo",
    "par",    "endpar", "and",      "or",    "not",   "true",    "false",   "Atoms",  "Union",
    "TheUnique", "Pair", "empty",   "signature", "rule", "input", "dynamic", "relational", "space"};

}  // namespace

std::string_view builtin_name(Builtin b) { return kBuiltins[static_cast<int>(b)].name; }
int builtin_arity(Builtin b) { return kBuiltins[static_cast<int>(b)].arity; }
bool builtin_relational(Builtin b) { return kBuiltins[static_cast<int>(b)].relational; }

bool is_reserved_name(std::string_view name) {
    return std::find(kReserved.begin(), kReserved.end(), name) != kReserved.end();
}

// ---------------------------------------------------------------- Signature

Signature::Signature() {
    dynamics_.push_back({"Halt", 0, true});
    dynamics_.push_back({"Output", 0, true});
}

int Signature::add_input(const std::string& name, int arity) {
    if (is_reserved_name(name)) throw Error("'" + name + "' is a background name");
    if (find_input(name) || find_dynamic(name)) throw Error("duplicate symbol '" + name + "'");
    if (arity < 0) throw Error("negative arity for '" + name + "'");
    inputs_.push_back({name, arity, true});
    return static_cast<int>(inputs_.size()) - 1;
}

int Signature::add_dynamic(const std::string& name, int arity, bool relational) {
    if (is_reserved_name(name)) throw Error("'" + name + "' is a background name");
    if (auto existing = find_dynamic(name)) {
        // Halt and Output may be restated as long as the declaration matches.
        if (*existing <= output() && arity == 0) return *existing;
        throw Error("duplicate symbol '" + name + "'");
    }
    if (find_input(name)) throw Error("duplicate symbol '" + name + "'");
    if (arity < 0) throw Error("negative arity for '" + name + "'");
    dynamics_.push_back({name, arity, relational});
    return static_cast<int>(dynamics_.size()) - 1;
}

std::optional<int> Signature::find_input(std::string_view name) const {
    for (std::size_t i = 0; i < inputs_.size(); ++i)
        if (inputs_[i].name == name) return static_cast<int>(i);
    return std::nullopt;
}

std::optional<int> Signature::find_dynamic(std::string_view name) const {
    for (std::size_t i = 0; i < dynamics_.size(); ++i)
        if (dynamics_[i].name == name) return static_cast<int>(i);
    return std::nullopt;
}

// ---------------------------------------------------------------- build

namespace build {

TermPtr var(std::string name) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Var;
    t->name = std::move(name);
    return t;
}

TermPtr builtin(Builtin b, std::vector<TermPtr> args) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Apply;
    t->name = std::string(builtin_name(b));
    t->sym_kind = SymKind::Builtin;
    t->sym = static_cast<int>(b);
    t->args = std::move(args);
    return t;
}

TermPtr apply(const Signature& sig, const std::string& name, std::vector<TermPtr> args) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Apply;
    t->name = name;
    t->args = std::move(args);
    if (auto d = sig.find_dynamic(name)) {
        t->sym_kind = SymKind::Dynamic;
        t->sym = *d;
    } else if (auto i = sig.find_input(name)) {
        t->sym_kind = SymKind::Input;
        t->sym = *i;
    } else {
        for (int b = 0; b < static_cast<int>(kBuiltins.size()); ++b) {
            if (kBuiltins[b].name == name) {
                t->sym_kind = SymKind::Builtin;
                t->sym = b;
            }
        }
    }
    return t;
}

TermPtr comprehension(TermPtr body, std::string v, TermPtr source, TermPtr guard) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Comprehension;
    t->name = std::move(v);
    t->args = {std::move(body), std::move(source), std::move(guard)};
    return t;
}

TermPtr truth() { return builtin(Builtin::True); }
TermPtr falsity() { return builtin(Builtin::False); }
TermPtr empty() { return builtin(Builtin::Empty); }
TermPtr eq(TermPtr a, TermPtr b) { return builtin(Builtin::Eq, {std::move(a), std::move(b)}); }

TermPtr numeral(int i) {
    if (i <= 0) return empty();
    if (i == 1) return truth();
    TermPtr prev = numeral(i - 1);
    return builtin(Builtin::Union, {builtin(Builtin::Pair, {prev, builtin(Builtin::Pair, {prev, prev})})});
}

TermPtr enumeration(std::vector<TermPtr> items) {
    if (items.empty()) return empty();
    if (items.size() == 1) return builtin(Builtin::Pair, {items[0], items[0]});
    if (items.size() == 2) return builtin(Builtin::Pair, {items[0], items[1]});
    TermPtr last = items.back();
    items.pop_back();
    return builtin(Builtin::Union,
                   {builtin(Builtin::Pair, {enumeration(std::move(items)), builtin(Builtin::Pair, {last, last})})});
}

RulePtr skip() { return std::make_shared<Rule>(); }

RulePtr assign(const Signature& sig, const std::string& f, std::vector<TermPtr> args, TermPtr value) {
    auto r = std::make_shared<Rule>();
    r->kind = Rule::Kind::Assign;
    r->target = f;
    if (auto d = sig.find_dynamic(f)) {
        r->target_kind = SymKind::Dynamic;
        r->sym = *d;
    } else if (auto i = sig.find_input(f)) {
        r->target_kind = SymKind::Input;
        r->sym = *i;
    } else if (is_reserved_name(f) || f == "=") {
        r->target_kind = SymKind::Builtin;
    }
    r->terms = std::move(args);
    r->terms.push_back(std::move(value));
    return r;
}

RulePtr if_then(TermPtr cond, RulePtr then_rule, RulePtr else_rule) {
    auto r = std::make_shared<Rule>();
    r->kind = Rule::Kind::If;
    r->terms = {std::move(cond)};
    r->first = std::move(then_rule);
    r->second = else_rule ? std::move(else_rule) : skip();
    return r;
}

RulePtr forall(std::string v, TermPtr source, RulePtr body) {
    auto r = std::make_shared<Rule>();
    r->kind = Rule::Kind::Forall;
    r->var = std::move(v);
    r->terms = {std::move(source)};
    r->first = std::move(body);
    return r;
}

RulePtr par(std::vector<RulePtr> rules) {
    const std::string v = "_p";
    const int k = static_cast<int>(rules.size());
    if (k == 0) return skip();
    RulePtr chain = skip();
    for (int i = k; i >= 1; --i) chain = if_then(eq(var(v), numeral(i)), rules[i - 1], chain);
    std::vector<TermPtr> nums;
    for (int i = 1; i <= k; ++i) nums.push_back(numeral(i));
    return forall(v, enumeration(std::move(nums)), chain);
}

}  // namespace build

// ---------------------------------------------------------------- free variables

namespace {

void collect_free(const Term& t, std::set<std::string>& out) {
    switch (t.kind) {
        case Term::Kind::Var:
            out.insert(t.name);
            return;
        case Term::Kind::Apply:
            for (const auto& a : t.args) collect_free(*a, out);
            return;
        case Term::Kind::Comprehension: {
            std::set<std::string> inner;
            collect_free(*t.body(), inner);
            collect_free(*t.guard(), inner);
            inner.erase(t.name);
            // v does not occur free in the source, so removing it after the union is the same.
            std::set<std::string> src;
            collect_free(*t.source(), src);
            src.erase(t.name);
            out.insert(inner.begin(), inner.end());
            out.insert(src.begin(), src.end());
            return;
        }
    }
}

void collect_free(const Rule& r, std::set<std::string>& out) {
    switch (r.kind) {
        case Rule::Kind::Skip:
            return;
        case Rule::Kind::Assign:
            for (const auto& t : r.terms) collect_free(*t, out);
            return;
        case Rule::Kind::If:
            collect_free(*r.terms[0], out);
            collect_free(*r.first, out);
            collect_free(*r.second, out);
            return;
        case Rule::Kind::Forall: {
            std::set<std::string> inner;
            collect_free(*r.first, inner);
            inner.erase(r.var);
            std::set<std::string> src;
            collect_free(*r.terms[0], src);
            src.erase(r.var);
            out.insert(inner.begin(), inner.end());
            out.insert(src.begin(), src.end());
            return;
        }
    }
}

}  // namespace

std::set<std::string> free_vars(const Term& t) {
    std::set<std::string> out;
    collect_free(t, out);
    return out;
}

std::set<std::string> free_vars(const Rule& r) {
    std::set<std::string> out;
    collect_free(r, out);
    return out;
}

bool same_term(const Term& a, const Term& b) {
    if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size()) return false;
    if (a.kind == Term::Kind::Apply && (a.sym_kind != b.sym_kind || a.sym != b.sym)) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!same_term(*a.args[i], *b.args[i])) return false;
    return true;
}

bool same_rule(const Rule& a, const Rule& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Rule::Kind::Skip:
            return true;
        case Rule::Kind::Assign:
            if (a.target != b.target || a.sym != b.sym || a.terms.size() != b.terms.size()) return false;
            break;
        case Rule::Kind::If:
            if (!same_rule(*a.first, *b.first) || !same_rule(*a.second, *b.second)) return false;
            break;
        case Rule::Kind::Forall:
            if (a.var != b.var || !same_rule(*a.first, *b.first)) return false;
            break;
    }
    if (a.terms.size() != b.terms.size()) return false;
    for (std::size_t i = 0; i < a.terms.size(); ++i)
        if (!same_term(*a.terms[i], *b.terms[i])) return false;
    return true;
}

// ---------------------------------------------------------------- validation

namespace {

class Validator {
public:
    explicit Validator(const Signature& sig) : sig_(sig) {}

    std::vector<Diagnostic> diags;

    void rule(const Rule& r) {
        switch (r.kind) {
            case Rule::Kind::Skip:
                return;
            case Rule::Kind::Assign: {
                const int argc = static_cast<int>(r.terms.size()) - 1;
                switch (r.target_kind) {
                    case SymKind::Input:
                        report(r.pos, "cannot assign to input name '" + r.target +
                                          "': input names are never updated by the ASM");
                        break;
                    case SymKind::Builtin:
                        report(r.pos, "cannot assign to background name '" + r.target + "'");
                        break;
                    case SymKind::Unknown:
                        report(r.pos, "unknown symbol '" + r.target + "'");
                        break;
                    case SymKind::Dynamic: {
                        const auto& d = sig_.dynamics()[r.sym];
                        if (d.arity != argc)
                            report(r.pos, "arity mismatch: '" + r.target + "' expects " +
                                              std::to_string(d.arity) + " argument(s), got " +
                                              std::to_string(argc));
                        break;
                    }
                }
                for (int i = 0; i < argc; ++i) term(*r.terms[i], false);
                term(*r.assign_value(), true);
                return;
            }
            case Rule::Kind::If:
                term(*r.terms[0], true);
                rule(*r.first);
                rule(*r.second);
                return;
            case Rule::Kind::Forall:
                if (free_vars(*r.terms[0]).count(r.var))
                    report(r.pos, "forall variable '" + r.var + "' occurs free in its range term");
                shadow_check(r.var, r.pos);
                term(*r.terms[0], false);
                rule(*r.first);
                return;
        }
    }

    void term(const Term& t, bool boolean_position) {
        switch (t.kind) {
            case Term::Kind::Var:
                return;
            case Term::Kind::Comprehension:
                if (free_vars(*t.source()).count(t.name))
                    report(t.pos, "comprehension variable '" + t.name + "' occurs free in its source term");
                shadow_check(t.name, t.pos);
                term(*t.body(), false);
                term(*t.source(), false);
                term(*t.guard(), true);
                return;
            case Term::Kind::Apply:
                break;
        }
        const int argc = static_cast<int>(t.args.size());
        bool args_boolean = false;
        switch (t.sym_kind) {
            case SymKind::Unknown:
                report(t.pos, "unknown symbol '" + t.name + "'");
                break;
            case SymKind::Builtin: {
                const Builtin b = t.builtin();
                if (builtin_arity(b) != argc) arity(t, builtin_arity(b));
                args_boolean = b == Builtin::And || b == Builtin::Or || b == Builtin::Not || b == Builtin::Eq;
                break;
            }
            case SymKind::Input: {
                const auto& d = sig_.inputs()[t.sym];
                if (d.arity != argc) arity(t, d.arity);
                if (!boolean_position) relational_misuse(t);
                break;
            }
            case SymKind::Dynamic: {
                const auto& d = sig_.dynamics()[t.sym];
                if (d.arity != argc) arity(t, d.arity);
                if (d.relational && !boolean_position) relational_misuse(t);
                break;
            }
        }
        for (const auto& a : t.args) term(*a, args_boolean);
    }

private:
    void report(SourcePos pos, std::string msg) { diags.push_back({pos, std::move(msg)}); }

    void arity(const Term& t, int expected) {
        report(t.pos, "arity mismatch: '" + t.name + "' expects " + std::to_string(expected) +
                          " argument(s), got " + std::to_string(t.args.size()));
    }

    void relational_misuse(const Term& t) {
        report(t.pos, "relational symbol '" + t.name + "' used outside a Boolean position");
    }

    void shadow_check(const std::string& v, SourcePos pos) {
        if (auto d = sig_.find_dynamic(v); d && sig_.dynamics()[*d].arity == 0)
            report(pos, "bound variable '" + v + "' has the name of a nullary symbol");
    }

    const Signature& sig_;
};

}  // namespace

std::vector<Diagnostic> validate(const Program& p) {
    Validator v(*p.signature);
    v.rule(*p.rule);
    const auto fv = free_vars(*p.rule);
    if (!fv.empty()) {
        std::string names;
        for (const auto& n : fv) names += (names.empty() ? "" : ", ") + n;
        v.diags.push_back({p.rule->pos, "rule is not closed: free variable(s) " + names});
    }
    return v.diags;
}

// ---------------------------------------------------------------- printing

std::string print_term(const Term& t) {
    switch (t.kind) {
        case Term::Kind::Var:
            return t.name;
        case Term::Kind::Comprehension: {
            std::string s = "{" + print_term(*t.body()) + " | " + t.name + " in " + print_term(*t.source());
            if (!t.guard()->is_builtin(Builtin::True)) s += " and " + print_term(*t.guard());
            return s + "}";
        }
        case Term::Kind::Apply:
            break;
    }
    if (t.sym_kind == SymKind::Builtin && static_cast<int>(t.args.size()) == builtin_arity(t.builtin())) {
        switch (t.builtin()) {
            case Builtin::True:
                return "true";
            case Builtin::False:
                return "false";
            case Builtin::Empty:
                return "0";
            case Builtin::Atoms:
                return "Atoms";
            case Builtin::Eq:
            case Builtin::And:
            case Builtin::Or:
            case Builtin::In:
                return "(" + print_term(*t.args[0]) + " " + std::string(builtin_name(t.builtin())) + " " +
                       print_term(*t.args[1]) + ")";
            case Builtin::Not:
                return "(not " + print_term(*t.args[0]) + ")";
            case Builtin::Union:
            case Builtin::TheUnique:
            case Builtin::Pair:
                break;
        }
    }
    if (t.args.empty() && t.sym_kind != SymKind::Builtin) return t.name;
    std::string s = t.name + "(";
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) s += ", ";
        s += print_term(*t.args[i]);
    }
    return s + ")";
}

std::string print_rule(const Rule& r, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    switch (r.kind) {
        case Rule::Kind::Skip:
            return pad + "skip";
        case Rule::Kind::Assign: {
            std::string s = pad + r.target;
            const auto args = r.assign_args();
            if (!args.empty()) {
                s += "(";
                for (std::size_t i = 0; i < args.size(); ++i) {
                    if (i) s += ", ";
                    s += print_term(*args[i]);
                }
                s += ")";
            }
            return s + " := " + print_term(*r.assign_value());
        }
        case Rule::Kind::If: {
            std::string s = pad + "if " + print_term(*r.terms[0]) + " then\n" + print_rule(*r.first, indent + 2);
            if (r.second->kind != Rule::Kind::Skip) s += "\n" + pad + "else\n" + print_rule(*r.second, indent + 2);
            return s + "\n" + pad + "endif";
        }
        case Rule::Kind::Forall:
            return pad + "forall " + r.var + " in " + print_term(*r.terms[0]) + " do\n" +
                   print_rule(*r.first, indent + 2) + "\n" + pad + "enddo";
    }
    return pad + "skip";
}

std::string print_program(const Program& p) {
    std::string s = "signature:\n";
    for (const auto& d : p.signature->inputs()) s += "  input " + d.name + "/" + std::to_string(d.arity) + "\n";
    const auto& dyn = p.signature->dynamics();
    for (std::size_t i = 2; i < dyn.size(); ++i) {
        s += "  dynamic " + dyn[i].name + "/" + std::to_string(dyn[i].arity);
        if (dyn[i].relational) s += " relational";
        s += "\n";
    }
    return s + "rule:\n" + print_rule(*p.rule, 2) + "\n";
}

}  // namespace cps
