#include "cps/eval.hpp"

#include <algorithm>
#include <sstream>

namespace cps {

// ---------------------------------------------------------------- input structures

bool InputStructure::holds(const std::string& name, const std::vector<AtomId>& tuple) const {
    auto it = relations.find(name);
    return it != relations.end() && it->second.count(tuple) > 0;
}

InputStructure parse_input(std::string_view text) {
    InputStructure in;
    std::istringstream ss{std::string(text)};
    std::string line;
    int lineno = 0;
    bool have_atoms = false;
    while (std::getline(ss, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "atoms") {
            long n = -1;
            if (!(ls >> n) || n < 0) throw ParseError({lineno, 1}, "expected 'atoms n'");
            in.atom_count = static_cast<std::uint32_t>(n);
            have_atoms = true;
            continue;
        }
        if (!have_atoms) throw ParseError({lineno, 1}, "the first line must be 'atoms n'");
        std::vector<AtomId> tuple;
        std::string a;
        while (ls >> a) {
            std::string digits = a;
            if (!digits.empty() && digits[0] == 'a') digits.erase(0, 1);
            if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit))
                throw ParseError({lineno, 1}, "expected an atom, got '" + a + "'");
            const auto idx = std::stoul(digits);
            if (idx >= in.atom_count)
                throw ParseError({lineno, 1}, "atom '" + a + "' out of range for " + std::to_string(in.atom_count) +
                                                  " atoms");
            tuple.push_back(static_cast<AtomId>(idx));
        }
        auto& rel = in.relations[word];
        if (!rel.empty() && rel.begin()->size() != tuple.size())
            throw ParseError({lineno, 1}, "inconsistent arity for relation '" + word + "'");
        rel.insert(std::move(tuple));
    }
    if (!have_atoms) throw ParseError({1, 1}, "missing 'atoms n' line");
    return in;
}

std::string print_input(const InputStructure& in) {
    std::string s = "atoms " + std::to_string(in.atom_count) + "\n";
    for (const auto& [name, tuples] : in.relations) {
        for (const auto& t : tuples) {
            s += name;
            for (AtomId a : t) s += " a" + std::to_string(a);
            s += "\n";
        }
    }
    return s;
}

void check_input(const Signature& sig, const InputStructure& in) {
    for (const auto& [name, tuples] : in.relations) {
        auto idx = sig.find_input(name);
        if (!idx) throw Error("input relation '" + name + "' is not declared in the signature");
        const auto arity = static_cast<std::size_t>(sig.inputs()[*idx].arity);
        for (const auto& t : tuples) {
            if (t.size() != arity)
                throw Error("input relation '" + name + "' expects arity " + std::to_string(arity));
            for (AtomId a : t)
                if (a >= in.atom_count) throw Error("input relation '" + name + "' uses an atom out of range");
        }
    }
}

InputStructure permute(const InputStructure& in, const Perm& p) {
    InputStructure out;
    out.atom_count = in.atom_count;
    for (const auto& [name, tuples] : in.relations) {
        auto& rel = out.relations[name];
        for (auto t : tuples) {
            for (AtomId& a : t) a = p(a);
            rel.insert(std::move(t));
        }
    }
    return out;
}

// ---------------------------------------------------------------- states

namespace {

const std::shared_ptr<const Table>& empty_table() {
    static const auto t = std::make_shared<const Table>();
    return t;
}

}  // namespace

State::State(std::shared_ptr<const Signature> sig) : sig_(std::move(sig)) {
    tables_.assign(sig_->dynamics().size(), empty_table());
    rehash();
}

ObjId State::lookup(int sym, std::span<const ObjId> args) const {
    const Table& t = *tables_[sym];
    if (t.empty()) return EMPTY;
    auto it = t.find(Tuple(args.begin(), args.end()));
    return it == t.end() ? EMPTY : it->second;
}

void State::rehash() {
    std::size_t h = 0x51ed270b;
    TupleHash th;
    for (std::size_t i = 0; i < tables_.size(); ++i) {
        for (const auto& [k, v] : *tables_[i]) {
            std::size_t e = th(k) ^ (std::size_t{v.id} * 0x9e3779b97f4a7c15ull) ^ (i << 48);
            h += e * 0xff51afd7ed558ccdull;
            h ^= h >> 29;
        }
    }
    hash_ = h;
}

bool operator==(const State& a, const State& b) {
    if (a.hash_ != b.hash_ || a.tables_.size() != b.tables_.size()) return false;
    for (std::size_t i = 0; i < a.tables_.size(); ++i)
        if (a.tables_[i] != b.tables_[i] && *a.tables_[i] != *b.tables_[i]) return false;
    return true;
}

State initial_state(std::shared_ptr<const Signature> sig) { return State(std::move(sig)); }

void UpdateSet::normalize() {
    std::sort(updates.begin(), updates.end());
    updates.erase(std::unique(updates.begin(), updates.end()), updates.end());
}

bool is_consistent(const UpdateSet& d) {
    for (std::size_t i = 1; i < d.updates.size(); ++i)
        if (d.updates[i].loc == d.updates[i - 1].loc) return false;  // sorted and deduplicated
    return true;
}

State apply(const State& s, const UpdateSet& d) {
    if (d.empty() || !is_consistent(d)) return s;
    State out = s;
    const auto& dyn = s.sig_->dynamics();
    std::size_t i = 0;
    while (i < d.updates.size()) {
        const int sym = d.updates[i].loc.sym;
        auto table = std::make_shared<Table>(*s.tables_[sym]);
        for (; i < d.updates.size() && d.updates[i].loc.sym == sym; ++i) {
            const Update& u = d.updates[i];
            if (dyn[sym].relational && u.value != EMPTY && u.value != ONE)
                throw DynamicError("relational symbol '" + dyn[sym].name + "' assigned a non-Boolean value");
            if (u.value == EMPTY)
                table->erase(u.loc.args);
            else
                (*table)[u.loc.args] = u.value;
        }
        out.tables_[sym] = std::move(table);
    }
    out.rehash();
    return out;
}

State permute(Universe& u, const State& s, const Perm& p) {
    State out = s;
    for (std::size_t i = 0; i < s.tables_.size(); ++i) {
        if (s.tables_[i]->empty()) continue;
        auto table = std::make_shared<Table>();
        for (const auto& [k, v] : *s.tables_[i]) {
            Tuple args = k;
            for (ObjId& a : args) a = u.apply_perm(p, a);
            (*table)[std::move(args)] = u.apply_perm(p, v);
        }
        out.tables_[i] = std::move(table);
    }
    out.rehash();
    return out;
}

// ---------------------------------------------------------------- bindings

const ObjId* Binding::find(std::string_view name) const {
    for (auto it = vars_.rbegin(); it != vars_.rend(); ++it)
        if (it->first == name) return &it->second;
    return nullptr;
}

ObjId Binding::get(std::string_view name) const {
    if (const ObjId* v = find(name)) return *v;
    throw Error("unbound variable '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- evaluation

EvalContext::EvalContext(Universe& u, const Signature& sig, const InputStructure& in, const DynamicView& dyn)
    : universe(u), signature(sig), input(in), dynamic(dyn) {
    for (const auto& d : sig.inputs()) {
        auto it = in.relations.find(d.name);
        relations.push_back(it == in.relations.end() ? nullptr : &it->second);
    }
}

bool input_holds(const EvalContext& ctx, int sym, std::span<const ObjId> args) {
    const auto* rel = ctx.relations[sym];
    if (!rel) return false;
    std::vector<AtomId> tuple;
    tuple.reserve(args.size());
    for (ObjId a : args) {
        if (!ctx.universe.is_atom(a)) return false;
        tuple.push_back(ctx.universe.atom_index(a));
    }
    return rel->count(tuple) > 0;
}

namespace {

ObjId boolean(bool b) { return b ? ONE : EMPTY; }

ObjId eval_builtin(const EvalContext& ctx, Builtin b, const std::vector<ObjId>& v) {
    Universe& u = ctx.universe;
    switch (b) {
        case Builtin::Eq:
            return boolean(v[0] == v[1]);
        case Builtin::True:
            return ONE;
        case Builtin::False:
        case Builtin::Empty:
            return EMPTY;
        case Builtin::And:
            if (!u.is_boolean(v[0]) || !u.is_boolean(v[1])) return EMPTY;
            return boolean(v[0] == ONE && v[1] == ONE);
        case Builtin::Or:
            if (!u.is_boolean(v[0]) || !u.is_boolean(v[1])) return EMPTY;
            return boolean(v[0] == ONE || v[1] == ONE);
        case Builtin::Not:
            if (!u.is_boolean(v[0])) return EMPTY;
            return boolean(v[0] == EMPTY);
        case Builtin::In:
            return boolean(u.is_set(v[1]) && u.contains(v[1], v[0]));
        case Builtin::Atoms:
            return u.all_atoms();
        case Builtin::Union: {
            if (u.is_atom(v[0])) return EMPTY;
            std::vector<ObjId> acc;
            const auto outer = u.elements(v[0]);
            for (ObjId e : std::vector<ObjId>(outer.begin(), outer.end())) {
                const auto inner = u.elements(e);
                acc.insert(acc.end(), inner.begin(), inner.end());
            }
            return u.mk_set(std::move(acc));
        }
        case Builtin::TheUnique:
            if (u.is_set(v[0]) && u.cardinality(v[0]) == 1) return u.elements(v[0])[0];
            return EMPTY;
        case Builtin::Pair:
            return u.pair(v[0], v[1]);
    }
    return EMPTY;
}

}  // namespace

ObjId eval_term(const EvalContext& ctx, Binding& b, const Term& t) {
    switch (t.kind) {
        case Term::Kind::Var:
            return b.get(t.name);
        case Term::Kind::Comprehension: {
            Universe& u = ctx.universe;
            const ObjId src = eval_term(ctx, b, *t.source());
            if (u.is_atom(src)) return EMPTY;
            const auto es = u.elements(src);
            const std::vector<ObjId> elems(es.begin(), es.end());
            std::vector<ObjId> acc;
            for (ObjId e : elems) {
                b.push(t.name, e);
                if (eval_term(ctx, b, *t.guard()) == ONE) acc.push_back(eval_term(ctx, b, *t.body()));
                b.pop();
            }
            return u.mk_set(std::move(acc));
        }
        case Term::Kind::Apply:
            break;
    }
    std::vector<ObjId> args;
    args.reserve(t.args.size());
    for (const auto& a : t.args) args.push_back(eval_term(ctx, b, *a));
    switch (t.sym_kind) {
        case SymKind::Builtin:
            return eval_builtin(ctx, t.builtin(), args);
        case SymKind::Input:
            return boolean(input_holds(ctx, t.sym, args));
        case SymKind::Dynamic:
            return ctx.dynamic.lookup(t.sym, args);
        case SymKind::Unknown:
            break;
    }
    throw Error("unknown symbol '" + t.name + "'");
}

namespace {

void collect_updates(const EvalContext& ctx, Binding& b, const Rule& r, std::vector<Update>& out) {
    switch (r.kind) {
        case Rule::Kind::Skip:
            return;
        case Rule::Kind::Assign: {
            if (r.target_kind != SymKind::Dynamic) throw Error("assignment to non-dynamic name '" + r.target + "'");
            Update up;
            up.loc.sym = r.sym;
            for (const auto& a : r.assign_args()) up.loc.args.push_back(eval_term(ctx, b, *a));
            up.value = eval_term(ctx, b, *r.assign_value());
            out.push_back(std::move(up));
            return;
        }
        case Rule::Kind::If:
            if (eval_term(ctx, b, *r.terms[0]) == ONE)
                collect_updates(ctx, b, *r.first, out);
            else
                collect_updates(ctx, b, *r.second, out);
            return;
        case Rule::Kind::Forall: {
            Universe& u = ctx.universe;
            const ObjId src = eval_term(ctx, b, *r.terms[0]);
            const auto es = u.elements(src);
            const std::vector<ObjId> elems(es.begin(), es.end());
            for (ObjId e : elems) {
                b.push(r.var, e);
                collect_updates(ctx, b, *r.first, out);
                b.pop();
            }
            return;
        }
    }
}

}  // namespace

UpdateSet update_set(const EvalContext& ctx, Binding& b, const Rule& r) {
    UpdateSet d;
    collect_updates(ctx, b, r, d.updates);
    d.normalize();
    return d;
}

std::pair<State, UpdateSet> step(Universe& u, const Program& p, const InputStructure& in, const State& s) {
    EvalContext ctx(u, *p.signature, in, s);
    Binding b;
    UpdateSet d = update_set(ctx, b, *p.rule);
    State next = apply(s, d);
    return {std::move(next), std::move(d)};
}

// ---------------------------------------------------------------- printing

namespace {

std::string location_text(const Universe& u, const SymbolDecl& d, const Tuple& args) {
    std::string s = d.name;
    if (!args.empty()) {
        s += "(";
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) s += ", ";
            s += u.to_literal(args[i]);
        }
        s += ")";
    }
    return s;
}

}  // namespace

std::string print_update_set(const Universe& u, const Signature& sig, const UpdateSet& d) {
    std::string s = "{";
    for (std::size_t i = 0; i < d.updates.size(); ++i) {
        if (i) s += ", ";
        const auto& up = d.updates[i];
        s += location_text(u, sig.dynamics()[up.loc.sym], up.loc.args) + " := " + u.to_literal(up.value);
    }
    return s + "}";
}

std::string print_state(const Universe& u, const State& s) {
    std::string out;
    const auto& dyn = s.signature()->dynamics();
    for (std::size_t i = 0; i < s.symbol_count(); ++i) {
        for (const auto& [k, v] : s.table(static_cast<int>(i)))
            out += location_text(u, dyn[i], k) + " = " + u.to_literal(v) + "\n";
    }
    return out;
}

}  // namespace cps
