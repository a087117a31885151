#include "cps/pfp.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace cps {

// ---------------------------------------------------------------- constructors

namespace fo {

namespace {

std::shared_ptr<Formula> node(Formula::Kind k) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    return f;
}

void add_term(Formula& f, TermPtr t) {
    const auto fv = free_vars(*t);
    f.term_vars.emplace_back(fv.begin(), fv.end());
    f.terms.push_back(std::move(t));
}

}  // namespace

FormulaPtr truth() {
    static const FormulaPtr t = node(Formula::Kind::True);
    return t;
}

FormulaPtr falsity() {
    static const FormulaPtr f = node(Formula::Kind::False);
    return f;
}

FormulaPtr eq(TermPtr a, TermPtr b) {
    if (same_term(*a, *b)) return truth();
    auto f = node(Formula::Kind::Eq);
    add_term(*f, std::move(a));
    add_term(*f, std::move(b));
    return f;
}

FormulaPtr holds(TermPtr t) {
    if (t->is_builtin(Builtin::True)) return truth();
    if (t->is_builtin(Builtin::False) || t->is_builtin(Builtin::Empty)) return falsity();
    auto f = node(Formula::Kind::Holds);
    add_term(*f, std::move(t));
    return f;
}

FormulaPtr rel(int index, std::string name, std::vector<TermPtr> args) {
    auto f = node(Formula::Kind::Rel);
    f->rel = index;
    f->rel_name = std::move(name);
    for (auto& a : args) add_term(*f, std::move(a));
    return f;
}

FormulaPtr def(int index, std::string name, std::vector<TermPtr> args, std::string v) {
    auto f = node(Formula::Kind::Def);
    f->rel = index;
    f->rel_name = std::move(name);
    f->var = std::move(v);
    for (auto& a : args) add_term(*f, std::move(a));
    return f;
}

FormulaPtr neg(FormulaPtr g) {
    if (g->kind == Formula::Kind::True) return falsity();
    if (g->kind == Formula::Kind::False) return truth();
    if (g->kind == Formula::Kind::Not) return g->subs[0];
    auto f = node(Formula::Kind::Not);
    f->subs = {std::move(g)};
    return f;
}

namespace {

FormulaPtr junction(Formula::Kind k, std::vector<FormulaPtr> fs) {
    const auto unit = k == Formula::Kind::And ? Formula::Kind::True : Formula::Kind::False;
    const auto zero = k == Formula::Kind::And ? Formula::Kind::False : Formula::Kind::True;
    std::vector<FormulaPtr> kept;
    for (auto& g : fs) {
        if (g->kind == zero) return g;
        if (g->kind == unit) continue;
        if (g->kind == k)
            kept.insert(kept.end(), g->subs.begin(), g->subs.end());
        else
            kept.push_back(std::move(g));
    }
    if (kept.empty()) return k == Formula::Kind::And ? truth() : falsity();
    if (kept.size() == 1) return kept[0];
    auto f = node(k);
    f->subs = std::move(kept);
    return f;
}

FormulaPtr quantifier(Formula::Kind k, std::string v, TermPtr range, FormulaPtr body) {
    const bool existential = k == Formula::Kind::Exists || k == Formula::Kind::BExists;
    if (existential && body->kind == Formula::Kind::False) return body;
    if (!existential && body->kind == Formula::Kind::True) return body;
    auto f = node(k);
    f->var = std::move(v);
    if (range) add_term(*f, std::move(range));
    f->subs = {std::move(body)};
    return f;
}

}  // namespace

FormulaPtr conj(std::vector<FormulaPtr> fs) { return junction(Formula::Kind::And, std::move(fs)); }
FormulaPtr disj(std::vector<FormulaPtr> fs) { return junction(Formula::Kind::Or, std::move(fs)); }
FormulaPtr exists(std::string v, FormulaPtr body) {
    return quantifier(Formula::Kind::Exists, std::move(v), nullptr, std::move(body));
}
FormulaPtr forall(std::string v, FormulaPtr body) {
    return quantifier(Formula::Kind::Forall, std::move(v), nullptr, std::move(body));
}
FormulaPtr exists_in(std::string v, TermPtr range, FormulaPtr body) {
    return quantifier(Formula::Kind::BExists, std::move(v), std::move(range), std::move(body));
}
FormulaPtr forall_in(std::string v, TermPtr range, FormulaPtr body) {
    return quantifier(Formula::Kind::BForall, std::move(v), std::move(range), std::move(body));
}

}  // namespace fo

std::set<std::string> free_vars(const Formula& f) {
    std::set<std::string> out;
    for (const auto& tv : f.term_vars) out.insert(tv.begin(), tv.end());
    using K = Formula::Kind;
    switch (f.kind) {
        case K::Def:
            out.insert(f.var);
            break;
        case K::Exists:
        case K::Forall:
        case K::BExists:
        case K::BForall: {
            auto inner = free_vars(*f.subs[0]);
            inner.erase(f.var);
            out.insert(inner.begin(), inner.end());
            break;
        }
        default:
            for (const auto& s : f.subs) {
                auto inner = free_vars(*s);
                out.insert(inner.begin(), inner.end());
            }
    }
    return out;
}

// ---------------------------------------------------------------- update formulas

namespace {

using Renaming = std::map<std::string, std::string>;

TermPtr rename(const TermPtr& t, const Renaming& m) {
    if (m.empty()) return t;
    switch (t->kind) {
        case Term::Kind::Var: {
            auto it = m.find(t->name);
            if (it == m.end()) return t;
            auto r = std::make_shared<Term>(*t);
            r->name = it->second;
            return r;
        }
        case Term::Kind::Apply: {
            auto r = std::make_shared<Term>(*t);
            for (auto& a : r->args) a = rename(a, m);
            return r;
        }
        case Term::Kind::Comprehension: {
            auto r = std::make_shared<Term>(*t);
            Renaming inner = m;
            inner.erase(t->name);
            r->args[0] = rename(t->args[0], inner);
            r->args[1] = rename(t->args[1], m);
            r->args[2] = rename(t->args[2], inner);
            return r;
        }
    }
    return t;
}

struct PathStep {
    enum class Kind { Cond, NegCond, Bind } kind;
    TermPtr term;
    std::string var;
};

struct Path {
    std::vector<PathStep> steps;
    const Rule* assign = nullptr;
};

void collect_paths(const Rule& r, std::vector<PathStep>& prefix, std::vector<Path>& out) {
    switch (r.kind) {
        case Rule::Kind::Skip:
            return;
        case Rule::Kind::Assign:
            out.push_back(Path{prefix, &r});
            return;
        case Rule::Kind::If:
            prefix.push_back({PathStep::Kind::Cond, r.terms[0], {}});
            collect_paths(*r.first, prefix, out);
            prefix.back().kind = PathStep::Kind::NegCond;
            collect_paths(*r.second, prefix, out);
            prefix.pop_back();
            return;
        case Rule::Kind::Forall:
            prefix.push_back({PathStep::Kind::Bind, r.terms[0], r.var});
            collect_paths(*r.first, prefix, out);
            prefix.pop_back();
            return;
    }
}

/// Steps of a path with binders renamed apart, plus the renaming in force at the assignment.
std::pair<std::vector<PathStep>, Renaming> renamed(const Path& p, const std::string& tag) {
    std::vector<PathStep> steps;
    Renaming m;
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        PathStep s = p.steps[i];
        s.term = rename(s.term, m);
        if (s.kind == PathStep::Kind::Bind) {
            const std::string fresh = tag + std::to_string(i) + "_" + s.var;
            m[s.var] = fresh;
            s.var = fresh;
        }
        steps.push_back(std::move(s));
    }
    return {std::move(steps), std::move(m)};
}

/// Two executions of p and q that write the same location with different values.
FormulaPtr conflict(const Path& p, const Path& q) {
    auto [ps, pm] = renamed(p, "_l");
    auto [qs, qm] = renamed(q, "_r");
    std::vector<FormulaPtr> core;
    const auto pa = p.assign->assign_args();
    const auto qa = q.assign->assign_args();
    for (std::size_t i = 0; i < pa.size(); ++i) core.push_back(fo::eq(rename(pa[i], pm), rename(qa[i], qm)));
    core.push_back(fo::neg(fo::eq(rename(p.assign->assign_value(), pm), rename(q.assign->assign_value(), qm))));
    FormulaPtr f = fo::conj(std::move(core));
    ps.insert(ps.end(), qs.begin(), qs.end());
    for (auto it = ps.rbegin(); it != ps.rend(); ++it) {
        switch (it->kind) {
            case PathStep::Kind::Cond:
                f = fo::conj({fo::holds(it->term), f});
                break;
            case PathStep::Kind::NegCond:
                f = fo::conj({fo::neg(fo::holds(it->term)), f});
                break;
            case PathStep::Kind::Bind:
                f = fo::exists_in(it->var, it->term, f);
                break;
        }
    }
    return f;
}

}  // namespace

FormulaPtr upd_mem_formula(const Program& p, const Rule& r, int f, const std::vector<std::string>& xs,
                           const std::string& y) {
    switch (r.kind) {
        case Rule::Kind::Skip:
            return fo::falsity();
        case Rule::Kind::Assign: {
            if (r.target_kind != SymKind::Dynamic || r.sym != f) return fo::falsity();
            std::vector<FormulaPtr> parts;
            const auto args = r.assign_args();
            for (std::size_t i = 0; i < args.size(); ++i) parts.push_back(fo::eq(build::var(xs[i]), args[i]));
            parts.push_back(fo::eq(build::var(y), r.assign_value()));
            return fo::conj(std::move(parts));
        }
        case Rule::Kind::If: {
            const auto c = fo::holds(r.terms[0]);
            return fo::disj({fo::conj({c, upd_mem_formula(p, *r.first, f, xs, y)}),
                             fo::conj({fo::neg(c), upd_mem_formula(p, *r.second, f, xs, y)})});
        }
        case Rule::Kind::Forall:
            return fo::exists_in(r.var, r.terms[0], upd_mem_formula(p, *r.first, f, xs, y));
    }
    return fo::falsity();
}

FormulaPtr con_formula(const Program&, const Rule& r) {
    std::vector<Path> paths;
    std::vector<PathStep> prefix;
    collect_paths(r, prefix, paths);
    std::vector<FormulaPtr> parts;
    for (std::size_t i = 0; i < paths.size(); ++i)
        for (std::size_t j = i; j < paths.size(); ++j)
            if (paths[i].assign->sym == paths[j].assign->sym)
                parts.push_back(fo::neg(conflict(paths[i], paths[j])));
    return fo::conj(std::move(parts));
}

FormulaPtr upd_formula(const Program& p, const Rule& r, int f, const std::vector<std::string>& xs,
                       const std::string& y) {
    return fo::conj({upd_mem_formula(p, r, f, xs, y), con_formula(p, r)});
}

std::string relation_name(const Signature& sig, int f) { return "D_" + sig.dynamics()[f].name; }

namespace {

struct Flattener {
    const Signature& sig;
    int& counter;

    TermPtr lift(const TermPtr& t, std::vector<std::pair<std::string, FormulaPtr>>& defs) {
        if (t->kind != Term::Kind::Apply) return t;
        std::vector<TermPtr> args;
        bool changed = false;
        for (const auto& a : t->args) {
            args.push_back(lift(a, defs));
            changed = changed || args.back() != a;
        }
        if (t->sym_kind == SymKind::Dynamic) {
            std::string z = "_tnf" + std::to_string(counter++);
            defs.emplace_back(z, fo::def(t->sym, relation_name(sig, t->sym), std::move(args), z));
            return build::var(z);
        }
        if (!changed) return t;
        auto r = std::make_shared<Term>(*t);
        r->args = std::move(args);
        return r;
    }

    static FormulaPtr wrap(FormulaPtr core, std::vector<std::pair<std::string, FormulaPtr>>& defs) {
        for (auto it = defs.rbegin(); it != defs.rend(); ++it) core = fo::exists(it->first, fo::conj({it->second, core}));
        return core;
    }

    FormulaPtr run(const FormulaPtr& f) {
        using K = Formula::Kind;
        std::vector<std::pair<std::string, FormulaPtr>> defs;
        switch (f->kind) {
            case K::True:
            case K::False:
                return f;
            case K::Eq: {
                auto a = lift(f->terms[0], defs);
                auto b = lift(f->terms[1], defs);
                return wrap(fo::eq(a, b), defs);
            }
            case K::Holds:
                return wrap(fo::holds(lift(f->terms[0], defs)), defs);
            case K::Rel:
            case K::Def: {
                std::vector<TermPtr> args;
                for (const auto& a : f->terms) args.push_back(lift(a, defs));
                auto core = f->kind == K::Rel ? fo::rel(f->rel, f->rel_name, std::move(args))
                                              : fo::def(f->rel, f->rel_name, std::move(args), f->var);
                return wrap(core, defs);
            }
            case K::Not:
                return fo::neg(run(f->subs[0]));
            case K::And:
            case K::Or: {
                std::vector<FormulaPtr> subs;
                for (const auto& s : f->subs) subs.push_back(run(s));
                return f->kind == K::And ? fo::conj(std::move(subs)) : fo::disj(std::move(subs));
            }
            case K::Exists:
                return fo::exists(f->var, run(f->subs[0]));
            case K::Forall:
                return fo::forall(f->var, run(f->subs[0]));
            case K::BExists:
            case K::BForall: {
                auto range = lift(f->terms[0], defs);
                auto body = run(f->subs[0]);
                auto q = f->kind == K::BExists ? fo::exists_in(f->var, range, body) : fo::forall_in(f->var, range, body);
                return wrap(q, defs);
            }
        }
        return f;
    }
};

}  // namespace

FormulaPtr flatten(const Program& p, const FormulaPtr& f, int& counter) {
    Flattener fl{*p.signature, counter};
    return fl.run(f);
}

FormulaPtr u_formula(const Program& p, int f, const std::vector<std::string>& xs, const std::string& y,
                     int& counter) {
    return flatten(p, upd_formula(p, *p.rule, f, xs, y), counter);
}

PfpSystem fixed_point_system(const Program& p) {
    const Signature& sig = *p.signature;
    PfpSystem sys;
    int counter = 0;
    const auto running = fo::neg(fo::rel(sig.halt(), relation_name(sig, sig.halt()), {build::truth()}));
    for (int f = 0; f < static_cast<int>(sig.dynamics().size()); ++f) {
        std::vector<std::string> xs;
        for (int i = 0; i < sig.dynamics()[f].arity; ++i) xs.push_back("_x" + std::to_string(i));
        const std::string y = "_y", z = "_z";
        std::vector<TermPtr> head;
        for (const auto& x : xs) head.push_back(build::var(x));
        head.push_back(build::var(y));
        const std::string name = relation_name(sig, f);
        auto u_y = u_formula(p, f, xs, y, counter);
        auto u_z = u_formula(p, f, xs, z, counter);
        auto body = fo::conj(
            {fo::neg(fo::eq(build::var(y), build::empty())),
             fo::disj({fo::conj({running, u_y}),
                       fo::conj({fo::rel(f, name, head),
                                 fo::neg(fo::exists(z, fo::conj({fo::neg(fo::eq(build::var(z), build::var(y))),
                                                                  running, u_z})))})})});
        std::vector<std::string> params = xs;
        params.push_back(y);
        sys.relations.push_back(PfpRelation{name, std::move(params), std::move(body)});
    }
    return sys;
}

// ---------------------------------------------------------------- evaluation

namespace {

/// Tuples of t that start with prefix.
template <typename Fn>
void for_prefix(const RelTable& t, const Tuple& prefix, Fn&& fn) {
    for (auto it = t.lower_bound(prefix); it != t.end(); ++it) {
        if (it->size() < prefix.size() || !std::equal(prefix.begin(), prefix.end(), it->begin())) break;
        fn(*it);
    }
}

}  // namespace

ObjId TableView::lookup(int sym, std::span<const ObjId> args) const {
    const Tuple prefix(args.begin(), args.end());
    ObjId out = EMPTY;
    bool found = false;
    for_prefix(tables_[sym], prefix, [&](const Tuple& t) {
        if (!found && t.size() == prefix.size() + 1) {
            out = t.back();
            found = true;
        }
    });
    return out;
}

namespace {

class Evaluator {
public:
    Evaluator(const FormulaContext& ctx, Binding& b) : ctx_(ctx), b_(b) {}

    bool eval(const Formula& f) {
        using K = Formula::Kind;
        switch (f.kind) {
            case K::True:
                return true;
            case K::False:
                return false;
            case K::Eq:
                return term(f, 0) == term(f, 1);
            case K::Holds:
                return term(f, 0) == ONE;
            case K::Rel: {
                Tuple t;
                for (std::size_t i = 0; i < f.terms.size(); ++i) t.push_back(term(f, i));
                return table(f).count(t) > 0;
            }
            case K::Def: {
                Tuple prefix;
                for (std::size_t i = 0; i < f.terms.size(); ++i) prefix.push_back(term(f, i));
                const ObjId v = b_.get(f.var);
                bool any = false, hit = false;
                for_prefix(table(f), prefix, [&](const Tuple& t) {
                    if (t.size() != prefix.size() + 1) return;
                    any = true;
                    hit = hit || t.back() == v;
                });
                return any ? hit : v == EMPTY;
            }
            case K::Not:
                return !eval(*f.subs[0]);
            case K::And:
                for (const auto& s : f.subs)
                    if (!eval(*s)) return false;
                return true;
            case K::Or:
                for (const auto& s : f.subs)
                    if (eval(*s)) return true;
                return false;
            case K::Exists:
            case K::Forall: {
                const bool existential = f.kind == K::Exists;
                std::vector<ObjId> range;
                if (existential) {
                    if (auto c = candidates(*f.subs[0], f.var)) range = restrict(std::move(*c));
                    else range = domain();
                } else {
                    range = domain();
                }
                for (ObjId x : range) {
                    b_.push(f.var, x);
                    const bool r = eval(*f.subs[0]);
                    b_.pop();
                    if (r == existential) return existential;
                }
                return !existential;
            }
            case K::BExists:
            case K::BForall: {
                const bool existential = f.kind == K::BExists;
                const ObjId src = term(f, 0);
                const auto es = ctx_.terms.universe.elements(src);
                const std::vector<ObjId> elems(es.begin(), es.end());
                for (ObjId x : elems) {
                    b_.push(f.var, x);
                    const bool r = eval(*f.subs[0]);
                    b_.pop();
                    if (r == existential) return existential;
                }
                return !existential;
            }
        }
        return false;
    }

    /// A superset of the values of v (unbound) that can make f true under the current
    /// binding, or nullopt when no useful bound is known.
    std::optional<std::vector<ObjId>> candidates(const Formula& f, const std::string& v) {
        using K = Formula::Kind;
        switch (f.kind) {
            case K::False:
                return std::vector<ObjId>{};
            case K::Eq:
                for (int side = 0; side < 2; ++side) {
                    const Term& t = *f.terms[side];
                    if (t.kind == Term::Kind::Var && t.name == v && evaluable(f, 1 - side, v))
                        return std::vector<ObjId>{term(f, 1 - side)};
                }
                return std::nullopt;
            case K::Rel: {
                std::optional<std::size_t> pos;
                Tuple pattern(f.terms.size());
                for (std::size_t i = 0; i < f.terms.size(); ++i) {
                    const Term& t = *f.terms[i];
                    if (t.kind == Term::Kind::Var && t.name == v) {
                        if (!pos) pos = i;
                        continue;
                    }
                    if (!evaluable(f, i, v)) return std::nullopt;
                    pattern[i] = term(f, i);
                }
                if (!pos) return std::nullopt;
                std::vector<ObjId> out;
                for (const Tuple& t : table(f)) {
                    bool match = true;
                    for (std::size_t i = 0; i < t.size() && match; ++i) {
                        const Term& ti = *f.terms[i];
                        if (!(ti.kind == Term::Kind::Var && ti.name == v)) match = t[i] == pattern[i];
                    }
                    if (match) out.push_back(t[*pos]);
                }
                return out;
            }
            case K::Def: {
                if (f.var != v) return std::nullopt;
                Tuple prefix;
                for (std::size_t i = 0; i < f.terms.size(); ++i) {
                    if (!evaluable(f, i, v)) return std::nullopt;
                    prefix.push_back(term(f, i));
                }
                std::vector<ObjId> out;
                for_prefix(table(f), prefix, [&](const Tuple& t) {
                    if (t.size() == prefix.size() + 1) out.push_back(t.back());
                });
                if (out.empty()) out.push_back(EMPTY);
                return out;
            }
            case K::And: {
                for (const auto& s : f.subs)
                    if (auto c = candidates(*s, v)) return c;
                return std::nullopt;
            }
            case K::Or: {
                std::vector<ObjId> out;
                for (const auto& s : f.subs) {
                    auto c = candidates(*s, v);
                    if (!c) return std::nullopt;
                    out.insert(out.end(), c->begin(), c->end());
                }
                return out;
            }
            case K::Exists:
            case K::BExists: {
                if (f.var == v) return std::nullopt;
                std::vector<ObjId> range;
                if (f.kind == K::BExists) {
                    if (!evaluable(f, 0, v)) return std::nullopt;
                    const auto es = ctx_.terms.universe.elements(term(f, 0));
                    range.assign(es.begin(), es.end());
                } else {
                    auto c = candidates(*f.subs[0], f.var);
                    if (!c) return std::nullopt;
                    range = restrict(std::move(*c));
                }
                std::vector<ObjId> out;
                for (ObjId x : range) {
                    b_.push(f.var, x);
                    auto c = candidates(*f.subs[0], v);
                    b_.pop();
                    if (!c) return std::nullopt;
                    out.insert(out.end(), c->begin(), c->end());
                }
                return out;
            }
            default:
                return std::nullopt;
        }
    }

    std::vector<ObjId> restrict(std::vector<ObjId> xs) const {
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        if (!ctx_.domain) throw Error("unbounded quantifier evaluated without a domain");
        std::vector<ObjId> out;
        std::set_intersection(xs.begin(), xs.end(), ctx_.domain->begin(), ctx_.domain->end(),
                              std::back_inserter(out));
        return out;
    }

    const std::vector<ObjId>& domain() const {
        if (!ctx_.domain) throw Error("unbounded quantifier evaluated without a domain");
        return *ctx_.domain;
    }

private:
    ObjId term(const Formula& f, std::size_t i) { return eval_term(ctx_.terms, b_, *f.terms[i]); }

    bool evaluable(const Formula& f, std::size_t i, const std::string& v) const {
        for (const auto& x : f.term_vars[i])
            if (x == v || !b_.find(x)) return false;
        return true;
    }

    const RelTable& table(const Formula& f) const {
        if (!ctx_.relations || f.rel < 0 || static_cast<std::size_t>(f.rel) >= ctx_.relations->size())
            throw Error("relation '" + f.rel_name + "' has no interpretation");
        return (*ctx_.relations)[f.rel];
    }

    const FormulaContext& ctx_;
    Binding& b_;
};

}  // namespace

bool eval_formula(const FormulaContext& ctx, Binding& b, const Formula& f) {
    Evaluator ev(ctx, b);
    return ev.eval(f);
}

namespace {

void enumerate(Evaluator& ev, Binding& b, const PfpRelation& r, std::size_t i, Tuple& acc, RelTable& out) {
    if (i == r.params.size()) {
        if (ev.eval(*r.body)) out.insert(acc);
        return;
    }
    std::vector<ObjId> range;
    if (auto c = ev.candidates(*r.body, r.params[i]))
        range = ev.restrict(std::move(*c));
    else
        range = ev.domain();
    for (ObjId x : range) {
        b.push(r.params[i], x);
        acc.push_back(x);
        enumerate(ev, b, r, i + 1, acc, out);
        acc.pop_back();
        b.pop();
    }
}

}  // namespace

PfpResult pfp_iterate(const PfpSystem& sys, Universe& u, const Signature& sig, const InputStructure& in,
                      const std::vector<ObjId>& domain, const PfpOptions& opt) {
    PfpResult res;
    RelTables stage(sys.relations.size());
    std::map<RelTables, std::size_t> seen;
    std::vector<RelTables> stages;
    for (std::size_t i = 0;; ++i) {
        if (i > opt.max_stages) throw BudgetExceeded("partial fixed point: stage limit reached");
        seen.emplace(stage, i);
        stages.push_back(stage);
        TableView view(stage);
        EvalContext tctx(u, sig, in, view);
        FormulaContext fctx{tctx, &stage, &domain};
        Binding b;
        Evaluator ev(fctx, b);
        RelTables next(sys.relations.size());
        for (std::size_t k = 0; k < sys.relations.size(); ++k) {
            Tuple acc;
            enumerate(ev, b, sys.relations[k], 0, acc, next[k]);
        }
        if (next == stage) {
            res.fixed_point = true;
            res.tables = std::move(next);
            break;
        }
        if (seen.count(next)) {
            res.fixed_point = false;
            res.tables = RelTables(sys.relations.size());
            break;
        }
        stage = std::move(next);
    }
    if (opt.keep_stages) res.stages = std::move(stages);
    return res;
}

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Accept:
            return "accept";
        case Verdict::Reject:
            return "reject";
        case Verdict::Unknown:
            return "unknown";
    }
    return "?";
}

Verdict acceptance(const RelTables& t) {
    const Tuple one{ONE};
    if (t.size() < 2 || !t[0].count(one)) return Verdict::Unknown;
    return t[1].count(one) ? Verdict::Accept : Verdict::Reject;
}

RelTables state_tables(const State& s) {
    RelTables out(s.symbol_count());
    for (std::size_t i = 0; i < s.symbol_count(); ++i) {
        for (const auto& [args, v] : s.table(static_cast<int>(i))) {
            Tuple t = args;
            t.push_back(v);
            out[i].insert(std::move(t));
        }
    }
    return out;
}

LockstepReport lockstep(std::shared_ptr<Universe> u, const PSpaceMachine& m, const InputStructure& in,
                        const RunTrace& t) {
    LockstepReport rep;
    const Structure st = active_structure(u, t, in);
    const PfpSystem sys = fixed_point_system(m.program);
    rep.pfp = pfp_iterate(sys, *u, *m.program.signature, in, st.domain);
    rep.verdict = acceptance(rep.pfp.tables);
    // Stages past the recorded ones follow the fixed point or the cycle back into the history.
    const auto& stages = rep.pfp.stages;
    for (std::size_t i = 0; i < t.run_length(); ++i) {
        if (i >= stages.size()) {
            if (!rep.pfp.fixed_point) break;
        }
        const RelTables& stage = i < stages.size() ? stages[i] : stages.back();
        ++rep.compared;
        if (stage != state_tables(t.states[i])) {
            rep.ok = false;
            rep.first_mismatch = i;
            break;
        }
    }
    return rep;
}

// ---------------------------------------------------------------- printing

namespace {

void print_into(const Formula& f, std::string& s) {
    using K = Formula::Kind;
    auto terms = [&](std::size_t from) {
        for (std::size_t i = from; i < f.terms.size(); ++i) s += " " + print_term(*f.terms[i]);
    };
    auto subs = [&]() {
        for (const auto& g : f.subs) {
            s += " ";
            print_into(*g, s);
        }
    };
    switch (f.kind) {
        case K::True:
            s += "true";
            return;
        case K::False:
            s += "false";
            return;
        case K::Eq:
            s += "(=";
            terms(0);
            s += ")";
            return;
        case K::Holds: {
            const Term& t = *f.terms[0];
            if (t.kind == Term::Kind::Apply && t.sym_kind != SymKind::Builtin) {
                s += "(" + t.name;
                for (const auto& a : t.args) s += " " + print_term(*a);
                s += ")";
            } else if (t.is_builtin(Builtin::In)) {
                s += "(in " + print_term(*t.args[0]) + " " + print_term(*t.args[1]) + ")";
            } else {
                s += "(holds " + print_term(t) + ")";
            }
            return;
        }
        case K::Rel:
            s += "(" + f.rel_name;
            terms(0);
            s += ")";
            return;
        case K::Def: {
            std::string args;
            for (const auto& a : f.terms) args += " " + print_term(*a);
            s += "(or (" + f.rel_name + args + " " + f.var + ") (and (= " + f.var + " 0) (not (exists _w (" +
                 f.rel_name + args + " _w)))))";
            return;
        }
        case K::Not:
            s += "(not";
            subs();
            s += ")";
            return;
        case K::And:
            s += "(and";
            subs();
            s += ")";
            return;
        case K::Or:
            s += "(or";
            subs();
            s += ")";
            return;
        case K::Exists:
        case K::Forall:
            s += f.kind == K::Exists ? "(exists " : "(forall ";
            s += f.var;
            subs();
            s += ")";
            return;
        case K::BExists:
        case K::BForall:
            s += f.kind == K::BExists ? "(exists (" : "(forall (";
            s += f.var + " in " + print_term(*f.terms[0]) + ")";
            subs();
            s += ")";
            return;
    }
}

}  // namespace

std::string print_formula(const Formula& f) {
    std::string s;
    print_into(f, s);
    return s;
}

std::string print_system(const PfpSystem& sys) {
    std::string s;
    for (const auto& r : sys.relations) {
        s += "(define (" + r.name;
        for (const auto& p : r.params) s += " " + p;
        s += ")\n  " + print_formula(*r.body) + ")\n";
    }
    return s;
}

}  // namespace cps
