#pragma once

// Random closed-ish programs, states and bindings over a fixed small signature, for property
// tests. Signature: input E/2; dynamic f/1, g/0, p/1 relational; plus Halt and Output.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "cps/eval.hpp"

namespace cps::testgen {

inline std::shared_ptr<Signature> signature() {
    auto s = std::make_shared<Signature>();
    s->add_input("E", 2);
    s->add_dynamic("f", 1);
    s->add_dynamic("g", 0);
    s->add_dynamic("p", 1, true);
    return s;
}

class Gen {
public:
    Gen(std::shared_ptr<const Signature> sig, std::uint64_t seed) : sig_(std::move(sig)), rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
    bool coin(int percent) { return static_cast<int>(rng_() % 100) < percent; }

    TermPtr value(int depth, std::vector<std::string>& scope) {
        using namespace build;
        if (depth <= 0 || coin(30)) {
            const std::size_t k = pick(scope.empty() ? 4 : 7);
            switch (k) {
                case 0: return empty();
                case 1: return builtin(Builtin::Atoms);
                case 2: return apply(*sig_, "g");
                case 3: return truth();
                default: return var(scope[pick(scope.size())]);
            }
        }
        switch (pick(7)) {
            case 0: return builtin(Builtin::Pair, {value(depth - 1, scope), value(depth - 1, scope)});
            case 1: return builtin(Builtin::Union, {value(depth - 1, scope)});
            case 2: return builtin(Builtin::TheUnique, {value(depth - 1, scope)});
            case 3: return apply(*sig_, "f", {value(depth - 1, scope)});
            case 4: {
                TermPtr src = value(depth - 1, scope);
                const std::string v = fresh(scope);
                scope.push_back(v);
                TermPtr body = value(depth - 1, scope);
                TermPtr guard = boolean(depth - 1, scope);
                scope.pop_back();
                return comprehension(body, v, src, guard);
            }
            case 5: return enumeration({value(depth - 1, scope), value(depth - 1, scope)});
            default: return value(0, scope);
        }
    }

    TermPtr boolean(int depth, std::vector<std::string>& scope) {
        using namespace build;
        if (depth <= 0 || coin(25)) {
            switch (pick(3)) {
                case 0: return truth();
                case 1: return falsity();
                default: return value(0, scope);
            }
        }
        switch (pick(8)) {
            case 0: return eq(value(depth - 1, scope), value(depth - 1, scope));
            case 1: return builtin(Builtin::In, {value(depth - 1, scope), value(depth - 1, scope)});
            case 2: return builtin(Builtin::Not, {boolean(depth - 1, scope)});
            case 3: return builtin(Builtin::And, {boolean(depth - 1, scope), boolean(depth - 1, scope)});
            case 4: return builtin(Builtin::Or, {boolean(depth - 1, scope), boolean(depth - 1, scope)});
            case 5: return apply(*sig_, "E", {value(depth - 1, scope), value(depth - 1, scope)});
            case 6: return apply(*sig_, "p", {value(depth - 1, scope)});
            default: return value(depth - 1, scope);
        }
    }

    RulePtr rule(int depth, std::vector<std::string>& scope) {
        using namespace build;
        if (depth <= 0 || coin(30)) {
            switch (pick(6)) {
                case 0: return skip();
                case 1: return assign(*sig_, "f", {value(1, scope)}, value(2, scope));
                case 2: return assign(*sig_, "g", {}, value(2, scope));
                case 3: return assign(*sig_, "p", {value(1, scope)}, boolean(1, scope));
                case 4: return assign(*sig_, "Output", {}, boolean(1, scope));
                default: return assign(*sig_, "f", {value(0, scope)}, value(1, scope));
            }
        }
        switch (pick(4)) {
            case 0: return if_then(boolean(2, scope), rule(depth - 1, scope), coin(50) ? rule(depth - 1, scope) : nullptr);
            case 1: {
                TermPtr src = value(2, scope);
                const std::string v = fresh(scope);
                scope.push_back(v);
                RulePtr body = rule(depth - 1, scope);
                scope.pop_back();
                return forall(v, src, body);
            }
            case 2: {
                std::vector<RulePtr> rs;
                const std::size_t k = 2 + pick(2);
                for (std::size_t i = 0; i < k; ++i) rs.push_back(rule(depth - 1, scope));
                return par(std::move(rs));
            }
            default: return rule(0, scope);
        }
    }

    /// Objects of rank <= depth over the universe's atoms.
    ObjId object(Universe& u, int depth) {
        if (depth <= 0 || coin(30)) {
            if (u.atom_count() > 0 && coin(70)) return u.atom(static_cast<AtomId>(pick(u.atom_count())));
            return coin(50) ? EMPTY : ONE;
        }
        std::vector<ObjId> es;
        const std::size_t n = pick(4);
        for (std::size_t i = 0; i < n; ++i) es.push_back(object(u, depth - 1));
        return u.mk_set(std::move(es));
    }

    InputStructure input(std::uint32_t n) {
        InputStructure in;
        in.atom_count = n;
        auto& e = in.relations["E"];
        for (AtomId a = 0; a < n; ++a)
            for (AtomId b = 0; b < n; ++b)
                if (coin(30)) e.insert({a, b});
        return in;
    }

    /// A state reached by applying random assignments to the initial state.
    State state(Universe& u, int depth) {
        State s = initial_state(sig_);
        UpdateSet d;
        const int f = *sig_->find_dynamic("f"), g = *sig_->find_dynamic("g"), p = *sig_->find_dynamic("p");
        const std::size_t nf = pick(5);
        for (std::size_t i = 0; i < nf; ++i) d.updates.push_back({{f, {object(u, depth)}}, object(u, depth)});
        if (coin(60)) d.updates.push_back({{g, {}}, object(u, depth)});
        const std::size_t np = pick(4);
        for (std::size_t i = 0; i < np; ++i) d.updates.push_back({{p, {object(u, depth)}}, ONE});
        // Keep it consistent: later entries for a location win.
        std::vector<Update> unique;
        for (auto it = d.updates.rbegin(); it != d.updates.rend(); ++it)
            if (std::none_of(unique.begin(), unique.end(), [&](const Update& x) { return x.loc == it->loc; }))
                unique.push_back(*it);
        d.updates = std::move(unique);
        d.normalize();
        return apply(s, d);
    }

private:
    static std::string fresh(const std::vector<std::string>& scope) { return "x" + std::to_string(scope.size()); }

    std::shared_ptr<const Signature> sig_;
    std::mt19937_64 rng_;
};

}  // namespace cps::testgen
