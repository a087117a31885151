#pragma once

// Compares the update formulas with the interpreter's update sets on random
// (rule, state, binding) triples.

#include <algorithm>
#include <set>
#include <string>

#include "cps/pfp.hpp"
#include "random_program.hpp"

namespace cps::testgen {

struct UpdCheck {
    std::size_t triples = 0;
    std::size_t evaluations = 0;
    std::size_t mismatches = 0;
    std::string first;
};

inline UpdCheck check_upd_soundness(std::uint64_t seed, std::size_t triples, std::uint32_t max_atoms = 4) {
    UpdCheck out;
    auto sig = signature();
    Gen gen(sig, seed);
    while (out.triples < triples) {
        const auto n = static_cast<std::uint32_t>(1 + gen.pick(max_atoms));
        Universe u(n);
        const InputStructure in = gen.input(n);
        const State s = gen.state(u, 2);
        // Two free variables the binding covers.
        std::vector<std::string> scope{"z0", "z1"};
        Binding b;
        for (const auto& v : scope) b.push(v, gen.object(u, 2));
        const Program p{sig, gen.rule(3, scope)};

        const EvalContext ctx(u, *sig, in, s);
        UpdateSet delta;
        try {
            delta = update_set(ctx, b, *p.rule);
        } catch (const Error&) {
            continue;
        }
        ++out.triples;
        const bool consistent = is_consistent(delta);

        // Candidates: everything the update set mentions plus a few unrelated objects.
        std::set<ObjId> pool{EMPTY, ONE};
        for (AtomId a = 0; a < n; ++a) pool.insert(u.atom(a));
        for (const Update& up : delta.updates) {
            pool.insert(up.value);
            pool.insert(up.loc.args.begin(), up.loc.args.end());
        }
        for (int i = 0; i < 3; ++i) pool.insert(gen.object(u, 2));

        // Domain for unbounded quantifiers: closed under membership, holding every stored value.
        std::set<ObjId> dom;
        auto close = [&](ObjId x) {
            for (ObjId y : u.tc(x)) dom.insert(y);
        };
        for (ObjId x : active_objects(u, s)) close(x);
        for (const auto& [name, v] : b.entries()) close(v);
        for (ObjId x : pool) close(x);
        const std::vector<ObjId> domain(dom.begin(), dom.end());

        const RelTables tables = state_tables(s);
        const TableView view(tables);
        const EvalContext flat_ctx(u, *sig, in, view);
        const FormulaContext plain{ctx, nullptr, &domain};
        const FormulaContext flat{flat_ctx, &tables, &domain};

        for (int f = 0; f < static_cast<int>(sig->dynamics().size()); ++f) {
            const int arity = sig->dynamics()[f].arity;
            std::vector<std::string> xs;
            for (int i = 0; i < arity; ++i) xs.push_back("_x" + std::to_string(i));
            const FormulaPtr upd = upd_formula(p, *p.rule, f, xs, "_y");
            int counter = 0;
            const FormulaPtr flattened = u_formula(p, f, xs, "_y", counter);
            std::vector<ObjId> tuple(static_cast<std::size_t>(arity));
            auto check = [&]() {
                for (ObjId y : pool) {
                    Binding bb = b;
                    for (int i = 0; i < arity; ++i) bb.push(xs[i], tuple[i]);
                    bb.push("_y", y);
                    Update probe{Location{f, tuple}, y};
                    const bool member = std::binary_search(delta.updates.begin(), delta.updates.end(), probe);
                    const bool want = member && consistent;
                    const bool got = eval_formula(plain, bb, *upd);
                    const bool got_flat = eval_formula(flat, bb, *flattened);
                    out.evaluations += 2;
                    if (got != want || got_flat != want) {
                        if (out.mismatches++ == 0)
                            out.first = print_rule(*p.rule) + "\n  symbol " + sig->dynamics()[f].name +
                                        " value " + u.to_literal(y) + " want " + std::to_string(want) +
                                        " plain " + std::to_string(got) + " flat " + std::to_string(got_flat);
                    }
                }
            };
            if (arity == 0) {
                check();
            } else {
                for (ObjId a : pool) {
                    tuple[0] = a;
                    check();
                }
            }
        }
    }
    return out;
}

}  // namespace cps::testgen
