#include <set>
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cps/errors.hpp"
#include "cps/pebble.hpp"
#include "cps/pfp.hpp"
#include "cps/symmetry.hpp"

namespace py = pybind11;
using namespace cps;

namespace {

// Objects cross the boundary as their integer handles.
using Handle = std::uint32_t;

std::vector<Handle> handles(const std::vector<ObjId>& xs) {
    std::vector<Handle> out;
    out.reserve(xs.size());
    for (ObjId x : xs) out.push_back(x.id);
    return out;
}

ObjId checked(const Universe& u, Handle h) {
    if (h >= u.size()) throw py::index_error("no object with handle " + std::to_string(h));
    return ObjId{h};
}

InputStructure naked(std::uint32_t n) {
    InputStructure in;
    in.atom_count = n;
    return in;
}

InputStructure input_of(std::optional<std::uint32_t> n, std::optional<std::string> text) {
    if (n.has_value() == text.has_value()) throw py::value_error("give exactly one of naked_set and input");
    return n ? naked(*n) : parse_input(*text);
}

// A fragment together with the universe and oracle it lives in.
struct FragmentHolder {
    std::shared_ptr<Universe> u;
    std::unique_ptr<SupportOracle> s;
    Fragment f;
    GameStructure g;

    FragmentHolder(std::uint32_t n) : u(std::make_shared<Universe>(n)), s(std::make_unique<SupportOracle>(*u)) {}
    void finish() { g = make_game_structure(*u, f.objects); }
};

std::shared_ptr<FragmentHolder> make_fragment(std::uint32_t n, std::uint32_t k, std::uint32_t r,
                                              std::optional<std::size_t> budget) {
    auto h = std::make_shared<FragmentHolder>(n);
    h->f = build_fragment(*h->s, k, r, budget.value_or(object_budget()));
    h->finish();
    return h;
}

std::shared_ptr<FragmentHolder> load_fragment(const std::string& text) {
    std::istringstream in(text);
    std::string word;
    std::uint32_t n = 0;
    if (!(in >> word >> n) || word != "fragment") throw py::value_error("not a fragment export");
    auto h = std::make_shared<FragmentHolder>(n);
    h->f = import_fragment(*h->u, text);
    h->finish();
    return h;
}

py::dict verify_dict(const VerifyReport& v, const GameStructure& A, const GameStructure& B) {
    py::list moves;
    for (const Move& m : v.counterexample) {
        const Universe& us = *(m.side == Side::A ? A : B).universe;
        const Universe& ur = *(m.side == Side::A ? B : A).universe;
        moves.append(py::make_tuple(m.side == Side::A ? "A" : "B", m.pebble, us.to_literal(m.spoiler),
                                    ur.to_literal(m.response)));
    }
    py::dict d;
    d["ok"] = v.ok;
    d["complete"] = v.complete;
    d["nodes"] = v.nodes;
    d["counterexample"] = moves;
    d["error"] = v.error;
    return d;
}

}  // namespace

PYBIND11_MODULE(_cps, m) {
    m.doc() = "Hereditarily finite sets, set-theoretic state machines, fixed-point logic and pebble games";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<ParseError>(m, "ParseError", error.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
    py::register_exception<DynamicError>(m, "DynamicError", error.ptr());
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", error.ptr());
    py::register_exception<NoSmallSupport>(m, "NoSmallSupport", error.ptr());
    py::register_exception<NotKSymmetric>(m, "NotKSymmetric", error.ptr());
    py::register_exception<InputDependence>(m, "InputDependence", error.ptr());

    py::class_<Universe, std::shared_ptr<Universe>>(m, "Universe")
        .def(py::init<std::uint32_t>(), py::arg("atoms"))
        .def_property_readonly("atom_count", &Universe::atom_count)
        .def("__len__", &Universe::size)
        .def("atom", [](const Universe& u, AtomId a) { return u.atom(a).id; })
        .def("parse", [](Universe& u, const std::string& s) { return u.parse_literal(s).id; })
        .def("literal", [](const Universe& u, Handle h) { return u.to_literal(checked(u, h)); })
        .def("rank", [](const Universe& u, Handle h) { return u.rank(checked(u, h)); })
        .def("is_atom", [](const Universe& u, Handle h) { return u.is_atom(checked(u, h)); })
        .def("elements",
             [](const Universe& u, Handle h) {
                 const auto es = u.elements(checked(u, h));
                 return handles(std::vector<ObjId>(es.begin(), es.end()));
             })
        .def("make_set",
             [](Universe& u, const std::vector<Handle>& hs) {
                 std::vector<ObjId> es;
                 for (Handle h : hs) es.push_back(checked(u, h));
                 return u.mk_set(std::move(es)).id;
             })
        .def("permute",
             [](Universe& u, const std::vector<AtomId>& image, Handle h) {
                 return u.apply_perm(Perm(image), checked(u, h)).id;
             })
        .def("min_support",
             [](std::shared_ptr<Universe> u, Handle h) {
                 SupportOracle s(*u);
                 return s.min_support(checked(*u, h));
             });

    py::class_<PSpaceMachine>(m, "Machine")
        .def(py::init([](const std::string& text) { return parse_machine(text); }), py::arg("text"))
        .def("bound", [](const PSpaceMachine& pm, std::uint64_t n) { return pm.bound(n); })
        .def("rule", [](const PSpaceMachine& pm) { return print_rule(*pm.program.rule); })
        .def("extract", [](const PSpaceMachine& pm) { return print_system(fixed_point_system(pm.program)); });

    m.def(
        "run",
        [](const PSpaceMachine& pm, std::optional<std::uint32_t> naked_set, std::optional<std::string> input,
           std::size_t max_steps) {
            const InputStructure in = input_of(naked_set, input);
            check_input(*pm.program.signature, in);
            Universe u(in.atom_count);
            const RunTrace t = run(u, pm, in, RunOptions{max_steps});
            py::dict d;
            d["outcome"] = std::string(outcome_name(t.outcome));
            d["steps"] = t.run_length() - 1;
            d["active_counts"] = t.active_counts;
            d["bound"] = pm.bound(in.atom_count);
            if (t.outcome == Outcome::Diverges) d["cycle"] = py::make_tuple(t.cycle_start, t.cycle_length);
            return d;
        },
        py::arg("machine"), py::arg("naked_set") = py::none(), py::arg("input") = py::none(),
        py::arg("max_steps") = 100000);

    m.def(
        "lockstep",
        [](const PSpaceMachine& pm, std::optional<std::uint32_t> naked_set, std::optional<std::string> input) {
            const InputStructure in = input_of(naked_set, input);
            auto u = std::make_shared<Universe>(in.atom_count);
            const RunTrace t = run(*u, pm, in);
            const LockstepReport r = lockstep(u, pm, in, t);
            py::dict d;
            d["ok"] = r.ok;
            d["compared"] = r.compared;
            d["verdict"] = std::string(verdict_name(r.verdict));
            d["outcome"] = std::string(outcome_name(t.outcome));
            d["fixed_point"] = r.pfp.fixed_point;
            return d;
        },
        py::arg("machine"), py::arg("naked_set") = py::none(), py::arg("input") = py::none());

    m.def(
        "support_report",
        [](const PSpaceMachine& pm, std::uint32_t naked_set, std::uint32_t k) {
            Universe u(naked_set);
            SupportOracle s(u);
            const SupportReport r = check_support_theorem(s, run(u, pm, naked(naked_set)), k);
            py::dict d;
            d["binomial_condition"] = r.binomial_condition;
            d["objects_checked"] = r.objects_checked;
            d["max_support"] = r.max_support;
            d["violations"] = r.violations.size();
            d["no_small_support"] = r.no_small_support.size();
            return d;
        },
        py::arg("machine"), py::arg("naked_set"), py::arg("k"));

    m.def("smallest_binomial_n", &smallest_binomial_n, py::arg("k"));

    py::class_<FragmentHolder, std::shared_ptr<FragmentHolder>>(m, "Fragment")
        .def(py::init(&make_fragment), py::arg("n"), py::arg("k"), py::arg("r"), py::arg("budget") = py::none())
        .def_static("load", &load_fragment, py::arg("text"))
        .def_property_readonly("n", [](const FragmentHolder& h) { return h.f.n; })
        .def_property_readonly("k", [](const FragmentHolder& h) { return h.f.k; })
        .def_property_readonly("r", [](const FragmentHolder& h) { return h.f.r; })
        .def_property_readonly("universe", [](const FragmentHolder& h) { return h.u; })
        .def("__len__", [](const FragmentHolder& h) { return h.f.objects.size(); })
        .def("objects", [](const FragmentHolder& h) { return handles(h.f.objects); })
        .def("literals",
             [](const FragmentHolder& h) {
                 std::vector<std::string> out;
                 for (ObjId x : h.f.objects) out.push_back(h.u->to_literal(x));
                 return out;
             })
        .def("export", [](const FragmentHolder& h) { return export_fragment(*h.u, h.f); })
        .def("form_of", [](FragmentHolder& h, Handle x) {
            FormStore store(h.f.k);
            FormBuilder b(*h.s, store);
            const auto [phi, sigma] = b.form_of(checked(*h.u, x));
            return py::make_tuple(store.print(phi), sigma);
        });

    m.def(
        "in_eq_identical",
        [](std::uint32_t k, std::uint32_t r, std::uint32_t n1, std::uint32_t n2) {
            Universe u(n1);
            SupportOracle s(u);
            const Fragment f = build_fragment(s, k, r, object_budget());
            FormStore store(k);
            FormBuilder b(s, store);
            std::vector<FormId> forms;
            std::set<FormId> seen;
            for (ObjId x : f.objects)
                if (const FormId phi = b.form_of(x).first; seen.insert(phi).second) forms.push_back(phi);
            try {
                in_eq_relations(store, forms, n1, n2);
                return true;
            } catch (const InputDependence&) {
                return false;
            }
        },
        py::arg("k"), py::arg("r"), py::arg("n1"), py::arg("n2"));

    m.def(
        "verify",
        [](const FragmentHolder& a, const FragmentHolder& b, std::size_t m, std::size_t depth,
           std::size_t budget) { return verify_dict(verify_duplicator(a.g, b.g, a.f.k, m, depth, budget), a.g, b.g); },
        py::arg("a"), py::arg("b"), py::arg("m"), py::arg("depth"), py::arg("budget") = 10'000'000);

    m.def(
        "sample",
        [](const FragmentHolder& a, const FragmentHolder& b, std::size_t m, std::size_t depth, std::size_t samples,
           std::uint64_t seed) {
            return verify_dict(sample_duplicator(a.g, b.g, a.f.k, m, depth, samples, seed), a.g, b.g);
        },
        py::arg("a"), py::arg("b"), py::arg("m"), py::arg("depth"), py::arg("samples"), py::arg("seed") = 0);

    m.def(
        "solve",
        [](const FragmentHolder& a, const FragmentHolder& b, std::size_t m, std::size_t depth, std::size_t budget) {
            const SolveReport r = solve_game(a.g, b.g, m, depth, budget);
            py::dict d;
            d["spoiler_wins"] = r.spoiler_wins;
            d["nodes"] = r.nodes;
            if (r.first_move) {
                const Move& mv = *r.first_move;
                d["first_move"] = py::make_tuple(mv.side == Side::A ? "A" : "B", mv.pebble,
                                                 (mv.side == Side::A ? a.g : b.g).universe->to_literal(mv.spoiler));
            }
            return d;
        },
        py::arg("a"), py::arg("b"), py::arg("m"), py::arg("depth"), py::arg("budget") = 10'000'000);
}
