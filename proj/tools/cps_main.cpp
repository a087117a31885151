// cps: command-line driver for runs, fixed-point extraction, symmetry analysis and pebble games.
//
// Exit codes: run outcomes 0 accept, 1 reject, 2 space-exceeded, 3 diverges, 4 step-cap;
// 10 parse error, 11 validation error, 12 dynamic error, 13 i/o error, 14 budget exceeded,
// 15 other error, 16 usage error.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cps/pebble.hpp"
#include "cps/pfp.hpp"

using namespace cps;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

class IoError : public Error {
public:
    using Error::Error;
};

struct Out {
    bool json_lines = false;
    std::ostream& os = std::cout;

    /// One record; text mode prints the preformatted line instead.
    void emit(const json& record, const std::string& text) const {
        if (json_lines)
            os << record.dump() << "\n";
        else if (!text.empty())
            os << text << (text.back() == '\n' ? "" : "\n");
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw IoError("cannot write " + path);
}

std::string current_file;

struct Inputs {
    std::string machine;
    std::string input;
    int naked = -1;
    std::size_t max_steps = 100000;
};

void add_input_options(CLI::App* c, Inputs& in, bool need_machine = true) {
    if (need_machine) c->add_option("machine", in.machine, "machine file")->required();
    auto* file = c->add_option("input", in.input, "input structure file");
    auto* naked = c->add_option("--naked-set", in.naked, "use n atoms and no relations")->check(CLI::Range(0, 64));
    file->excludes(naked);
    c->add_option("--max-steps", in.max_steps, "step cap");
}

PSpaceMachine load_machine(const std::string& path) {
    current_file = path;
    PSpaceMachine m = parse_machine(read_file(path));
    current_file.clear();
    return m;
}

InputStructure load_input(const Inputs& in) {
    if (in.naked >= 0) {
        InputStructure s;
        s.atom_count = static_cast<std::uint32_t>(in.naked);
        return s;
    }
    if (in.input.empty()) throw Error("an input file or --naked-set is required");
    current_file = in.input;
    InputStructure s = parse_input(read_file(in.input));
    current_file.clear();
    return s;
}

json update_json(const Universe& u, const Signature& sig, const UpdateSet& d) {
    json out = json::array();
    for (const Update& up : d.updates) {
        json args = json::array();
        for (ObjId a : up.loc.args) args.push_back(u.to_literal(a));
        out.push_back({{"symbol", sig.dynamics()[up.loc.sym].name}, {"args", args}, {"value", u.to_literal(up.value)}});
    }
    return out;
}

// ---------------------------------------------------------------- run

int cmd_run(const Out& out, const Inputs& inputs, const std::string& level, const std::string& trace_out) {
    const PSpaceMachine m = load_machine(inputs.machine);
    const InputStructure in = load_input(inputs);
    Universe u(in.atom_count);
    const RunTrace t = run(u, m, in, RunOptions{inputs.max_steps});
    const Signature& sig = *m.program.signature;

    std::ostringstream trace;
    if (level != "outcome") {
        const std::size_t steps = t.states.size();
        for (std::size_t i = 0; i < steps; ++i) {
            json rec{{"type", "step"}, {"step", i}, {"active", t.active_counts[i]}};
            std::string text = "step " + std::to_string(i) + ": active " + std::to_string(t.active_counts[i]);
            if (level == "full" && i < t.updates.size()) {
                rec["updates"] = update_json(u, sig, t.updates[i]);
                text += "\n  " + print_update_set(u, sig, t.updates[i]);
            }
            if (out.json_lines)
                trace << rec.dump() << "\n";
            else
                trace << text << "\n";
        }
    }
    json rec{{"type", "outcome"},
             {"outcome", std::string(outcome_name(t.outcome))},
             {"steps", t.run_length() - 1},
             {"bound", m.bound(in.atom_count)},
             {"max_active", *std::max_element(t.active_counts.begin(), t.active_counts.end())}};
    std::string text = "outcome " + std::string(outcome_name(t.outcome)) + " after " +
                       std::to_string(t.run_length() - 1) + " steps (bound " +
                       std::to_string(m.bound(in.atom_count)) + ")";
    if (t.outcome == Outcome::Diverges) {
        rec["cycle_start"] = t.cycle_start;
        rec["cycle_length"] = t.cycle_length;
        text += ", state " + std::to_string(t.cycle_start) + " recurs every " + std::to_string(t.cycle_length);
    } else if (t.outcome == Outcome::SpaceExceeded) {
        rec["exceeded_at"] = t.exceeded_at;
        text += ", state " + std::to_string(t.exceeded_at) + " has " +
                std::to_string(t.active_counts[t.exceeded_at]) + " active objects";
    }
    if (trace_out.empty()) {
        out.os << trace.str();
    } else {
        write_file(trace_out, trace.str());
    }
    out.emit(rec, text);
    return static_cast<int>(t.outcome);
}

// ---------------------------------------------------------------- pfp

int cmd_pfp_extract(const Out& out, const std::string& machine) {
    const PSpaceMachine m = load_machine(machine);
    const PfpSystem sys = fixed_point_system(m.program);
    if (out.json_lines) {
        for (const auto& r : sys.relations)
            out.emit({{"type", "relation"}, {"name", r.name}, {"params", r.params}, {"body", print_formula(*r.body)}},
                     "");
    } else {
        out.os << print_system(sys);
    }
    return 0;
}

int cmd_pfp_eval(const Out& out, const Inputs& inputs) {
    const PSpaceMachine m = load_machine(inputs.machine);
    const InputStructure in = load_input(inputs);
    auto u = std::make_shared<Universe>(in.atom_count);
    const RunTrace t = run(*u, m, in, RunOptions{inputs.max_steps});
    const Structure st = active_structure(u, t, in);
    const PfpResult r = pfp_iterate(fixed_point_system(m.program), *u, *m.program.signature, in, st.domain,
                                    PfpOptions{inputs.max_steps + 2, true});
    const Verdict v = acceptance(r.tables);
    out.emit({{"type", "pfp"},
              {"verdict", std::string(verdict_name(v))},
              {"fixed_point", r.fixed_point},
              {"stages", r.stages.size()},
              {"domain", st.domain.size()}},
             "verdict " + std::string(verdict_name(v)) + " (" + (r.fixed_point ? "fixed point" : "no fixed point") +
                 " after " + std::to_string(r.stages.size()) + " stages, domain " +
                 std::to_string(st.domain.size()) + ")");
    return 0;
}

int cmd_pfp_lockstep(const Out& out, const Inputs& inputs) {
    const PSpaceMachine m = load_machine(inputs.machine);
    const InputStructure in = load_input(inputs);
    auto u = std::make_shared<Universe>(in.atom_count);
    const RunTrace t = run(*u, m, in, RunOptions{inputs.max_steps});
    const LockstepReport r = lockstep(u, m, in, t);
    std::string text;
    if (r.ok)
        text = "stages 0.." + std::to_string(r.compared - 1) + " identical";
    else
        text = "stage " + std::to_string(r.first_mismatch) + " differs from its state";
    text += "; run " + std::string(outcome_name(t.outcome)) + ", verdict " + std::string(verdict_name(r.verdict));
    out.emit({{"type", "lockstep"},
              {"ok", r.ok},
              {"compared", r.compared},
              {"first_mismatch", r.ok ? json(nullptr) : json(r.first_mismatch)},
              {"outcome", std::string(outcome_name(t.outcome))},
              {"verdict", std::string(verdict_name(r.verdict))}},
             text);
    return r.ok ? 0 : 1;
}

// ---------------------------------------------------------------- symmetry

std::string atoms_text(const AtomSet& a) {
    std::string s = "{";
    for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ", a" : "a") + std::to_string(a[i]);
    return s + "}";
}

int cmd_support(const Out& out, const Inputs& inputs, std::uint32_t k) {
    const PSpaceMachine m = load_machine(inputs.machine);
    const InputStructure in = load_input(inputs);
    auto u = std::make_shared<Universe>(in.atom_count);
    const RunTrace t = run(*u, m, in, RunOptions{inputs.max_steps});
    const Structure st = active_structure(u, t, in);
    SupportOracle s(*u);
    std::vector<ObjId> objs = st.domain;
    u->sort_canonical(objs);
    for (ObjId y : objs) {
        json rec{{"type", "support"}, {"object", u->to_literal(y)}};
        std::string text = u->to_literal(y) + ": ";
        try {
            const AtomSet& a = s.min_support(y);
            rec["support"] = a;
            text += atoms_text(a);
        } catch (const NoSmallSupport&) {
            rec["support"] = nullptr;
            text += "no support of size < n/2";
        }
        out.emit(rec, text);
    }
    const SupportReport r = check_support_theorem(s, t, k);
    out.emit({{"type", "support-report"},
              {"n", r.n},
              {"k", r.k},
              {"binomial_condition", r.binomial_condition},
              {"objects", r.objects_checked},
              {"max_support", r.max_support},
              {"violations", r.violations.size()},
              {"no_small_support", r.no_small_support.size()}},
             "checked " + std::to_string(r.objects_checked) + " active objects: largest minimal support " +
                 std::to_string(r.max_support) + ", " + std::to_string(r.violations.size()) +
                 " larger than k=" + std::to_string(k) + ", " + std::to_string(r.no_small_support.size()) +
                 " without a small support; C(n,k+1) > n^k " + (r.binomial_condition ? "holds" : "fails"));
    return r.violations.empty() && r.no_small_support.empty() ? 0 : 1;
}

struct FragParams {
    std::uint32_t n = 4;
    std::uint32_t k = 1;
    std::uint32_t r = 1;
};

void add_frag_options(CLI::App* c, FragParams& f) {
    c->add_option("--n", f.n, "atoms")->required()->check(CLI::Range(0, 16));
    c->add_option("--k", f.k, "support bound")->required()->check(CLI::Range(0, 8));
    c->add_option("--r", f.r, "rank bound")->required()->check(CLI::Range(0, 6));
}

int cmd_fragment(const Out& out, const FragParams& p, const std::string& path) {
    Universe u(p.n);
    SupportOracle s(u);
    const Fragment f = build_fragment(s, p.k, p.r, object_budget());
    const std::string text = export_fragment(u, f);
    if (path.empty())
        out.os << text;
    else
        write_file(path, text);
    if (!path.empty() || out.json_lines)
        out.emit({{"type", "fragment"}, {"n", p.n}, {"k", p.k}, {"r", p.r}, {"objects", f.objects.size()}},
                 "fragment n=" + std::to_string(p.n) + " k=" + std::to_string(p.k) + " r=" + std::to_string(p.r) +
                     ": " + std::to_string(f.objects.size()) + " objects");
    return 0;
}

int cmd_forms(const Out& out, const FragParams& p, bool list) {
    Universe u(p.n);
    SupportOracle s(u);
    const Fragment f = build_fragment(s, p.k, p.r, object_budget());
    FormStore store(p.k);
    FormBuilder b(s, store);
    FormEvaluator ev(u, store);
    std::size_t bad = 0;
    std::set<FormId> forms;
    for (ObjId x : f.objects) {
        auto [phi, sigma] = b.form_of(x);
        forms.insert(phi);
        const bool ok = ev.apply(phi, sigma) == x;
        if (!ok) ++bad;
        if (list || !ok) {
            std::string mol;
            for (AtomId a : sigma) mol += (mol.empty() ? "a" : " a") + std::to_string(a);
            out.emit({{"type", "form"},
                      {"object", u.to_literal(x)},
                      {"form", store.print(phi)},
                      {"molecule", sigma},
                      {"round_trip", ok}},
                     u.to_literal(x) + " = " + store.print(phi) + " * (" + mol + ")" + (ok ? "" : "  MISMATCH"));
        }
    }
    out.emit({{"type", "forms-report"}, {"objects", f.objects.size()}, {"forms", forms.size()}, {"mismatches", bad}},
             std::to_string(f.objects.size()) + " objects, " + std::to_string(forms.size()) + " forms, " +
                 std::to_string(bad) + " round-trip mismatches");
    return bad ? 1 : 0;
}

int cmd_ineq(const Out& out, std::uint32_t k, std::uint32_t r, std::uint32_t n1, std::uint32_t n2,
             std::size_t max_forms) {
    if (n1 >= n2) throw Error("--n1 must be smaller than --n2");
    // Forms come from the objects of the smaller fragment, in fragment order.
    Universe u(n1);
    SupportOracle s(u);
    const Fragment f = build_fragment(s, k, r, object_budget());
    FormStore store(k);
    FormBuilder b(s, store);
    std::vector<FormId> forms;
    std::set<FormId> seen;
    for (ObjId x : f.objects) {
        if (forms.size() >= max_forms) break;
        const FormId phi = b.form_of(x).first;
        if (seen.insert(phi).second) forms.push_back(phi);
    }
    json rec{{"type", "ineq"}, {"k", k}, {"r", r}, {"n1", n1}, {"n2", n2}, {"forms", forms.size()}};
    try {
        const InEqTables t = in_eq_relations(store, forms, n1, n2);
        rec["identical"] = true;
        rec["configurations"] = t.confs.size();
        out.emit(rec, "In/Eq tables over " + std::to_string(forms.size()) + " forms and " +
                          std::to_string(t.confs.size()) + " configurations identical at n=" + std::to_string(n1) +
                          " and n=" + std::to_string(n2));
        return 0;
    } catch (const InputDependence& e) {
        rec["identical"] = false;
        rec["difference"] = e.what();
        out.emit(rec, std::string("tables differ: ") + e.what());
        return 1;
    }
}

// ---------------------------------------------------------------- pebble

struct LoadedFragment {
    std::unique_ptr<Universe> u;
    Fragment f;
    GameStructure g;
};

LoadedFragment load_fragment(const std::string& path) {
    const std::string text = read_file(path);
    std::istringstream head(text);
    std::string word;
    std::uint32_t n = 0;
    current_file = path;
    if (!(head >> word >> n) || word != "fragment") throw ParseError({1, 1}, "expected 'fragment n k r'");
    LoadedFragment l;
    l.u = std::make_unique<Universe>(n);
    l.f = import_fragment(*l.u, text);
    current_file.clear();
    l.g = make_game_structure(*l.u, l.f.objects);
    return l;
}

struct GameParams {
    std::string frag_a, frag_b;
    std::size_t m = 3;
    std::size_t depth = 1;
    std::size_t budget = 0;
};

void add_game_options(CLI::App* c, GameParams& g, bool with_depth) {
    c->add_option("--fragA", g.frag_a, "fragment file for A")->required();
    c->add_option("--fragB", g.frag_b, "fragment file for B")->required();
    c->add_option("--m", g.m, "pebbles")->check(CLI::Range(1, 8));
    if (with_depth) {
        c->add_option("--depth", g.depth, "rounds")->check(CLI::Range(0, 8));
        c->add_option("--budget", g.budget, "node budget (default: CPS_BUDGET or 2000000)");
    }
}

std::string move_text(const GameStructure& A, const GameStructure& B, const Move& mv) {
    const bool a = mv.side == Side::A;
    return std::string(a ? "A" : "B") + " pebble " + std::to_string(mv.pebble) + " on " +
           (a ? A : B).universe->to_literal(mv.spoiler) + ", answer " +
           (a ? B : A).universe->to_literal(mv.response);
}

int cmd_verify(const Out& out, const GameParams& p) {
    LoadedFragment a = load_fragment(p.frag_a), b = load_fragment(p.frag_b);
    if (a.f.k != b.f.k || a.f.r != b.f.r) throw Error("fragments were built with different k or r");
    const std::size_t budget = p.budget ? p.budget : object_budget();
    const VerifyReport r = verify_duplicator(a.g, b.g, a.f.k, p.m, p.depth, budget);
    if (!r.complete) throw BudgetExceeded("verify: more than " + std::to_string(budget) + " spoiler moves");
    json trace = json::array();
    std::string text;
    if (r.ok) {
        text = "duplicator survives " + std::to_string(p.depth) + " rounds with " + std::to_string(p.m) +
               " pebbles (" + std::to_string(r.nodes) + " spoiler moves checked)";
    } else {
        text = "counterexample after " + std::to_string(r.counterexample.size()) + " moves: " + r.error;
        for (const Move& mv : r.counterexample) {
            text += "\n  " + move_text(a.g, b.g, mv);
            trace.push_back(move_text(a.g, b.g, mv));
        }
    }
    out.emit({{"type", "verify"}, {"ok", r.ok}, {"nodes", r.nodes}, {"depth", p.depth}, {"m", p.m},
              {"error", r.error}, {"counterexample", trace}},
             text);
    return r.ok ? 0 : 1;
}

int cmd_solve(const Out& out, const GameParams& p) {
    LoadedFragment a = load_fragment(p.frag_a), b = load_fragment(p.frag_b);
    const std::size_t budget = p.budget ? p.budget : object_budget();
    const SolveReport r = solve_game(a.g, b.g, p.m, p.depth, budget);
    std::string text = r.spoiler_wins ? "spoiler wins within " + std::to_string(p.depth) + " rounds"
                                      : "no spoiler win within depth " + std::to_string(p.depth);
    json rec{{"type", "solve"}, {"spoiler_wins", r.spoiler_wins}, {"nodes", r.nodes}, {"depth", p.depth}, {"m", p.m}};
    if (r.first_move) {
        const GameStructure& home = r.first_move->side == Side::A ? a.g : b.g;
        const std::string mv = std::string(r.first_move->side == Side::A ? "A" : "B") + " pebble " +
                               std::to_string(r.first_move->pebble) + " on " +
                               home.universe->to_literal(r.first_move->spoiler);
        rec["first_move"] = mv;
        text += " (first move: " + mv + ")";
    }
    out.emit(rec, text);
    return r.spoiler_wins ? 1 : 0;
}

int cmd_play(const GameParams& p) {
    LoadedFragment a = load_fragment(p.frag_a), b = load_fragment(p.frag_b);
    play(std::cin, std::cout, a.g, b.g, a.f.k, p.m);
    return 0;
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

std::string where(SourcePos p) {
    return (current_file.empty() ? std::string("<input>") : current_file) + ":" + std::to_string(p.line) + ":" +
           std::to_string(p.col);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cps: state machines over hereditarily finite sets, fixed points, symmetry and pebble games"};
    app.require_subcommand(1);
    Out out;
    bool no_meta = false;
    app.add_flag("--json-lines", out.json_lines, "line-delimited JSON records");
    app.add_flag("--no-meta", no_meta, "omit the version and timestamp header");
    app.set_version_flag("--version", kVersion);
    // Global flags are accepted after the subcommand too.
    app.fallthrough();

    Inputs inputs;
    std::string level = "outcome", trace_out;
    auto* run_cmd = app.add_subcommand("run", "run a machine on an input");
    add_input_options(run_cmd, inputs);
    run_cmd->add_option("--trace-level", level, "outcome, counts or full")
        ->check(CLI::IsMember({"outcome", "counts", "full"}));
    run_cmd->add_option("--trace-out", trace_out, "write the per-step trace here");

    auto* pfp_cmd = app.add_subcommand("pfp", "fixed-point formulas of a machine");
    pfp_cmd->require_subcommand(1);
    pfp_cmd->fallthrough();
    std::string machine;
    auto* extract = pfp_cmd->add_subcommand("extract", "print the formula system");
    extract->add_option("machine", machine, "machine file")->required();
    auto* eval_cmd = pfp_cmd->add_subcommand("eval", "evaluate the system on the active structure of a run");
    add_input_options(eval_cmd, inputs);
    auto* lock = pfp_cmd->add_subcommand("lockstep", "compare fixed-point stages with run states");
    add_input_options(lock, inputs);

    auto* sym = app.add_subcommand("symmetry", "supports, fragments and forms");
    sym->require_subcommand(1);
    sym->fallthrough();
    std::uint32_t k = 1;
    auto* support = sym->add_subcommand("support", "minimal supports of the active objects of a run");
    add_input_options(support, inputs);
    support->add_option("--k", k, "support bound")->check(CLI::Range(0, 8));
    FragParams fp;
    std::string frag_out;
    auto* frag = sym->add_subcommand("fragment", "build and export a k-symmetric fragment");
    add_frag_options(frag, fp);
    frag->add_option("--out", frag_out, "output file (default stdout)");
    bool list = false;
    auto* forms = sym->add_subcommand("forms", "form round-trip audit on a fragment");
    add_frag_options(forms, fp);
    forms->add_flag("--list", list, "print every decomposition");
    std::uint32_t r = 1, n1 = 4, n2 = 5;
    std::size_t max_forms = 400;
    auto* ineq = sym->add_subcommand("ineq", "In/Eq tables at two atom counts");
    ineq->add_option("--k", k, "support bound")->check(CLI::Range(0, 8));
    ineq->add_option("--r", r, "rank of the fragment the forms come from")->check(CLI::Range(0, 6));
    ineq->add_option("--n1", n1, "smaller atom count");
    ineq->add_option("--n2", n2, "larger atom count");
    ineq->add_option("--max-forms", max_forms, "use at most this many forms");

    auto* peb = app.add_subcommand("pebble", "pebble games between two fragments");
    peb->require_subcommand(1);
    peb->fallthrough();
    GameParams gp;
    auto* verify = peb->add_subcommand("verify", "check the form strategy against every spoiler sequence");
    add_game_options(verify, gp, true);
    auto* solve = peb->add_subcommand("solve", "decide the bounded game by backward induction");
    add_game_options(solve, gp, true);
    auto* play_cmd = peb->add_subcommand("play", "play spoiler against the form strategy");
    add_game_options(play_cmd, gp, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 16;
    }

    try {
        if (!no_meta && !play_cmd->parsed())
            out.emit({{"type", "meta"}, {"version", kVersion}, {"time", timestamp()}},
                     std::string("# cps ") + kVersion + " " + timestamp());
        if (run_cmd->parsed()) return cmd_run(out, inputs, level, trace_out);
        if (extract->parsed()) return cmd_pfp_extract(out, machine);
        if (eval_cmd->parsed()) return cmd_pfp_eval(out, inputs);
        if (lock->parsed()) return cmd_pfp_lockstep(out, inputs);
        if (support->parsed()) return cmd_support(out, inputs, k);
        if (frag->parsed()) return cmd_fragment(out, fp, frag_out);
        if (forms->parsed()) return cmd_forms(out, fp, list);
        if (ineq->parsed()) return cmd_ineq(out, k, r, n1, n2, max_forms);
        if (verify->parsed()) return cmd_verify(out, gp);
        if (solve->parsed()) return cmd_solve(out, gp);
        if (play_cmd->parsed()) return cmd_play(gp);
    } catch (const ParseError& e) {
        std::cerr << (current_file.empty() ? std::string("<input>") : current_file) << ":" << e.what() << "\n";
        return 10;
    } catch (const ValidationError& e) {
        for (const Diagnostic& d : e.diagnostics())
            std::cerr << where(d.pos) << ": error: " << d.message << "\n";
        return 11;
    } catch (const DynamicError& e) {
        std::cerr << "dynamic error at step " << e.step() << ": " << e.what() << "\n";
        return 12;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 13;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 14;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 15;
    }
    return 15;
}
