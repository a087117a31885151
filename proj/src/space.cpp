#include "cps/space.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace cps {

Polynomial::Polynomial(std::vector<std::uint64_t> coeffs) : coeffs_(std::move(coeffs)) {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    if (coeffs_.size() > kMaxDegree + 1)
        throw Error("space polynomial degree exceeds " + std::to_string(kMaxDegree));
}

std::uint64_t Polynomial::operator()(std::uint64_t n) const {
    std::uint64_t acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        std::uint64_t next;
        if (__builtin_mul_overflow(acc, n, &next) || __builtin_add_overflow(next, *it, &next))
            throw Error("space polynomial overflows at n = " + std::to_string(n));
        acc = next;
    }
    return acc;
}

std::string Polynomial::str() const {
    if (coeffs_.empty()) return "0";
    std::string s;
    for (std::size_t i = coeffs_.size(); i-- > 0;) {
        if (coeffs_[i] == 0) continue;
        if (!s.empty()) s += " + ";
        if (i == 0 || coeffs_[i] != 1) s += std::to_string(coeffs_[i]);
        if (i >= 1) s += "n";
        if (i >= 2) s += "^" + std::to_string(i);
    }
    return s;
}

PSpaceMachine parse_machine(std::string_view text) {
    std::string body(text);
    std::optional<Polynomial> bound;
    std::size_t start = 0;
    int lineno = 0;
    while (start <= body.size()) {
        ++lineno;
        std::size_t end = body.find('\n', start);
        if (end == std::string::npos) end = body.size();
        std::string_view line(body.data() + start, end - start);
        const auto first = line.find_first_not_of(" \t");
        if (first != std::string_view::npos && line.substr(first).starts_with("space:")) {
            if (bound) throw ParseError({lineno, static_cast<int>(first) + 1}, "duplicate 'space:' line");
            std::string rest(line.substr(first + 6));
            if (auto hash = rest.find('#'); hash != std::string::npos) rest.erase(hash);
            std::istringstream ss(rest);
            std::vector<std::uint64_t> cs;
            std::string w;
            while (ss >> w) {
                if (!std::all_of(w.begin(), w.end(), ::isdigit) || w.size() > 18)
                    throw ParseError({lineno, static_cast<int>(first) + 1}, "bad space coefficient '" + w + "'");
                cs.push_back(std::stoull(w));
            }
            if (cs.empty()) throw ParseError({lineno, static_cast<int>(first) + 1}, "empty 'space:' line");
            bound = Polynomial(std::move(cs));
            // Blank the line so that positions reported by the program parser stay correct.
            std::fill(body.begin() + static_cast<std::ptrdiff_t>(start), body.begin() + static_cast<std::ptrdiff_t>(end),
                      ' ');
        }
        start = end + 1;
    }
    if (!bound) throw ParseError({1, 1}, "machine file has no 'space:' line");
    return PSpaceMachine{parse_program(body), *bound};
}

std::vector<ObjId> critical_objects(Universe& u, const State& s) {
    std::vector<ObjId> out{EMPTY, ONE};
    for (AtomId a = 0; a < u.atom_count(); ++a) out.push_back(u.atom(a));
    for (std::size_t i = 0; i < s.symbol_count(); ++i) {
        for (const auto& [args, v] : s.table(static_cast<int>(i))) {
            out.push_back(v);
            out.insert(out.end(), args.begin(), args.end());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<ObjId> active_objects(Universe& u, const State& s) {
    std::vector<ObjId> acc;
    for (ObjId c : critical_objects(u, s)) {
        const auto& t = u.tc(c);
        acc.insert(acc.end(), t.begin(), t.end());
    }
    std::sort(acc.begin(), acc.end());
    acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
    return acc;
}

std::string_view outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Accept:
            return "accept";
        case Outcome::Reject:
            return "reject";
        case Outcome::SpaceExceeded:
            return "space-exceeded";
        case Outcome::Diverges:
            return "diverges";
        case Outcome::StepCap:
            return "step-cap";
    }
    return "?";
}

RunTrace run(Universe& u, const PSpaceMachine& m, const InputStructure& in, const RunOptions& opt) {
    check_input(*m.program.signature, in);
    if (in.atom_count != u.atom_count()) throw Error("universe and input disagree on the number of atoms");
    const std::uint64_t limit = m.bound(u.atom_count());

    RunTrace t;
    std::unordered_map<State, std::size_t, StateHash> seen;
    State s = initial_state(m.program.signature);
    for (;;) {
        const std::size_t i = t.states.size();
        if (auto it = seen.find(s); it != seen.end()) {
            t.outcome = Outcome::Diverges;
            t.cycle_start = it->second;
            t.cycle_length = i - it->second;
            return t;
        }
        const std::size_t count = active_objects(u, s).size();
        t.states.push_back(s);
        t.active_counts.push_back(count);
        if (count > limit) {
            t.outcome = Outcome::SpaceExceeded;
            t.exceeded_at = i;
            t.has_witness = true;
            return t;
        }
        seen.emplace(s, i);
        if (s.halted()) {
            t.outcome = s.output() ? Outcome::Accept : Outcome::Reject;
            return t;
        }
        if (i >= opt.max_steps) {
            t.outcome = Outcome::StepCap;
            return t;
        }
        try {
            auto [next, delta] = step(u, m.program, in, s);
            t.updates.push_back(std::move(delta));
            s = std::move(next);
        } catch (DynamicError& e) {
            e.set_step(i);
            throw;
        }
    }
}

bool Structure::in_domain(ObjId x) const { return std::binary_search(domain.begin(), domain.end(), x); }

Structure active_structure(std::shared_ptr<Universe> u, const RunTrace& t, const InputStructure& in) {
    std::vector<ObjId> acc;
    for (std::size_t i = 0; i < t.run_length(); ++i) {
        auto a = active_objects(*u, t.states[i]);
        acc.insert(acc.end(), a.begin(), a.end());
    }
    if (t.run_length() == 0) {
        acc.push_back(EMPTY);
        acc.push_back(ONE);
        for (AtomId a = 0; a < u->atom_count(); ++a) acc.push_back(u->atom(a));
    }
    std::sort(acc.begin(), acc.end());
    acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
    return Structure{std::move(u), in, std::move(acc)};
}

}  // namespace cps
