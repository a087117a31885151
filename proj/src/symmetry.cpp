#include "cps/symmetry.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>

#include "cps/errors.hpp"

namespace cps {

// ---------------------------------------------------------------- supports

SupportOracle::SupportOracle(Universe& u) : u_(u), n_(u.atom_count()) {
    for (AtomId a = 0; a < n_; ++a) {
        for (AtomId b = a + 1; b < n_; ++b) {
            pairs_.emplace_back(a, b);
            transpositions_.push_back(Perm::transposition(n_, a, b));
        }
    }
}

const std::vector<std::pair<AtomId, AtomId>>& SupportOracle::moving_pairs(ObjId y) {
    if (auto it = moving_.find(y.id); it != moving_.end()) return it->second;
    std::vector<std::pair<AtomId, AtomId>> out;
    for (std::size_t i = 0; i < pairs_.size(); ++i)
        if (u_.apply_perm(transpositions_[i], y) != y) out.push_back(pairs_[i]);
    return moving_.emplace(y.id, std::move(out)).first->second;
}

bool SupportOracle::is_support(const AtomSet& x, ObjId y) {
    for (auto [a, b] : moving_pairs(y))
        if (!std::binary_search(x.begin(), x.end(), a) && !std::binary_search(x.begin(), x.end(), b)) return false;
    return true;
}

bool SupportOracle::is_support_full(const AtomSet& x, ObjId y) {
    std::vector<AtomId> rest;
    for (AtomId a = 0; a < n_; ++a)
        if (!std::binary_search(x.begin(), x.end(), a)) rest.push_back(a);
    std::vector<AtomId> img = rest;
    do {
        std::vector<AtomId> image(n_);
        std::iota(image.begin(), image.end(), 0u);
        for (std::size_t i = 0; i < rest.size(); ++i) image[rest[i]] = img[i];
        if (u_.apply_perm(Perm(std::move(image)), y) != y) return false;
    } while (std::next_permutation(img.begin(), img.end()));
    return true;
}

std::vector<AtomSet> subsets_of_size(std::uint32_t n, std::uint32_t size) {
    std::vector<AtomSet> out;
    if (size > n) return out;
    AtomSet cur(size);
    std::iota(cur.begin(), cur.end(), 0u);
    for (;;) {
        out.push_back(cur);
        int i = static_cast<int>(size) - 1;
        while (i >= 0 && cur[i] == n - size + static_cast<std::uint32_t>(i)) --i;
        if (i < 0) break;
        ++cur[i];
        for (std::size_t j = static_cast<std::size_t>(i) + 1; j < size; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

const AtomSet& SupportOracle::min_support(ObjId y) {
    if (auto it = min_support_.find(y.id); it != min_support_.end()) return it->second;
    std::optional<AtomSet> best;
    for (std::uint32_t s = 0; 2 * s < n_; ++s) {
        for (const AtomSet& x : subsets_of_size(n_, s)) {
            if (!is_support(x, y)) continue;
            if (!best) {
                best = x;
            } else if (!std::includes(x.begin(), x.end(), best->begin(), best->end())) {
                throw Error("support intersection check failed for " + u_.to_literal(y));
            }
            break;
        }
    }
    if (!best) throw NoSmallSupport("no support of size < n/2 for " + u_.to_literal(y));
    return min_support_.emplace(y.id, std::move(*best)).first->second;
}

std::optional<AtomSet> SupportOracle::small_support(ObjId y, std::uint32_t k) {
    try {
        const AtomSet& m = min_support(y);
        if (m.size() <= k) return m;
        return std::nullopt;
    } catch (const NoSmallSupport&) {
    }
    for (std::uint32_t s = 0; s <= k && s <= n_; ++s)
        for (const AtomSet& x : subsets_of_size(n_, s))
            if (is_support(x, y)) return x;
    return std::nullopt;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > UINT64_MAX) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(r);
}

std::uint32_t smallest_binomial_n(std::uint32_t k) {
    for (std::uint32_t n = 1; n < 1'000'000; ++n) {
        unsigned __int128 p = 1;
        for (std::uint32_t i = 0; i < k && p <= UINT64_MAX; ++i) p *= n;
        if (p > UINT64_MAX) break;
        if (binomial(n, k + 1) > static_cast<std::uint64_t>(p)) return n;
    }
    throw Error("no n found for the binomial condition");
}

SupportReport check_support_theorem(SupportOracle& s, const RunTrace& t, std::uint32_t k) {
    SupportReport rep;
    rep.n = s.atom_count();
    rep.k = k;
    unsigned __int128 p = 1;
    for (std::uint32_t i = 0; i < k; ++i) p *= rep.n;
    rep.binomial_condition = binomial(rep.n, k + 1) > p;
    std::set<ObjId> objs;
    for (std::size_t i = 0; i < t.run_length(); ++i)
        for (ObjId y : active_objects(s.universe(), t.states[i])) objs.insert(y);
    for (ObjId y : objs) {
        ++rep.objects_checked;
        try {
            const auto& m = s.min_support(y);
            rep.max_support = std::max(rep.max_support, m.size());
            if (m.size() > k) rep.violations.push_back(y);
        } catch (const NoSmallSupport&) {
            rep.no_small_support.push_back(y);
        }
    }
    return rep;
}

std::optional<std::pair<AtomSet, AtomSet>> intersection_lemma_counterexample(SupportOracle& s, ObjId y) {
    const std::uint32_t n = s.atom_count();
    if (n > 16) throw Error("intersection lemma check: too many atoms");
    auto to_set = [n](std::uint32_t mask) {
        AtomSet x;
        for (AtomId a = 0; a < n; ++a)
            if (mask >> a & 1u) x.push_back(a);
        return x;
    };
    std::vector<std::uint32_t> supports;
    for (std::uint32_t m = 0; m < (1u << n); ++m)
        if (s.is_support(to_set(m), y)) supports.push_back(m);
    const std::uint32_t full = (1u << n) - 1;
    for (std::uint32_t a : supports)
        for (std::uint32_t b : supports)
            if ((a | b) != full && !s.is_support(to_set(a & b), y)) return std::make_pair(to_set(a), to_set(b));
    return std::nullopt;
}

// ---------------------------------------------------------------- configurations

std::uint32_t Configuration::class_count() const {
    std::uint32_t m = 0;
    for (auto l : labels) m = std::max(m, l + 1);
    return m;
}

bool Configuration::is_abstract() const {
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t p = 0; p < k; ++p)
            for (std::uint32_t q = p + 1; q < k; ++q)
                if (label(i, p) == label(i, q)) return false;
    return true;
}

Configuration canonical_configuration(std::uint32_t rows, std::uint32_t k, const std::vector<std::uint32_t>& labels) {
    if (labels.size() != static_cast<std::size_t>(rows) * k) throw Error("configuration: wrong number of labels");
    std::map<std::uint32_t, std::uint32_t> renum;
    Configuration e{rows, k, {}};
    for (auto l : labels) {
        auto it = renum.try_emplace(l, static_cast<std::uint32_t>(renum.size())).first;
        e.labels.push_back(it->second);
    }
    return e;
}

Configuration conf(const std::vector<Molecule>& molecules) {
    const std::uint32_t k = molecules.empty() ? 0 : static_cast<std::uint32_t>(molecules[0].size());
    std::vector<std::uint32_t> labels;
    for (const auto& m : molecules) {
        if (m.size() != k) throw Error("conf: molecules of different lengths");
        labels.insert(labels.end(), m.begin(), m.end());
    }
    return canonical_configuration(static_cast<std::uint32_t>(molecules.size()), k, labels);
}

std::vector<Molecule> realize_config(const Configuration& e, std::uint32_t n) {
    if (!e.is_abstract()) throw Error("realize_config: not an abstract configuration");
    if (e.class_count() > n)
        throw NotEnoughAtoms("configuration has " + std::to_string(e.class_count()) + " classes but only " +
                             std::to_string(n) + " atoms");
    std::vector<Molecule> out(e.rows, Molecule(e.k));
    for (std::uint32_t i = 0; i < e.rows; ++i)
        for (std::uint32_t p = 0; p < e.k; ++p) out[i][p] = e.label(i, p);
    return out;
}

std::vector<Configuration> all_configurations(std::uint32_t rows, std::uint32_t k) {
    std::vector<Configuration> out;
    std::vector<std::uint32_t> labels(static_cast<std::size_t>(rows) * k);
    auto rec = [&](auto&& self, std::size_t idx, std::uint32_t next) -> void {
        if (idx == labels.size()) {
            out.push_back(Configuration{rows, k, labels});
            return;
        }
        const std::size_t row_start = idx / k * k;
        for (std::uint32_t l = 0; l <= next; ++l) {
            bool clash = false;
            for (std::size_t j = row_start; j < idx && !clash; ++j) clash = labels[j] == l;
            if (clash) continue;
            labels[idx] = l;
            self(self, idx + 1, l == next ? next + 1 : next);
        }
    };
    rec(rec, 0, 0);
    return out;
}

std::string print_configuration(const Configuration& e) {
    std::vector<std::vector<std::string>> classes(e.class_count());
    for (std::uint32_t i = 0; i < e.rows; ++i)
        for (std::uint32_t p = 0; p < e.k; ++p)
            classes[e.label(i, p)].push_back(std::to_string(i) + "." + std::to_string(p));
    std::string s = "[";
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (c) s += ",";
        s += "[";
        for (std::size_t j = 0; j < classes[c].size(); ++j) s += (j ? "," : "") + classes[c][j];
        s += "]";
    }
    return s + "]";
}

Configuration parse_configuration(std::string_view text, std::uint32_t rows, std::uint32_t k) {
    std::vector<std::uint32_t> labels(static_cast<std::size_t>(rows) * k, UINT32_MAX);
    std::uint32_t cls = 0;
    std::size_t i = 0;
    auto fail = [&](const std::string& m) -> void { throw ParseError({1, static_cast<int>(i) + 1}, "configuration: " + m); };
    auto ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto number = [&]() -> std::uint32_t {
        ws();
        std::size_t j = i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j == i) fail("expected a number");
        const auto v = static_cast<std::uint32_t>(std::stoul(std::string(text.substr(i, j - i))));
        i = j;
        return v;
    };
    auto expect = [&](char c) {
        ws();
        if (i >= text.size() || text[i] != c) fail(std::string("expected '") + c + "'");
        ++i;
    };
    expect('[');
    ws();
    if (i < text.size() && text[i] == ']') {
        ++i;
    } else {
        for (;;) {
            expect('[');
            for (;;) {
                const auto row = number();
                expect('.');
                const auto pos = number();
                if (row >= rows || pos >= k) fail("position out of range");
                if (labels[row * k + pos] != UINT32_MAX) fail("position listed twice");
                labels[row * k + pos] = cls;
                ws();
                if (i < text.size() && text[i] == ',') {
                    ++i;
                    continue;
                }
                break;
            }
            expect(']');
            ++cls;
            ws();
            if (i < text.size() && text[i] == ',') {
                ++i;
                continue;
            }
            break;
        }
        expect(']');
    }
    for (auto& l : labels)
        if (l == UINT32_MAX) l = cls++;
    Configuration e = canonical_configuration(rows, k, labels);
    if (!e.is_abstract()) fail("two positions of one row are identified");
    return e;
}

// ---------------------------------------------------------------- forms

FormStore::FormStore(std::uint32_t k) : k_(k) {
    for (std::uint32_t p = 0; p < k; ++p) {
        Form f;
        f.leaf = true;
        f.pos = p;
        leaves_.push_back(static_cast<FormId>(forms_.size()));
        forms_.push_back(f);
    }
}

FormId FormStore::leaf(std::uint32_t p) {
    if (p >= k_) throw Error("leaf c" + std::to_string(p) + " out of range for k = " + std::to_string(k_));
    return leaves_[p];
}

FormId FormStore::node(std::vector<std::pair<FormId, ConfId>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    if (auto it = node_index_.find(pairs); it != node_index_.end()) return it->second;
    Form f;
    f.pairs = pairs;
    for (auto [child, c] : pairs) {
        if (child >= forms_.size() || c >= confs_.size()) throw Error("form: invalid child");
        f.rank = std::max(f.rank, forms_[child].rank + 1);
    }
    const auto id = static_cast<FormId>(forms_.size());
    forms_.push_back(std::move(f));
    node_index_.emplace(std::move(pairs), id);
    return id;
}

ConfId FormStore::intern(const Configuration& e) {
    if (e.rows != 2 || e.k != k_) throw Error("form configurations must be 2 x k");
    if (auto it = conf_index_.find(e.labels); it != conf_index_.end()) return it->second;
    const auto id = static_cast<ConfId>(confs_.size());
    confs_.push_back(e);
    conf_index_.emplace(e.labels, id);
    return id;
}

const std::vector<ConfId>& FormStore::two_configurations() {
    if (!two_confs_ready_) {
        for (const auto& e : all_configurations(2, k_)) two_confs_.push_back(intern(e));
        two_confs_ready_ = true;
    }
    return two_confs_;
}

std::string FormStore::print(FormId f) const {
    const Form& x = forms_[f];
    if (x.leaf) return "c" + std::to_string(x.pos);
    std::string s = "{";
    for (std::size_t i = 0; i < x.pairs.size(); ++i) {
        if (i) s += ", ";
        s += "(" + print(x.pairs[i].first) + ", " + print_configuration(confs_[x.pairs[i].second]) + ")";
    }
    return s + "}";
}

FormId FormStore::parse(std::string_view text) {
    std::size_t i = 0;
    auto ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto fail = [&](const std::string& m) -> FormId { throw ParseError({1, static_cast<int>(i) + 1}, "form: " + m); };
    auto rec = [&](auto&& self) -> FormId {
        ws();
        if (i < text.size() && text[i] == 'c') {
            ++i;
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j == i) return fail("expected leaf index");
            const auto p = static_cast<std::uint32_t>(std::stoul(std::string(text.substr(i, j - i))));
            i = j;
            if (p >= k_) return fail("leaf index out of range");
            return leaf(p);
        }
        if (i >= text.size() || text[i] != '{') return fail("expected 'c' or '{'");
        ++i;
        std::vector<std::pair<FormId, ConfId>> pairs;
        ws();
        if (i < text.size() && text[i] == '}') {
            ++i;
            return node({});
        }
        for (;;) {
            ws();
            if (i >= text.size() || text[i] != '(') return fail("expected '('");
            ++i;
            const FormId child = self(self);
            ws();
            if (i >= text.size() || text[i] != ',') return fail("expected ','");
            ++i;
            // The configuration runs to the matching ']' of its outer bracket.
            ws();
            const std::size_t start = i;
            int depth = 0;
            while (i < text.size()) {
                if (text[i] == '[') ++depth;
                if (text[i] == ']' && --depth == 0) {
                    ++i;
                    break;
                }
                ++i;
            }
            if (depth != 0) return fail("unterminated configuration");
            const ConfId c = intern(parse_configuration(text.substr(start, i - start), 2, k_));
            pairs.emplace_back(child, c);
            ws();
            if (i >= text.size() || text[i] != ')') return fail("expected ')'");
            ++i;
            ws();
            if (i < text.size() && text[i] == ',') {
                ++i;
                continue;
            }
            if (i < text.size() && text[i] == '}') {
                ++i;
                break;
            }
            return fail("expected ',' or '}'");
        }
        return node(std::move(pairs));
    };
    const FormId f = rec(rec);
    ws();
    if (i != text.size()) fail("trailing input");
    return f;
}

std::vector<FormId> enumerate_forms(FormStore& store, std::uint32_t r, std::size_t budget) {
    std::vector<FormId> forms;
    for (std::uint32_t p = 0; p < store.k(); ++p) forms.push_back(store.leaf(p));
    forms.push_back(store.node({}));
    const auto& confs = store.two_configurations();
    for (std::uint32_t level = 1; level <= r; ++level) {
        std::vector<std::pair<FormId, ConfId>> pool;
        for (FormId f : forms)
            for (ConfId c : confs) pool.emplace_back(f, c);
        if (pool.size() >= 63 || (std::size_t{1} << pool.size()) > budget)
            throw BudgetExceeded("forms of rank <= " + std::to_string(level) + ": 2^" + std::to_string(pool.size()) +
                                 " candidates exceed the budget");
        std::set<FormId> next(forms.begin(), forms.end());
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << pool.size()); ++mask) {
            std::vector<std::pair<FormId, ConfId>> pairs;
            for (std::size_t b = 0; b < pool.size(); ++b)
                if (mask >> b & 1u) pairs.push_back(pool[b]);
            next.insert(store.node(std::move(pairs)));
        }
        forms.assign(next.begin(), next.end());
    }
    return forms;
}

std::vector<Molecule> FormEvaluator::matching_molecules(const Configuration& e, const Molecule& sigma) const {
    const std::uint32_t k = e.k;
    const std::uint32_t n = u_.atom_count();
    Molecule tau(k);
    std::vector<std::uint32_t> fresh_pos;
    for (std::uint32_t p = 0; p < k; ++p) {
        bool tied = false;
        for (std::uint32_t q = 0; q < k; ++q) {
            if (e.label(0, p) == e.label(1, q)) {
                tau[p] = sigma[q];
                tied = true;
            }
        }
        if (!tied) fresh_pos.push_back(p);
    }
    std::vector<AtomId> free_atoms;
    for (AtomId a = 0; a < n; ++a)
        if (std::find(sigma.begin(), sigma.end(), a) == sigma.end()) free_atoms.push_back(a);
    std::vector<Molecule> out;
    std::vector<bool> used(free_atoms.size(), false);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == fresh_pos.size()) {
            out.push_back(tau);
            return;
        }
        for (std::size_t j = 0; j < free_atoms.size(); ++j) {
            if (used[j]) continue;
            used[j] = true;
            tau[fresh_pos[i]] = free_atoms[j];
            self(self, i + 1);
            used[j] = false;
        }
    };
    rec(rec, 0);
    return out;
}

ObjId FormEvaluator::apply(FormId f, const Molecule& sigma) {
    auto key = std::make_pair(f, sigma);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const Form& form = store_.form(f);
    ObjId out;
    if (form.leaf) {
        out = u_.atom(sigma.at(form.pos));
    } else {
        std::vector<ObjId> acc;
        const auto pairs = form.pairs;
        for (auto [child, c] : pairs) {
            const Configuration e = store_.configuration(c);
            for (const Molecule& tau : matching_molecules(e, sigma)) acc.push_back(apply(child, tau));
        }
        out = u_.mk_set(std::move(acc));
    }
    memo_.emplace(std::move(key), out);
    return out;
}

std::pair<FormId, Molecule> FormBuilder::form_of(ObjId x) {
    if (auto it = memo_.find(x.id); it != memo_.end()) return it->second;
    Universe& u = s_.universe();
    const std::uint32_t k = store_.k();
    const std::uint32_t n = u.atom_count();
    if (n < k) throw NotEnoughAtoms("form_of: fewer atoms than k");
    // An atom is pinned by its own position even when, at tiny n, a smaller support exists.
    auto supp = u.is_atom(x) && k > 0 ? std::optional<AtomSet>(AtomSet{u.atom_index(x)}) : s_.small_support(x, k);
    if (!supp || (u.is_atom(x) && k == 0))
        throw NotKSymmetric(u.to_literal(x) + " has no support of size <= " + std::to_string(k), x.id);
    Molecule sigma = *supp;
    for (AtomId a = 0; a < n && sigma.size() < k; ++a)
        if (!std::binary_search(supp->begin(), supp->end(), a)) sigma.push_back(a);
    std::pair<FormId, Molecule> out;
    if (u.is_atom(x)) {
        const AtomId a = u.atom_index(x);
        const auto p = static_cast<std::uint32_t>(std::find(sigma.begin(), sigma.end(), a) - sigma.begin());
        out = {store_.leaf(p), sigma};
    } else {
        std::vector<std::pair<FormId, ConfId>> pairs;
        const auto es = u.elements(x);
        const std::vector<ObjId> elems(es.begin(), es.end());
        for (ObjId z : elems) {
            auto [psi, tau] = form_of(z);
            pairs.emplace_back(psi, store_.intern(conf({tau, sigma})));
        }
        out = {store_.node(std::move(pairs)), sigma};
    }
    memo_.emplace(x.id, out);
    return out;
}

// ---------------------------------------------------------------- fragments

Fragment build_fragment(SupportOracle& s, std::uint32_t k, std::uint32_t r, std::size_t budget) {
    Universe& u = s.universe();
    const std::uint32_t n = u.atom_count();
    std::vector<ObjId> acc{EMPTY};
    for (AtomId a = 0; a < n; ++a) acc.push_back(u.atom(a));
    std::sort(acc.begin(), acc.end());

    std::vector<AtomSet> centers;
    for (std::uint32_t size = 0; size <= std::min(k, n); ++size)
        for (auto& x : subsets_of_size(n, size)) centers.push_back(std::move(x));

    for (std::uint32_t level = 1; level <= r; ++level) {
        // Orbits of acc under the pointwise stabilizer of each center, via union-find over
        // transpositions of atoms outside the center.
        std::vector<std::vector<std::vector<ObjId>>> orbit_lists;
        std::size_t candidates = 0;
        for (const AtomSet& x : centers) {
            std::vector<std::uint32_t> parent(acc.size());
            std::iota(parent.begin(), parent.end(), 0u);
            auto find = [&](std::uint32_t i) {
                while (parent[i] != i) i = parent[i] = parent[parent[i]];
                return i;
            };
            for (AtomId a = 0; a < n; ++a) {
                if (std::binary_search(x.begin(), x.end(), a)) continue;
                for (AtomId b = a + 1; b < n; ++b) {
                    if (std::binary_search(x.begin(), x.end(), b)) continue;
                    const Perm t = Perm::transposition(n, a, b);
                    for (std::size_t i = 0; i < acc.size(); ++i) {
                        const ObjId img = u.apply_perm(t, acc[i]);
                        auto it = std::lower_bound(acc.begin(), acc.end(), img);
                        if (it == acc.end() || *it != img) throw Error("build_fragment: level is not orbit-closed");
                        parent[find(static_cast<std::uint32_t>(i))] =
                            find(static_cast<std::uint32_t>(it - acc.begin()));
                    }
                }
            }
            std::map<std::uint32_t, std::vector<ObjId>> groups;
            for (std::size_t i = 0; i < acc.size(); ++i) groups[find(static_cast<std::uint32_t>(i))].push_back(acc[i]);
            std::vector<std::vector<ObjId>> orbits;
            for (auto& [root, g] : groups) orbits.push_back(std::move(g));
            if (orbits.size() >= 63 || candidates + (std::size_t{1} << orbits.size()) > budget)
                throw BudgetExceeded("fragment n=" + std::to_string(n) + " k=" + std::to_string(k) +
                                     " r=" + std::to_string(r) + ": level " + std::to_string(level) + " needs 2^" +
                                     std::to_string(orbits.size()) + " candidates for one center (budget " +
                                     std::to_string(budget) + ")");
            candidates += std::size_t{1} << orbits.size();
            orbit_lists.push_back(std::move(orbits));
        }
        std::set<ObjId> next(acc.begin(), acc.end());
        for (const auto& orbits : orbit_lists) {
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << orbits.size()); ++mask) {
                std::vector<ObjId> elems;
                for (std::size_t b = 0; b < orbits.size(); ++b)
                    if (mask >> b & 1u) elems.insert(elems.end(), orbits[b].begin(), orbits[b].end());
                next.insert(u.mk_set(std::move(elems)));
            }
        }
        acc.assign(next.begin(), next.end());
    }
    Fragment f{n, k, r, acc};
    std::sort(f.objects.begin(), f.objects.end(), [&u](ObjId a, ObjId b) {
        if (u.rank(a) != u.rank(b)) return u.rank(a) < u.rank(b);
        return u.canonical_less(a, b);
    });
    return f;
}

std::string export_fragment(const Universe& u, const Fragment& f) {
    std::ostringstream s;
    s << "fragment " << f.n << " " << f.k << " " << f.r << "\n";
    s << "objects " << f.objects.size() << "\n";
    std::map<ObjId, std::size_t> index;
    for (std::size_t i = 0; i < f.objects.size(); ++i) {
        index[f.objects[i]] = i;
        s << u.to_literal(f.objects[i]) << "\n";
    }
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t j = 0; j < f.objects.size(); ++j)
        for (ObjId e : u.elements(f.objects[j])) edges.emplace_back(index.at(e), j);
    std::sort(edges.begin(), edges.end());
    s << "edges " << edges.size() << "\n";
    for (auto [i, j] : edges) s << i << " " << j << "\n";
    return s.str();
}

Fragment import_fragment(Universe& u, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string word;
    Fragment f;
    if (!(in >> word) || word != "fragment" || !(in >> f.n >> f.k >> f.r))
        throw ParseError({1, 1}, "expected 'fragment n k r'");
    if (f.n != u.atom_count()) throw Error("fragment atom count differs from the universe");
    std::size_t count = 0;
    if (!(in >> word) || word != "objects" || !(in >> count)) throw ParseError({2, 1}, "expected 'objects N'");
    std::string line;
    std::getline(in, line);
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) throw ParseError({static_cast<int>(i) + 3, 1}, "missing object line");
        f.objects.push_back(u.parse_literal(line));
    }
    std::size_t edges = 0;
    if (!(in >> word) || word != "edges" || !(in >> edges)) throw ParseError({static_cast<int>(count) + 3, 1}, "expected 'edges E'");
    for (std::size_t e = 0; e < edges; ++e) {
        std::size_t i = 0, j = 0;
        if (!(in >> i >> j) || i >= count || j >= count) throw ParseError({static_cast<int>(count + e) + 4, 1}, "bad edge");
        if (!u.contains(f.objects[j], f.objects[i])) throw Error("fragment edge contradicts the object literals");
    }
    return f;
}

bool InEqTables::in_rel(std::size_t c, std::uint32_t psi, std::uint32_t phi) const {
    return std::binary_search(in[c].begin(), in[c].end(), std::pair{psi, phi});
}

bool InEqTables::eq_rel(std::size_t c, std::uint32_t psi, std::uint32_t phi) const {
    return std::binary_search(eq[c].begin(), eq[c].end(), std::pair{psi, phi});
}

InEqTables in_eq_tables(Universe& u, FormStore& store, const std::vector<FormId>& forms) {
    InEqTables t;
    t.forms = forms;
    t.confs = store.two_configurations();
    FormEvaluator ev(u, store);
    for (ConfId c : t.confs) {
        const auto mol = realize_config(store.configuration(c), u.atom_count());
        // Indices of the forms by their value at tau, to read In and Eq off element lists.
        std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> by_tau;
        for (std::uint32_t i = 0; i < forms.size(); ++i) by_tau[ev.apply(forms[i], mol[0]).id].push_back(i);
        InEqTables::Pairs in, eq;
        for (std::uint32_t j = 0; j < forms.size(); ++j) {
            const ObjId x = ev.apply(forms[j], mol[1]);
            if (auto it = by_tau.find(x.id); it != by_tau.end())
                for (std::uint32_t i : it->second) eq.emplace_back(i, j);
            if (!u.is_set(x)) continue;
            for (ObjId e : u.elements(x))
                if (auto it = by_tau.find(e.id); it != by_tau.end())
                    for (std::uint32_t i : it->second) in.emplace_back(i, j);
        }
        std::sort(in.begin(), in.end());
        std::sort(eq.begin(), eq.end());
        t.in.push_back(std::move(in));
        t.eq.push_back(std::move(eq));
    }
    return t;
}

InEqTables in_eq_relations(FormStore& store, const std::vector<FormId>& forms, std::uint32_t n1, std::uint32_t n2) {
    Universe u1(n1), u2(n2);
    InEqTables a = in_eq_tables(u1, store, forms);
    InEqTables b = in_eq_tables(u2, store, forms);
    for (std::size_t c = 0; c < a.confs.size(); ++c) {
        for (const char* which : {"In", "Eq"}) {
            const bool is_in = which[0] == 'I';
            const auto& x = is_in ? a.in[c] : a.eq[c];
            const auto& y = is_in ? b.in[c] : b.eq[c];
            if (x == y) continue;
            InEqTables::Pairs diff;
            std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(diff));
            const auto [i, j] = diff.front();
            throw InputDependence(std::string(which) + "(" + store.print(forms[i]) + ", " + store.print(forms[j]) +
                                  ", " + print_configuration(store.configuration(a.confs[c])) + ") differs between " +
                                  std::to_string(n1) + " and " + std::to_string(n2) + " atoms");
        }
    }
    return a;
}

}  // namespace cps
