#include "cps/hf.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "cps/errors.hpp"

namespace cps {

namespace {

constexpr std::uint32_t kUnset = 0xffffffffu;

std::uint64_t hash_span(std::span<const ObjId> xs) {
    std::uint64_t h = 1469598103934665603ull;
    for (ObjId x : xs) {
        h ^= x.id + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

std::size_t TupleHash::operator()(const Tuple& t) const noexcept {
    return static_cast<std::size_t>(hash_span(t));
}

// ---------------------------------------------------------------- Perm

Perm::Perm(std::vector<AtomId> image) : image_(std::move(image)) {
    std::vector<bool> seen(image_.size(), false);
    for (AtomId a : image_) {
        if (a >= image_.size() || seen[a]) throw Error("Perm: image is not a permutation");
        seen[a] = true;
    }
}

Perm Perm::identity(std::uint32_t n) {
    std::vector<AtomId> img(n);
    std::iota(img.begin(), img.end(), 0u);
    return Perm(std::move(img));
}

Perm Perm::transposition(std::uint32_t n, AtomId a, AtomId b) {
    std::vector<AtomId> img(n);
    std::iota(img.begin(), img.end(), 0u);
    std::swap(img.at(a), img.at(b));
    return Perm(std::move(img));
}

bool Perm::is_identity() const {
    for (std::size_t i = 0; i < image_.size(); ++i)
        if (image_[i] != i) return false;
    return true;
}

Perm Perm::inverse() const {
    std::vector<AtomId> img(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) img[image_[i]] = static_cast<AtomId>(i);
    return Perm(std::move(img));
}

Perm operator*(const Perm& p, const Perm& q) {
    if (p.size() != q.size()) throw Error("Perm: size mismatch in composition");
    std::vector<AtomId> img(p.size());
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = p(q(static_cast<AtomId>(i)));
    return Perm(std::move(img));
}

std::vector<Perm> all_perms(std::uint32_t n) {
    std::vector<AtomId> img(n);
    std::iota(img.begin(), img.end(), 0u);
    std::vector<Perm> out;
    do {
        out.emplace_back(img);
    } while (std::next_permutation(img.begin(), img.end()));
    return out;
}

// ---------------------------------------------------------------- Universe

Universe::Universe(std::uint32_t atom_count) : atom_count_(atom_count) {
    // EMPTY, ONE, then the atoms; children always precede parents.
    nodes_.push_back(Node{-1, 0, 0, 0});
    index_.emplace(hash_span({}), 0);
    elems_.push_back(EMPTY);
    nodes_.push_back(Node{-1, 0, 1, 1});
    index_.emplace(hash_span(std::span<const ObjId>(elems_.data(), 1)), 1);
    for (std::uint32_t a = 0; a < atom_count; ++a)
        nodes_.push_back(Node{static_cast<std::int32_t>(a), 0, 0, 0});
}

ObjId Universe::atom(AtomId a) const {
    if (a >= atom_count_) throw Error("atom index out of range: a" + std::to_string(a));
    return ObjId{2 + a};
}

AtomId Universe::atom_index(ObjId x) const {
    const auto a = nodes_[x.id].atom;
    if (a < 0) throw Error("atom_index: object is a set");
    return static_cast<AtomId>(a);
}

ObjId Universe::mk_set(std::vector<ObjId> elems) {
    for (ObjId e : elems)
        if (e.id >= nodes_.size()) throw Error("mk_set: invalid handle");
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    return intern(std::move(elems));
}

ObjId Universe::intern(std::vector<ObjId>&& xs) {
    const std::uint64_t h = hash_span(xs);
    auto [lo, hi] = index_.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
        const Node& n = nodes_[it->second];
        if (n.atom >= 0 || n.count != xs.size()) continue;
        if (std::equal(xs.begin(), xs.end(), elems_.begin() + n.begin)) return ObjId{it->second};
    }
    Node n;
    n.begin = static_cast<std::uint32_t>(elems_.size());
    n.count = static_cast<std::uint32_t>(xs.size());
    std::uint32_t r = 0;
    for (ObjId e : xs) r = std::max(r, nodes_[e.id].rank + 1);
    n.rank = r;
    elems_.insert(elems_.end(), xs.begin(), xs.end());
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(n);
    index_.emplace(h, id);
    return ObjId{id};
}

std::span<const ObjId> Universe::elements(ObjId x) const {
    const Node& n = nodes_[x.id];
    if (n.atom >= 0 || n.count == 0) return {};
    return std::span<const ObjId>(elems_.data() + n.begin, n.count);
}

const std::vector<ObjId>& Universe::canonical_elements(ObjId x) const {
    if (auto it = canon_memo_.find(x.id); it != canon_memo_.end()) return it->second;
    auto es = elements(x);
    std::vector<ObjId> out(es.begin(), es.end());
    sort_canonical(out);
    return canon_memo_.emplace(x.id, std::move(out)).first->second;
}

bool Universe::contains(ObjId set, ObjId x) const {
    auto es = elements(set);
    return std::binary_search(es.begin(), es.end(), x);
}

const std::vector<ObjId>& Universe::tc(ObjId x) {
    if (auto it = tc_memo_.find(x.id); it != tc_memo_.end()) return it->second;
    std::vector<ObjId> acc{x};
    const auto es = elements(x);
    const std::vector<ObjId> children(es.begin(), es.end());
    for (ObjId e : children) {
        const auto& sub = tc(e);
        std::vector<ObjId> merged;
        merged.reserve(acc.size() + sub.size());
        std::set_union(acc.begin(), acc.end(), sub.begin(), sub.end(), std::back_inserter(merged));
        acc.swap(merged);
    }
    return tc_memo_.emplace(x.id, std::move(acc)).first->second;
}

ObjId Universe::apply_perm(const Perm& p, ObjId x) {
    if (p.size() != atom_count_) throw Error("apply_perm: permutation size differs from atom count");
    auto& cache = perm_memo_[p.image()];
    return apply_perm_cached(p, cache, x);
}

ObjId Universe::apply_perm_cached(const Perm& p, std::vector<std::uint32_t>& cache, ObjId x) {
    if (cache.size() <= x.id) cache.resize(nodes_.size(), kUnset);
    if (cache[x.id] != kUnset) return ObjId{cache[x.id]};
    ObjId out;
    if (is_atom(x)) {
        out = atom(p(atom_index(x)));
    } else {
        const auto es = elements(x);
        std::vector<ObjId> children(es.begin(), es.end());
        for (ObjId& c : children) c = apply_perm_cached(p, cache, c);
        out = mk_set(std::move(children));
    }
    if (cache.size() <= x.id) cache.resize(nodes_.size(), kUnset);
    cache[x.id] = out.id;
    return out;
}

int Universe::canonical_compare(ObjId a, ObjId b) const {
    if (a == b) return 0;
    const bool aa = is_atom(a), ba = is_atom(b);
    if (aa && ba) return atom_index(a) < atom_index(b) ? -1 : 1;
    if (aa) return -1;
    if (ba) return 1;
    const auto& ca = canonical_elements(a);
    const auto& cb = canonical_elements(b);
    const std::size_t m = std::min(ca.size(), cb.size());
    for (std::size_t i = 0; i < m; ++i) {
        const int c = canonical_compare(ca[i], cb[i]);
        if (c != 0) return c;
    }
    return ca.size() < cb.size() ? -1 : 1;
}

void Universe::sort_canonical(std::vector<ObjId>& xs) const {
    std::sort(xs.begin(), xs.end(), [this](ObjId a, ObjId b) { return canonical_less(a, b); });
}

ObjId Universe::all_atoms() {
    if (!all_atoms_ready_) {
        std::vector<ObjId> xs;
        for (AtomId a = 0; a < atom_count_; ++a) xs.push_back(atom(a));
        all_atoms_ = mk_set(std::move(xs));
        all_atoms_ready_ = true;
    }
    return all_atoms_;
}

std::string Universe::to_literal(ObjId x) const {
    std::string out;
    literal_into(x, out);
    return out;
}

void Universe::literal_into(ObjId x, std::string& out) const {
    if (is_atom(x)) {
        out += 'a';
        out += std::to_string(atom_index(x));
        return;
    }
    if (x == EMPTY) {
        out += '0';
        return;
    }
    if (x == ONE) {
        out += '1';
        return;
    }
    out += '{';
    bool first = true;
    for (ObjId e : canonical_elements(x)) {
        if (!first) out += ", ";
        first = false;
        literal_into(e, out);
    }
    out += '}';
}

ObjId Universe::parse_literal(std::string_view text) {
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto fail = [&](const std::string& what) -> ObjId {
        throw ParseError(SourcePos{1, static_cast<int>(i) + 1}, "object literal: " + what);
    };
    std::function<ObjId()> parse = [&]() -> ObjId {
        skip_ws();
        if (i >= text.size()) return fail("unexpected end");
        const char c = text[i];
        if (c == '0' || c == '1') {
            ++i;
            return c == '0' ? EMPTY : ONE;
        }
        if (c == 'a') {
            ++i;
            const std::size_t start = i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            if (start == i) return fail("expected atom index after 'a'");
            const auto idx = std::strtoul(std::string(text.substr(start, i - start)).c_str(), nullptr, 10);
            if (idx >= atom_count_) return fail("atom a" + std::to_string(idx) + " out of range");
            return atom(static_cast<AtomId>(idx));
        }
        if (c == '{') {
            ++i;
            std::vector<ObjId> xs;
            skip_ws();
            if (i < text.size() && text[i] == '}') {
                ++i;
                return EMPTY;
            }
            for (;;) {
                xs.push_back(parse());
                skip_ws();
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
            return mk_set(std::move(xs));
        }
        return fail(std::string("unexpected character '") + c + "'");
    };
    ObjId x = parse();
    skip_ws();
    if (i != text.size()) fail("trailing input");
    return x;
}

// ---------------------------------------------------------------- errors

std::string format_diagnostic(const Diagnostic& d) {
    return std::to_string(d.pos.line) + ":" + std::to_string(d.pos.col) + ": " + d.message;
}

ParseError::ParseError(SourcePos pos, const std::string& msg)
    : Error(std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + msg), pos_(pos) {}

namespace {
std::string join_diags(const std::vector<Diagnostic>& ds) {
    std::string s;
    for (const auto& d : ds) {
        if (!s.empty()) s += "\n";
        s += format_diagnostic(d);
    }
    return s;
}
}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diags)
    : Error(join_diags(diags)), diags_(std::move(diags)) {}

std::size_t object_budget() {
    if (const char* env = std::getenv("CPS_BUDGET")) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return 2'000'000;
}

}  // namespace cps
