#pragma once

// Interned hereditarily finite sets over a fixed finite set of atoms.

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cps {

using AtomId = std::uint32_t;

/// Handle into a Universe. Handle equality is structural equality.
struct ObjId {
    std::uint32_t id = 0;
    friend constexpr bool operator==(ObjId, ObjId) = default;
    friend constexpr auto operator<=>(ObjId, ObjId) = default;
};

inline constexpr ObjId EMPTY{0};
inline constexpr ObjId ONE{1};

using Tuple = std::vector<ObjId>;

/// A bijection on [0, n) given by its image sequence.
class Perm {
public:
    explicit Perm(std::vector<AtomId> image);
    static Perm identity(std::uint32_t n);
    static Perm transposition(std::uint32_t n, AtomId a, AtomId b);

    std::uint32_t size() const { return static_cast<std::uint32_t>(image_.size()); }
    AtomId operator()(AtomId a) const { return image_[a]; }
    const std::vector<AtomId>& image() const { return image_; }
    bool is_identity() const;
    Perm inverse() const;

    /// (p * q)(a) = p(q(a))
    friend Perm operator*(const Perm& p, const Perm& q);
    friend bool operator==(const Perm&, const Perm&) = default;

private:
    std::vector<AtomId> image_;
};

/// Every permutation of [0, n) in lexicographic order of image sequences.
std::vector<Perm> all_perms(std::uint32_t n);

/// Objects over atoms a0..a(n-1). Handles are never invalidated; EMPTY is {} and ONE is {{}}.
/// Not internally synchronized: use one Universe per thread for construction.
class Universe {
public:
    explicit Universe(std::uint32_t atom_count);

    std::uint32_t atom_count() const { return atom_count_; }
    std::size_t size() const { return nodes_.size(); }

    ObjId atom(AtomId a) const;
    bool is_atom(ObjId x) const { return nodes_[x.id].atom >= 0; }
    bool is_set(ObjId x) const { return !is_atom(x); }
    AtomId atom_index(ObjId x) const;

    ObjId mk_set(std::vector<ObjId> elems);
    ObjId mk_set(std::initializer_list<ObjId> elems) { return mk_set(std::vector<ObjId>(elems)); }
    ObjId pair(ObjId a, ObjId b) { return mk_set({a, b}); }
    ObjId singleton(ObjId a) { return mk_set({a}); }

    /// Elements sorted by handle; empty for atoms.
    std::span<const ObjId> elements(ObjId x) const;
    /// Elements in canonical order (atoms by index, then sets lexicographically).
    const std::vector<ObjId>& canonical_elements(ObjId x) const;
    bool contains(ObjId set, ObjId x) const;
    std::size_t cardinality(ObjId x) const { return nodes_[x.id].count; }

    std::uint32_t rank(ObjId x) const { return nodes_[x.id].rank; }
    /// Least transitive set containing x, sorted by handle.
    const std::vector<ObjId>& tc(ObjId x);

    ObjId apply_perm(const Perm& p, ObjId x);

    int canonical_compare(ObjId a, ObjId b) const;
    bool canonical_less(ObjId a, ObjId b) const { return canonical_compare(a, b) < 0; }
    void sort_canonical(std::vector<ObjId>& xs) const;

    ObjId all_atoms();
    bool is_boolean(ObjId x) const { return x == EMPTY || x == ONE; }

    /// Literal syntax: a0, a1, ...; {x, y}; 0 = {} and 1 = {{}}.
    std::string to_literal(ObjId x) const;
    ObjId parse_literal(std::string_view text);

private:
    struct Node {
        std::int32_t atom = -1;
        std::uint32_t begin = 0;
        std::uint32_t count = 0;
        std::uint32_t rank = 0;
    };

    ObjId intern(std::vector<ObjId>&& sorted_unique);
    ObjId apply_perm_cached(const Perm& p, std::vector<std::uint32_t>& cache, ObjId x);
    void literal_into(ObjId x, std::string& out) const;

    std::uint32_t atom_count_;
    std::vector<Node> nodes_;
    std::vector<ObjId> elems_;
    std::unordered_multimap<std::uint64_t, std::uint32_t> index_;
    std::unordered_map<std::uint32_t, std::vector<ObjId>> tc_memo_;
    std::map<std::vector<AtomId>, std::vector<std::uint32_t>> perm_memo_;
    mutable std::unordered_map<std::uint32_t, std::vector<ObjId>> canon_memo_;
    ObjId all_atoms_{EMPTY};
    bool all_atoms_ready_ = false;
};

struct ObjIdHash {
    std::size_t operator()(ObjId x) const noexcept { return std::hash<std::uint32_t>{}(x.id); }
};

struct TupleHash {
    std::size_t operator()(const Tuple& t) const noexcept;
};

}  // namespace cps
