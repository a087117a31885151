#pragma once

// Supports under atom permutations, molecules and configurations, k-forms, rank-bounded
// k-symmetric fragments and the In/Eq relations on forms.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cps/hf.hpp"
#include "cps/space.hpp"

namespace cps {

/// Sorted atom indices.
using AtomSet = std::vector<AtomId>;

/// Support computations over one universe. Memoizes, per object, the transpositions that
/// move it.
class SupportOracle {
public:
    explicit SupportOracle(Universe& u);

    Universe& universe() { return u_; }
    std::uint32_t atom_count() const { return n_; }

    /// Every transposition of two atoms outside x fixes y.
    bool is_support(const AtomSet& x, ObjId y);
    /// Enumerates the whole pointwise stabilizer of x. Exponential; for cross-checks.
    bool is_support_full(const AtomSet& x, ObjId y);
    /// The smallest support in size-then-lexicographic order among sizes < n/2, checked
    /// against the first support of every larger size below n/2. Throws NoSmallSupport.
    const AtomSet& min_support(ObjId y);
    /// Like min_support, but falls back to the first support of size <= k when none of size
    /// < n/2 exists. nullopt when y has no support of size <= k at all.
    std::optional<AtomSet> small_support(ObjId y, std::uint32_t k);
    /// Pairs (a, b), a < b, whose transposition moves y.
    const std::vector<std::pair<AtomId, AtomId>>& moving_pairs(ObjId y);

private:
    Universe& u_;
    std::uint32_t n_;
    std::vector<Perm> transpositions_;
    std::vector<std::pair<AtomId, AtomId>> pairs_;
    std::unordered_map<std::uint32_t, std::vector<std::pair<AtomId, AtomId>>> moving_;
    std::unordered_map<std::uint32_t, AtomSet> min_support_;
};

/// All subsets of [0, n) of the given size, lexicographically.
std::vector<AtomSet> subsets_of_size(std::uint32_t n, std::uint32_t size);
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);
/// Smallest n >= 1 with C(n, k+1) > n^k.
std::uint32_t smallest_binomial_n(std::uint32_t k);

struct SupportReport {
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    bool binomial_condition = false;
    std::size_t objects_checked = 0;
    std::size_t max_support = 0;
    /// Objects whose minimal support is larger than k.
    std::vector<ObjId> violations;
    /// Objects without a support of size < n/2.
    std::vector<ObjId> no_small_support;
};

/// Minimal supports of every active object of the run proper.
SupportReport check_support_theorem(SupportOracle& s, const RunTrace& t, std::uint32_t k);

/// Intersection lemma on y: for all supports X1, X2 (any size) with X1 u X2 != A, X1 n X2
/// supports y. Returns a failing pair if there is one. Exponential in n.
std::optional<std::pair<AtomSet, AtomSet>> intersection_lemma_counterexample(SupportOracle& s, ObjId y);

using Molecule = std::vector<AtomId>;

/// Equivalence relation on rows x positions, stored as class labels numbered in order of first
/// occurrence (row-major), which makes equal relations have equal labels.
struct Configuration {
    std::uint32_t rows = 0;
    std::uint32_t k = 0;
    std::vector<std::uint32_t> labels;

    std::uint32_t label(std::uint32_t row, std::uint32_t pos) const { return labels[row * k + pos]; }
    std::uint32_t class_count() const;
    /// Within each row all positions are in different classes.
    bool is_abstract() const;
    friend auto operator<=>(const Configuration&, const Configuration&) = default;
    friend bool operator==(const Configuration&, const Configuration&) = default;
};

Configuration conf(const std::vector<Molecule>& molecules);
/// Canonical labels for an arbitrary labelling.
Configuration canonical_configuration(std::uint32_t rows, std::uint32_t k, const std::vector<std::uint32_t>& labels);
/// Class c gets atom c. Throws NotEnoughAtoms when there are more classes than atoms.
std::vector<Molecule> realize_config(const Configuration& e, std::uint32_t n);
/// Every abstract configuration with the given shape.
std::vector<Configuration> all_configurations(std::uint32_t rows, std::uint32_t k);
/// "[[0.0,1.0],[0.1],[1.1]]"
std::string print_configuration(const Configuration& e);
Configuration parse_configuration(std::string_view text, std::uint32_t rows, std::uint32_t k);

using FormId = std::uint32_t;
using ConfId = std::uint32_t;

struct Form {
    bool leaf = false;
    std::uint32_t pos = 0;
    /// Sorted and duplicate-free; configurations are 2 x k with row 0 the child molecule and row 1
    /// the parent molecule.
    std::vector<std::pair<FormId, ConfId>> pairs;
    std::uint32_t rank = 0;
};

/// Interned k-forms and 2-configurations.
class FormStore {
public:
    explicit FormStore(std::uint32_t k);

    std::uint32_t k() const { return k_; }
    FormId leaf(std::uint32_t p);
    FormId node(std::vector<std::pair<FormId, ConfId>> pairs);
    ConfId intern(const Configuration& e);

    const Form& form(FormId f) const { return forms_[f]; }
    const Configuration& configuration(ConfId c) const { return confs_[c]; }
    std::size_t size() const { return forms_.size(); }
    /// The abstract 2 x k configurations, interned.
    const std::vector<ConfId>& two_configurations();

    /// "c0" for leaves; "{(c0, [[0.0,1.0],[0.1],[1.1]]), ...}" for nodes.
    std::string print(FormId f) const;
    FormId parse(std::string_view text);

private:
    std::uint32_t k_;
    std::vector<Form> forms_;
    std::map<std::vector<std::pair<FormId, ConfId>>, FormId> node_index_;
    std::vector<FormId> leaves_;
    std::vector<Configuration> confs_;
    std::map<std::vector<std::uint32_t>, ConfId> conf_index_;
    std::vector<ConfId> two_confs_;
    bool two_confs_ready_ = false;
};

/// Every k-form of rank <= r; throws BudgetExceeded when there would be more than budget.
std::vector<FormId> enumerate_forms(FormStore& store, std::uint32_t r, std::size_t budget);

/// phi * sigma, memoized. Molecules are over the universe's atoms.
class FormEvaluator {
public:
    FormEvaluator(Universe& u, FormStore& store) : u_(u), store_(store) {}

    ObjId apply(FormId f, const Molecule& sigma);
    /// All molecules tau over n atoms with conf(tau, sigma) = e.
    std::vector<Molecule> matching_molecules(const Configuration& e, const Molecule& sigma) const;

private:
    Universe& u_;
    FormStore& store_;
    std::map<std::pair<FormId, Molecule>, ObjId> memo_;
};

/// Representations x = phi * sigma for k-symmetric x.
class FormBuilder {
public:
    FormBuilder(SupportOracle& s, FormStore& store) : s_(s), store_(store) {}

    /// Throws NotKSymmetric with a witness from TC(x), or NotEnoughAtoms when n < k.
    std::pair<FormId, Molecule> form_of(ObjId x);

private:
    SupportOracle& s_;
    FormStore& store_;
    std::unordered_map<std::uint32_t, std::pair<FormId, Molecule>> memo_;
};

struct Fragment {
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    std::uint32_t r = 0;
    /// Sorted by (rank, canonical order).
    std::vector<ObjId> objects;
};

/// All k-symmetric objects of rank <= r over the universe's atoms, as unions of orbits of
/// pointwise stabilizers of at most k atoms. Throws BudgetExceeded when the candidate count
/// is larger than budget.
Fragment build_fragment(SupportOracle& s, std::uint32_t k, std::uint32_t r, std::size_t budget);

/// Text export: header, one literal per line, then membership edges "i j" (object i is in j).
std::string export_fragment(const Universe& u, const Fragment& f);
Fragment import_fragment(Universe& u, std::string_view text);

struct InEqTables {
    using Pairs = std::vector<std::pair<std::uint32_t, std::uint32_t>>;
    std::vector<FormId> forms;
    std::vector<ConfId> confs;
    /// Per configuration, the sorted (psi, phi) index pairs that are related.
    std::vector<Pairs> in, eq;

    bool in_rel(std::size_t c, std::uint32_t psi, std::uint32_t phi) const;
    bool eq_rel(std::size_t c, std::uint32_t psi, std::uint32_t phi) const;
};

/// In(psi, phi, E) iff psi*tau in phi*sigma for a realization (tau, sigma) of E; Eq alike.
InEqTables in_eq_tables(Universe& u, FormStore& store, const std::vector<FormId>& forms);
/// Computes the tables over n1 and n2 atoms; throws InputDependence with the first difference.
InEqTables in_eq_relations(FormStore& store, const std::vector<FormId>& forms, std::uint32_t n1, std::uint32_t n2);

}  // namespace cps
