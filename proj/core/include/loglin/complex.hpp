#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace loglin {

inline constexpr int kMaxFactors = 32;

/// A subset of the factor indices {1..K}, stored as a bitmask.
/// Members are always reported sorted ascending, 1-based.
class FactorSet {
 public:
  FactorSet() = default;
  FactorSet(std::initializer_list<int> members);

  static FactorSet from_members(const std::vector<int>& members);
  static FactorSet from_bits(std::uint32_t bits);

  bool contains(int k) const { return k >= 1 && k <= kMaxFactors && (bits_ >> (k - 1)) & 1u; }
  int size() const;
  bool empty() const { return bits_ == 0; }
  bool subset_of(const FactorSet& other) const { return (bits_ & ~other.bits_) == 0; }
  bool proper_subset_of(const FactorSet& other) const {
    return subset_of(other) && bits_ != other.bits_;
  }
  int max_member() const;

  std::vector<int> members() const;
  std::uint32_t bits() const { return bits_; }

  /// Canonical serialization, e.g. "1,2". Empty set serializes as "".
  std::string key() const;

  friend bool operator==(const FactorSet& a, const FactorSet& b) { return a.bits_ == b.bits_; }
  friend bool operator!=(const FactorSet& a, const FactorSet& b) { return a.bits_ != b.bits_; }

 private:
  std::uint32_t bits_ = 0;
};

/// Canonical subset order: cardinality ascending, then lexicographic on the
/// sorted member lists. Total and deterministic.
bool canonical_less(const FactorSet& a, const FactorSet& b);

/// A hierarchical log-linear model given by its facets (inclusion-maximal
/// interaction sets). Facets form an antichain, are nonempty, and live in
/// {1..K}. The empty facet list is the uniform model.
class SimplicialComplex {
 public:
  SimplicialComplex() : K_(1) {}
  SimplicialComplex(int K, std::vector<FactorSet> facets);

  int K() const { return K_; }
  const std::vector<FactorSet>& facets() const { return facets_; }

  friend bool operator==(const SimplicialComplex& a, const SimplicialComplex& b) {
    return a.K_ == b.K_ && a.facets_ == b.facets_;
  }

 private:
  int K_;
  std::vector<FactorSet> facets_;
};

/// An ordered list of nonempty subsets of {1..K} in canonical order. For a
/// hierarchical model this is the downward-closed class of interactions, but
/// downward closure is not enforced: the selection step can produce gaps.
class InteractionClass {
 public:
  InteractionClass() : K_(1) {}
  InteractionClass(int K, std::vector<FactorSet> sets);

  int K() const { return K_; }
  const std::vector<FactorSet>& sets() const { return sets_; }
  std::size_t size() const { return sets_.size(); }
  bool contains(const FactorSet& h) const;
  bool is_downward_closed() const;

  friend bool operator==(const InteractionClass& a, const InteractionClass& b) {
    return a.K_ == b.K_ && a.sets_ == b.sets_;
  }

 private:
  int K_;
  std::vector<FactorSet> sets_;
};

/// All nonempty h with h subseteq d for some facet d, canonically ordered.
InteractionClass downward_closure(const SimplicialComplex& delta);

/// Inclusion-maximal members of the class, as a complex. The input need not
/// be downward closed.
SimplicialComplex maximal_elements(const InteractionClass& cls);

/// All nonempty subsets of {1..K} not in the class.
InteractionClass complement_class(const InteractionClass& cls, int K);

/// Unordered pairs (i,j) covered by some facet.
std::vector<std::pair<int, int>> interaction_graph(const SimplicialComplex& delta);

/// The class of all nonempty subsets of {1..K}.
InteractionClass saturated_class(int K);

}  // namespace loglin
