#include "loglin/complex.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace loglin {

namespace {

void check_factor_index(int k) {
  if (k < 1 || k > kMaxFactors) {
    throw std::invalid_argument("factor index " + std::to_string(k) + " out of range [1," +
                                std::to_string(kMaxFactors) + "]");
  }
}

void check_K(int K) {
  if (K < 1 || K > kMaxFactors) {
    throw std::invalid_argument("factor count K=" + std::to_string(K) + " out of range [1," +
                                std::to_string(kMaxFactors) + "]");
  }
}

void check_in_range(const FactorSet& h, int K) {
  if (h.max_member() > K) {
    throw std::invalid_argument("subset " + h.key() + " out of range for K=" + std::to_string(K));
  }
}

}  // namespace

FactorSet::FactorSet(std::initializer_list<int> members) {
  for (int k : members) {
    check_factor_index(k);
    bits_ |= 1u << (k - 1);
  }
}

FactorSet FactorSet::from_members(const std::vector<int>& members) {
  FactorSet s;
  for (int k : members) {
    check_factor_index(k);
    s.bits_ |= 1u << (k - 1);
  }
  return s;
}

FactorSet FactorSet::from_bits(std::uint32_t bits) {
  FactorSet s;
  s.bits_ = bits;
  return s;
}

int FactorSet::size() const { return std::popcount(bits_); }

int FactorSet::max_member() const {
  if (bits_ == 0) return 0;
  return kMaxFactors - std::countl_zero(bits_);
}

std::vector<int> FactorSet::members() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (int k = 1; k <= kMaxFactors; ++k) {
    if (contains(k)) out.push_back(k);
  }
  return out;
}

std::string FactorSet::key() const {
  std::string out;
  for (int k : members()) {
    if (!out.empty()) out += ',';
    out += std::to_string(k);
  }
  return out;
}

bool canonical_less(const FactorSet& a, const FactorSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  // Same cardinality: compare member lists lexicographically, smallest
  // elements first.
  std::uint32_t x = a.bits();
  std::uint32_t y = b.bits();
  while (x != 0 && y != 0) {
    const int ax = std::countr_zero(x);
    const int by = std::countr_zero(y);
    if (ax != by) return ax < by;
    x &= x - 1;
    y &= y - 1;
  }
  return false;
}

SimplicialComplex::SimplicialComplex(int K, std::vector<FactorSet> facets)
    : K_(K), facets_(std::move(facets)) {
  check_K(K_);
  for (const auto& d : facets_) {
    if (d.empty()) throw std::invalid_argument("facets must be nonempty");
    check_in_range(d, K_);
  }
  std::sort(facets_.begin(), facets_.end(), canonical_less);
  for (std::size_t i = 0; i < facets_.size(); ++i) {
    for (std::size_t j = 0; j < facets_.size(); ++j) {
      if (i != j && facets_[i].subset_of(facets_[j])) {
        throw std::invalid_argument("facet " + facets_[i].key() + " is contained in facet " +
                                    facets_[j].key());
      }
    }
  }
}

InteractionClass::InteractionClass(int K, std::vector<FactorSet> sets)
    : K_(K), sets_(std::move(sets)) {
  check_K(K_);
  for (const auto& h : sets_) {
    if (h.empty()) throw std::invalid_argument("interaction class excludes the empty set");
    check_in_range(h, K_);
  }
  std::sort(sets_.begin(), sets_.end(), canonical_less);
  auto last = std::unique(sets_.begin(), sets_.end());
  sets_.erase(last, sets_.end());
}

bool InteractionClass::contains(const FactorSet& h) const {
  return std::find(sets_.begin(), sets_.end(), h) != sets_.end();
}

bool InteractionClass::is_downward_closed() const {
  for (const auto& h : sets_) {
    // proper nonempty subsets of h
    const std::uint32_t full = h.bits();
    for (std::uint32_t sub = (full - 1) & full; sub != 0; sub = (sub - 1) & full) {
      if (!contains(FactorSet::from_bits(sub))) return false;
    }
  }
  return true;
}

InteractionClass downward_closure(const SimplicialComplex& delta) {
  std::vector<FactorSet> sets;
  for (const auto& d : delta.facets()) {
    const std::uint32_t full = d.bits();
    for (std::uint32_t sub = full; sub != 0; sub = (sub - 1) & full) {
      sets.push_back(FactorSet::from_bits(sub));
    }
  }
  return InteractionClass(delta.K(), std::move(sets));
}

SimplicialComplex maximal_elements(const InteractionClass& cls) {
  std::vector<FactorSet> facets;
  for (const auto& h : cls.sets()) {
    bool maximal = true;
    for (const auto& g : cls.sets()) {
      if (h.proper_subset_of(g)) {
        maximal = false;
        break;
      }
    }
    if (maximal) facets.push_back(h);
  }
  return SimplicialComplex(cls.K(), std::move(facets));
}

InteractionClass complement_class(const InteractionClass& cls, int K) {
  check_K(K);
  if (cls.K() != K) {
    throw std::invalid_argument("interaction class built for K=" + std::to_string(cls.K()) +
                                ", expected K=" + std::to_string(K));
  }
  std::vector<FactorSet> sets;
  const std::uint32_t count = (K == 32) ? 0xffffffffu : ((1u << K) - 1u);
  for (std::uint32_t bits = 1; bits <= count && bits != 0; ++bits) {
    FactorSet h = FactorSet::from_bits(bits);
    if (!cls.contains(h)) sets.push_back(h);
  }
  return InteractionClass(K, std::move(sets));
}

std::vector<std::pair<int, int>> interaction_graph(const SimplicialComplex& delta) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i <= delta.K(); ++i) {
    for (int j = i + 1; j <= delta.K(); ++j) {
      for (const auto& d : delta.facets()) {
        if (d.contains(i) && d.contains(j)) {
          edges.emplace_back(i, j);
          break;
        }
      }
    }
  }
  return edges;
}

InteractionClass saturated_class(int K) {
  check_K(K);
  std::vector<FactorSet> sets;
  const std::uint64_t count = (std::uint64_t{1} << K) - 1;
  sets.reserve(count);
  for (std::uint64_t bits = 1; bits <= count; ++bits) {
    sets.push_back(FactorSet::from_bits(static_cast<std::uint32_t>(bits)));
  }
  return InteractionClass(K, std::move(sets));
}

}  // namespace loglin
