#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "prefchoice/params.hpp"
#include "prefchoice/rng.hpp"

namespace prefchoice {

// Dynamic weighted sampler over vertices with weight degree + beta.
//
// Each type owns a Fenwick tree over a dense slot array holding integer
// degrees. Because every slot is occupied, the number of vertices under any
// tree node is implied by its range, so a node's weight is
// degree_sum + beta * count evaluated exactly from integers; nothing drifts
// no matter how many updates are applied. Global draws pick a type by its
// total weight, then descend that type's tree.
//
// Excluding a vertex subtracts its degree and one from the count of every
// node whose range covers it during the descent; the stored trees are never
// modified, so a draw leaves the index bit-for-bit unchanged.
class WeightIndex {
 public:
  WeightIndex(std::size_t num_types, double beta);

  // Throws kDuplicateVertex or kNonpositiveWeight (degree + beta <= 0).
  void InsertVertex(VertexId v, TypeId t, std::int64_t degree);
  // Adds `delta` to the degree of v. Throws kUnknownVertex, or
  // kNonpositiveWeight if the result would not be positive.
  void AddWeight(VertexId v, std::int64_t delta);

  // Draw proportional to degree + beta over all vertices. kEmptyIndex if
  // there are none.
  VertexId SampleGlobal(Rng& rng) const;
  // Same, but over all vertices except `excluded`. kNoCandidate if that
  // leaves nothing.
  VertexId SampleGlobalExcluding(VertexId excluded, Rng& rng) const;
  // Draw proportional to degree + beta among vertices of type t other than
  // `excluded`. kNoCandidate if the pool is empty.
  VertexId SampleTypeExcluding(TypeId t, std::optional<VertexId> excluded,
                               Rng& rng) const;
  // Uniform over all vertices. kEmptyIndex if there are none.
  VertexId SampleUniform(Rng& rng) const;

  // Probability that SampleTypeExcluding returns v, evaluated as the product
  // of the branch probabilities along the tree descent.
  double BranchProbabilityInType(VertexId v,
                                 std::optional<VertexId> excluded) const;
  // Probability that SampleGlobal / SampleGlobalExcluding returns v.
  double BranchProbabilityGlobal(VertexId v,
                                 std::optional<VertexId> excluded) const;

  bool Contains(VertexId v) const {
    return v < slot_of_.size() && slot_of_[v] != kAbsent;
  }
  TypeId TypeOf(VertexId v) const;
  std::int64_t Degree(VertexId v) const;
  double Weight(VertexId v) const {
    return static_cast<double>(Degree(v)) + beta_;
  }

  std::size_t num_types() const { return types_.size(); }
  std::size_t size() const { return all_vertices_.size(); }
  std::int64_t type_count(TypeId t) const {
    return static_cast<std::int64_t>(types_[t].members.size());
  }
  std::int64_t type_degree_sum(TypeId t) const { return types_[t].degree_sum; }
  double type_total(TypeId t) const {
    return static_cast<double>(types_[t].degree_sum) +
           beta_ * static_cast<double>(types_[t].members.size());
  }
  double global_total() const;

  // Fresh sums straight from the per-vertex degrees.
  std::int64_t RecomputedDegreeSum(TypeId t) const;

 private:
  static constexpr std::uint32_t kAbsent =
      std::numeric_limits<std::uint32_t>::max();

  struct TypeTree {
    std::vector<std::int64_t> tree;  // 1-based Fenwick array, tree[0] unused
    std::vector<VertexId> members;   // slot (0-based) -> vertex
    std::int64_t degree_sum = 0;
  };

  std::int64_t PrefixDegrees(const TypeTree& tt, std::size_t slots) const;
  std::int64_t SlotDegree(const TypeTree& tt, std::size_t slot) const;
  // Slot (0-based) selected by target u in [0, pool weight).
  std::size_t Descend(const TypeTree& tt, double u, std::size_t excluded_slot,
                      std::int64_t excluded_degree) const;
  std::optional<TypeId> PickType(double u, std::optional<VertexId> excluded,
                                 double* remainder) const;
  double PoolWeight(TypeId t, std::optional<VertexId> excluded) const;

  double beta_;
  std::vector<TypeTree> types_;
  std::vector<std::uint32_t> slot_of_;  // vertex -> slot in its type
  std::vector<TypeId> type_of_;
  std::vector<VertexId> all_vertices_;
};

}  // namespace prefchoice
