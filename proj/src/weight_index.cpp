#include "prefchoice/weight_index.hpp"

#include <bit>
#include <string>

namespace prefchoice {

namespace {

constexpr std::size_t LowBit(std::size_t i) { return i & (~i + 1); }

}  // namespace

WeightIndex::WeightIndex(std::size_t num_types, double beta)
    : beta_(beta), types_(num_types) {
  for (auto& tt : types_) tt.tree.push_back(0);
}

void WeightIndex::InsertVertex(VertexId v, TypeId t, std::int64_t degree) {
  if (Contains(v)) {
    throw Error(ErrorCode::kDuplicateVertex,
                "vertex " + std::to_string(v) + " already indexed");
  }
  if (t >= types_.size()) {
    throw Error(ErrorCode::kInvalidConfig, "type id out of range");
  }
  if (!(static_cast<double>(degree) + beta_ > 0.0)) {
    throw Error(ErrorCode::kNonpositiveWeight,
                "vertex weight must be positive");
  }
  if (v >= slot_of_.size()) {
    slot_of_.resize(static_cast<std::size_t>(v) + 1, kAbsent);
    type_of_.resize(static_cast<std::size_t>(v) + 1, 0);
  }
  TypeTree& tt = types_[t];
  std::size_t s = tt.members.size() + 1;
  std::int64_t node = degree;
  for (std::size_t j = s - 1; j > s - LowBit(s); j -= LowBit(j)) {
    node += tt.tree[j];
  }
  tt.tree.push_back(node);
  tt.members.push_back(v);
  tt.degree_sum += degree;
  slot_of_[v] = static_cast<std::uint32_t>(s - 1);
  type_of_[v] = t;
  all_vertices_.push_back(v);
}

void WeightIndex::AddWeight(VertexId v, std::int64_t delta) {
  if (!Contains(v)) {
    throw Error(ErrorCode::kUnknownVertex,
                "vertex " + std::to_string(v) + " is not indexed");
  }
  TypeTree& tt = types_[type_of_[v]];
  std::size_t s = static_cast<std::size_t>(slot_of_[v]) + 1;
  if (delta < 0 &&
      !(static_cast<double>(SlotDegree(tt, s) + delta) + beta_ > 0.0)) {
    throw Error(ErrorCode::kNonpositiveWeight,
                "vertex weight must stay positive");
  }
  for (std::size_t i = s; i < tt.tree.size(); i += LowBit(i)) {
    tt.tree[i] += delta;
  }
  tt.degree_sum += delta;
}

TypeId WeightIndex::TypeOf(VertexId v) const {
  if (!Contains(v)) {
    throw Error(ErrorCode::kUnknownVertex,
                "vertex " + std::to_string(v) + " is not indexed");
  }
  return type_of_[v];
}

std::int64_t WeightIndex::Degree(VertexId v) const {
  if (!Contains(v)) {
    throw Error(ErrorCode::kUnknownVertex,
                "vertex " + std::to_string(v) + " is not indexed");
  }
  return SlotDegree(types_[type_of_[v]],
                    static_cast<std::size_t>(slot_of_[v]) + 1);
}

double WeightIndex::global_total() const {
  double total = 0.0;
  for (std::size_t t = 0; t < types_.size(); ++t) {
    total += type_total(static_cast<TypeId>(t));
  }
  return total;
}

std::int64_t WeightIndex::RecomputedDegreeSum(TypeId t) const {
  std::int64_t sum = 0;
  for (VertexId v : types_[t].members) sum += Degree(v);
  return sum;
}

std::int64_t WeightIndex::PrefixDegrees(const TypeTree& tt,
                                        std::size_t slots) const {
  std::int64_t sum = 0;
  for (std::size_t i = slots; i > 0; i -= LowBit(i)) sum += tt.tree[i];
  return sum;
}

std::int64_t WeightIndex::SlotDegree(const TypeTree& tt,
                                     std::size_t slot) const {
  std::int64_t value = tt.tree[slot];
  std::size_t stop = slot - LowBit(slot);
  for (std::size_t j = slot - 1; j > stop; j -= LowBit(j)) value -= tt.tree[j];
  return value;
}

double WeightIndex::PoolWeight(TypeId t, std::optional<VertexId> excluded) const {
  const TypeTree& tt = types_[t];
  std::int64_t degs = tt.degree_sum;
  auto count = static_cast<std::int64_t>(tt.members.size());
  if (excluded && Contains(*excluded) && type_of_[*excluded] == t) {
    degs -= Degree(*excluded);
    count -= 1;
  }
  return static_cast<double>(degs) + beta_ * static_cast<double>(count);
}

std::size_t WeightIndex::Descend(const TypeTree& tt, double u,
                                 std::size_t excluded_slot,
                                 std::int64_t excluded_degree) const {
  std::size_t size = tt.members.size();
  std::size_t pos = 0;
  for (std::size_t step = std::bit_floor(size); step > 0; step >>= 1) {
    std::size_t next = pos + step;
    if (next > size) continue;
    std::int64_t degs = tt.tree[next];
    auto count = static_cast<std::int64_t>(step);
    if (excluded_slot > pos && excluded_slot <= next) {
      degs -= excluded_degree;
      count -= 1;
    }
    double w = static_cast<double>(degs) + beta_ * static_cast<double>(count);
    if (u >= w) {
      u -= w;
      pos = next;
    }
  }
  // Rounding can push u past the last slot or onto the excluded one.
  if (pos >= size) pos = size - 1;
  if (pos + 1 == excluded_slot) pos = pos > 0 ? pos - 1 : pos + 1;
  return pos;
}

std::optional<TypeId> WeightIndex::PickType(double u,
                                            std::optional<VertexId> excluded,
                                            double* remainder) const {
  std::optional<TypeId> last;
  for (std::size_t t = 0; t < types_.size(); ++t) {
    auto type = static_cast<TypeId>(t);
    std::int64_t count = type_count(type);
    if (excluded && Contains(*excluded) && type_of_[*excluded] == type) {
      count -= 1;
    }
    if (count == 0) continue;
    double w = PoolWeight(type, excluded);
    last = type;
    if (u < w) {
      *remainder = u;
      return type;
    }
    u -= w;
  }
  if (last) *remainder = PoolWeight(*last, excluded) * (1.0 - 0x1.0p-52);
  return last;
}

VertexId WeightIndex::SampleTypeExcluding(TypeId t,
                                          std::optional<VertexId> excluded,
                                          Rng& rng) const {
  if (t >= types_.size()) {
    throw Error(ErrorCode::kInvalidConfig, "type id out of range");
  }
  const TypeTree& tt = types_[t];
  std::size_t excluded_slot = 0;
  std::int64_t excluded_degree = 0;
  if (excluded && Contains(*excluded) && type_of_[*excluded] == t) {
    excluded_slot = static_cast<std::size_t>(slot_of_[*excluded]) + 1;
    excluded_degree = SlotDegree(tt, excluded_slot);
  }
  std::size_t candidates = tt.members.size() - (excluded_slot ? 1 : 0);
  if (candidates == 0) {
    throw Error(ErrorCode::kNoCandidate,
                "no vertex of type " + std::to_string(t) + " to sample");
  }
  double total = static_cast<double>(tt.degree_sum - excluded_degree) +
                 beta_ * static_cast<double>(candidates);
  double u = Uniform01(rng) * total;
  return tt.members[Descend(tt, u, excluded_slot, excluded_degree)];
}

VertexId WeightIndex::SampleGlobal(Rng& rng) const {
  if (all_vertices_.empty()) {
    throw Error(ErrorCode::kEmptyIndex, "cannot sample from an empty index");
  }
  double u = Uniform01(rng) * global_total();
  double rem = 0.0;
  TypeId t = *PickType(u, std::nullopt, &rem);
  const TypeTree& tt = types_[t];
  return tt.members[Descend(tt, rem, 0, 0)];
}

VertexId WeightIndex::SampleGlobalExcluding(VertexId excluded, Rng& rng) const {
  double total = 0.0;
  for (std::size_t t = 0; t < types_.size(); ++t) {
    total += PoolWeight(static_cast<TypeId>(t), excluded);
  }
  std::size_t candidates = all_vertices_.size() - (Contains(excluded) ? 1 : 0);
  if (candidates == 0) {
    throw Error(ErrorCode::kNoCandidate, "no vertex left after exclusion");
  }
  double u = Uniform01(rng) * total;
  double rem = 0.0;
  TypeId t = *PickType(u, excluded, &rem);
  const TypeTree& tt = types_[t];
  std::size_t excluded_slot = 0;
  std::int64_t excluded_degree = 0;
  if (Contains(excluded) && type_of_[excluded] == t) {
    excluded_slot = static_cast<std::size_t>(slot_of_[excluded]) + 1;
    excluded_degree = SlotDegree(tt, excluded_slot);
  }
  return tt.members[Descend(tt, rem, excluded_slot, excluded_degree)];
}

VertexId WeightIndex::SampleUniform(Rng& rng) const {
  if (all_vertices_.empty()) {
    throw Error(ErrorCode::kEmptyIndex, "cannot sample from an empty index");
  }
  return all_vertices_[UniformBelow(rng, all_vertices_.size())];
}

double WeightIndex::BranchProbabilityInType(
    VertexId v, std::optional<VertexId> excluded) const {
  if (!Contains(v)) {
    throw Error(ErrorCode::kUnknownVertex,
                "vertex " + std::to_string(v) + " is not indexed");
  }
  if (excluded && *excluded == v) return 0.0;
  TypeId t = type_of_[v];
  const TypeTree& tt = types_[t];
  std::size_t excluded_slot = 0;
  std::int64_t excluded_degree = 0;
  if (excluded && Contains(*excluded) && type_of_[*excluded] == t) {
    excluded_slot = static_cast<std::size_t>(slot_of_[*excluded]) + 1;
    excluded_degree = SlotDegree(tt, excluded_slot);
  }
  std::size_t target = static_cast<std::size_t>(slot_of_[v]) + 1;
  std::size_t size = tt.members.size();
  double range = PoolWeight(t, excluded);
  double p = 1.0;
  std::size_t pos = 0;
  for (std::size_t step = std::bit_floor(size); step > 0; step >>= 1) {
    std::size_t next = pos + step;
    if (next > size) continue;
    std::int64_t degs = tt.tree[next];
    auto count = static_cast<std::int64_t>(step);
    if (excluded_slot > pos && excluded_slot <= next) {
      degs -= excluded_degree;
      count -= 1;
    }
    double left = static_cast<double>(degs) + beta_ * static_cast<double>(count);
    if (target <= next) {
      p *= left / range;
      range = left;
    } else {
      p *= (range - left) / range;
      range -= left;
      pos = next;
    }
  }
  return p;
}

double WeightIndex::BranchProbabilityGlobal(
    VertexId v, std::optional<VertexId> excluded) const {
  if (excluded && *excluded == v) return 0.0;
  double total = 0.0;
  for (std::size_t t = 0; t < types_.size(); ++t) {
    total += PoolWeight(static_cast<TypeId>(t), excluded);
  }
  TypeId t = TypeOf(v);
  return PoolWeight(t, excluded) / total * BranchProbabilityInType(v, excluded);
}

}  // namespace prefchoice
