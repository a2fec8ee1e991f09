#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

namespace halflab {

inline constexpr std::uint64_t kDefaultScanBudget = 10'000'000;

enum class BlockParity { Even, Odd };

// Partition of the naturals into consecutive intervals [b_k, b_{k+1})
// with b_0 = 0 < b_1 < b_2 < ... Closed-form generators (factorial,
// doubling) stop at the 64-bit overflow guard; table generators end with
// their last listed boundary. Queries past the last boundary raise
// budget_exhausted.
class IntervalPartition {
 public:
  enum class Kind { Factorial, Doubling, Table };

  // 0, 1!, 2!, 3!, ...
  static IntervalPartition factorial();
  // 0, 1, 2, 4, 8, ...
  static IntervalPartition doubling();
  // Explicit boundaries; must start at 0 and be strictly increasing.
  static IntervalPartition table(std::vector<std::uint64_t> boundaries);

  Kind kind() const { return kind_; }
  const std::vector<std::uint64_t>& boundaries() const { return boundaries_; }

  // b_k; throws budget_exhausted when the generator ends before k.
  std::uint64_t boundary(std::size_t k) const;

  // Index k with b_k <= n < b_{k+1}; throws budget_exhausted when the
  // generator cannot bracket n.
  std::size_t interval_index(std::uint64_t n) const;

 private:
  IntervalPartition(Kind kind, std::vector<std::uint64_t> boundaries);

  Kind kind_;
  std::vector<std::uint64_t> boundaries_;
};

struct SetNode;

// Immutable schema describing a subset of the naturals. Values share
// structure; copying is cheap.
class Set {
 public:
  enum class SizeClass { Finite, Infinite, Unknown };

  // Defaults to the empty set.
  Set() : Set(finite({})) {}

  // Elements are sorted and deduplicated on construction.
  static Set finite(std::vector<std::uint64_t> elements);
  // Bits of a fixed prefix followed by a repeating non-empty period.
  static Set periodic(std::vector<bool> prefix, std::vector<bool> period);
  static Set complement(Set inner);
  static Set union_of(Set left, Set right);
  static Set intersection_of(Set left, Set right);
  // bit(n) = low bit of the n-th SplitMix64 stream output for `seed`.
  static Set seeded(std::uint64_t seed);
  // Alternate blocks of a partition: Even keeps I_0, I_2, ...
  static Set intervals(IntervalPartition partition, BlockParity parity);

  static Set naturals() { return periodic({}, {true}); }
  static Set evens() { return periodic({}, {true, false}); }
  static Set multiples_of(std::uint64_t k);

  bool contains(std::uint64_t n) const;

  // |X ∩ [0, n)|
  std::uint64_t count_below(std::uint64_t n) const;

  // k-th member in increasing order, 0-indexed. Scans candidate values up
  // to `budget` before raising budget_exhausted; raises precondition_error
  // when a provably finite schema has fewer than k + 1 members.
  std::uint64_t kth_element(std::uint64_t k, std::uint64_t budget = kDefaultScanBudget) const;

  // First `count` members, in order.
  std::vector<std::uint64_t> first_members(std::uint64_t count,
                                           std::uint64_t budget = kDefaultScanBudget) const;

  // Conservative size classification from the schema shape alone.
  SizeClass size_class() const;

  const SetNode& node() const { return *node_; }

 private:
  explicit Set(std::shared_ptr<const SetNode> node) : node_(std::move(node)) {}

  std::shared_ptr<const SetNode> node_;
};

struct FiniteNode {
  std::vector<std::uint64_t> elements;  // sorted, unique
};
struct PeriodicNode {
  std::vector<bool> prefix;
  std::vector<bool> period;  // non-empty
};
struct ComplementNode {
  Set inner;
};
struct UnionNode {
  Set left, right;
};
struct IntersectionNode {
  Set left, right;
};
struct SeededNode {
  std::uint64_t seed;
};
struct IntervalsNode {
  IntervalPartition partition;
  BlockParity parity;
};

struct SetNode {
  using Variant = std::variant<FiniteNode, PeriodicNode, ComplementNode, UnionNode,
                               IntersectionNode, SeededNode, IntervalsNode>;
  Variant value;
};

// Finite-scale stand-in for a real: a bit schema plus the partition that
// chunks its binary expansion.
struct ChoppedReal {
  Set bits;
  IntervalPartition partition;
};

// Indices k of the fully contained intervals (b_{k+1} <= horizon) on
// which candidate and real agree bit for bit. Stops early when a
// table-backed partition runs out of boundaries.
std::vector<std::size_t> matches(const Set& candidate, const ChoppedReal& real,
                                 std::uint64_t horizon);

}  // namespace halflab
