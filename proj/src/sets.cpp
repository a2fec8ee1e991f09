#include "halflab/sets.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "halflab/errors.hpp"
#include "halflab/mix64.hpp"

namespace halflab {

namespace {

std::vector<std::uint64_t> factorial_boundaries() {
  std::vector<std::uint64_t> b{0};
  std::uint64_t f = 1;
  for (std::uint64_t k = 1;; ++k) {
    if (f > UINT64_MAX / k) break;
    f *= k;
    b.push_back(f);
  }
  return b;
}

std::vector<std::uint64_t> doubling_boundaries() {
  std::vector<std::uint64_t> b{0};
  for (std::uint64_t v = 1; v != 0; v <<= 1) b.push_back(v);
  return b;
}

}  // namespace

IntervalPartition::IntervalPartition(Kind kind, std::vector<std::uint64_t> boundaries)
    : kind_(kind), boundaries_(std::move(boundaries)) {}

IntervalPartition IntervalPartition::factorial() {
  return IntervalPartition(Kind::Factorial, factorial_boundaries());
}

IntervalPartition IntervalPartition::doubling() {
  return IntervalPartition(Kind::Doubling, doubling_boundaries());
}

IntervalPartition IntervalPartition::table(std::vector<std::uint64_t> boundaries) {
  if (boundaries.empty() || boundaries.front() != 0) {
    throw precondition_error("interval table must start at 0");
  }
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (boundaries[i] <= boundaries[i - 1]) {
      throw precondition_error("interval boundaries must be strictly increasing");
    }
  }
  return IntervalPartition(Kind::Table, std::move(boundaries));
}

std::uint64_t IntervalPartition::boundary(std::size_t k) const {
  if (k >= boundaries_.size()) {
    throw budget_exhausted("interval generator ends before boundary " + std::to_string(k));
  }
  return boundaries_[k];
}

std::size_t IntervalPartition::interval_index(std::uint64_t n) const {
  auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), n);
  const std::size_t k = static_cast<std::size_t>(it - boundaries_.begin()) - 1;
  if (k + 1 >= boundaries_.size()) {
    throw budget_exhausted("interval generator cannot bracket " + std::to_string(n));
  }
  return k;
}

Set Set::finite(std::vector<std::uint64_t> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  return Set(std::make_shared<SetNode>(SetNode{FiniteNode{std::move(elements)}}));
}

Set Set::periodic(std::vector<bool> prefix, std::vector<bool> period) {
  if (period.empty()) throw precondition_error("periodic schema requires a non-empty period");
  return Set(std::make_shared<SetNode>(SetNode{PeriodicNode{std::move(prefix), std::move(period)}}));
}

Set Set::complement(Set inner) {
  return Set(std::make_shared<SetNode>(SetNode{ComplementNode{std::move(inner)}}));
}

Set Set::union_of(Set left, Set right) {
  return Set(std::make_shared<SetNode>(SetNode{UnionNode{std::move(left), std::move(right)}}));
}

Set Set::intersection_of(Set left, Set right) {
  return Set(std::make_shared<SetNode>(SetNode{IntersectionNode{std::move(left), std::move(right)}}));
}

Set Set::seeded(std::uint64_t seed) {
  return Set(std::make_shared<SetNode>(SetNode{SeededNode{seed}}));
}

Set Set::intervals(IntervalPartition partition, BlockParity parity) {
  return Set(std::make_shared<SetNode>(SetNode{IntervalsNode{std::move(partition), parity}}));
}

Set Set::multiples_of(std::uint64_t k) {
  if (k == 0) throw precondition_error("multiples_of requires k >= 1");
  std::vector<bool> period(k, false);
  period[0] = true;
  return periodic({}, period);
}

namespace {

bool periodic_contains(const PeriodicNode& node, std::uint64_t n) {
  if (n < node.prefix.size()) return node.prefix[n];
  return node.period[(n - node.prefix.size()) % node.period.size()];
}

std::uint64_t periodic_count_below(const PeriodicNode& node, std::uint64_t n) {
  std::uint64_t count = 0;
  const std::uint64_t prefix_len = node.prefix.size();
  const std::uint64_t in_prefix = std::min<std::uint64_t>(n, prefix_len);
  for (std::uint64_t i = 0; i < in_prefix; ++i) count += node.prefix[i] ? 1 : 0;
  if (n <= prefix_len) return count;
  const std::uint64_t tail = n - prefix_len;
  const std::uint64_t plen = node.period.size();
  std::uint64_t ones = 0;
  for (bool bit : node.period) ones += bit ? 1 : 0;
  count += (tail / plen) * ones;
  const std::uint64_t rem = tail % plen;
  for (std::uint64_t i = 0; i < rem; ++i) count += node.period[i] ? 1 : 0;
  return count;
}

bool intervals_contain(const IntervalsNode& node, std::uint64_t n) {
  const std::size_t idx = node.partition.interval_index(n);
  const bool even = idx % 2 == 0;
  return node.parity == BlockParity::Even ? even : !even;
}

std::uint64_t intervals_count_below(const IntervalsNode& node, std::uint64_t n) {
  if (n == 0) return 0;
  const auto& b = node.partition.boundaries();
  // Membership beyond the last boundary is undefined.
  if (n > b.back()) {
    throw budget_exhausted("interval generator cannot bracket " + std::to_string(n - 1));
  }
  const std::size_t keep = node.parity == BlockParity::Even ? 0 : 1;
  std::uint64_t count = 0;
  for (std::size_t k = keep; k + 1 < b.size(); k += 2) {
    const std::uint64_t lo = b[k];
    if (lo >= n) break;
    count += std::min(b[k + 1], n) - lo;
  }
  return count;
}

// Smallest known B with the schema contained in [0, B), when the shape
// proves one exists.
std::optional<std::uint64_t> finite_bound(const Set& s);

std::optional<std::uint64_t> finite_bound_impl(const SetNode& node) {
  if (const auto* fin = std::get_if<FiniteNode>(&node.value)) {
    return fin->elements.empty() ? 0 : fin->elements.back() + 1;
  }
  if (const auto* per = std::get_if<PeriodicNode>(&node.value)) {
    for (bool bit : per->period) {
      if (bit) return std::nullopt;
    }
    return per->prefix.size();
  }
  if (const auto* uni = std::get_if<UnionNode>(&node.value)) {
    const auto l = finite_bound(uni->left);
    const auto r = finite_bound(uni->right);
    if (l && r) return std::max(*l, *r);
    return std::nullopt;
  }
  if (const auto* inter = std::get_if<IntersectionNode>(&node.value)) {
    const auto l = finite_bound(inter->left);
    const auto r = finite_bound(inter->right);
    if (l && r) return std::min(*l, *r);
    if (l) return l;
    return r;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> finite_bound(const Set& s) { return finite_bound_impl(s.node()); }

}  // namespace

bool Set::contains(std::uint64_t n) const {
  return std::visit(
      [n](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FiniteNode>) {
          return std::binary_search(node.elements.begin(), node.elements.end(), n);
        } else if constexpr (std::is_same_v<T, PeriodicNode>) {
          return periodic_contains(node, n);
        } else if constexpr (std::is_same_v<T, ComplementNode>) {
          return !node.inner.contains(n);
        } else if constexpr (std::is_same_v<T, UnionNode>) {
          return node.left.contains(n) || node.right.contains(n);
        } else if constexpr (std::is_same_v<T, IntersectionNode>) {
          return node.left.contains(n) && node.right.contains(n);
        } else if constexpr (std::is_same_v<T, SeededNode>) {
          return seeded_bit(node.seed, n);
        } else {
          return intervals_contain(node, n);
        }
      },
      node_->value);
}

std::uint64_t Set::count_below(std::uint64_t n) const {
  return std::visit(
      [n, this](const auto& node) -> std::uint64_t {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FiniteNode>) {
          return static_cast<std::uint64_t>(
              std::lower_bound(node.elements.begin(), node.elements.end(), n) -
              node.elements.begin());
        } else if constexpr (std::is_same_v<T, PeriodicNode>) {
          return periodic_count_below(node, n);
        } else if constexpr (std::is_same_v<T, ComplementNode>) {
          return n - node.inner.count_below(n);
        } else if constexpr (std::is_same_v<T, IntervalsNode>) {
          return intervals_count_below(node, n);
        } else {
          std::uint64_t count = 0;
          for (std::uint64_t i = 0; i < n; ++i) count += contains(i) ? 1 : 0;
          return count;
        }
      },
      node_->value);
}

std::uint64_t Set::kth_element(std::uint64_t k, std::uint64_t budget) const {
  if (const auto* fin = std::get_if<FiniteNode>(&node_->value)) {
    if (k >= fin->elements.size()) {
      throw precondition_error("finite schema has no member of rank " + std::to_string(k));
    }
    return fin->elements[k];
  }
  const auto bound = finite_bound(*this);
  std::uint64_t seen = 0;
  for (std::uint64_t n = 0; n <= budget && (!bound || n < *bound); ++n) {
    if (contains(n) && seen++ == k) return n;
  }
  if (bound && *bound <= budget) {
    throw precondition_error("finite schema has no member of rank " + std::to_string(k));
  }
  throw budget_exhausted("no member of rank " + std::to_string(k) + " within budget " +
                         std::to_string(budget));
}

std::vector<std::uint64_t> Set::first_members(std::uint64_t count, std::uint64_t budget) const {
  std::vector<std::uint64_t> out;
  out.reserve(count);
  for (std::uint64_t n = 0; n <= budget && out.size() < count; ++n) {
    if (contains(n)) out.push_back(n);
  }
  if (out.size() < count) {
    throw budget_exhausted("fewer than " + std::to_string(count) + " members within budget " +
                           std::to_string(budget));
  }
  return out;
}

Set::SizeClass Set::size_class() const {
  using SC = SizeClass;
  return std::visit(
      [](const auto& node) -> SC {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FiniteNode>) {
          return SC::Finite;
        } else if constexpr (std::is_same_v<T, PeriodicNode>) {
          for (bool bit : node.period) {
            if (bit) return SC::Infinite;
          }
          return SC::Finite;
        } else if constexpr (std::is_same_v<T, ComplementNode>) {
          switch (node.inner.size_class()) {
            case SC::Finite:
              return SC::Infinite;
            default:
              break;
          }
          const auto& inner_value = node.inner.node().value;
          if (std::holds_alternative<SeededNode>(inner_value) ||
              std::holds_alternative<IntervalsNode>(inner_value)) {
            return SC::Infinite;  // the other parity class / mirrored stream
          }
          return SC::Unknown;
        } else if constexpr (std::is_same_v<T, UnionNode>) {
          const SC l = node.left.size_class();
          const SC r = node.right.size_class();
          if (l == SC::Infinite || r == SC::Infinite) return SC::Infinite;
          if (l == SC::Finite && r == SC::Finite) return SC::Finite;
          return SC::Unknown;
        } else if constexpr (std::is_same_v<T, IntersectionNode>) {
          const SC l = node.left.size_class();
          const SC r = node.right.size_class();
          if (l == SC::Finite || r == SC::Finite) return SC::Finite;
          return SC::Unknown;
        } else {
          // Seeded streams and interval schemes are infinite-set classes.
          return SC::Infinite;
        }
      },
      node_->value);
}

std::vector<std::size_t> matches(const Set& candidate, const ChoppedReal& real,
                                 std::uint64_t horizon) {
  std::vector<std::size_t> agreeing;
  const auto& b = real.partition.boundaries();
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    if (b[k + 1] > horizon) break;
    bool equal = true;
    for (std::uint64_t n = b[k]; n < b[k + 1]; ++n) {
      if (candidate.contains(n) != real.bits.contains(n)) {
        equal = false;
        break;
      }
    }
    if (equal) agreeing.push_back(k);
  }
  return agreeing;
}

}  // namespace halflab
