#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "halflab/rational.hpp"

namespace halflab {

// Partial 0/1 assignment on a finite set of index ids, canonical ordering by id.
class PartialAssignment {
 public:
  PartialAssignment() = default;

  // Pairs may arrive in any order; duplicate ids are rejected.
  static PartialAssignment from_pairs(std::vector<std::pair<std::uint32_t, bool>> pairs);

  // Text form "5:1,9:0" with strictly increasing ids; "" is the empty assignment.
  static PartialAssignment parse(const std::string& text);
  std::string text() const;

  const std::vector<std::pair<std::uint32_t, bool>>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  std::optional<bool> at(std::uint32_t id) const;
  bool domain_subset_of(const std::vector<std::uint32_t>& ids) const;  // ids sorted
  PartialAssignment restricted(const std::vector<std::uint32_t>& ids) const;
  PartialAssignment extended(std::uint32_t id, bool bit) const;

  friend bool operator==(const PartialAssignment& a, const PartialAssignment& b) {
    return a.pairs_ == b.pairs_;
  }
  friend bool operator<(const PartialAssignment& a, const PartialAssignment& b) {
    return a.pairs_ < b.pairs_;
  }

 private:
  std::vector<std::pair<std::uint32_t, bool>> pairs_;  // sorted by id
};

// Finite forcing condition (F, n, a, eps). Blocks are bit rows; row length may
// exceed the horizon only in malformed input, which validation reports.
struct Condition {
  std::vector<std::uint32_t> support;             // F, sorted, unique
  std::uint64_t horizon = 1;                      // n
  std::map<std::uint32_t, std::vector<bool>> blocks;
  std::map<PartialAssignment, Rat> budgets;       // eps on every partial assignment over F
};

bool operator==(const Condition& a, const Condition& b);

struct ClauseViolation {
  std::string clause;  // "C1".."C6"
  std::string detail;
};

struct LeqOutcome {
  bool ok = true;
  std::string clause;  // first violated among "D1".."D5" when !ok
  std::string detail;
};

struct BooleanTrace {
  PartialAssignment assignment;
  std::vector<std::uint64_t> members;  // positions below the horizon matching the assignment
};

// Every partial assignment over the given sorted support, in canonical order.
std::vector<PartialAssignment> assignments_over(const std::vector<std::uint32_t>& support);

// Exact audit of (C1)..(C6); at most one entry per clause, first witness in the
// detail. Throws precondition_error on horizon 0 or unsorted support, and
// budget_exhausted when the support is too large for an exact audit.
std::vector<ClauseViolation> validate(const Condition& p);

// Exact (D1)..(D5) evaluation of q <= p. Both inputs must validate cleanly.
LeqOutcome leq(const Condition& q, const Condition& p);

// Restriction of p to the ids in keep (Definition-style: same horizon, blocks
// and budgets cut down to the surviving support).
Condition restrict_to(const Condition& p, const std::vector<std::uint32_t>& keep);

// Extension step. Builds the minimal-horizon q with q <= p, q <= q_prime,
// support F^p with extension_set merged in via q_prime, horizon >= m, and the
// stitched budget table. eps_target must cover exactly the assignments over
// F^p, be monotone, pointwise <= eps^p, and bounded by 16.
Condition extend(const Condition& p, const std::vector<std::uint32_t>& extension_set,
                 const Condition& q_prime, std::uint64_t m,
                 const std::map<PartialAssignment, Rat>& eps_target);

// Common lower bound of two compatible conditions (equal horizons, equal
// shared blocks, equal shared budgets).
Condition amalgamate(const Condition& p, const Condition& q);

Condition trivial_condition();  // empty support, horizon 1, eps(empty) = 16
Condition trivial_condition(std::uint64_t horizon, const Rat& eps0);

BooleanTrace boolean_trace(const Condition& p, const PartialAssignment& f);

struct GenericRunRow {
  std::string assignment;
  std::uint64_t count = 0;
  Rat density;
  Rat target;
  Rat error;
  Rat bound;  // eps(f)/8
  bool ok = true;
};

struct GenericRunRound {
  std::uint64_t round = 0;
  std::string action;
  std::size_t support_size = 0;
  std::uint64_t horizon = 0;
  Rat eps_root;
};

struct GenericRunReport {
  Condition final_condition;
  std::vector<GenericRunRound> rounds;
  std::vector<GenericRunRow> rows;
  bool all_ok = true;
};

// Deterministic schedule: adopt index_count fresh indices, push the horizon to
// min_horizon by doubling, then halve budgets toward the floor 1/4. Throws
// budget_exhausted when rounds run out before the first two goals are met.
GenericRunReport generic_run(std::uint64_t index_count, std::uint64_t rounds,
                             std::uint64_t min_horizon, std::uint64_t seed,
                             std::size_t dom_cap = 3);

// JSON wire format {"F":[...],"n":...,"a":{"5":[...]},"eps":[["5:1","1/2"],...]}.
std::string condition_to_json_text(const Condition& p, int indent = 2);
Condition condition_from_json_text(const std::string& text);

}  // namespace halflab
