#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "halflab/density.hpp"
#include "halflab/rational.hpp"
#include "halflab/sets.hpp"

namespace halflab {

enum class RelationStatus { HoldsAtHorizon, FailsAtHorizon, Inconclusive };

struct RelationVerdict {
  RelationStatus status = RelationStatus::Inconclusive;
  std::optional<std::uint64_t> witness;               // first failing n
  std::vector<std::pair<std::uint64_t, Rat>> trace;   // (n, checked ratio) samples
};

// Conventional burn-in when the caller does not pick one.
inline std::uint64_t default_burn_in(std::uint64_t horizon) { return horizon / 10; }

// |S ∩ X ∩ n| / |X ∩ n| stays inside (1/2 - tol, 1/2 + tol) for every
// n in [n0, horizon]. Requires tol > 0 and |X ∩ n0| >= 1.
RelationVerdict bisects_in_limit(const Set& s, const Set& x, const Rat& tol,
                                 std::uint64_t n0, std::uint64_t horizon);

// Same scan with the window restricted to 0 < eps < 1/2.
RelationVerdict almost_bisects(const Set& s, const Set& x, const Rat& eps,
                               std::uint64_t n0, std::uint64_t horizon);

struct WeakBisectionReport {
  std::uint64_t count = 0;
  std::vector<std::uint64_t> hits;
};

// Count and list of n <= horizon whose relative count sits inside the
// open eps-window around 1/2; n starts at the first scale where X has a
// member.
WeakBisectionReport weakly_bisects(const Set& s, const Set& x, const Rat& eps,
                                   std::uint64_t horizon);

// Exact integer test 2|S ∩ X ∩ n| = |X ∩ n| for n in [1, horizon].
std::vector<std::uint64_t> bisects_infinitely_often(const Set& s, const Set& x,
                                                    std::uint64_t horizon);

// d_n(S ∩ X) / (d_n(S) d_n(X)) stays inside (1 - tol, 1 + tol) for every
// n in [n0, horizon]. Requires members of both sets below n0.
RelationVerdict star_splits(const Set& s, const Set& x, const Rat& tol,
                            std::uint64_t n0, std::uint64_t horizon);

struct SubfamilyVerdict {
  std::vector<std::size_t> members;  // indices into the family
  RelationVerdict verdict;
};

struct FamilyIndependenceReport {
  std::vector<ModeracyVerdict> moderacy;  // one per member (empty for rho form)
  bool moderacy_warning = false;          // some member decided only by scan
  std::vector<SubfamilyVerdict> subfamilies;
  bool all_hold = true;
};

// For each non-empty subfamily E with |E| <= cap (lexicographic by index
// sequence): d_n(⋂E) / ∏ d_n(E_i) inside (1 - tol, 1 + tol) over
// [n0, horizon]. Members must be moderate; scan-estimated moderacy is
// accepted with a warning, exact non-moderacy is a precondition failure.
FamilyIndependenceReport statistically_independent(const std::vector<Set>& family,
                                                   std::size_t cap, const Rat& tol,
                                                   std::uint64_t n0, std::uint64_t horizon);

// For each non-empty subfamily A with |A| <= cap:
// |d_n(⋂A) - rho^|A|| < tol over [n0, horizon]. Requires 0 < rho <= 1.
FamilyIndependenceReport rho_independent(const std::vector<Set>& family, const Rat& rho,
                                         std::size_t cap, const Rat& tol, std::uint64_t n0,
                                         std::uint64_t horizon);

// Subfamily index sequences in the order the reports use.
std::vector<std::vector<std::size_t>> subfamilies_upto(std::size_t family_size,
                                                       std::size_t cap);

}  // namespace halflab
