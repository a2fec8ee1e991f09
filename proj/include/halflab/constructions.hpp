#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "halflab/rational.hpp"
#include "halflab/sets.hpp"

namespace halflab {

// Chopped real whose partition boundaries sit after the n!-th elements of S
// (boundary = element + 1), for n = 1,2,... while the boundary stays below
// `horizon`.  The bits of the result are S itself.
ChoppedReal factorial_chopped_real(const Set& s, std::uint64_t horizon);

// Witness row for the factorial-chopping guarantee: if y matches interval k
// of the chopped real, the relative density of y in S at the interval's end
// b_{k+1} is at least 1 - 1/(k+1), hence strictly above 1 - 1/k.
struct FactorialGuaranteeEntry {
  std::size_t interval = 0;  // matched interval index k >= 1
  Rat density;               // |y cap S cap b_{k+1}| / |S cap b_{k+1}|
  Rat bound;                 // 1 - 1/k
  bool ok = false;           // density > bound
};

std::vector<FactorialGuaranteeEntry> factorial_guarantee(const ChoppedReal& real,
                                                         const Set& y,
                                                         std::uint64_t horizon);

// Witness for the meagre-uniformity bound.  With f(n) = sum_{k=0}^{n} k!
// (so f(0) = 1), the partition boundary b_{n+1} sits after the f(2n)-th
// element of X; interval I_n therefore holds exactly (2n-1)! + (2n)! members
// of X for n >= 1.  The returned bits S keep I_0's members of X verbatim and,
// inside each I_n with n >= 1, skip the first (2n-1)! members and keep the
// rest.  `depth` is the number of skipping intervals (n = 1..depth).
ChoppedReal nonM_witness(const Set& x, std::size_t depth);

struct DominatorWitness {
  Set x;
  std::vector<std::uint64_t> g;      // input table, strictly increasing, g[0] > 0
  std::vector<std::uint64_t> big_g;  // G(m) = g^(m+1)(0) on the computed range
  std::vector<std::uint64_t> gamma;  // Gamma(0) = 0, Gamma(n+1) = G(sum of previous Gammas)
  Set y;                             // even-indexed Gamma intervals
  // Ranks n with g(n) <= (n-th element of x); empty when domination held on
  // the checked range.
  std::vector<std::uint64_t> domination_failures;
};

DominatorWitness bisect_witness_from_dominator(const Set& x,
                                               const std::vector<std::uint64_t>& g,
                                               std::uint64_t horizon);

// Outcome of a quantitative lemma check.  A violated hypothesis makes the
// lemma vacuous rather than false, so it is reported separately from the
// conclusion.
struct LemmaCheck {
  bool pre_ok = false;
  std::string pre_violation;              // empty when pre_ok
  bool conclusion = false;                // meaningful only when pre_ok
  std::optional<std::uint64_t> witness;   // point where the conclusion failed
};

// Splicing bound: disjoint finite R, S with |S| = c|R| (c > 1), A subset of R,
// B subset of S with |B|/|S| in (1/2 - eps, 1/2 + eps); concludes
// |A u B|/|R u S| in (1/2 - eps - 1/c, 1/2 + eps + 1/c).
LemmaCheck lemma33_conclusion(const std::vector<std::uint64_t>& r_set,
                              const std::vector<std::uint64_t>& s_set,
                              const std::vector<std::uint64_t>& a_subset,
                              const std::vector<std::uint64_t>& b_subset,
                              const Rat& eps, const Rat& c);

// Density splice: if |R cap m|/m is within eps of r and |S cap l|/l is within
// eps of r for every l in [m, n], then the spliced counts
// (|R cap m| + |S cap [m, l)|)/l stay within 3*eps of r on [m, n].
LemmaCheck lemma410_conclusion(const Set& r_set, const Set& s_set, const Rat& r,
                               const Rat& eps, std::uint64_t m, std::uint64_t n);

struct Lemma33Instance {
  std::vector<std::uint64_t> r_set, s_set, a_subset, b_subset;
  Rat eps;
  Rat c;
};

// Seeded random instance satisfying every lemma33_conclusion hypothesis:
// |R| in [1,50], c in {2..10}, A an arbitrary subset, |B| strictly inside the
// eps-window around |S|/2.
Lemma33Instance make_lemma33_instance(std::uint64_t seed);

struct Lemma410Instance {
  Set r_set, s_set;
  Rat r;
  Rat eps;
  std::uint64_t m = 0, n = 0;
};

// Seeded random instance satisfying every lemma410_conclusion hypothesis;
// S is grown bit by bit, which always succeeds because the window width
// 2*eps exceeds the 1/(l+1) step granularity on [m, n].
Lemma410Instance make_lemma410_instance(std::uint64_t seed);

struct RClauseResult {
  bool pass = true;
  std::optional<std::uint64_t> witness;  // scale (2^k) or first failing l
  std::string detail;
};

// Per-assignment row of an (R1)-(R3) evaluation.  `assignment` is the
// canonical partial-assignment key ("5:1,9:0", "" for the empty function);
// with d pairs the density target is 2^-(d+1).
struct RConditionsRow {
  std::string assignment;
  RClauseResult r1_low;   // at 2^{k_low} against z_low, delta_low/3
  RClauseResult r1_high;  // at 2^{k_high} against z_high, delta_high/3
  RClauseResult r2;       // decided real on [2^{k_low}, 2^{k_high}], delta_low/3
  RClauseResult r3;       // z_high on [2^{k_low}, 2^{k_high}], delta_low
};

struct RConditionsReport {
  std::vector<RConditionsRow> rows;  // sorted by assignment key
  RClauseResult r4;                  // z_high block equals the decided block
  bool all_pass = true;
};

// Finite analogue of the (R1)-(R4) bookkeeping: traces are explicit finite
// sets standing in for the B^f intersections, and `x_block` (a subset of
// [2^{k_low}, 2^{k_high})) stands in for the decided generic block.  When
// x_block is absent it defaults to z_high's block, making (R4) vacuous.
RConditionsReport r_conditions_check(
    const std::map<std::string, std::vector<std::uint64_t>>& bf_traces,
    const std::vector<std::uint64_t>& z_low, const std::vector<std::uint64_t>& z_high,
    unsigned k_low, unsigned k_high, const Rat& delta_low, const Rat& delta_high,
    const std::optional<std::vector<std::uint64_t>>& x_block = std::nullopt);

// (7L + Delta) / (3(3L + Delta)); equals 7/9 at Delta = 0 and is strictly
// decreasing in Delta.
Rat cohen_block_ratio_bound(std::uint64_t l_prev, std::uint64_t delta);

// Decided-block trace: block k spans [L_{k-1}, L_k) with L_{-1} = 0 and
// boundaries[k] = L_k; ones[k] lists the block's decided members.  Block 0
// needs length >= 2 and at least one member and one non-member, one count
// being exactly 1; block k >= 1 needs both counts >= 3*L_{k-1}, one exactly.
struct BlockFamilyTrace {
  std::vector<std::uint64_t> boundaries;
  std::vector<std::vector<std::uint64_t>> ones;
};

struct CohenBoundRow {
  std::size_t block = 0;    // n >= 1
  std::uint64_t l_prev = 0, l_cur = 0;
  std::uint64_t ones = 0;   // I_n
  std::uint64_t zeros = 0;  // O_n
  std::uint64_t delta = 0;  // I_n + O_n - 6*L_{n-1}
  Rat ratio;                // d_{L_n}(X cap Y) / (d_{L_n}(X) * d_{L_n}(Y))
  Rat chain_upper;          // L_{n-1} * L_n / (O_n * I_n)
  Rat bound;                // cohen_block_ratio_bound(L_{n-1}, delta)
  bool ok = false;          // ratio <= chain_upper == bound <= 7/9
};

struct CohenWitness {
  Set x;  // decided real: union of the ones
  Set y;  // anti-split witness: union of the zeros
  std::vector<CohenBoundRow> rows;
  bool all_ok = true;
};

CohenWitness cohen_antisplit_witness(const BlockFamilyTrace& trace);

// Seeded trace generator satisfying the BlockFamilyTrace invariants; block
// lengths grow roughly sevenfold per block, so keep `blocks` small.
BlockFamilyTrace make_cohen_trace(std::uint64_t seed, std::size_t blocks);

}  // namespace halflab
