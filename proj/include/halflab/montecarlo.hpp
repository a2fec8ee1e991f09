#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "halflab/rational.hpp"
#include "halflab/sets.hpp"

namespace halflab {

// exp(-a^2 / (2k)); one-sided deviation bound for k fair coin flips.
// Floating point is confined to exp-based bounds like this one; values carry
// at least 12 significant digits.
double chernoff_bound(std::uint64_t k, double a);

// N * 16n^2 * exp(-ceil(N * P) / (2n^2)).
double delta_n(const Int& possibility_count, const Rat& target_probability, std::uint64_t n);

struct DeltaAuditRow {
  std::uint64_t n = 0;
  Int possibility_count;     // max(n^6, 100)
  Rat target_probability;    // min(1/2, 1/n)
  Int threshold;             // ceil(N * P)
  double delta = 0.0;
};

// Audit of the corrected failure-bound schedule.  The published parameter
// line contradicts its own limit requirements, so the audit reports where
// delta drops below 1/2 instead of asserting it everywhere: the suffix is
// stable from n = 3 on, with n = 2 the lone exception.
struct DeltaAuditReport {
  std::vector<DeltaAuditRow> rows;                     // n = 1..n_max
  std::vector<std::uint64_t> exceptions;               // n with delta >= 1/2
  std::optional<std::uint64_t> stable_below_half_from; // earliest all-below suffix
};

DeltaAuditReport delta_audit(std::uint64_t n_max);

// All n in [1, steps] with 2 * |X ∩ S ∩ f_X(n)| = n, where f_X enumerates X.
std::vector<std::uint64_t> walk_zero_hits(const Set& s, const Set& x, std::uint64_t steps);

struct TrialReport {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  Rat estimate;       // successes / trials, exact
  double bound = 0.0; // analytic companion bound, see each operation
  std::uint64_t seed = 0;
};

// Fraction of seeded random S whose walk returns to zero within `steps`
// steps along X's enumeration; per-trial seeds derive from (seed, index).
// Bound: the exact recurrence probability 1 - prod (2i-1)/(2i).
TrialReport estimate_recurrence(const Set& x, std::uint64_t steps, std::uint64_t trials,
                                std::uint64_t seed);

// Fraction of seeded random Y whose relative density in X's first `horizon`
// members lies within eps of 1/2. Bound: 1 - 2exp(-2 * horizon * eps^2).
TrialReport lln_density(const Set& x, std::uint64_t horizon, std::uint64_t trials,
                        const Rat& eps, std::uint64_t seed);

// Checkpointed block: J = [m_lo, m_hi), N possibilities, target probability
// P, threshold E = ceil(N * P).
struct BlockPlan {
  std::uint64_t index = 0;  // n
  std::uint64_t m_lo = 0;
  std::uint64_t m_hi = 0;
  Int possibility_count;
  Rat target_probability;
  Int threshold;
};

// Corrected schedule: P = min(1/2, 1/n), N = max(n^6, 100), J = [0, N).
BlockPlan make_block_plan(std::uint64_t n);
BlockPlan make_block_plan(std::uint64_t n, const Int& possibility_count,
                          const Rat& target_probability, std::uint64_t m_lo, std::uint64_t m_hi);

struct FailRateReport {
  TrialReport trial;            // successes = number of failing trials
  double per_window_sum = 0.0;  // 2 * sum_{j=E}^{|target|} exp(-j / (8n^2))
  double closed_form = 0.0;     // 32 n^2 exp(-E / (8n^2)) via 1/(1-e^-x) <= 2/x
  double slack = 0.0;           // 3 sigma of the closed form at `trials`
  bool within_bound = true;     // estimate <= closed_form + slack (when < 1)
};

// Empirical frequency, over seeded random X ⊆ J, of a bisection failure
// |2|X ∩ target ∩ m| - j| * n > j at some checkpoint with j = |target ∩ m|
// >= E, against the analytic Chernoff sum and its closed form.
FailRateReport fail_rate_vs_bound(const BlockPlan& plan,
                                  const std::vector<std::uint64_t>& target,
                                  std::uint64_t trials, std::uint64_t seed);

}  // namespace halflab
