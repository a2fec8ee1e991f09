#include "halflab/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "halflab/errors.hpp"
#include "halflab/mix64.hpp"
#include "halflab/parallel.hpp"

namespace halflab {

namespace {

Rat trial_estimate(std::uint64_t successes, std::uint64_t trials) {
  return ratio_of(Int(successes), Int(trials));
}

// Per-trial outcomes land in a slot per index, so aggregation is independent
// of scheduling.
std::uint64_t run_trials(std::uint64_t trials, const std::function<bool(std::uint64_t)>& trial) {
  std::vector<char> outcome(trials, 0);
  parallel_for(trials, [&](std::uint64_t t) { outcome[t] = trial(t) ? 1 : 0; });
  std::uint64_t successes = 0;
  for (char c : outcome) successes += static_cast<std::uint64_t>(c);
  return successes;
}

}  // namespace

double chernoff_bound(std::uint64_t k, double a) {
  if (k == 0) throw precondition_error("chernoff_bound: k must be >= 1");
  if (!(a > 0)) throw precondition_error("chernoff_bound: a must be positive");
  return std::exp(-(a * a) / (2.0 * static_cast<double>(k)));
}

double delta_n(const Int& possibility_count, const Rat& target_probability, std::uint64_t n) {
  if (n == 0) throw precondition_error("delta_n: n must be >= 1");
  if (possibility_count < 1) throw precondition_error("delta_n: N must be >= 1");
  if (!(target_probability > 0) || target_probability > 1) {
    throw precondition_error("delta_n: P must lie in (0, 1]");
  }
  const Int threshold = ceil_rat(target_probability * possibility_count);
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  return possibility_count.convert_to<double>() * 16.0 * nn *
         std::exp(-threshold.convert_to<double>() / (2.0 * nn));
}

DeltaAuditReport delta_audit(std::uint64_t n_max) {
  if (n_max == 0) throw precondition_error("delta_audit: n_max must be >= 1");
  DeltaAuditReport report;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    DeltaAuditRow row;
    row.n = n;
    row.possibility_count = boost::multiprecision::pow(Int(n), 6);
    if (row.possibility_count < 100) row.possibility_count = 100;
    row.target_probability = n < 2 ? Rat(1, 2) : Rat(1, Int(n));
    row.threshold = ceil_rat(row.target_probability * row.possibility_count);
    row.delta = delta_n(row.possibility_count, row.target_probability, n);
    if (row.delta >= 0.5) report.exceptions.push_back(n);
    report.rows.push_back(std::move(row));
  }
  for (std::size_t i = report.rows.size(); i-- > 0;) {
    if (report.rows[i].delta >= 0.5) break;
    report.stable_below_half_from = report.rows[i].n;
  }
  return report;
}

std::vector<std::uint64_t> walk_zero_hits(const Set& s, const Set& x, std::uint64_t steps) {
  const auto elems = x.first_members(steps);
  std::vector<std::uint64_t> hits;
  std::uint64_t in_s = 0;
  for (std::uint64_t j = 0; j < steps; ++j) {
    in_s += s.contains(elems[j]) ? 1 : 0;
    if (2 * in_s == j + 1) hits.push_back(j + 1);
  }
  return hits;
}

TrialReport estimate_recurrence(const Set& x, std::uint64_t steps, std::uint64_t trials,
                                std::uint64_t seed) {
  if (trials == 0) throw precondition_error("estimate_recurrence: trials must be >= 1");
  const auto elems = x.first_members(steps);
  TrialReport report;
  report.trials = trials;
  report.seed = seed;
  report.successes = run_trials(trials, [&](std::uint64_t t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    std::uint64_t in_s = 0;
    for (std::uint64_t j = 0; j < steps; ++j) {
      in_s += seeded_bit(trial_seed, elems[j]) ? 1 : 0;
      if (2 * in_s == j + 1) return true;
    }
    return false;
  });
  report.estimate = trial_estimate(report.successes, trials);
  // Exact probability that a balanced walk returns to zero within `steps`:
  // 1 - prod_{i<=m} (2i-1)/(2i) with m = steps/2.
  double miss = 1.0;
  for (std::uint64_t i = 1; i <= steps / 2; ++i) {
    miss *= (2.0 * static_cast<double>(i) - 1.0) / (2.0 * static_cast<double>(i));
  }
  report.bound = 1.0 - miss;
  return report;
}

TrialReport lln_density(const Set& x, std::uint64_t horizon, std::uint64_t trials, const Rat& eps,
                        std::uint64_t seed) {
  if (horizon == 0) throw precondition_error("lln_density: horizon must be >= 1");
  if (trials == 0) throw precondition_error("lln_density: trials must be >= 1");
  if (!(eps > 0)) throw precondition_error("lln_density: eps must be positive");
  const auto elems = x.first_members(horizon);
  const Int num = numerator(eps), den = denominator(eps);
  TrialReport report;
  report.trials = trials;
  report.seed = seed;
  report.successes = run_trials(trials, [&](std::uint64_t t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    std::uint64_t count = 0;
    for (const std::uint64_t e : elems) count += seeded_bit(trial_seed, e) ? 1 : 0;
    // |count/horizon - 1/2| < eps, cross-multiplied
    const Int diff = 2 * Int(count) - Int(horizon);
    return (diff < 0 ? -diff : diff) * den < 2 * Int(horizon) * num;
  });
  report.estimate = trial_estimate(report.successes, trials);
  const double e = eps.convert_to<double>();
  report.bound = 1.0 - 2.0 * std::exp(-2.0 * static_cast<double>(horizon) * e * e);
  return report;
}

BlockPlan make_block_plan(std::uint64_t n, const Int& possibility_count,
                          const Rat& target_probability, std::uint64_t m_lo, std::uint64_t m_hi) {
  if (n == 0) throw precondition_error("make_block_plan: n must be >= 1");
  if (m_lo >= m_hi) throw precondition_error("make_block_plan: need m_lo < m_hi");
  if (possibility_count < 1) throw precondition_error("make_block_plan: N must be >= 1");
  if (!(target_probability > 0) || target_probability > Rat(1, 2)) {
    throw precondition_error("make_block_plan: P must lie in (0, 1/2]");
  }
  BlockPlan plan;
  plan.index = n;
  plan.m_lo = m_lo;
  plan.m_hi = m_hi;
  plan.possibility_count = possibility_count;
  plan.target_probability = target_probability;
  plan.threshold = ceil_rat(target_probability * possibility_count);
  return plan;
}

BlockPlan make_block_plan(std::uint64_t n) {
  if (n == 0) throw precondition_error("make_block_plan: n must be >= 1");
  if (n > 1000) throw budget_exhausted("make_block_plan: n^6 exceeds the block range");
  Int count = boost::multiprecision::pow(Int(n), 6);
  if (count < 100) count = 100;
  const Rat p = n < 2 ? Rat(1, 2) : Rat(1, Int(n));
  return make_block_plan(n, count, p, 0, count.convert_to<std::uint64_t>());
}

FailRateReport fail_rate_vs_bound(const BlockPlan& plan, const std::vector<std::uint64_t>& target,
                                  std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw precondition_error("fail_rate_vs_bound: trials must be >= 1");
  std::vector<std::uint64_t> sorted = target;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (!sorted.empty() && (sorted.front() < plan.m_lo || sorted.back() >= plan.m_hi)) {
    throw precondition_error("fail_rate_vs_bound: target leaves the block window");
  }
  if (Int(sorted.size()) < plan.threshold) {
    throw precondition_error("fail_rate_vs_bound: target smaller than the threshold");
  }
  const std::uint64_t threshold = plan.threshold.convert_to<std::uint64_t>();
  const std::uint64_t n = plan.index;

  FailRateReport report;
  report.trial.trials = trials;
  report.trial.seed = seed;
  report.trial.successes = run_trials(trials, [&](std::uint64_t t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    std::uint64_t count = 0;
    for (std::uint64_t j = 1; j <= sorted.size(); ++j) {
      count += seeded_bit(trial_seed, sorted[j - 1]) ? 1 : 0;
      if (j < threshold) continue;
      const std::uint64_t diff = 2 * count > j ? 2 * count - j : j - 2 * count;
      if (diff * n > j) return true;  // bisection error beyond 1/(2n)
    }
    return false;
  });
  report.trial.estimate = trial_estimate(report.trial.successes, trials);

  const double x = 1.0 / (8.0 * static_cast<double>(n) * static_cast<double>(n));
  double sum = 0.0;
  for (std::uint64_t j = threshold; j <= sorted.size(); ++j) {
    sum += std::exp(-static_cast<double>(j) * x);
  }
  report.per_window_sum = 2.0 * sum;
  report.closed_form =
      2.0 * (2.0 / x) * std::exp(-static_cast<double>(threshold) * x);
  report.trial.bound = report.closed_form;
  if (report.closed_form < 1.0) {
    report.slack = 3.0 * std::sqrt(report.closed_form * (1.0 - report.closed_form) /
                                   static_cast<double>(trials));
    report.within_bound =
        report.trial.estimate.convert_to<double>() <= report.closed_form + report.slack;
  }
  return report;
}

}  // namespace halflab
