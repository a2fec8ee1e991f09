#include "halflab/relations.hpp"

#include "halflab/errors.hpp"

namespace halflab {

namespace {

void check_scan_range(std::uint64_t n0, std::uint64_t horizon) {
  if (n0 == 0 || n0 > horizon) {
    throw precondition_error("scan range requires 1 <= n0 <= horizon");
  }
}

// Shared scan: verdict on ratio(n) ∈ (lo, hi) for all n in [n0, horizon],
// with the counts supplied incrementally by the caller.
template <typename RatioAt>
RelationVerdict scan_window(std::uint64_t n0, std::uint64_t horizon, const Rat& lo,
                            const Rat& hi, RatioAt&& ratio_at) {
  RelationVerdict verdict;
  for (std::uint64_t n = n0; n <= horizon; ++n) {
    const Rat ratio = ratio_at(n);
    if (!(lo < ratio && ratio < hi)) {
      verdict.status = RelationStatus::FailsAtHorizon;
      verdict.witness = n;
      verdict.trace.emplace_back(n, ratio);
      return verdict;
    }
  }
  verdict.status = RelationStatus::HoldsAtHorizon;
  return verdict;
}

}  // namespace

RelationVerdict bisects_in_limit(const Set& s, const Set& x, const Rat& tol,
                                 std::uint64_t n0, std::uint64_t horizon) {
  check_scan_range(n0, horizon);
  if (tol <= 0) throw precondition_error("bisects_in_limit requires tol > 0");
  if (x.count_below(n0) == 0) {
    throw precondition_error("bisects_in_limit requires |X ∩ n0| >= 1");
  }
  std::uint64_t in_x = x.count_below(n0);
  std::uint64_t in_both = 0;
  for (std::uint64_t i = 0; i < n0; ++i) {
    if (x.contains(i) && s.contains(i)) ++in_both;
  }
  const Rat half(1, 2);
  std::uint64_t cursor = n0;
  return scan_window(n0, horizon, half - tol, half + tol, [&](std::uint64_t n) {
    while (cursor < n) {
      if (x.contains(cursor)) {
        ++in_x;
        if (s.contains(cursor)) ++in_both;
      }
      ++cursor;
    }
    return ratio_of(Int(in_both), Int(in_x));
  });
}

RelationVerdict almost_bisects(const Set& s, const Set& x, const Rat& eps,
                               std::uint64_t n0, std::uint64_t horizon) {
  if (eps <= 0 || eps >= Rat(1, 2)) {
    throw precondition_error("almost_bisects requires 0 < eps < 1/2");
  }
  return bisects_in_limit(s, x, eps, n0, horizon);
}

WeakBisectionReport weakly_bisects(const Set& s, const Set& x, const Rat& eps,
                                   std::uint64_t horizon) {
  if (eps <= 0) throw precondition_error("weakly_bisects requires eps > 0");
  if (horizon == 0) throw precondition_error("weakly_bisects requires horizon >= 1");
  WeakBisectionReport report;
  std::uint64_t in_x = 0;
  std::uint64_t in_both = 0;
  const Rat half(1, 2);
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    if (x.contains(n - 1)) {
      ++in_x;
      if (s.contains(n - 1)) ++in_both;
    }
    if (in_x == 0) continue;
    const Rat ratio = ratio_of(Int(in_both), Int(in_x));
    if (half - eps < ratio && ratio < half + eps) {
      ++report.count;
      report.hits.push_back(n);
    }
  }
  return report;
}

std::vector<std::uint64_t> bisects_infinitely_often(const Set& s, const Set& x,
                                                    std::uint64_t horizon) {
  std::vector<std::uint64_t> hits;
  std::uint64_t in_x = 0;
  std::uint64_t in_both = 0;
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    if (x.contains(n - 1)) {
      ++in_x;
      if (s.contains(n - 1)) ++in_both;
    }
    if (2 * in_both == in_x) hits.push_back(n);
  }
  return hits;
}

RelationVerdict star_splits(const Set& s, const Set& x, const Rat& tol,
                            std::uint64_t n0, std::uint64_t horizon) {
  check_scan_range(n0, horizon);
  if (tol <= 0) throw precondition_error("star_splits requires tol > 0");
  std::uint64_t in_s = s.count_below(n0);
  std::uint64_t in_x = x.count_below(n0);
  if (in_s == 0 || in_x == 0) {
    throw precondition_error("star_splits requires members of both sets below n0");
  }
  std::uint64_t in_both = 0;
  for (std::uint64_t i = 0; i < n0; ++i) {
    if (s.contains(i) && x.contains(i)) ++in_both;
  }
  std::uint64_t cursor = n0;
  return scan_window(n0, horizon, Rat(1) - tol, Rat(1) + tol, [&](std::uint64_t n) {
    while (cursor < n) {
      const bool a = s.contains(cursor);
      const bool b = x.contains(cursor);
      if (a) ++in_s;
      if (b) ++in_x;
      if (a && b) ++in_both;
      ++cursor;
    }
    // d_n(S∩X) / (d_n(S) d_n(X)) = |S∩X∩n| n / (|S∩n| |X∩n|)
    return ratio_of(Int(in_both) * Int(n), Int(in_s) * Int(in_x));
  });
}

std::vector<std::vector<std::size_t>> subfamilies_upto(std::size_t family_size,
                                                       std::size_t cap) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> current;
  // Lexicographic on index sequences: [0], [0,1], [0,1,2], [0,2], [1], ...
  auto walk = [&](auto&& self, std::size_t next) -> void {
    for (std::size_t i = next; i < family_size; ++i) {
      current.push_back(i);
      out.push_back(current);
      if (current.size() < cap) self(self, i + 1);
      current.pop_back();
    }
  };
  walk(walk, 0);
  return out;
}

namespace {

RelationVerdict subfamily_scan(const std::vector<Set>& family,
                               const std::vector<std::size_t>& members, const Rat& lo,
                               const Rat& hi, bool product_form, const Rat& target,
                               std::uint64_t n0, std::uint64_t horizon) {
  // counts[i] tracks |E_i ∩ n|; joint tracks |⋂E ∩ n|.
  std::vector<std::uint64_t> counts(members.size(), 0);
  std::uint64_t joint = 0;
  std::uint64_t cursor = 0;
  auto advance = [&](std::uint64_t n) {
    while (cursor < n) {
      bool all = true;
      for (std::size_t j = 0; j < members.size(); ++j) {
        const bool bit = family[members[j]].contains(cursor);
        if (bit) ++counts[j];
        all = all && bit;
      }
      if (all) ++joint;
      ++cursor;
    }
  };
  advance(n0);
  if (product_form) {
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (counts[j] == 0) {
        throw precondition_error("independence scan requires members below n0");
      }
    }
  }
  return scan_window(n0, horizon, lo, hi, [&](std::uint64_t n) {
    advance(n);
    if (product_form) {
      // d_n(⋂E) / ∏ d_n(E_i) = joint n^{k-1} / ∏ counts_i
      Int num(joint);
      Int den(1);
      for (std::size_t j = 0; j + 1 < members.size(); ++j) num *= Int(n);
      for (std::size_t j = 0; j < members.size(); ++j) den *= Int(counts[j]);
      return ratio_of(num, den);
    }
    // distance of d_n(⋂A) from the target power
    return Rat(ratio_of(Int(joint), Int(n)) - target);
  });
}

}  // namespace

FamilyIndependenceReport statistically_independent(const std::vector<Set>& family,
                                                   std::size_t cap, const Rat& tol,
                                                   std::uint64_t n0, std::uint64_t horizon) {
  check_scan_range(n0, horizon);
  if (tol <= 0) throw precondition_error("statistically_independent requires tol > 0");
  if (family.empty()) throw precondition_error("family must not be empty");
  if (cap == 0) throw precondition_error("subfamily cap must be >= 1");
  FamilyIndependenceReport report;
  for (const Set& member : family) {
    auto verdict = is_moderate(member, std::max<std::uint64_t>(n0, 2), horizon);
    if (verdict.exact && !verdict.moderate) {
      throw precondition_error("family member is exactly non-moderate");
    }
    if (!verdict.exact) report.moderacy_warning = true;
    report.moderacy.push_back(std::move(verdict));
  }
  for (auto& members : subfamilies_upto(family.size(), cap)) {
    SubfamilyVerdict sub;
    sub.verdict = subfamily_scan(family, members, Rat(1) - tol, Rat(1) + tol, true, Rat(0),
                                 n0, horizon);
    sub.members = std::move(members);
    report.all_hold =
        report.all_hold && sub.verdict.status == RelationStatus::HoldsAtHorizon;
    report.subfamilies.push_back(std::move(sub));
  }
  return report;
}

FamilyIndependenceReport rho_independent(const std::vector<Set>& family, const Rat& rho,
                                         std::size_t cap, const Rat& tol, std::uint64_t n0,
                                         std::uint64_t horizon) {
  check_scan_range(n0, horizon);
  if (rho <= 0 || rho > 1) throw precondition_error("rho_independent requires 0 < rho <= 1");
  if (tol <= 0) throw precondition_error("rho_independent requires tol > 0");
  if (family.empty()) throw precondition_error("family must not be empty");
  if (cap == 0) throw precondition_error("subfamily cap must be >= 1");
  FamilyIndependenceReport report;
  for (auto& members : subfamilies_upto(family.size(), cap)) {
    Rat target(1);
    for (std::size_t j = 0; j < members.size(); ++j) target *= rho;
    SubfamilyVerdict sub;
    // |d_n(⋂A) - rho^|A|| < tol, expressed as the signed distance in (-tol, tol).
    sub.verdict = subfamily_scan(family, members, Rat(-tol), tol, false, target, n0, horizon);
    sub.members = std::move(members);
    report.all_hold =
        report.all_hold && sub.verdict.status == RelationStatus::HoldsAtHorizon;
    report.subfamilies.push_back(std::move(sub));
  }
  return report;
}

}  // namespace halflab
