#include "halflab/constructions.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>
#include <utility>

#include "halflab/density.hpp"
#include "halflab/errors.hpp"
#include "halflab/mix64.hpp"

namespace halflab {

namespace {

std::vector<std::uint64_t> normalized(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// |v ∩ [0, n)| for sorted v.
std::uint64_t count_below_sorted(const std::vector<std::uint64_t>& v, std::uint64_t n) {
  return static_cast<std::uint64_t>(std::lower_bound(v.begin(), v.end(), n) - v.begin());
}

bool subset_sorted(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool disjoint_sorted(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  return both.empty();
}

std::vector<std::uint64_t> union_sorted(const std::vector<std::uint64_t>& a,
                                        const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::uint64_t factorial_u64(std::uint64_t n) {
  std::uint64_t f = 1;
  for (std::uint64_t k = 2; k <= n; ++k) f *= k;
  return f;
}

Rat uratio(std::uint64_t num, std::uint64_t den) { return ratio_of(Int(num), Int(den)); }

// k elements drawn without replacement from pool, returned sorted.
std::vector<std::uint64_t> sample_sorted(std::vector<std::uint64_t> pool, std::uint64_t k,
                                         SplitRng& rng) {
  for (std::uint64_t i = 0; i < k; ++i) {
    std::uint64_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

ChoppedReal factorial_chopped_real(const Set& s, std::uint64_t horizon) {
  if (s.size_class() == Set::SizeClass::Finite) {
    throw precondition_error("factorial_chopped_real: schema class of S is finite");
  }
  std::vector<std::uint64_t> bounds{0};
  if (horizon >= 2) {
    std::uint64_t fact = 1;
    for (std::uint64_t n = 1; n <= 20; ++n) {
      fact *= n;
      std::uint64_t elem;
      try {
        // Boundaries stay strictly below the horizon: scan budget horizon - 1.
        elem = s.kth_element(fact - 1, horizon - 1);
      } catch (const budget_exhausted&) {
        break;
      }
      bounds.push_back(elem + 1);
    }
  }
  if (bounds.size() < 2) {
    throw precondition_error("factorial_chopped_real: horizon too small for even one boundary");
  }
  return ChoppedReal{s, IntervalPartition::table(std::move(bounds))};
}

std::vector<FactorialGuaranteeEntry> factorial_guarantee(const ChoppedReal& real, const Set& y,
                                                         std::uint64_t horizon) {
  const auto matched = matches(y, real, horizon);
  std::vector<FactorialGuaranteeEntry> out;
  for (std::size_t k : matched) {
    if (k == 0) continue;
    const std::uint64_t end = real.partition.boundary(k + 1);
    FactorialGuaranteeEntry entry;
    entry.interval = k;
    entry.density = relative_density(y, real.bits, end).value;
    entry.bound = Rat(1) - uratio(1, k);
    entry.ok = entry.density > entry.bound;
    out.push_back(std::move(entry));
  }
  return out;
}

ChoppedReal nonM_witness(const Set& x, std::size_t depth) {
  if (x.size_class() == Set::SizeClass::Finite) {
    throw precondition_error("nonM_witness: schema class of X is finite");
  }
  if (2 * depth > 20) {
    throw budget_exhausted("nonM_witness: depth exceeds the 64-bit factorial range");
  }
  // f(n) = sum_{k=0}^{n} k!; boundary n+1 sits after the f(2n)-th member of X.
  std::vector<std::uint64_t> f(2 * depth + 1);
  std::uint64_t acc = 0;
  for (std::size_t n = 0; n < f.size(); ++n) {
    acc += factorial_u64(n);
    f[n] = acc;
  }
  const auto members = x.first_members(f.back());
  std::vector<std::uint64_t> bounds{0};
  for (std::size_t n = 0; n <= depth; ++n) bounds.push_back(members[f[2 * n] - 1] + 1);

  std::vector<std::uint64_t> skipped;
  for (std::size_t n = 1; n <= depth; ++n) {
    // I_n holds the members with ranks [f(2n-2), f(2n)), exactly
    // (2n-1)! + (2n)! of them; the first (2n-1)! are skipped.
    const std::uint64_t start = f[2 * n - 2];
    const std::uint64_t skip = factorial_u64(2 * n - 1);
    if (f[2 * n] - start != skip + factorial_u64(2 * n)) {
      throw invariant_error("nonM_witness: interval member count mismatch");
    }
    for (std::uint64_t i = 0; i < skip; ++i) skipped.push_back(members[start + i]);
  }
  Set s = Set::intersection_of(x, Set::complement(Set::finite(std::move(skipped))));
  return ChoppedReal{std::move(s), IntervalPartition::table(std::move(bounds))};
}

DominatorWitness bisect_witness_from_dominator(const Set& x, const std::vector<std::uint64_t>& g,
                                               std::uint64_t horizon) {
  if (g.empty() || g[0] == 0) {
    throw precondition_error("bisect_witness_from_dominator: g(0) must be positive");
  }
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    if (g[i + 1] <= g[i]) {
      throw precondition_error("bisect_witness_from_dominator: g must be strictly increasing");
    }
  }
  if (g[0] > horizon) {
    throw precondition_error("bisect_witness_from_dominator: horizon below the first boundary");
  }

  // Iterates of g from 0; iter[j] = g^(j)(0), so G(m) = iter[m + 1].
  std::vector<std::uint64_t> iter{0};
  const auto big_g_at = [&](std::uint64_t m) -> std::optional<std::uint64_t> {
    while (iter.size() <= m + 1) {
      const std::uint64_t v = iter.back();
      // Iterates are strictly increasing, so once one passes the horizon
      // G(m) does too.
      if (v > horizon) return std::nullopt;
      if (v >= g.size()) {
        throw budget_exhausted("bisect_witness_from_dominator: g table too short for horizon");
      }
      iter.push_back(g[v]);
    }
    const std::uint64_t val = iter[m + 1];
    if (val > horizon) return std::nullopt;
    return val;
  };

  DominatorWitness witness;
  witness.x = x;
  witness.g = g;
  witness.gamma = {0};
  std::uint64_t sum = 0;
  while (true) {
    const auto next = big_g_at(sum);
    if (!next) break;
    witness.gamma.push_back(*next);
    sum += *next;
  }
  witness.big_g.assign(iter.begin() + 1, iter.end());
  witness.y = Set::intervals(IntervalPartition::table(witness.gamma), BlockParity::Even);

  // Domination check g(n) > f_X(n) over the ranks visible below the horizon.
  std::uint64_t rank = 0;
  for (std::uint64_t v = 0; v <= horizon && rank < g.size(); ++v) {
    if (!x.contains(v)) continue;
    if (g[rank] <= v) witness.domination_failures.push_back(rank);
    ++rank;
  }
  return witness;
}

LemmaCheck lemma33_conclusion(const std::vector<std::uint64_t>& r_set,
                              const std::vector<std::uint64_t>& s_set,
                              const std::vector<std::uint64_t>& a_subset,
                              const std::vector<std::uint64_t>& b_subset, const Rat& eps,
                              const Rat& c) {
  const auto r = normalized(r_set);
  const auto s = normalized(s_set);
  const auto a = normalized(a_subset);
  const auto b = normalized(b_subset);

  LemmaCheck out;
  const auto vacuous = [&out](std::string why) {
    out.pre_ok = false;
    out.pre_violation = std::move(why);
    return out;
  };
  if (r.empty()) return vacuous("R is empty");
  if (!disjoint_sorted(r, s)) return vacuous("R and S intersect");
  if (!(c > 1)) return vacuous("c must exceed 1");
  if (c * Int(r.size()) != Int(s.size())) return vacuous("|S| differs from c * |R|");
  if (!(eps > 0)) return vacuous("eps must be positive");
  if (!subset_sorted(a, r)) return vacuous("A is not a subset of R");
  if (!subset_sorted(b, s)) return vacuous("B is not a subset of S");

  const Rat half(1, 2);
  const Rat b_ratio = uratio(b.size(), s.size());
  if (!in_open_interval(b_ratio, half - eps, half + eps)) {
    return vacuous("|B|/|S| outside the eps-window");
  }

  out.pre_ok = true;
  const Rat joint = uratio(a.size() + b.size(), r.size() + s.size());
  const Rat slack = eps + Rat(1) / c;
  out.conclusion = in_open_interval(joint, half - slack, half + slack);
  return out;
}

LemmaCheck lemma410_conclusion(const Set& r_set, const Set& s_set, const Rat& r, const Rat& eps,
                               std::uint64_t m, std::uint64_t n) {
  if (m == 0 || m >= n) throw precondition_error("lemma410_conclusion: need 0 < m < n");
  if (!(r > 0 && r < 1)) throw precondition_error("lemma410_conclusion: r must lie in (0, 1)");
  if (!(eps > 0)) throw precondition_error("lemma410_conclusion: eps must be positive");

  LemmaCheck out;
  const Rat lo = r - eps, hi = r + eps;
  const std::uint64_t cr = r_set.count_below(m);
  if (!in_open_interval(uratio(cr, m), lo, hi)) {
    out.pre_ok = false;
    out.pre_violation = "initial density of R at m outside the window";
    out.witness = m;
    return out;
  }
  std::uint64_t cs = s_set.count_below(m);
  for (std::uint64_t l = m;; ++l) {
    if (!in_open_interval(uratio(cs, l), lo, hi)) {
      out.pre_ok = false;
      out.pre_violation = "density of S outside the window";
      out.witness = l;
      return out;
    }
    if (l == n) break;
    cs += s_set.contains(l) ? 1 : 0;
  }

  out.pre_ok = true;
  out.conclusion = true;
  const Rat clo = r - 3 * eps, chi = r + 3 * eps;
  std::uint64_t spliced = 0;  // |S ∩ [m, l)|
  for (std::uint64_t l = m;; ++l) {
    if (!in_open_interval(uratio(cr + spliced, l), clo, chi)) {
      out.conclusion = false;
      out.witness = l;
      return out;
    }
    if (l == n) break;
    spliced += s_set.contains(l) ? 1 : 0;
  }
  return out;
}

Lemma33Instance make_lemma33_instance(std::uint64_t seed) {
  SplitRng rng(seed);
  Lemma33Instance inst;
  const std::uint64_t r_size = rng.between(1, 50);
  const std::uint64_t c_int = rng.between(2, 10);
  const std::uint64_t s_size = c_int * r_size;
  inst.c = Rat(Int(c_int));
  inst.r_set.resize(r_size);
  std::iota(inst.r_set.begin(), inst.r_set.end(), 0);
  inst.s_set.resize(s_size);
  std::iota(inst.s_set.begin(), inst.s_set.end(), r_size);
  for (std::uint64_t e : inst.r_set) {
    if (rng.coin()) inst.a_subset.push_back(e);
  }
  // eps = j/(2s) with j >= 2 leaves at least one count strictly inside the
  // window (s - j, s + j) for 2|B|.
  const std::uint64_t j = rng.between(2, s_size);
  inst.eps = uratio(j, 2 * s_size);
  const std::uint64_t b_min = (s_size - j) / 2 + 1;
  std::uint64_t b_max = (s_size + j + 1) / 2 - 1;
  if (b_max > s_size) b_max = s_size;
  const std::uint64_t b_count = rng.between(b_min, b_max);
  inst.b_subset = sample_sorted(inst.s_set, b_count, rng);
  return inst;
}

Lemma410Instance make_lemma410_instance(std::uint64_t seed) {
  SplitRng rng(seed);
  Lemma410Instance inst;
  inst.m = rng.between(4, 40);
  inst.n = inst.m + rng.between(1, 120);
  const std::uint64_t rden = rng.between(2, 12);
  inst.r = uratio(rng.between(1, rden - 1), rden);
  // eps >= 1/m keeps every window below wide enough for an exact count and
  // for the bit-by-bit extension step.
  inst.eps = uratio(rng.between(2, 10), 2 * inst.m);
  const Rat lo = inst.r - inst.eps, hi = inst.r + inst.eps;

  const auto pick_count = [&](std::uint64_t len) {
    Int cmin = floor_rat(lo * Int(len)) + 1;
    Int cmax = ceil_rat(hi * Int(len)) - 1;
    if (cmin < 0) cmin = 0;
    if (cmax > len) cmax = len;
    if (cmin > cmax) throw invariant_error("lemma410 instance: empty count window");
    return rng.between(cmin.convert_to<std::uint64_t>(), cmax.convert_to<std::uint64_t>());
  };
  std::vector<std::uint64_t> base(inst.m);
  std::iota(base.begin(), base.end(), 0);
  inst.r_set = Set::finite(sample_sorted(base, pick_count(inst.m), rng));

  std::uint64_t cs = pick_count(inst.m);
  std::vector<std::uint64_t> s_elems = sample_sorted(base, cs, rng);
  for (std::uint64_t pos = inst.m; pos < inst.n; ++pos) {
    const bool can_skip = in_open_interval(uratio(cs, pos + 1), lo, hi);
    const bool can_take = in_open_interval(uratio(cs + 1, pos + 1), lo, hi);
    if (!can_skip && !can_take) {
      throw invariant_error("lemma410 instance: extension step has no valid bit");
    }
    const bool take = (can_skip && can_take) ? rng.coin() : can_take;
    if (take) {
      s_elems.push_back(pos);
      ++cs;
    }
  }
  inst.s_set = Set::finite(std::move(s_elems));
  return inst;
}

namespace {

std::size_t parse_assignment_pairs(const std::string& key) {
  if (key.empty()) return 0;
  std::size_t pairs = 0, i = 0;
  std::uint64_t prev_id = 0;
  bool first = true;
  while (true) {
    const std::size_t start = i;
    while (i < key.size() && std::isdigit(static_cast<unsigned char>(key[i]))) ++i;
    if (i == start) throw parse_error("assignment key '" + key + "': expected an index");
    const std::uint64_t id = std::stoull(key.substr(start, i - start));
    if (!first && id <= prev_id) {
      throw parse_error("assignment key '" + key + "': indices must be strictly increasing");
    }
    prev_id = id;
    first = false;
    if (i >= key.size() || key[i] != ':') {
      throw parse_error("assignment key '" + key + "': expected ':'");
    }
    ++i;
    if (i >= key.size() || (key[i] != '0' && key[i] != '1')) {
      throw parse_error("assignment key '" + key + "': expected bit 0 or 1");
    }
    ++i;
    ++pairs;
    if (i == key.size()) break;
    if (key[i] != ',') throw parse_error("assignment key '" + key + "': expected ','");
    ++i;
  }
  return pairs;
}

bool within_open(std::uint64_t count, std::uint64_t scale, const Rat& target, const Rat& bound) {
  return rational_abs(ratio_of(Int(count), Int(scale)) - target) < bound;
}

std::string clause_detail(const char* side, std::uint64_t count, std::uint64_t scale,
                          const Rat& target, const Rat& bound) {
  std::ostringstream os;
  os << side << " count " << count << "/" << scale << " misses " << format_rational(target)
     << " by at least " << format_rational(bound);
  return os.str();
}

// Both trace sides (inside/outside z) against the target at a single scale.
RClauseResult eval_point(const std::vector<std::uint64_t>& trace,
                         const std::vector<std::uint64_t>& z, std::uint64_t scale,
                         const Rat& target, const Rat& bound) {
  std::vector<std::uint64_t> inter;
  std::set_intersection(trace.begin(), trace.end(), z.begin(), z.end(),
                        std::back_inserter(inter));
  const std::uint64_t cin = count_below_sorted(inter, scale);
  const std::uint64_t cout = count_below_sorted(trace, scale) - cin;
  RClauseResult res;
  res.witness = scale;
  if (!within_open(cin, scale, target, bound)) {
    res.pass = false;
    res.detail = clause_detail("inside", cin, scale, target, bound);
  } else if (!within_open(cout, scale, target, bound)) {
    res.pass = false;
    res.detail = clause_detail("outside", cout, scale, target, bound);
  } else {
    res.witness.reset();
  }
  return res;
}

// Both trace sides at every scale l in [lo, hi].
RClauseResult eval_range(const std::vector<std::uint64_t>& trace,
                         const std::vector<std::uint64_t>& z, std::uint64_t lo, std::uint64_t hi,
                         const Rat& target, const Rat& bound) {
  std::vector<char> in_z(trace.size());
  for (std::size_t i = 0, j = 0; i < trace.size(); ++i) {
    while (j < z.size() && z[j] < trace[i]) ++j;
    in_z[i] = j < z.size() && z[j] == trace[i];
  }
  std::uint64_t cb = count_below_sorted(trace, lo);
  std::uint64_t cbz = 0;
  for (std::size_t i = 0; i < cb; ++i) cbz += in_z[i] ? 1 : 0;

  RClauseResult res;
  std::size_t next = cb;
  for (std::uint64_t l = lo;; ++l) {
    if (!within_open(cbz, l, target, bound)) {
      res.pass = false;
      res.witness = l;
      res.detail = clause_detail("inside", cbz, l, target, bound);
      return res;
    }
    if (!within_open(cb - cbz, l, target, bound)) {
      res.pass = false;
      res.witness = l;
      res.detail = clause_detail("outside", cb - cbz, l, target, bound);
      return res;
    }
    if (l == hi) break;
    while (next < trace.size() && trace[next] == l) {
      ++cb;
      cbz += in_z[next] ? 1 : 0;
      ++next;
    }
  }
  return res;
}

}  // namespace

RConditionsReport r_conditions_check(
    const std::map<std::string, std::vector<std::uint64_t>>& bf_traces,
    const std::vector<std::uint64_t>& z_low, const std::vector<std::uint64_t>& z_high,
    unsigned k_low, unsigned k_high, const Rat& delta_low, const Rat& delta_high,
    const std::optional<std::vector<std::uint64_t>>& x_block) {
  if (k_low > k_high) throw precondition_error("r_conditions_check: k_low exceeds k_high");
  if (k_high >= 63) throw precondition_error("r_conditions_check: k_high overflows 64 bits");
  const std::uint64_t lo = std::uint64_t{1} << k_low;
  const std::uint64_t hi = std::uint64_t{1} << k_high;
  if (hi > kDefaultScanBudget) {
    throw budget_exhausted("r_conditions_check: 2^k_high exceeds the scan budget");
  }
  if (!(delta_low > 0) || !(delta_high > 0)) {
    throw precondition_error("r_conditions_check: deltas must be positive");
  }

  const auto bounded = [hi](const std::vector<std::uint64_t>& v, const char* what) {
    auto sorted = normalized(v);
    if (!sorted.empty() && sorted.back() >= hi) {
      throw precondition_error(std::string("r_conditions_check: ") + what +
                               " extends past 2^k_high");
    }
    return sorted;
  };
  const auto zl = bounded(z_low, "Z");
  const auto zh = bounded(z_high, "Z_next");

  std::vector<std::uint64_t> zl_check(zh.begin(),
                                      zh.begin() + static_cast<std::ptrdiff_t>(
                                                       count_below_sorted(zh, lo)));
  if (zl_check != zl) {
    throw precondition_error("r_conditions_check: Z_next disagrees with Z below 2^k_low");
  }

  const std::vector<std::uint64_t> zh_block(
      zh.begin() + static_cast<std::ptrdiff_t>(count_below_sorted(zh, lo)), zh.end());
  std::vector<std::uint64_t> block = zh_block;
  RConditionsReport report;
  report.r4.detail = "decided block defaulted to Z_next's block";
  if (x_block) {
    block = normalized(*x_block);
    if (!block.empty() && (block.front() < lo || block.back() >= hi)) {
      throw precondition_error(
          "r_conditions_check: decided block outside [2^k_low, 2^k_high)");
    }
    if (block == zh_block) {
      report.r4.detail = "Z_next's block equals the decided block";
    } else {
      report.r4.pass = false;
      std::vector<std::uint64_t> diff;
      std::set_symmetric_difference(block.begin(), block.end(), zh_block.begin(),
                                    zh_block.end(), std::back_inserter(diff));
      report.r4.witness = diff.front();
      report.r4.detail = "Z_next's block differs from the decided block";
    }
  }
  const auto x_dec = union_sorted(zl, block);

  report.all_pass = report.r4.pass;
  for (const auto& [key, raw_trace] : bf_traces) {
    const std::size_t dom = parse_assignment_pairs(key);
    const auto trace = bounded(raw_trace, "trace");
    const Rat target = pow2_inverse(dom + 1);
    RConditionsRow row;
    row.assignment = key;
    row.r1_low = eval_point(trace, zl, lo, target, delta_low / 3);
    row.r1_high = eval_point(trace, zh, hi, target, delta_high / 3);
    row.r2 = eval_range(trace, x_dec, lo, hi, target, delta_low / 3);
    row.r3 = eval_range(trace, zh, lo, hi, target, delta_low);
    report.all_pass = report.all_pass && row.r1_low.pass && row.r1_high.pass && row.r2.pass &&
                      row.r3.pass;
    report.rows.push_back(std::move(row));
  }
  return report;
}

Rat cohen_block_ratio_bound(std::uint64_t l_prev, std::uint64_t delta) {
  if (l_prev == 0) throw precondition_error("cohen_block_ratio_bound: L_prev must be >= 1");
  const Int l(l_prev), d(delta);
  return ratio_of(7 * l + d, 3 * (3 * l + d));
}

CohenWitness cohen_antisplit_witness(const BlockFamilyTrace& trace) {
  const std::size_t blocks = trace.boundaries.size();
  if (blocks == 0) throw precondition_error("cohen_antisplit_witness: empty trace");
  if (trace.ones.size() != blocks) {
    throw precondition_error("cohen_antisplit_witness: ones/boundaries length mismatch");
  }

  std::vector<std::uint64_t> xs, ys;
  std::vector<std::uint64_t> ones_count(blocks), zeros_count(blocks);
  std::uint64_t prev = 0;
  for (std::size_t k = 0; k < blocks; ++k) {
    const std::uint64_t end = trace.boundaries[k];
    if (end <= prev) {
      throw precondition_error("cohen_antisplit_witness: boundaries must increase");
    }
    const auto a = normalized(trace.ones[k]);
    if (!a.empty() && (a.front() < prev || a.back() >= end)) {
      throw precondition_error("cohen_antisplit_witness: block members outside the block");
    }
    const std::uint64_t len = end - prev;
    const std::uint64_t ones = a.size();
    const std::uint64_t zeros = len - ones;
    const std::uint64_t floor = k == 0 ? 1 : 3 * prev;
    if (k == 0 && len < 2) {
      throw precondition_error("cohen_antisplit_witness: block 0 needs length >= 2");
    }
    if (ones < floor || zeros < floor || (ones != floor && zeros != floor)) {
      throw precondition_error("cohen_antisplit_witness: block counts break the invariant");
    }
    ones_count[k] = ones;
    zeros_count[k] = zeros;
    std::size_t ai = 0;
    for (std::uint64_t v = prev; v < end; ++v) {
      if (ai < a.size() && a[ai] == v) {
        xs.push_back(v);
        ++ai;
      } else {
        ys.push_back(v);
      }
    }
    prev = end;
  }

  CohenWitness witness;
  witness.x = Set::finite(xs);
  witness.y = Set::finite(ys);
  const Rat seven_ninths(7, 9);
  std::uint64_t cx = ones_count[0], cy = zeros_count[0];
  for (std::size_t n = 1; n < blocks; ++n) {
    cx += ones_count[n];
    cy += zeros_count[n];
    CohenBoundRow row;
    row.block = n;
    row.l_prev = trace.boundaries[n - 1];
    row.l_cur = trace.boundaries[n];
    row.ones = ones_count[n];
    row.zeros = zeros_count[n];
    row.delta = row.ones + row.zeros - 6 * row.l_prev;
    const std::uint64_t cxy =
        count_below_sorted(xs, row.l_cur) + count_below_sorted(ys, row.l_cur) -
        count_below_sorted(union_sorted(xs, ys), row.l_cur);
    row.ratio = ratio_of(Int(cxy) * Int(row.l_cur), Int(cx) * Int(cy));
    row.chain_upper = ratio_of(Int(row.l_prev) * Int(row.l_cur), Int(row.zeros) * Int(row.ones));
    row.bound = cohen_block_ratio_bound(row.l_prev, row.delta);
    // The displayed chain: X∩Y below L_n fits inside [0, L_{n-1}), block n
    // contributes its ones to X and zeros to Y, and the assembled upper
    // bound collapses to the closed form.
    row.ok = cxy <= row.l_prev && cx >= row.ones && cy >= row.zeros &&
             row.ratio <= row.chain_upper && row.chain_upper == row.bound &&
             row.bound <= seven_ninths;
    witness.all_ok = witness.all_ok && row.ok;
    witness.rows.push_back(std::move(row));
  }
  return witness;
}

BlockFamilyTrace make_cohen_trace(std::uint64_t seed, std::size_t blocks) {
  if (blocks == 0) throw precondition_error("make_cohen_trace: need at least one block");
  if (blocks > 8) throw precondition_error("make_cohen_trace: more than 8 blocks is impractical");
  SplitRng rng(seed);
  BlockFamilyTrace trace;
  std::uint64_t prev = 0;
  for (std::size_t k = 0; k < blocks; ++k) {
    std::uint64_t len, ones;
    if (k == 0) {
      len = rng.between(2, 6);
      ones = rng.coin() ? 1 : len - 1;
    } else {
      const std::uint64_t base = 3 * prev;
      const std::uint64_t delta = rng.below(prev + 1);
      len = 2 * base + delta;
      ones = rng.coin() ? base : base + delta;
    }
    std::vector<std::uint64_t> pool(len);
    std::iota(pool.begin(), pool.end(), prev);
    trace.ones.push_back(sample_sorted(std::move(pool), ones, rng));
    trace.boundaries.push_back(prev + len);
    prev += len;
  }
  return trace;
}

}  // namespace halflab
