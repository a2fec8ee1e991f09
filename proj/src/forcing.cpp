#include "halflab/forcing.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstddef>
#include <iterator>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "halflab/errors.hpp"
#include "halflab/mix64.hpp"

namespace halflab {

namespace {

using nlohmann::json;

// Exact clause audits enumerate 3^|F| assignments and 2^|F| bit patterns.
constexpr std::size_t kMaxExactSupport = 12;
constexpr std::uint64_t kMaxExtendHorizon = std::uint64_t(1) << 24;

bool sorted_unique_u32(const std::vector<std::uint32_t>& ids) {
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (ids[i - 1] >= ids[i]) return false;
  }
  return true;
}

std::vector<std::uint32_t> normalized_ids(std::vector<std::uint32_t> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

bool block_bit(const std::vector<bool>& row, std::uint64_t i) {
  return i < row.size() && row[i];
}

std::vector<std::uint64_t> row_members(const std::vector<bool>& row) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i]) out.push_back(i);
  }
  return out;
}

std::string assignment_label(const PartialAssignment& f) {
  return f.empty() ? std::string("{}") : f.text();
}

// Dense table index of an assignment: sum over constrained slots j of
// (1 + bit_j) * 3^j, so every value in [0, 3^|F|) names one assignment.
struct Frame {
  std::vector<std::uint32_t> ids;
  std::vector<std::uint64_t> pow3;
  std::uint64_t table = 1;
};

Frame make_frame(const std::vector<std::uint32_t>& ids) {
  Frame frame;
  frame.ids = ids;
  frame.pow3.resize(ids.size());
  std::uint64_t p = 1;
  for (std::size_t j = 0; j < ids.size(); ++j) {
    frame.pow3[j] = p;
    p *= 3;
  }
  frame.table = p;
  return frame;
}

std::uint64_t trit_of(const Frame& frame, const PartialAssignment& f) {
  std::uint64_t idx = 0;
  for (const auto& pr : f.pairs()) {
    const auto it = std::lower_bound(frame.ids.begin(), frame.ids.end(), pr.first);
    idx += (pr.second ? 2u : 1u) * frame.pow3[static_cast<std::size_t>(it - frame.ids.begin())];
  }
  return idx;
}

// base3[mask] = sum over j in mask of 3^j; then the table index of the
// assignment with domain mask m and bit values b (subset of m) is
// base3[m] + base3[b].
std::vector<std::uint64_t> base3_table(const Frame& frame) {
  const std::uint64_t subsets = std::uint64_t(1) << frame.ids.size();
  std::vector<std::uint64_t> base3(subsets, 0);
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    base3[mask] = base3[mask & (mask - 1)] +
                  frame.pow3[static_cast<std::size_t>(std::countr_zero(mask))];
  }
  return base3;
}

struct EpsRow {
  PartialAssignment f;
  std::uint64_t scale = 1;  // 2^{|dom f|}
  bool fast = false;
  std::uint64_t num64 = 0;
  std::uint64_t den64 = 0;
  Int num;
  Int den;
};

std::vector<EpsRow> budget_rows(const Frame& frame,
                                const std::map<PartialAssignment, Rat>& budgets,
                                std::uint64_t max_i) {
  std::vector<EpsRow> rows(frame.table);
  constexpr std::uint64_t kFastLimit = std::uint64_t(1) << 31;
  for (const auto& [f, eps] : budgets) {
    EpsRow row;
    row.f = f;
    row.scale = std::uint64_t(1) << f.size();
    row.num = numerator(eps);
    row.den = denominator(eps);
    row.fast = row.num > 0 && row.num < kFastLimit && row.den < kFastLimit &&
               max_i < (std::uint64_t(1) << 32) && f.size() <= 16;
    if (row.fast) {
      row.num64 = row.num.convert_to<std::uint64_t>();
      row.den64 = row.den.convert_to<std::uint64_t>();
    }
    rows[trit_of(frame, f)] = std::move(row);
  }
  return rows;
}

// Violation of | count/i - 1/scale | < eps on the side count/i > 1/scale.
bool upper_violates(const EpsRow& r, std::uint64_t count, std::uint64_t i) {
  if (r.fast) {
    const unsigned __int128 ck = static_cast<unsigned __int128>(count) * r.scale;
    if (ck <= i) return false;
    return (ck - i) * r.den64 >=
           static_cast<unsigned __int128>(i) * r.scale * r.num64;
  }
  const Int ck = Int(count) * Int(r.scale);
  if (ck <= Int(i)) return false;
  return (ck - Int(i)) * r.den >= Int(i) * Int(r.scale) * r.num;
}

// Violation on the side count/i < 1/scale.
bool lower_violates(const EpsRow& r, std::uint64_t count, std::uint64_t i) {
  if (r.fast) {
    const unsigned __int128 ck = static_cast<unsigned __int128>(count) * r.scale;
    if (ck >= i) return false;
    return (i - ck) * r.den64 >=
           static_cast<unsigned __int128>(i) * r.scale * r.num64;
  }
  const Int ck = Int(count) * Int(r.scale);
  if (ck >= Int(i)) return false;
  return (Int(i) - ck) * r.den >= Int(i) * Int(r.scale) * r.num;
}

std::vector<std::vector<std::uint64_t>> packed_blocks(
    const Condition& cond, const std::vector<std::uint32_t>& ids, std::uint64_t limit) {
  std::vector<std::vector<std::uint64_t>> words(ids.size());
  const std::size_t word_count = static_cast<std::size_t>((limit + 63) / 64);
  for (std::size_t j = 0; j < ids.size(); ++j) {
    words[j].assign(word_count, 0);
    const std::vector<bool>& row = cond.blocks.at(ids[j]);
    const std::uint64_t lim = std::min<std::uint64_t>(row.size(), limit);
    for (std::uint64_t i = 0; i < lim; ++i) {
      if (row[i]) words[j][static_cast<std::size_t>(i >> 6)] |= std::uint64_t(1) << (i & 63);
    }
  }
  return words;
}

struct SweepViolation {
  PartialAssignment f;
  std::uint64_t at = 0;
  std::uint64_t count = 0;
};

// Checks | |b_f cap [0,i)| / i - 2^{-|dom f|} | < eps(f) for every i in
// [lo, hi] and every assignment over the frame. The error is monotone within
// a constant-count run: the high side is worst at the run start, the low side
// at the run end, so only run boundaries are tested and a failing run is
// rescanned for its first bad index.
std::optional<SweepViolation> sweep_window(const Condition& cond, const Frame& frame,
                                           const std::vector<EpsRow>& rows,
                                           std::uint64_t lo, std::uint64_t hi) {
  const std::size_t d = frame.ids.size();
  const std::uint64_t subsets = std::uint64_t(1) << d;
  const std::vector<std::uint64_t> base3 = base3_table(frame);
  const auto words = packed_blocks(cond, frame.ids, hi);
  const auto pattern_at = [&](std::uint64_t i) {
    std::uint64_t pat = 0;
    for (std::size_t j = 0; j < d; ++j) {
      pat |= ((words[j][static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1u) << j;
    }
    return pat;
  };

  std::vector<std::uint64_t> count(frame.table, 0);
  std::vector<std::uint64_t> run_start(frame.table, lo);
  for (std::uint64_t i = 0; i < lo; ++i) {
    const std::uint64_t pat = pattern_at(i);
    for (std::uint64_t s = 0; s < subsets; ++s) ++count[base3[s] + base3[s & pat]];
  }
  for (std::uint64_t t = 0; t < frame.table; ++t) {
    if (upper_violates(rows[t], count[t], lo)) return SweepViolation{rows[t].f, lo, count[t]};
  }
  const auto first_low = [&](std::uint64_t t, std::uint64_t bound) {
    std::uint64_t at = run_start[t];
    while (at < bound && !lower_violates(rows[t], count[t], at)) ++at;
    return SweepViolation{rows[t].f, at, count[t]};
  };
  for (std::uint64_t i = lo; i < hi; ++i) {
    const std::uint64_t pat = pattern_at(i);
    for (std::uint64_t s = 0; s < subsets; ++s) {
      const std::uint64_t t = base3[s] + base3[s & pat];
      if (lower_violates(rows[t], count[t], i)) return first_low(t, i);
      ++count[t];
      run_start[t] = i + 1;
      if (upper_violates(rows[t], count[t], i + 1)) {
        return SweepViolation{rows[t].f, i + 1, count[t]};
      }
    }
  }
  for (std::uint64_t t = 0; t < frame.table; ++t) {
    if (lower_violates(rows[t], count[t], hi)) return first_low(t, hi);
  }
  return std::nullopt;
}

void require_valid(const Condition& p, const std::string& who) {
  const std::vector<ClauseViolation> bad = validate(p);
  if (!bad.empty()) {
    throw precondition_error(who + " is not a valid condition: " + bad.front().clause +
                             ", " + bad.front().detail);
  }
}

std::string u64_text(std::uint64_t v) { return std::to_string(v); }

}  // namespace

PartialAssignment PartialAssignment::from_pairs(
    std::vector<std::pair<std::uint32_t, bool>> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i - 1].first == pairs[i].first) {
      throw precondition_error("assignment repeats id " + std::to_string(pairs[i].first));
    }
  }
  PartialAssignment out;
  out.pairs_ = std::move(pairs);
  return out;
}

PartialAssignment PartialAssignment::parse(const std::string& text) {
  PartialAssignment out;
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t colon = text.find(':', pos);
    if (colon == std::string::npos || colon == pos) {
      throw parse_error("assignment '" + text + "': expected id:bit");
    }
    std::uint64_t id = 0;
    const char* begin = text.data() + pos;
    const char* end = text.data() + colon;
    const auto res = std::from_chars(begin, end, id);
    if (res.ec != std::errc() || res.ptr != end || id > 0xFFFFFFFFull) {
      throw parse_error("assignment '" + text + "': bad id");
    }
    if (colon + 1 >= text.size() || (text[colon + 1] != '0' && text[colon + 1] != '1')) {
      throw parse_error("assignment '" + text + "': bit must be 0 or 1");
    }
    if (!out.pairs_.empty() && out.pairs_.back().first >= id) {
      throw parse_error("assignment '" + text + "': ids must be strictly increasing");
    }
    out.pairs_.emplace_back(static_cast<std::uint32_t>(id), text[colon + 1] == '1');
    pos = colon + 2;
    if (pos == text.size()) break;
    if (text[pos] != ',') throw parse_error("assignment '" + text + "': expected ','");
    ++pos;
    if (pos == text.size()) throw parse_error("assignment '" + text + "': trailing comma");
  }
  return out;
}

std::string PartialAssignment::text() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (i > 0) out << ',';
    out << pairs_[i].first << ':' << (pairs_[i].second ? '1' : '0');
  }
  return out.str();
}

std::optional<bool> PartialAssignment::at(std::uint32_t id) const {
  const auto it = std::lower_bound(
      pairs_.begin(), pairs_.end(), id,
      [](const auto& pr, std::uint32_t v) { return pr.first < v; });
  if (it == pairs_.end() || it->first != id) return std::nullopt;
  return it->second;
}

bool PartialAssignment::domain_subset_of(const std::vector<std::uint32_t>& ids) const {
  for (const auto& pr : pairs_) {
    if (!std::binary_search(ids.begin(), ids.end(), pr.first)) return false;
  }
  return true;
}

PartialAssignment PartialAssignment::restricted(
    const std::vector<std::uint32_t>& ids) const {
  PartialAssignment out;
  for (const auto& pr : pairs_) {
    if (std::binary_search(ids.begin(), ids.end(), pr.first)) out.pairs_.push_back(pr);
  }
  return out;
}

PartialAssignment PartialAssignment::extended(std::uint32_t id, bool bit) const {
  std::vector<std::pair<std::uint32_t, bool>> pairs = pairs_;
  pairs.emplace_back(id, bit);
  return from_pairs(std::move(pairs));
}

bool operator==(const Condition& a, const Condition& b) {
  if (a.support != b.support || a.horizon != b.horizon || a.budgets != b.budgets) {
    return false;
  }
  if (a.blocks.size() != b.blocks.size()) return false;
  auto ita = a.blocks.begin();
  auto itb = b.blocks.begin();
  for (; ita != a.blocks.end(); ++ita, ++itb) {
    if (ita->first != itb->first) return false;
    if (row_members(ita->second) != row_members(itb->second)) return false;
  }
  return true;
}

std::vector<PartialAssignment> assignments_over(const std::vector<std::uint32_t>& support) {
  if (!sorted_unique_u32(support)) {
    throw precondition_error("support must be strictly increasing");
  }
  if (support.size() > kMaxExactSupport) {
    throw budget_exhausted("support too large for an exact audit");
  }
  std::vector<PartialAssignment> out;
  std::vector<std::pair<std::uint32_t, bool>> current;
  const auto rec = [&](const auto& self, std::size_t j) -> void {
    if (j == support.size()) {
      out.push_back(PartialAssignment::from_pairs(current));
      return;
    }
    self(self, j + 1);
    current.emplace_back(support[j], false);
    self(self, j + 1);
    current.back().second = true;
    self(self, j + 1);
    current.pop_back();
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ClauseViolation> validate(const Condition& p) {
  if (p.horizon == 0) throw precondition_error("condition horizon must be positive");
  if (!sorted_unique_u32(p.support)) {
    throw precondition_error("condition support must be strictly increasing");
  }
  if (p.support.size() > kMaxExactSupport) {
    throw budget_exhausted("support too large for an exact audit");
  }
  {
    std::vector<std::uint32_t> keys;
    keys.reserve(p.blocks.size());
    for (const auto& [id, row] : p.blocks) keys.push_back(id);
    if (keys != p.support) {
      throw precondition_error("blocks must be keyed exactly by the support");
    }
  }
  const std::vector<PartialAssignment> all = assignments_over(p.support);
  {
    if (p.budgets.size() != all.size()) {
      throw precondition_error("budgets must cover exactly the assignments over the support");
    }
    std::size_t k = 0;
    for (const auto& [f, eps] : p.budgets) {
      if (!(f == all[k])) {
        throw precondition_error("budgets must cover exactly the assignments over the support");
      }
      ++k;
    }
  }

  std::vector<ClauseViolation> out;

  // (C3): every block stays below the horizon.
  for (const auto& [id, row] : p.blocks) {
    bool hit = false;
    for (std::size_t i = p.horizon; i < row.size() && !hit; ++i) {
      if (row[i]) {
        out.push_back({"C3", "a_" + std::to_string(id) + " contains " + u64_text(i) +
                                 " at or past the horizon " + u64_text(p.horizon)});
        hit = true;
      }
    }
    if (hit) break;
  }

  // (C4): positive budgets, monotone under assignment extension.
  {
    bool reported = false;
    for (const auto& [f, eps] : p.budgets) {
      if (eps <= 0) {
        out.push_back({"C4", "budget for " + assignment_label(f) + " is not positive"});
        reported = true;
        break;
      }
    }
    for (auto it = p.budgets.begin(); !reported && it != p.budgets.end(); ++it) {
      const auto& pairs = it->first.pairs();
      for (std::size_t k = 0; k < pairs.size() && !reported; ++k) {
        std::vector<std::pair<std::uint32_t, bool>> sub = pairs;
        sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(k));
        const PartialAssignment parent = PartialAssignment::from_pairs(std::move(sub));
        if (p.budgets.at(parent) > it->second) {
          out.push_back({"C4", "budget for " + assignment_label(parent) + " exceeds " +
                                   assignment_label(it->first)});
          reported = true;
        }
      }
    }
  }

  // (C5): every trace density sits within eps(f)/8 of 2^{-|dom f|}.
  {
    const std::size_t d = p.support.size();
    const std::uint64_t subsets = std::uint64_t(1) << d;
    const Frame frame = make_frame(p.support);
    const std::vector<std::uint64_t> base3 = base3_table(frame);
    const auto words = packed_blocks(p, p.support, p.horizon);
    std::vector<std::uint64_t> hist(subsets, 0);
    for (std::uint64_t i = 0; i < p.horizon; ++i) {
      std::uint64_t pat = 0;
      for (std::size_t j = 0; j < d; ++j) {
        pat |= ((words[j][static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1u) << j;
      }
      ++hist[pat];
    }
    std::vector<const Rat*> eps_at(frame.table, nullptr);
    std::vector<const PartialAssignment*> f_at(frame.table, nullptr);
    for (const auto& [f, eps] : p.budgets) {
      const std::uint64_t t = trit_of(frame, f);
      eps_at[t] = &eps;
      f_at[t] = &f;
    }
    bool reported = false;
    const Int n_int(p.horizon);
    for (std::uint64_t m = 0; m < subsets && !reported; ++m) {
      const std::uint64_t free = (subsets - 1) ^ m;
      std::uint64_t b = m;
      while (true) {
        std::uint64_t c = 0;
        std::uint64_t sub = free;
        while (true) {
          c += hist[b | sub];
          if (sub == 0) break;
          sub = (sub - 1) & free;
        }
        const std::uint64_t scale = std::uint64_t(1) << std::popcount(m);
        const std::uint64_t t = base3[m] + base3[b];
        const Rat& eps = *eps_at[t];
        Int gap = Int(c) * Int(scale) - n_int;
        if (gap < 0) gap = -gap;
        if (gap * 8 * denominator(eps) >= numerator(eps) * n_int * Int(scale)) {
          out.push_back({"C5", "assignment " + assignment_label(*f_at[t]) + " has count " +
                                   u64_text(c) + " at horizon " + u64_text(p.horizon)});
          reported = true;
          break;
        }
        if (b == 0) break;
        b = (b - 1) & m;
      }
    }
  }

  // (C6): 2^{2|F|}/n < eps(empty)/8.
  {
    const Rat& root = p.budgets.begin()->second;
    const Int lhs = Int(8) * (Int(1) << (2 * p.support.size())) * denominator(root);
    if (!(lhs < numerator(root) * Int(p.horizon))) {
      out.push_back({"C6", "horizon " + u64_text(p.horizon) +
                               " too small for the root budget " + format_rational(root)});
    }
  }
  return out;
}

LeqOutcome leq(const Condition& q, const Condition& p) {
  require_valid(q, "leq: lower argument");
  require_valid(p, "leq: upper argument");
  if (!std::includes(q.support.begin(), q.support.end(), p.support.begin(),
                     p.support.end())) {
    return {false, "D1", "support does not grow"};
  }
  if (q.horizon < p.horizon) {
    return {false, "D2", "horizon shrinks from " + u64_text(p.horizon) + " to " +
                             u64_text(q.horizon)};
  }
  for (const std::uint32_t id : p.support) {
    const std::vector<bool>& rp = p.blocks.at(id);
    const std::vector<bool>& rq = q.blocks.at(id);
    for (std::uint64_t i = 0; i < p.horizon; ++i) {
      if (block_bit(rp, i) != block_bit(rq, i)) {
        return {false, "D3", "a_" + std::to_string(id) + " changes below the old horizon at " +
                                 u64_text(i)};
      }
    }
  }
  for (const auto& [f, eps] : p.budgets) {
    if (q.budgets.at(f) > eps) {
      return {false, "D4", "budget for " + assignment_label(f) + " grows"};
    }
  }
  const Frame frame = make_frame(p.support);
  const std::vector<EpsRow> rows = budget_rows(frame, p.budgets, q.horizon);
  if (const auto v = sweep_window(q, frame, rows, p.horizon, q.horizon)) {
    return {false, "D5", "density of " + assignment_label(v->f) + " leaves the window at i=" +
                             u64_text(v->at) + " with count " + u64_text(v->count)};
  }
  return {true, "", ""};
}

Condition restrict_to(const Condition& p, const std::vector<std::uint32_t>& keep) {
  require_valid(p, "restrict: argument");
  const std::vector<std::uint32_t> ks = normalized_ids(keep);
  Condition out;
  out.horizon = p.horizon;
  std::set_intersection(p.support.begin(), p.support.end(), ks.begin(), ks.end(),
                        std::back_inserter(out.support));
  for (const std::uint32_t id : out.support) out.blocks.emplace(id, p.blocks.at(id));
  for (const auto& [f, eps] : p.budgets) {
    if (f.domain_subset_of(out.support)) out.budgets.emplace(f, eps);
  }
  return out;
}

Condition extend(const Condition& p, const std::vector<std::uint32_t>& extension_set,
                 const Condition& q_prime, std::uint64_t m,
                 const std::map<PartialAssignment, Rat>& eps_target) {
  require_valid(p, "extend: base condition");
  require_valid(q_prime, "extend: side condition");
  const std::vector<std::uint32_t> ext = normalized_ids(extension_set);
  if (!std::includes(ext.begin(), ext.end(), q_prime.support.begin(),
                     q_prime.support.end())) {
    throw precondition_error("extend: side support must stay inside the extension set");
  }
  const Condition pr = restrict_to(p, ext);
  {
    const LeqOutcome le = leq(q_prime, pr);
    if (!le.ok) {
      throw precondition_error("extend: side condition does not refine the restriction: " +
                               le.clause + ", " + le.detail);
    }
  }
  const std::vector<PartialAssignment> base_all = assignments_over(p.support);
  if (eps_target.size() != base_all.size()) {
    throw precondition_error("extend: eps target must cover exactly the assignments over the base support");
  }
  {
    std::size_t k = 0;
    for (const auto& [f, eps] : eps_target) {
      if (!(f == base_all[k])) {
        throw precondition_error("extend: eps target must cover exactly the assignments over the base support");
      }
      ++k;
    }
  }
  for (const auto& [f, eps] : eps_target) {
    if (eps <= 0 || eps > 16) {
      throw precondition_error("extend: eps target for " + assignment_label(f) +
                               " must lie in (0, 16]");
    }
    if (eps > p.budgets.at(f)) {
      throw precondition_error("extend: eps target for " + assignment_label(f) +
                               " exceeds the base budget");
    }
    const auto& pairs = f.pairs();
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      std::vector<std::pair<std::uint32_t, bool>> sub = pairs;
      sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(k));
      if (eps_target.at(PartialAssignment::from_pairs(std::move(sub))) > eps) {
        throw precondition_error("extend: eps target must be monotone");
      }
    }
  }
  for (const auto& [f, eps] : q_prime.budgets) {
    if (eps > 16) {
      throw precondition_error("extend: side budgets above 16 break the stitched monotonicity");
    }
  }

  Condition q;
  std::set_union(p.support.begin(), p.support.end(), q_prime.support.begin(),
                 q_prime.support.end(), std::back_inserter(q.support));
  const std::size_t d = q.support.size();
  if (d > kMaxExactSupport) {
    throw budget_exhausted("extend: merged support too large for an exact audit");
  }

  // Budget table stitched from the target, the side condition, and fresh 16s.
  for (const PartialAssignment& f : assignments_over(q.support)) {
    Rat eps;
    if (f.domain_subset_of(pr.support)) {
      eps = std::min(eps_target.at(f), q_prime.budgets.at(f));
    } else if (f.domain_subset_of(p.support)) {
      eps = eps_target.at(f);
    } else if (f.domain_subset_of(q_prime.support)) {
      eps = q_prime.budgets.at(f);
    } else {
      eps = 16;
    }
    q.budgets.emplace(f, eps);
  }

  // Smallest horizon n with n >= max(m, n^{q'}), n - n^{q'} divisible by
  // 2^|F|, and max(n^{q'}, 4^|F|) / n < eps(empty)/8.
  const Rat& root = q.budgets.at(PartialAssignment{});
  const std::uint64_t period = std::uint64_t(1) << d;
  const std::uint64_t base_n = q_prime.horizon;
  const std::uint64_t pow4 = std::uint64_t(1) << (2 * d);
  Int target_i = Int(8) * Int(std::max(base_n, pow4)) * denominator(root) / numerator(root) + 1;
  if (target_i < Int(std::max(m, base_n))) target_i = Int(std::max(m, base_n));
  if (target_i > Int(kMaxExtendHorizon)) {
    throw budget_exhausted("extend: required horizon exceeds the audit budget");
  }
  const std::uint64_t target = target_i.convert_to<std::uint64_t>();
  const std::uint64_t steps = target > base_n ? (target - base_n + period - 1) / period : 0;
  q.horizon = base_n + steps * period;

  for (const std::uint32_t id : q.support) {
    std::vector<bool> row(q.horizon, false);
    const bool from_side = std::binary_search(q_prime.support.begin(),
                                              q_prime.support.end(), id);
    const std::vector<bool>& src = from_side ? q_prime.blocks.at(id) : p.blocks.at(id);
    const std::uint64_t lim = std::min<std::uint64_t>(src.size(), q.horizon);
    for (std::uint64_t i = 0; i < lim; ++i) row[i] = src[i];
    q.blocks.emplace(id, std::move(row));
  }

  // First stage, [n^p, n^{q'}): walk the side condition's total patterns over
  // the restricted support and give the j-th member of each pattern class to
  // a fresh index alpha_l exactly when bit l of j is 0.
  std::vector<std::uint32_t> fresh;
  std::set_difference(p.support.begin(), p.support.end(), ext.begin(), ext.end(),
                      std::back_inserter(fresh));
  if (!fresh.empty() && base_n > p.horizon) {
    const std::size_t dpp = pr.support.size();
    std::vector<const std::vector<bool>*> side_rows(dpp);
    for (std::size_t j = 0; j < dpp; ++j) side_rows[j] = &q_prime.blocks.at(pr.support[j]);
    std::vector<std::vector<bool>*> fresh_rows(fresh.size());
    for (std::size_t l = 0; l < fresh.size(); ++l) fresh_rows[l] = &q.blocks.at(fresh[l]);
    std::vector<std::uint64_t> ordinal(std::uint64_t(1) << dpp, 0);
    for (std::uint64_t i = p.horizon; i < base_n; ++i) {
      std::uint64_t pat = 0;
      for (std::size_t j = 0; j < dpp; ++j) {
        if (block_bit(*side_rows[j], i)) pat |= std::uint64_t(1) << j;
      }
      const std::uint64_t j = ordinal[pat]++;
      for (std::size_t l = 0; l < fresh.size(); ++l) (*fresh_rows[l])[i] = ((j >> l) & 1u) == 0;
    }
  }

  // Second stage, [n^{q'}, n): strict 2^{l+1}-periodic filling. Slot order is
  // the restricted support, then interleaved pairs from the two fresh sides,
  // then whatever remains, each part ascending.
  {
    std::vector<std::uint32_t> order = pr.support;
    std::vector<std::uint32_t> right;
    std::set_difference(q_prime.support.begin(), q_prime.support.end(),
                        pr.support.begin(), pr.support.end(), std::back_inserter(right));
    const std::size_t lt = std::min(fresh.size(), right.size());
    for (std::size_t l = 0; l < lt; ++l) {
      order.push_back(fresh[l]);
      order.push_back(right[l]);
    }
    for (std::size_t l = lt; l < fresh.size(); ++l) order.push_back(fresh[l]);
    for (std::size_t l = lt; l < right.size(); ++l) order.push_back(right[l]);
    for (std::size_t l = 0; l < order.size(); ++l) {
      std::vector<bool>& row = q.blocks.at(order[l]);
      for (std::uint64_t i = base_n; i < q.horizon; ++i) {
        row[i] = (((i - base_n) >> l) & 1u) == 0;
      }
    }
  }

  if (const auto bad = validate(q); !bad.empty()) {
    throw invariant_error("extend produced an invalid condition: " + bad.front().clause +
                          ", " + bad.front().detail);
  }
  if (const LeqOutcome le = leq(q, p); !le.ok) {
    throw invariant_error("extend lost the base refinement: " + le.clause + ", " + le.detail);
  }
  if (const LeqOutcome le = leq(q, q_prime); !le.ok) {
    throw invariant_error("extend lost the side refinement: " + le.clause + ", " + le.detail);
  }
  return q;
}

Condition amalgamate(const Condition& p, const Condition& q) {
  require_valid(p, "amalgamate: first argument");
  require_valid(q, "amalgamate: second argument");
  if (p.horizon != q.horizon) {
    throw precondition_error("amalgamate: horizons differ");
  }
  std::vector<std::uint32_t> shared;
  std::set_intersection(p.support.begin(), p.support.end(), q.support.begin(),
                        q.support.end(), std::back_inserter(shared));
  for (const std::uint32_t id : shared) {
    if (row_members(p.blocks.at(id)) != row_members(q.blocks.at(id))) {
      throw precondition_error("amalgamate: blocks differ on shared index " + std::to_string(id));
    }
  }
  for (const auto& [f, eps] : p.budgets) {
    if (!f.domain_subset_of(shared)) continue;
    if (q.budgets.at(f) != eps) {
      throw precondition_error("amalgamate: budgets differ on " + assignment_label(f));
    }
  }
  return extend(p, q.support, q, p.horizon, p.budgets);
}

Condition trivial_condition() { return trivial_condition(1, Rat(16)); }

Condition trivial_condition(std::uint64_t horizon, const Rat& eps0) {
  Condition out;
  out.horizon = horizon;
  out.budgets.emplace(PartialAssignment{}, eps0);
  if (const auto bad = validate(out); !bad.empty()) {
    throw precondition_error("trivial condition rejected: " + bad.front().clause + ", " +
                             bad.front().detail);
  }
  return out;
}

BooleanTrace boolean_trace(const Condition& p, const PartialAssignment& f) {
  if (!f.domain_subset_of(p.support)) {
    throw precondition_error("trace assignment mentions an index outside the support");
  }
  BooleanTrace out;
  out.assignment = f;
  for (std::uint64_t i = 0; i < p.horizon; ++i) {
    bool match = true;
    for (const auto& pr : f.pairs()) {
      if (block_bit(p.blocks.at(pr.first), i) != pr.second) {
        match = false;
        break;
      }
    }
    if (match) out.members.push_back(i);
  }
  return out;
}

GenericRunReport generic_run(std::uint64_t index_count, std::uint64_t rounds,
                             std::uint64_t min_horizon, std::uint64_t seed,
                             std::size_t dom_cap) {
  if (index_count == 0) throw precondition_error("generic run needs at least one index");
  if (index_count > 8) throw precondition_error("generic run handles at most 8 indices");
  if (min_horizon == 0) throw precondition_error("generic run needs a positive horizon goal");

  GenericRunReport report;
  Condition p = trivial_condition();
  const Rat floor_eps(1, 4);
  std::uint32_t next_index = 0;

  for (std::uint64_t round = 0; round < rounds; ++round) {
    std::ostringstream action;
    if (next_index < index_count) {
      const std::uint32_t alpha = next_index;
      const Rat root = p.budgets.at(PartialAssignment{});
      // Side condition: one fresh index over an even horizon with an exactly
      // balanced seeded block, so its own density errors vanish.
      const Int lower = Int(32) * denominator(root) / numerator(root) + 1;
      if (lower > Int(kMaxExtendHorizon)) {
        throw budget_exhausted("generic run: side horizon exceeds the audit budget");
      }
      std::uint64_t side_n = std::max<std::uint64_t>(
          {p.horizon, 4, lower.convert_to<std::uint64_t>()});
      if (side_n % 2 == 1) ++side_n;
      std::vector<bool> row(side_n, false);
      std::uint64_t ones = 0;
      const std::uint64_t round_seed = derive_seed(seed, round);
      for (std::uint64_t i = 0; i < side_n; ++i) {
        const bool bit = seeded_bit(round_seed, i);
        row[i] = bit;
        if (bit) ++ones;
      }
      for (std::uint64_t i = side_n; i-- > 0 && ones > side_n / 2;) {
        if (row[i]) {
          row[i] = false;
          --ones;
        }
      }
      for (std::uint64_t i = side_n; i-- > 0 && ones < side_n / 2;) {
        if (!row[i]) {
          row[i] = true;
          ++ones;
        }
      }
      Condition side;
      side.support = {alpha};
      side.horizon = side_n;
      side.blocks.emplace(alpha, std::move(row));
      side.budgets.emplace(PartialAssignment{}, root);
      side.budgets.emplace(PartialAssignment::from_pairs({{alpha, false}}), Rat(16));
      side.budgets.emplace(PartialAssignment::from_pairs({{alpha, true}}), Rat(16));
      p = extend(p, {alpha}, side, side_n, p.budgets);
      ++next_index;
      action << "add-index " << alpha;
    } else if (p.horizon < min_horizon) {
      const Condition side = trivial_condition(p.horizon, p.budgets.at(PartialAssignment{}));
      p = extend(p, {}, side, p.horizon * 2, p.budgets);
      action << "push-horizon";
    } else {
      const Rat root = p.budgets.at(PartialAssignment{});
      if (root <= floor_eps) {
        action << "hold";
      } else {
        std::map<PartialAssignment, Rat> shrunk;
        for (const auto& [f, eps] : p.budgets) {
          shrunk.emplace(f, eps <= floor_eps ? eps : std::max(floor_eps, Rat(eps / 2)));
        }
        const Condition side = trivial_condition(p.horizon, shrunk.at(PartialAssignment{}));
        p = extend(p, {}, side, p.horizon, shrunk);
        action << "shrink-budgets";
      }
    }
    report.rounds.push_back({round, action.str(), p.support.size(), p.horizon,
                             p.budgets.at(PartialAssignment{})});
  }
  if (next_index < index_count) {
    throw budget_exhausted("generic run: rounds exhausted before every index joined");
  }
  if (p.horizon < min_horizon) {
    throw budget_exhausted("generic run: rounds exhausted before the horizon goal");
  }

  report.final_condition = p;
  for (const PartialAssignment& f : assignments_over(p.support)) {
    if (f.size() > dom_cap) continue;
    const BooleanTrace trace = boolean_trace(p, f);
    GenericRunRow row;
    row.assignment = f.text();
    row.count = trace.members.size();
    row.density = ratio_of(Int(row.count), Int(p.horizon));
    row.target = pow2_inverse(f.size());
    row.error = rational_abs(row.density - row.target);
    row.bound = p.budgets.at(f) / 8;
    row.ok = row.error < row.bound;
    report.all_ok = report.all_ok && row.ok;
    report.rows.push_back(std::move(row));
  }
  report.final_condition = std::move(p);
  return report;
}

std::string condition_to_json_text(const Condition& p, int indent) {
  json j;
  j["F"] = p.support;
  j["n"] = p.horizon;
  json blocks = json::object();
  for (const auto& [id, row] : p.blocks) {
    blocks[std::to_string(id)] = row_members(row);
  }
  j["a"] = blocks;
  json eps = json::array();
  for (const auto& [f, value] : p.budgets) {
    eps.push_back(json::array({f.text(), format_rational(value)}));
  }
  j["eps"] = eps;
  return j.dump(indent);
}

Condition condition_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw parse_error(std::string("condition json: ") + e.what());
  }
  if (!j.is_object()) throw parse_error("condition json: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "F" && it.key() != "n" && it.key() != "a" && it.key() != "eps") {
      throw parse_error("condition json: unexpected key '" + it.key() + "'");
    }
  }
  for (const char* key : {"F", "n", "a", "eps"}) {
    if (!j.contains(key)) {
      throw parse_error(std::string("condition json: missing key '") + key + "'");
    }
  }

  Condition out;
  const json& field_f = j["F"];
  if (!field_f.is_array()) throw parse_error("condition json: F must be an array");
  for (const json& v : field_f) {
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() > 0xFFFFFFFFull) {
      throw parse_error("condition json: F entries must be 32-bit ids");
    }
    out.support.push_back(static_cast<std::uint32_t>(v.get<std::uint64_t>()));
  }
  if (!sorted_unique_u32(out.support)) {
    throw parse_error("condition json: F must be strictly increasing");
  }

  const json& field_n = j["n"];
  if (!field_n.is_number_unsigned() || field_n.get<std::uint64_t>() == 0) {
    throw parse_error("condition json: n must be a positive integer");
  }
  out.horizon = field_n.get<std::uint64_t>();

  const json& field_a = j["a"];
  if (!field_a.is_object() || field_a.size() != out.support.size()) {
    throw parse_error("condition json: a must map exactly the support ids");
  }
  for (const std::uint32_t id : out.support) {
    const std::string key = std::to_string(id);
    if (!field_a.contains(key)) {
      throw parse_error("condition json: a is missing id " + key);
    }
    const json& arr = field_a[key];
    if (!arr.is_array()) throw parse_error("condition json: a[" + key + "] must be an array");
    std::vector<std::uint64_t> members;
    for (const json& v : arr) {
      if (!v.is_number_unsigned()) {
        throw parse_error("condition json: a[" + key + "] entries must be nonnegative integers");
      }
      const std::uint64_t value = v.get<std::uint64_t>();
      if (!members.empty() && members.back() >= value) {
        throw parse_error("condition json: a[" + key + "] must be strictly increasing");
      }
      members.push_back(value);
    }
    std::vector<bool> row(members.empty() ? out.horizon
                                          : std::max(out.horizon, members.back() + 1),
                          false);
    for (const std::uint64_t v : members) row[v] = true;
    out.blocks.emplace(id, std::move(row));
  }

  const json& field_eps = j["eps"];
  if (!field_eps.is_array()) throw parse_error("condition json: eps must be an array");
  for (const json& entry : field_eps) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() ||
        !entry[1].is_string()) {
      throw parse_error("condition json: eps entries must be [assignment, rational] pairs");
    }
    const PartialAssignment f = PartialAssignment::parse(entry[0].get<std::string>());
    const Rat value = parse_rational(entry[1].get<std::string>());
    if (!out.budgets.emplace(f, value).second) {
      throw parse_error("condition json: duplicate eps key '" + entry[0].get<std::string>() + "'");
    }
  }
  return out;
}

}  // namespace halflab
