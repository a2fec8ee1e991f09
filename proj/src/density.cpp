#include "halflab/density.hpp"

#include <numeric>

#include "halflab/errors.hpp"

namespace halflab {

Density make_density(const Rat& value) {
  if (value < 0 || value > 1) {
    throw invariant_error("density outside [0, 1]: " + format_rational(value));
  }
  return Density{value};
}

Density initial_density(const Set& x, std::uint64_t n) {
  if (n == 0) throw precondition_error("initial_density requires n >= 1");
  return make_density(ratio_of(Int(x.count_below(n)), Int(n)));
}

Density relative_density(const Set& s, const Set& x, std::uint64_t n) {
  if (n == 0) throw precondition_error("relative_density requires n >= 1");
  std::uint64_t in_x = 0;
  std::uint64_t in_both = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!x.contains(i)) continue;
    ++in_x;
    if (s.contains(i)) ++in_both;
  }
  if (in_x == 0) throw precondition_error("relative_density requires |X ∩ n| >= 1");
  return make_density(ratio_of(Int(in_both), Int(in_x)));
}

DensityWindow density_window(const Set& x, std::uint64_t from, std::uint64_t to) {
  if (from == 0 || from > to) {
    throw precondition_error("density_window requires 1 <= from <= to");
  }
  DensityWindow window;
  window.from = from;
  window.to = to;
  std::uint64_t count = x.count_below(from);
  bool first = true;
  for (std::uint64_t n = from; n <= to; ++n) {
    if (n > from) count += x.contains(n - 1) ? 1 : 0;
    const Rat d = ratio_of(Int(count), Int(n));
    if (first || d < window.min_seen) window.min_seen = d;
    if (first || d > window.max_seen) window.max_seen = d;
    window.last = d;
    first = false;
  }
  return window;
}

namespace {

constexpr std::size_t kPeriodCap = 65536;

bool form_bit(const PeriodicForm& form, std::uint64_t n) {
  if (n < form.prefix.size()) return form.prefix[n];
  return form.period[(n - form.prefix.size()) % form.period.size()];
}

PeriodicForm combine(const PeriodicForm& a, const PeriodicForm& b, bool conjunction) {
  const std::size_t prefix_len = std::max(a.prefix.size(), b.prefix.size());
  const std::size_t period_len = std::lcm(a.period.size(), b.period.size());
  PeriodicForm out;
  out.prefix.reserve(prefix_len);
  for (std::size_t i = 0; i < prefix_len; ++i) {
    const bool l = form_bit(a, i);
    const bool r = form_bit(b, i);
    out.prefix.push_back(conjunction ? (l && r) : (l || r));
  }
  out.period.reserve(period_len);
  for (std::size_t j = 0; j < period_len; ++j) {
    const bool l = form_bit(a, prefix_len + j);
    const bool r = form_bit(b, prefix_len + j);
    out.period.push_back(conjunction ? (l && r) : (l || r));
  }
  return out;
}

}  // namespace

std::optional<PeriodicForm> periodic_form(const Set& x) {
  const SetNode& node = x.node();
  if (const auto* fin = std::get_if<FiniteNode>(&node.value)) {
    PeriodicForm form;
    if (!fin->elements.empty()) {
      form.prefix.assign(fin->elements.back() + 1, false);
      for (std::uint64_t e : fin->elements) form.prefix[e] = true;
    }
    form.period = {false};
    return form;
  }
  if (const auto* per = std::get_if<PeriodicNode>(&node.value)) {
    return PeriodicForm{per->prefix, per->period};
  }
  if (const auto* comp = std::get_if<ComplementNode>(&node.value)) {
    auto inner = periodic_form(comp->inner);
    if (!inner) return std::nullopt;
    inner->prefix.flip();
    inner->period.flip();
    return inner;
  }
  const bool is_union = std::holds_alternative<UnionNode>(node.value);
  const bool is_intersection = std::holds_alternative<IntersectionNode>(node.value);
  if (is_union || is_intersection) {
    const Set& left = is_union ? std::get<UnionNode>(node.value).left
                               : std::get<IntersectionNode>(node.value).left;
    const Set& right = is_union ? std::get<UnionNode>(node.value).right
                                : std::get<IntersectionNode>(node.value).right;
    const auto l = periodic_form(left);
    if (!l) return std::nullopt;
    const auto r = periodic_form(right);
    if (!r) return std::nullopt;
    if (std::lcm(l->period.size(), r->period.size()) > kPeriodCap) return std::nullopt;
    return combine(*l, *r, is_intersection);
  }
  return std::nullopt;
}

std::optional<Density> exact_density(const Set& x) {
  const auto form = periodic_form(x);
  if (!form) return std::nullopt;
  std::uint64_t ones = 0;
  for (bool bit : form->period) ones += bit ? 1 : 0;
  return make_density(ratio_of(Int(ones), Int(form->period.size())));
}

ModeracyVerdict is_moderate(const Set& x, std::uint64_t from, std::uint64_t to,
                            const Rat& margin) {
  if (x.size_class() == Set::SizeClass::Finite) {
    throw precondition_error("moderacy is defined for infinite schema classes");
  }
  if (margin < 0 || margin >= Rat(1, 2)) {
    throw precondition_error("moderacy margin must lie in [0, 1/2)");
  }
  ModeracyVerdict verdict;
  if (const auto d = exact_density(x)) {
    verdict.exact = true;
    verdict.exact_value = d->value;
    verdict.moderate = d->value > 0 && d->value < 1;
    return verdict;
  }
  verdict.exact = false;
  verdict.window = density_window(x, from, to);
  verdict.moderate =
      verdict.window.min_seen > margin && verdict.window.max_seen < Rat(1) - margin;
  return verdict;
}

}  // namespace halflab
