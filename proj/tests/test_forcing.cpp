#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "halflab/errors.hpp"
#include "halflab/forcing.hpp"
#include "halflab/mix64.hpp"

using namespace halflab;

namespace {

// Balanced deterministic block: seeded bits with the surplus side flipped
// from the top so exactly half the positions are set.
std::vector<bool> balanced_block(std::uint64_t seed, std::uint64_t n) {
  std::vector<bool> row(n);
  std::uint64_t ones = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    row[i] = seeded_bit(seed, i);
    ones += row[i] ? 1 : 0;
  }
  for (std::uint64_t i = n; i > 0 && ones > n / 2; --i) {
    if (row[i - 1]) {
      row[i - 1] = false;
      --ones;
    }
  }
  for (std::uint64_t i = n; i > 0 && ones < n / 2; --i) {
    if (!row[i - 1]) {
      row[i - 1] = true;
      ++ones;
    }
  }
  return row;
}

// One-index condition with an exactly balanced block and generous budgets.
Condition one_index_condition(std::uint32_t id, std::uint64_t n, std::uint64_t seed) {
  Condition p;
  p.support = {id};
  p.horizon = n;
  p.blocks[id] = balanced_block(seed, n);
  p.budgets[PartialAssignment{}] = Rat(16);
  p.budgets[PartialAssignment::from_pairs({{id, false}})] = Rat(16);
  p.budgets[PartialAssignment::from_pairs({{id, true}})] = Rat(16);
  return p;
}

std::map<PartialAssignment, Rat> flat_budgets(const std::vector<std::uint32_t>& support,
                                              const Rat& eps) {
  std::map<PartialAssignment, Rat> out;
  for (const PartialAssignment& f : assignments_over(support)) out.emplace(f, eps);
  return out;
}

}  // namespace

TEST_SUITE("forcing") {

TEST_CASE("partial assignments normalize, parse, and print") {
  const PartialAssignment f = PartialAssignment::from_pairs({{9, false}, {5, true}});
  CHECK(f.text() == "5:1,9:0");
  CHECK(PartialAssignment::parse("5:1,9:0") == f);
  CHECK(PartialAssignment::parse("").empty());
  CHECK(PartialAssignment{}.text() == "");
  CHECK(f.size() == 2);
  CHECK(f.at(5) == true);
  CHECK(f.at(9) == false);
  CHECK_FALSE(f.at(7).has_value());
  CHECK(f.domain_subset_of({5, 9, 12}));
  CHECK_FALSE(f.domain_subset_of({5, 12}));
  CHECK(f.restricted({5}) == PartialAssignment::from_pairs({{5, true}}));
  CHECK(f.extended(7, true).text() == "5:1,7:1,9:0");
  CHECK_THROWS_AS(PartialAssignment::from_pairs({{5, true}, {5, false}}), precondition_error);
}

TEST_CASE("assignment text rejects malformed input") {
  for (const char* bad : {"5", "5:", "5:2", ":1", "5:1,", "5:1,,9:0", "9:0,5:1", "5:1 ,9:0",
                          "4294967296:1", "x:1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(PartialAssignment::parse(bad), parse_error);
  }
}

TEST_CASE("assignments_over enumerates the full ternary cube in order") {
  const auto fs = assignments_over({2, 7});
  REQUIRE(fs.size() == 9);
  CHECK(fs.front().empty());
  for (std::size_t i = 1; i < fs.size(); ++i) CHECK(fs[i - 1] < fs[i]);
  std::size_t totals = 0;
  for (const PartialAssignment& f : fs) totals += f.size() == 2 ? 1 : 0;
  CHECK(totals == 4);
  CHECK(assignments_over({}).size() == 1);
}

TEST_CASE("the trivial condition is valid and maximal") {
  const Condition top = trivial_condition();
  CHECK(validate(top).empty());
  CHECK(top.horizon == 1);
  CHECK(top.support.empty());
  CHECK(top.budgets.at(PartialAssignment{}) == Rat(16));
  CHECK(leq(top, top).ok);
}

TEST_CASE("validate pinpoints each clause") {
  Condition p = one_index_condition(3, 8, 1);
  CHECK(validate(p).empty());

  SUBCASE("C3: a block bit at or past the horizon") {
    p.blocks[3].resize(10);
    p.blocks[3][9] = true;
    const auto v = validate(p);
    REQUIRE_FALSE(v.empty());
    CHECK(v[0].clause == "C3");
  }
  SUBCASE("C4: non-positive budget") {
    p.budgets[PartialAssignment::parse("3:0")] = Rat(0);
    bool found = false;
    for (const auto& violation : validate(p)) found = found || violation.clause == "C4";
    CHECK(found);
  }
  SUBCASE("C4: budget tightens as the domain grows") {
    // Budgets are monotone upward: parent eps must not exceed the child's.
    p.budgets[PartialAssignment::parse("3:0")] = Rat(8);
    bool found = false;
    for (const auto& violation : validate(p)) found = found || violation.clause == "C4";
    CHECK(found);
  }
  SUBCASE("C5: unbalanced block against a tight budget") {
    p.budgets[PartialAssignment{}] = Rat(1, 100);
    p.budgets[PartialAssignment::parse("3:0")] = Rat(1, 100);
    p.budgets[PartialAssignment::parse("3:1")] = Rat(1, 100);
    p.blocks[3].assign(8, true);  // density 1 vs target 1/2
    bool found = false;
    for (const auto& violation : validate(p)) found = found || violation.clause == "C5";
    CHECK(found);
  }
  SUBCASE("C6: horizon too small for the support size") {
    // 2^{2|F|}/n = 4/8 = 1/2, and eps(empty)/8 must exceed it.
    p.budgets[PartialAssignment{}] = Rat(2);
    p.budgets[PartialAssignment::parse("3:0")] = Rat(2);
    p.budgets[PartialAssignment::parse("3:1")] = Rat(2);
    bool found = false;
    for (const auto& violation : validate(p)) found = found || violation.clause == "C6";
    CHECK(found);
  }
  SUBCASE("budget table must cover exactly the assignments over F") {
    p.budgets.erase(PartialAssignment::parse("3:1"));
    CHECK_THROWS_AS(validate(p), precondition_error);
  }
  SUBCASE("blocks must key exactly the support") {
    p.blocks[4] = {};
    CHECK_THROWS_AS(validate(p), precondition_error);
  }
  SUBCASE("horizon zero is rejected outright") {
    p.horizon = 0;
    CHECK_THROWS_AS(validate(p), precondition_error);
  }
}

TEST_CASE("oversized supports exhaust the exact-audit budget") {
  Condition p;
  for (std::uint32_t id = 0; id < 13; ++id) p.support.push_back(id);
  p.horizon = 1 << 28;
  CHECK_THROWS_AS(validate(p), budget_exhausted);
}

TEST_CASE("leq is a preorder on valid conditions") {
  const Condition top = trivial_condition();
  const Condition p = one_index_condition(0, 16, 2);
  CHECK(leq(p, p).ok);
  CHECK(leq(p, top).ok);
  CHECK_FALSE(leq(top, p).ok);  // D1: support shrinks
  CHECK(leq(top, p).clause == "D1");
}

TEST_CASE("leq flags each ordering clause") {
  const Condition p = one_index_condition(0, 16, 2);

  SUBCASE("D2: horizon may not shrink") {
    Condition q = one_index_condition(0, 8, 2);
    const LeqOutcome out = leq(q, p);
    CHECK_FALSE(out.ok);
    CHECK(out.clause == "D2");
  }
  SUBCASE("D3: old bits are frozen") {
    Condition q = p;
    q.blocks[0][3] = !q.blocks[0][3];
    // Re-balance so q stays valid: flip a bit of the other parity too.
    for (std::uint64_t i = 8; i < 16; ++i) {
      if (q.blocks[0][i] != q.blocks[0][3]) {
        q.blocks[0][i] = q.blocks[0][3];
        break;
      }
    }
    REQUIRE(validate(q).empty());
    const LeqOutcome out = leq(q, p);
    CHECK_FALSE(out.ok);
    CHECK(out.clause == "D3");
  }
  SUBCASE("D4: budgets may not grow on the old support") {
    Condition tight = p;
    for (auto& [f, eps] : tight.budgets) eps = Rat(8);
    REQUIRE(validate(tight).empty());
    const LeqOutcome out = leq(p, tight);
    CHECK_FALSE(out.ok);
    CHECK(out.clause == "D4");
  }
}

TEST_CASE("restriction is an upward move") {
  const Condition p = one_index_condition(5, 32, 3);
  const Condition up = restrict_to(p, {});
  CHECK(validate(up).empty());
  CHECK(up.support.empty());
  CHECK(up.horizon == p.horizon);
  CHECK(leq(p, up).ok);
  const Condition same = restrict_to(p, {5});
  CHECK(same == p);
}

TEST_CASE("extend adopts a fresh index from a side condition") {
  const Condition p = one_index_condition(2, 16, 4);
  const Condition side = one_index_condition(7, 16, 5);

  const Condition q = extend(p, {7}, side, 16, flat_budgets({2}, Rat(16)));

  CHECK(validate(q).empty());
  CHECK(q.support == std::vector<std::uint32_t>{2, 7});
  CHECK(q.horizon >= 16);
  CHECK(q.horizon % 4 == 0);
  CHECK(leq(q, p).ok);
  CHECK(leq(q, side).ok);
  // Stitched budgets: shared and base entries from the target, side entries
  // from the side condition, mixed domains defaulted to 16.
  CHECK(q.budgets.size() == 9);
  CHECK(q.budgets.at(PartialAssignment::parse("2:0,7:1")) == Rat(16));
}

TEST_CASE("extend validates the budget table") {
  const Condition p = one_index_condition(2, 16, 4);
  const Condition side = one_index_condition(7, 16, 5);

  SUBCASE("missing assignment") {
    auto eps = flat_budgets({2}, Rat(16));
    eps.erase(PartialAssignment::parse("2:0"));
    CHECK_THROWS_AS(extend(p, {7}, side, 16, eps), precondition_error);
  }
  SUBCASE("assignments beyond the base support") {
    CHECK_THROWS_AS(extend(p, {7}, side, 16, flat_budgets({2, 7}, Rat(16))),
                    precondition_error);
  }
  SUBCASE("value above 16") {
    auto eps = flat_budgets({2}, Rat(16));
    eps[PartialAssignment::parse("2:1")] = Rat(17);
    CHECK_THROWS_AS(extend(p, {7}, side, 16, eps), precondition_error);
  }
  SUBCASE("non-monotone pair") {
    auto eps = flat_budgets({2}, Rat(8));
    eps[PartialAssignment::parse("2:0")] = Rat(4);  // below the root budget
    CHECK_THROWS_AS(extend(p, {7}, side, 16, eps), precondition_error);
  }
  SUBCASE("above the base budget") {
    Condition tight = p;
    for (auto& [f, eps0] : tight.budgets) eps0 = Rat(8);
    CHECK_THROWS_AS(extend(tight, {7}, side, 16, flat_budgets({2}, Rat(16))),
                    precondition_error);
  }
  SUBCASE("side support outside the extension set") {
    CHECK_THROWS_AS(extend(p, {}, side, 16, flat_budgets({2}, Rat(16))),
                    precondition_error);
  }
}

TEST_CASE("tiny budgets push the minimal horizon past the cap") {
  const Condition p = trivial_condition();
  std::map<PartialAssignment, Rat> eps;
  eps.emplace(PartialAssignment{}, Rat(1, 1 << 30));
  CHECK_THROWS_AS(extend(p, {}, trivial_condition(), 1, eps), budget_exhausted);
}

TEST_CASE("phase-two fill makes boolean traces exact on the fresh tail") {
  const Condition p = one_index_condition(1, 8, 6);
  const Condition side = one_index_condition(4, 8, 7);
  const Condition q = extend(p, {4}, side, 64, flat_budgets({1}, Rat(16)));
  REQUIRE(validate(q).empty());

  // On [8, n) the blocks follow the bit pattern schedule, so counts over the
  // tail are exact per assignment.
  const std::uint64_t tail = q.horizon - 8;
  for (const PartialAssignment& f : assignments_over(q.support)) {
    const BooleanTrace trace = boolean_trace(q, f);
    std::uint64_t on_tail = 0;
    for (const std::uint64_t v : trace.members) on_tail += v >= 8 ? 1 : 0;
    CAPTURE(f.text());
    CHECK(on_tail * (std::uint64_t{1} << f.size()) == tail);
  }
}

TEST_CASE("boolean traces scan the blocks") {
  Condition p = one_index_condition(3, 8, 1);
  const BooleanTrace all = boolean_trace(p, PartialAssignment{});
  CHECK(all.members.size() == 8);
  const BooleanTrace ones = boolean_trace(p, PartialAssignment::parse("3:1"));
  const BooleanTrace zeros = boolean_trace(p, PartialAssignment::parse("3:0"));
  CHECK(ones.members.size() == 4);
  CHECK(zeros.members.size() == 4);
  for (const std::uint64_t v : ones.members) CHECK(p.blocks[3][v]);
  CHECK_THROWS_AS(boolean_trace(p, PartialAssignment::parse("9:1")), precondition_error);
}

TEST_CASE("amalgamation joins disjoint supports grown from a common trunk") {
  const Condition trunk = trivial_condition(4, Rat(16));
  const Condition a = one_index_condition(0, 8, 11);
  const Condition b = one_index_condition(1, 8, 12);
  const Condition p = extend(trunk, {0}, a, 8, flat_budgets({}, Rat(16)));
  const Condition q = extend(trunk, {1}, b, 8, flat_budgets({}, Rat(16)));
  REQUIRE(p.horizon == q.horizon);

  const Condition r = amalgamate(p, q);
  CHECK(validate(r).empty());
  CHECK(r.support == std::vector<std::uint32_t>{0, 1});
  CHECK(leq(r, p).ok);
  CHECK(leq(r, q).ok);
}

TEST_CASE("amalgamation with a restriction recovers a lower bound") {
  const Condition p = one_index_condition(6, 32, 13);
  const Condition q = restrict_to(p, {});
  const Condition r = amalgamate(p, q);
  CHECK(validate(r).empty());
  CHECK(leq(r, p).ok);
  CHECK(leq(r, q).ok);
}

TEST_CASE("amalgamation requires equal horizons and shared data") {
  const Condition p = one_index_condition(0, 16, 2);
  const Condition q = one_index_condition(0, 32, 2);
  CHECK_THROWS_AS(amalgamate(p, q), precondition_error);
  Condition r = one_index_condition(0, 16, 9);
  if (r.blocks[0] == p.blocks.at(0)) r.blocks[0][0] = !r.blocks[0][0];
  CHECK_THROWS_AS(amalgamate(p, r), precondition_error);
}

TEST_CASE("conditions round trip through json text") {
  const Condition p = one_index_condition(5, 16, 21);
  const std::string text = condition_to_json_text(p);
  const Condition back = condition_from_json_text(text);
  CHECK(back == p);
  CHECK(validate(back).empty());
}

TEST_CASE("json wire format is strict") {
  const Condition p = one_index_condition(5, 16, 21);
  const std::string text = condition_to_json_text(p);
  CHECK_THROWS_AS(condition_from_json_text("not json"), parse_error);
  CHECK_THROWS_AS(condition_from_json_text("{}"), parse_error);
  std::string extra = text;
  extra.insert(extra.rfind('}'), ",\"zz\":1");
  CHECK_THROWS_AS(condition_from_json_text(extra), parse_error);
}

TEST_CASE("json keeps out-of-horizon bits visible to validation") {
  Condition p = one_index_condition(5, 16, 21);
  p.blocks[5].resize(20);
  p.blocks[5][19] = true;
  const Condition back = condition_from_json_text(condition_to_json_text(p));
  const auto v = validate(back);
  REQUIRE_FALSE(v.empty());
  CHECK(v[0].clause == "C3");
}

TEST_CASE("generic runs are deterministic and hit their goals") {
  const GenericRunReport a = generic_run(2, 12, 1024, 42);
  const GenericRunReport b = generic_run(2, 12, 1024, 42);
  CHECK(a.final_condition == b.final_condition);
  CHECK(a.all_ok);
  CHECK(a.final_condition.support.size() == 2);
  CHECK(a.final_condition.horizon >= 1024);
  CHECK(a.rounds.size() == 12);
  REQUIRE_FALSE(a.rows.empty());
  for (const GenericRunRow& row : a.rows) {
    CAPTURE(row.assignment);
    CHECK(row.error < row.bound);
  }
  const GenericRunReport c = generic_run(2, 12, 1024, 43);
  CHECK_FALSE(a.final_condition == c.final_condition);
}

TEST_CASE("dom_cap limits the reported assignments") {
  const GenericRunReport rep = generic_run(3, 14, 256, 7, 1);
  // |dom f| <= 1 over three indices: empty + 3 * 2 rows.
  CHECK(rep.rows.size() == 7);
}

TEST_CASE("generic runs fail fast when rounds cannot meet the goals") {
  CHECK_THROWS_AS(generic_run(4, 2, 1 << 20, 1), budget_exhausted);
  CHECK_THROWS_AS(generic_run(0, 4, 16, 1), precondition_error);
  CHECK_THROWS_AS(generic_run(9, 20, 16, 1), precondition_error);
}

}  // TEST_SUITE
