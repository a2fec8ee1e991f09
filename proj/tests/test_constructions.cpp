#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "halflab/constructions.hpp"
#include "halflab/errors.hpp"
#include "halflab/relations.hpp"
#include "halflab/schema_text.hpp"

using namespace halflab;

TEST_SUITE("constructions") {

TEST_CASE("splicing conclusion holds on a hand-built instance") {
  const LemmaCheck check = lemma33_conclusion({0, 1}, {2, 3, 4, 5}, {0}, {2, 3},
                                              Rat(1, 10), Rat(2));
  CHECK(check.pre_ok);
  CHECK(check.conclusion);
  CHECK_FALSE(check.witness.has_value());
}

TEST_CASE("splicing preconditions are reported, not thrown") {
  // R and S intersect.
  CHECK_FALSE(lemma33_conclusion({0, 1}, {1, 2, 3, 4}, {0}, {1, 2}, Rat(1, 10), Rat(2)).pre_ok);
  // |S| != c|R|.
  CHECK_FALSE(lemma33_conclusion({0, 1}, {2, 3, 4}, {0}, {2}, Rat(1, 10), Rat(2)).pre_ok);
  // A outside R.
  CHECK_FALSE(lemma33_conclusion({0, 1}, {2, 3, 4, 5}, {9}, {2, 3}, Rat(1, 10), Rat(2)).pre_ok);
  // B's share of S leaves the eps-window around 1/2.
  CHECK_FALSE(lemma33_conclusion({0, 1}, {2, 3, 4, 5}, {0}, {2, 3, 4, 5}, Rat(1, 10), Rat(2))
                  .pre_ok);
  // c must exceed 1.
  CHECK_FALSE(lemma33_conclusion({0, 1}, {2, 3}, {0}, {2}, Rat(1, 10), Rat(1)).pre_ok);
  const LemmaCheck bad =
      lemma33_conclusion({0, 1}, {2, 3, 4}, {0}, {2}, Rat(1, 10), Rat(2));
  CHECK_FALSE(bad.pre_violation.empty());
}

TEST_CASE("seeded splicing instances all satisfy the conclusion") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    CAPTURE(seed);
    const Lemma33Instance inst = make_lemma33_instance(seed);
    const LemmaCheck check = lemma33_conclusion(inst.r_set, inst.s_set, inst.a_subset,
                                                inst.b_subset, inst.eps, inst.c);
    REQUIRE(check.pre_ok);
    CHECK(check.conclusion);
  }
}

TEST_CASE("density splice conclusion holds on matched periodic sets") {
  const LemmaCheck check = lemma410_conclusion(Set::evens(), Set::evens(), Rat(1, 2),
                                               Rat(1, 100), 1000, 2000);
  CHECK(check.pre_ok);
  CHECK(check.conclusion);
}

TEST_CASE("density splice preconditions are reported") {
  // d_1(R) = 1 is far from 1/2.
  const LemmaCheck off = lemma410_conclusion(Set::evens(), Set::evens(), Rat(1, 2),
                                             Rat(1, 100), 1, 10);
  CHECK_FALSE(off.pre_ok);
  CHECK_FALSE(off.pre_violation.empty());
  // m > n is not a window.
  CHECK_THROWS_AS(
      lemma410_conclusion(Set::evens(), Set::evens(), Rat(1, 2), Rat(1, 100), 20, 10),
      precondition_error);
}

TEST_CASE("seeded density splice instances all satisfy the conclusion") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    CAPTURE(seed);
    const Lemma410Instance inst = make_lemma410_instance(seed);
    const LemmaCheck check =
        lemma410_conclusion(inst.r_set, inst.s_set, inst.r, inst.eps, inst.m, inst.n);
    REQUIRE(check.pre_ok);
    CHECK(check.conclusion);
  }
}

TEST_CASE("factorial chopped real takes member-count boundaries") {
  const ChoppedReal real = factorial_chopped_real(Set::evens(), 40);
  // k!-th members of the evens are 0, 2, 10; boundaries sit one past them.
  CHECK(real.partition.boundaries() == std::vector<std::uint64_t>{0, 1, 3, 11});
  CHECK_THROWS_AS(factorial_chopped_real(Set::finite({1, 2}), 100), precondition_error);
  CHECK_THROWS_AS(factorial_chopped_real(Set::evens(), 1), precondition_error);
}

TEST_CASE("factorial guarantee certifies matched intervals") {
  const ChoppedReal real = factorial_chopped_real(Set::evens(), 200);
  const auto rows = factorial_guarantee(real, Set::evens(), 200);
  REQUIRE_FALSE(rows.empty());
  for (const FactorialGuaranteeEntry& row : rows) {
    CAPTURE(row.interval);
    CHECK(row.interval >= 1);
    CHECK(row.density == 1);
    CHECK(row.bound == Rat(1) - Rat(1, static_cast<std::int64_t>(row.interval)));
    CHECK(row.ok);
  }
  // A candidate agreeing on no interval yields no rows.
  CHECK(factorial_guarantee(real, Set::complement(Set::evens()), 200).empty());
}

TEST_CASE("nonM witness skips ranks so no later interval matches") {
  const ChoppedReal real = nonM_witness(Set::naturals(), 2);
  CHECK(real.partition.boundaries() == std::vector<std::uint64_t>{0, 1, 4, 34});
  // The skipped members of interval 1 are rank 1 and of interval 2 ranks 4..9.
  CHECK_FALSE(real.bits.contains(1));
  CHECK(real.bits.contains(2));
  for (std::uint64_t v = 4; v <= 9; ++v) CHECK_FALSE(real.bits.contains(v));
  CHECK(real.bits.contains(10));
  CHECK(matches(Set::naturals(), real, 34) == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(nonM_witness(Set::finite({1}), 2), precondition_error);
  CHECK_THROWS_AS(nonM_witness(Set::naturals(), 11), budget_exhausted);
}

TEST_CASE("dominator witness iterates into interval boundaries") {
  const std::vector<std::uint64_t> succ = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  const DominatorWitness w = bisect_witness_from_dominator(Set::naturals(), succ, 8);
  CHECK(w.gamma == std::vector<std::uint64_t>{0, 1, 2, 4, 8});
  CHECK(w.domination_failures.empty());
  CHECK(format_set(w.y) == "intervals(table,even;0,1,2,4,8)");

  // The successor function fails to dominate the evens from rank 1 on.
  const DominatorWitness slow = bisect_witness_from_dominator(Set::evens(), succ, 8);
  CHECK(slow.domination_failures == std::vector<std::uint64_t>{1, 2, 3, 4});
}

TEST_CASE("dominator witness validates its table") {
  CHECK_THROWS_AS(bisect_witness_from_dominator(Set::naturals(), {}, 8), precondition_error);
  CHECK_THROWS_AS(bisect_witness_from_dominator(Set::naturals(), {0, 1}, 8),
                  precondition_error);
  CHECK_THROWS_AS(bisect_witness_from_dominator(Set::naturals(), {3, 3}, 8),
                  precondition_error);
  CHECK_THROWS_AS(bisect_witness_from_dominator(Set::naturals(), {9}, 8), precondition_error);
  CHECK_THROWS_AS(bisect_witness_from_dominator(Set::naturals(), {1, 2, 3}, 50),
                  budget_exhausted);
}

TEST_CASE("r-conditions pass when z bisects every trace") {
  // Dyadic family on bits 1 and 2; z = odd numbers splits each trace in half.
  std::map<std::string, std::vector<std::uint64_t>> traces;
  std::vector<std::uint64_t> z_low, z_high;
  for (std::uint64_t v = 0; v < 64; ++v) {
    traces[""].push_back(v);
    if ((v >> 1 & 1) == 0) traces["0:0"].push_back(v);
    if ((v >> 1 & 1) == 0 && (v >> 2 & 1) == 1) traces["0:0,1:1"].push_back(v);
    if (v % 2 == 1) {
      if (v < 16) z_low.push_back(v);
      z_high.push_back(v);
    }
  }

  const RConditionsReport rep =
      r_conditions_check(traces, z_low, z_high, 4, 6, Rat(1, 4), Rat(1, 4));
  CHECK(rep.all_pass);
  CHECK(rep.r4.pass);
  REQUIRE(rep.rows.size() == 3);
  for (const RConditionsRow& row : rep.rows) {
    CAPTURE(row.assignment);
    CHECK(row.r1_low.pass);
    CHECK(row.r1_high.pass);
    CHECK(row.r2.pass);
    CHECK(row.r3.pass);
  }

  // Explicitly deciding the block that z_high already has keeps (R4).
  std::vector<std::uint64_t> upper_block;
  for (std::uint64_t v = 17; v < 64; v += 2) upper_block.push_back(v);
  const RConditionsReport same =
      r_conditions_check(traces, z_low, z_high, 4, 6, Rat(1, 4), Rat(1, 4), upper_block);
  CHECK(same.r4.pass);

  // Deciding a different block fails (R4) with the first difference.
  const RConditionsReport other = r_conditions_check(
      traces, z_low, z_high, 4, 6, Rat(1, 4), Rat(1, 4), std::vector<std::uint64_t>{});
  CHECK_FALSE(other.r4.pass);
  CHECK_FALSE(other.all_pass);
  REQUIRE(other.r4.witness.has_value());
  CHECK(*other.r4.witness == 17);
}

TEST_CASE("r-conditions flag empty traces") {
  std::map<std::string, std::vector<std::uint64_t>> traces;
  traces[""] = {};
  std::vector<std::uint64_t> z_low(16), z_high(64);
  std::iota(z_low.begin(), z_low.end(), 0);
  std::iota(z_high.begin(), z_high.end(), 0);
  const RConditionsReport rep =
      r_conditions_check(traces, z_low, z_high, 4, 6, Rat(1, 4), Rat(1, 4));
  CHECK_FALSE(rep.all_pass);
  CHECK_FALSE(rep.rows[0].r1_low.pass);
}

TEST_CASE("r-conditions validate their inputs") {
  std::map<std::string, std::vector<std::uint64_t>> traces;
  std::vector<std::uint64_t> z_low(16), z_high(64);
  std::iota(z_low.begin(), z_low.end(), 0);
  std::iota(z_high.begin(), z_high.end(), 0);
  CHECK_THROWS_AS(r_conditions_check(traces, z_low, z_high, 6, 4, Rat(1, 4), Rat(1, 4)),
                  precondition_error);
  CHECK_THROWS_AS(r_conditions_check(traces, z_low, z_high, 4, 6, Rat(0), Rat(1, 4)),
                  precondition_error);
  CHECK_THROWS_AS(r_conditions_check(traces, {99}, z_high, 4, 6, Rat(1, 4), Rat(1, 4)),
                  precondition_error);
  // Z_next must extend Z.
  CHECK_THROWS_AS(r_conditions_check(traces, {0, 1}, z_high, 4, 6, Rat(1, 4), Rat(1, 4)),
                  precondition_error);
}

TEST_CASE("block ratio bound is 7/9 at zero slack and shrinks with it") {
  CHECK(cohen_block_ratio_bound(1, 0) == Rat(7, 9));
  CHECK(cohen_block_ratio_bound(50, 0) == Rat(7, 9));
  CHECK(cohen_block_ratio_bound(2, 1) == Rat(5, 7));
  Rat prev = cohen_block_ratio_bound(3, 0);
  for (std::uint64_t delta = 1; delta <= 50; ++delta) {
    const Rat cur = cohen_block_ratio_bound(3, delta);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK_THROWS_AS(cohen_block_ratio_bound(0, 1), precondition_error);
}

TEST_CASE("hand-built block trace yields the pinned chain row") {
  BlockFamilyTrace trace;
  trace.boundaries = {2, 15};
  trace.ones = {{0}, {2, 3, 4, 5, 6, 7}};
  const CohenWitness w = cohen_antisplit_witness(trace);
  CHECK(w.all_ok);
  REQUIRE(w.rows.size() == 1);
  const CohenBoundRow& row = w.rows[0];
  CHECK(row.l_prev == 2);
  CHECK(row.l_cur == 15);
  CHECK(row.ones == 6);
  CHECK(row.zeros == 7);
  CHECK(row.delta == 1);
  CHECK(row.bound == Rat(5, 7));
  CHECK(row.chain_upper == Rat(5, 7));
  CHECK(row.ratio == 0);  // X and Y partition the blocks, so they never meet
  CHECK(w.x.count_below(15) + w.y.count_below(15) == 15);
}

TEST_CASE("seeded block traces satisfy every chain row") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    for (std::size_t blocks = 1; blocks <= 4; ++blocks) {
      CAPTURE(seed);
      CAPTURE(blocks);
      const CohenWitness w = cohen_antisplit_witness(make_cohen_trace(seed, blocks));
      CHECK(w.all_ok);
      for (const CohenBoundRow& row : w.rows) CHECK(row.bound <= Rat(7, 9));
    }
  }
  CHECK_THROWS_AS(make_cohen_trace(1, 0), precondition_error);
  CHECK_THROWS_AS(make_cohen_trace(1, 9), precondition_error);
}

TEST_CASE("block trace validation rejects malformed inputs") {
  BlockFamilyTrace bad;
  bad.boundaries = {2, 15};
  bad.ones = {{0}};
  CHECK_THROWS_AS(cohen_antisplit_witness(bad), precondition_error);
  bad.ones = {{0}, {0, 2, 3, 4, 5, 6}};  // member 0 outside block 1
  CHECK_THROWS_AS(cohen_antisplit_witness(bad), precondition_error);
  bad.ones = {{0}, {2, 3, 4, 5, 6}};  // neither count pinned to the floor
  CHECK_THROWS_AS(cohen_antisplit_witness(bad), precondition_error);
}

}  // TEST_SUITE
