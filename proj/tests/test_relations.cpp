#include <cstdint>
#include <vector>

#include "doctest.h"
#include "halflab/errors.hpp"
#include "halflab/relations.hpp"
#include "halflab/schema_text.hpp"

using namespace halflab;

TEST_SUITE("relations") {

TEST_CASE("evens bisect the naturals at every horizon") {
  const RelationVerdict v =
      bisects_in_limit(Set::evens(), Set::naturals(), Rat(1, 100), 1000, 100000);
  CHECK(v.status == RelationStatus::HoldsAtHorizon);
  CHECK_FALSE(v.witness.has_value());
  CHECK(v.trace.empty());
}

TEST_CASE("quarter-density sets fail with the first bad scale as witness") {
  const RelationVerdict v =
      bisects_in_limit(Set::multiples_of(4), Set::naturals(), Rat(1, 100), 1000, 100000);
  CHECK(v.status == RelationStatus::FailsAtHorizon);
  REQUIRE(v.witness.has_value());
  CHECK(*v.witness == 1000);
  // The failing sample is logged: d_1000(m4)/d_1000(omega) = 1/4.
  REQUIRE(v.trace.size() == 1);
  CHECK(v.trace.front().first == 1000);
  CHECK(v.trace.front().second == Rat(1, 4));
}

TEST_CASE("bisection is relative to the ambient set") {
  // Multiples of 4 do bisect the evens.
  const RelationVerdict v =
      bisects_in_limit(Set::multiples_of(4), Set::evens(), Rat(1, 100), 1000, 100000);
  CHECK(v.status == RelationStatus::HoldsAtHorizon);
}

TEST_CASE("bisects_in_limit validates its window") {
  CHECK_THROWS_AS(bisects_in_limit(Set::evens(), Set::naturals(), Rat(0), 10, 100),
                  precondition_error);
  CHECK_THROWS_AS(bisects_in_limit(Set::evens(), Set::finite({1000}), Rat(1, 10), 10, 100),
                  precondition_error);
}

TEST_CASE("almost_bisects restricts eps to (0, 1/2)") {
  const RelationVerdict v =
      almost_bisects(Set::multiples_of(3), Set::naturals(), Rat(1, 4), 100, 10000);
  CHECK(v.status == RelationStatus::HoldsAtHorizon);  // |1/3 - 1/2| = 1/6 < 1/4
  const RelationVerdict tight =
      almost_bisects(Set::multiples_of(3), Set::naturals(), Rat(1, 10), 100, 10000);
  CHECK(tight.status == RelationStatus::FailsAtHorizon);
  CHECK_THROWS_AS(almost_bisects(Set::evens(), Set::naturals(), Rat(1, 2), 100, 10000),
                  precondition_error);
}

TEST_CASE("weak bisection counts eps-close scales") {
  const WeakBisectionReport rep =
      weakly_bisects(Set::evens(), Set::naturals(), Rat(1, 4), 100);
  CHECK(rep.count == rep.hits.size());
  CHECK(rep.count > 90);  // d_n deviates by at most 1/(2n)
  const WeakBisectionReport none =
      weakly_bisects(Set::finite({}), Set::naturals(), Rat(1, 4), 100);
  CHECK(none.count == 0);
}

TEST_CASE("exact bisection scales of the evens are the even ones") {
  const std::vector<std::uint64_t> hits =
      bisects_infinitely_often(Set::evens(), Set::naturals(), 1000);
  REQUIRE(hits.size() == 500);
  for (const std::uint64_t n : hits) CHECK(n % 2 == 0);
  CHECK(hits.front() == 2);
  CHECK(hits.back() == 1000);
}

TEST_CASE("star splitting compares against the density product") {
  const RelationVerdict v =
      star_splits(Set::evens(), Set::multiples_of(3), Rat(1, 10), 1000, 50000);
  CHECK(v.status == RelationStatus::HoldsAtHorizon);
  // A set never splits its own complement.
  const RelationVerdict w =
      star_splits(Set::evens(), Set::complement(Set::evens()), Rat(1, 10), 1000, 50000);
  CHECK(w.status == RelationStatus::FailsAtHorizon);
}

TEST_CASE("subfamily enumeration is lexicographic and capped") {
  const auto subs = subfamilies_upto(3, 2);
  REQUIRE(subs.size() == 6);
  CHECK(subs[0] == std::vector<std::size_t>{0});
  CHECK(subs[1] == std::vector<std::size_t>{0, 1});
  CHECK(subs[2] == std::vector<std::size_t>{0, 2});
  CHECK(subs[3] == std::vector<std::size_t>{1});
  CHECK(subs[4] == std::vector<std::size_t>{1, 2});
  CHECK(subs[5] == std::vector<std::size_t>{2});
  CHECK(subfamilies_upto(4, 4).size() == 15);
}

TEST_CASE("seeded families pass statistical independence") {
  const std::vector<Set> family = {Set::seeded(1), Set::seeded(2), Set::seeded(3)};
  const FamilyIndependenceReport rep =
      statistically_independent(family, 2, Rat(1, 4), 2000, 50000);
  CHECK(rep.all_hold);
  CHECK(rep.moderacy_warning);  // seeded moderacy is scan-estimated
  CHECK(rep.subfamilies.size() == 6);
  CHECK(rep.moderacy.size() == 3);
}

TEST_CASE("a duplicated member breaks independence") {
  const std::vector<Set> family = {Set::evens(), Set::evens()};
  const FamilyIndependenceReport rep =
      statistically_independent(family, 2, Rat(1, 4), 1000, 20000);
  CHECK_FALSE(rep.all_hold);
  // The pair {0,1} is the failing subfamily: d(A)/d(A)^2 = 2.
  bool pair_failed = false;
  for (const SubfamilyVerdict& sub : rep.subfamilies) {
    if (sub.members.size() == 2) {
      pair_failed = sub.verdict.status == RelationStatus::FailsAtHorizon;
    }
  }
  CHECK(pair_failed);
}

TEST_CASE("exactly non-moderate members are a precondition failure") {
  const std::vector<Set> family = {Set::naturals()};
  CHECK_THROWS_AS(statistically_independent(family, 1, Rat(1, 4), 100, 1000),
                  precondition_error);
}

TEST_CASE("rho independence measures plain densities") {
  const std::vector<Set> family = {Set::evens(),
                                   parse_set("periodic(;1,1,0,0)")};
  const FamilyIndependenceReport rep =
      rho_independent(family, Rat(1, 2), 2, Rat(1, 100), 10000, 100000);
  CHECK(rep.all_hold);
  CHECK(rep.moderacy.empty());
  CHECK_FALSE(rep.moderacy_warning);

  // rho must match the actual densities.
  const FamilyIndependenceReport wrong =
      rho_independent(family, Rat(1, 3), 2, Rat(1, 100), 10000, 100000);
  CHECK_FALSE(wrong.all_hold);
  CHECK_THROWS_AS(rho_independent(family, Rat(0), 2, Rat(1, 100), 10, 100),
                  precondition_error);
}

TEST_CASE("complementary members cannot be rho independent") {
  const std::vector<Set> family = {Set::evens(), Set::complement(Set::evens())};
  const FamilyIndependenceReport rep =
      rho_independent(family, Rat(1, 2), 2, Rat(1, 100), 1000, 20000);
  CHECK_FALSE(rep.all_hold);  // the pair intersects in nothing, not density 1/4
}

TEST_CASE("default burn-in is a tenth of the horizon") {
  CHECK(default_burn_in(100000) == 10000);
  CHECK(default_burn_in(5) == 0);
}

}  // TEST_SUITE
