#include <string>
#include <vector>

#include "doctest.h"
#include "halflab/errors.hpp"
#include "halflab/schema_text.hpp"
#include "halflab/sets.hpp"

using namespace halflab;

TEST_SUITE("schema_text") {

TEST_CASE("canonical strings round trip exactly") {
  const std::vector<std::string> canon = {
      "finite()",
      "finite(3,7)",
      "periodic(;1)",
      "periodic(;1,0)",
      "periodic(1,0;0,1)",
      "not(finite(0))",
      "and(periodic(;1,0),not(finite(4)))",
      "or(finite(1),seeded(42))",
      "seeded(0)",
      "seeded(18446744073709551615)",
      "intervals(factorial,even)",
      "intervals(doubling,odd)",
      "intervals(table,even;0,1,2,4,8)",
      "or(and(periodic(;1,0),seeded(7)),not(periodic(1;0,1)))",
  };
  for (const std::string& text : canon) {
    CAPTURE(text);
    CHECK(format_set(parse_set(text)) == text);
  }
}

TEST_CASE("parsing tolerates whitespace, printing never emits it") {
  CHECK(format_set(parse_set(" periodic( ; 1 , 0 ) ")) == "periodic(;1,0)");
  CHECK(format_set(parse_set("and( finite(1, 2), seeded( 5 ) )")) ==
        "and(finite(1,2),seeded(5))");
}

TEST_CASE("finite element lists normalize on parse") {
  CHECK(format_set(parse_set("finite(2,1)")) == "finite(1,2)");
  CHECK(format_set(parse_set("finite(1,1)")) == "finite(1)");
}

TEST_CASE("builders print canonically") {
  CHECK(format_set(Set::evens()) == "periodic(;1,0)");
  CHECK(format_set(Set::naturals()) == "periodic(;1)");
  CHECK(format_set(Set::finite({7, 3, 3})) == "finite(3,7)");
  CHECK(format_set(Set::intervals(IntervalPartition::table({0, 5}), BlockParity::Odd)) ==
        "intervals(table,odd;0,5)");
}

TEST_CASE("parsed schemas evaluate like their builders") {
  const Set parsed = parse_set("periodic(1,0;0,1)");
  const Set built = Set::periodic({true, false}, {false, true});
  for (std::uint64_t n = 0; n < 64; ++n) CHECK(parsed.contains(n) == built.contains(n));
}

TEST_CASE("malformed texts raise parse_error") {
  const std::vector<std::string> bad = {
      "",
      "finite",
      "finite(",
      "finite(1,)",
      "finite(1 2)",
      "periodic(;)",        // empty period
      "periodic(1)",        // missing period separator
      "periodic(;2)",       // bits only
      "seeded()",
      "seeded(-1)",
      "seeded(18446744073709551616)",  // overflows u64
      "not()",
      "not(finite(1),finite(2))",
      "and(finite(1))",
      "intervals(cubic,even)",
      "intervals(factorial,sideways)",
      "intervals(table,even)",         // table needs boundaries
      "intervals(table,even;1,2)",     // must start at 0
      "intervals(table,even;0,2,2)",   // strictly increasing
      "intervals(factorial,even;0,1)", // closed forms take no table
      "finite(1) trailing",
      "unknown(1)",
  };
  for (const std::string& text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_set(text), parse_error);
  }
}

TEST_CASE("deep nesting round trips") {
  std::string text = "finite(1)";
  for (int i = 0; i < 40; ++i) text = "not(" + text + ")";
  CHECK(format_set(parse_set(text)) == text);
}

}  // TEST_SUITE
