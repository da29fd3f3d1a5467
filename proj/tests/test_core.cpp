#include "doctest.h"

#include "nd/core.hpp"

using namespace nd;

TEST_SUITE("core") {

TEST_CASE("pedigree text round trip") {
  const Pedigree p{2, 1, 1};
  CHECK(p.str() == "2.1.1");
  CHECK(parse_pedigree("2.1.1") == p);
  CHECK(parse_pedigree("")->empty());
  CHECK_FALSE(parse_pedigree("3"));
  CHECK_FALSE(parse_pedigree("1..2"));
  CHECK_FALSE(parse_pedigree("1.x"));
  CHECK(pedigree_concat(Pedigree{1}, Pedigree{2, 2}) == Pedigree{1, 2, 2});
  CHECK_THROWS_AS(Pedigree({1, 3}), Error);
}

TEST_CASE("pedigrees order lexicographically") {
  CHECK(Pedigree{1, 2} < Pedigree{2});
  CHECK(Pedigree{1} < Pedigree{1, 1});
}

TEST_CASE("reserved labels") {
  Registry r;
  CHECK(r.id("SERIAL") == kSerialId);
  CHECK(r.id("PARALLEL") == kParallelId);
  CHECK(r.empty_set(kParallelId));
  // Four self-labelled all-pairs rules between the subtasks.
  const auto& s = r.rules(kSerialId);
  REQUIRE(s.size() == 4);
  for (const auto& c : s) {
    CHECK(c.label == kSerialId);
    CHECK(c.src.size() == 1);
    CHECK(c.dst.size() == 1);
  }
  CHECK(canonical_serial_rules().rules.size() == 4);
  CHECK_THROWS_AS(r.add(FireRuleSet{"SERIAL", {}}), Error);
  r.declare("PARALLEL");  // no-op for reserved labels
  CHECK(r.empty_set(kParallelId));
}

TEST_CASE("parse and format registry") {
  const Registry r = parse_registry(R"(
# comment
A: +1 -> -2 via B
A: +2.1 -> -1
B:
)");
  REQUIRE(r.contains("A"));
  REQUIRE(r.contains("B"));
  const auto& a = r.rules(r.id("A"));
  REQUIRE(a.size() == 2);
  CHECK(a[0].src == Pedigree{1});
  CHECK(a[0].dst == Pedigree{2});
  CHECK(a[0].label == r.id("B"));
  CHECK(a[1].label == r.id("A"));  // self-recursive without "via"
  CHECK(r.empty_set(r.id("B")));

  const Registry again = parse_registry(format_registry(r));
  CHECK(format_registry(again) == format_registry(r));
}

TEST_CASE("registry errors") {
  CHECK_THROWS_AS(parse_registry("A: 1 -> -2"), Error);
  CHECK_FALSE(validate_registry(parse_registry("A: +1 -> +2")).ok());  // swapped endpoints
  CHECK_THROWS_AS(parse_registry("A: +1 -> -4"), Error);
  try {
    parse_registry("A: +1 -> -2\nA +1 -> -2");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind == Error::Kind::Parse);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  // Dangling label: parses, fails when compiled rules are requested.
  const Registry r = parse_registry("A: +1 -> -2 via NOPE");
  CHECK_FALSE(validate_registry(r).unresolved.empty());
  CHECK_THROWS_AS(r.rules(r.id("A")), Error);
}

}
