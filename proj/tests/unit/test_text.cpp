#include "doctest.h"
#include "scholrec/clock.hpp"
#include "scholrec/text.hpp"

using namespace scholrec;
using V = std::vector<std::string>;

TEST_CASE("tokenize lowercases and splits on punctuation") {
  CHECK(tokenize("Neural-Ranking, for IR!") == V{"neural", "ranking", "for", "ir"});
  CHECK(tokenize("a b cd") == V{"cd"});
  CHECK(tokenize("") == V{});
  CHECK(tokenize("   ...  ") == V{});
  CHECK(tokenize("x2 2x 42") == V{"x2", "2x", "42"});
}

TEST_CASE("tokenize handles unicode letters") {
  CHECK(tokenize("Über Straße") == V{"über", "straße"});
  CHECK(tokenize("Étude—des ÉTATS") == V{"étude", "des", "états"});
  // single code point, two bytes
  CHECK(tokenize("é ab") == V{"ab"});
}

TEST_CASE("tokenize treats invalid utf-8 as separator") {
  const std::string bad = std::string("ab") + '\xff' + "cd";
  CHECK(tokenize(bad) == V{"ab", "cd"});
}

TEST_CASE("normalize_title") {
  CHECK(normalize_title("  Deep   Learning: A Survey. ") == "deep learning a survey");
  CHECK(normalize_title("Deep-Learning") == "deep learning");
  CHECK(normalize_title("") == "");
  CHECK(normalize_title("ÉTUDES") == "études");
  CHECK(normalize_title(normalize_title("A, B; c")) == normalize_title("A, B; c"));
}

TEST_CASE("trim and ascii_lower") {
  CHECK(trim("  x y \t\n") == "x y");
  CHECK(trim("") == "");
  CHECK(ascii_lower("10.1000/ABC") == "10.1000/abc");
}

TEST_CASE("fnv1a_hex known vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("abc").size() == 16);
}

TEST_CASE("iso8601 validation") {
  CHECK(is_iso8601("2024-02-29T10:00:00Z"));
  CHECK(is_iso8601("2024-01-01T00:00:00.123+02:00"));
  CHECK(is_iso8601(now_iso8601()));
  CHECK_FALSE(is_iso8601("2023-02-29T10:00:00Z"));
  CHECK_FALSE(is_iso8601("2024-13-01T00:00:00Z"));
  CHECK_FALSE(is_iso8601("2024-01-01 00:00:00"));
  CHECK_FALSE(is_iso8601("yesterday"));
  CHECK(current_year() >= 2024);
}
