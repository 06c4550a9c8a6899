#include <random>
#include <sstream>

#include "doctest.h"
#include "scholrec/clock.hpp"
#include "scholrec/corpus.hpp"
#include "scholrec/error.hpp"
#include "synthetic.hpp"

using namespace scholrec;
using nlohmann::json;

TEST_CASE("parse_record fills defaults and derives has_fulltext") {
  std::size_t unknown = 0;
  const auto r = parse_record(R"({"id":"x1","title":"T","has_fulltext":true,"extra":1})", 1, &unknown);
  CHECK(r.id == "x1");
  CHECK(r.title == "T");
  CHECK_FALSE(r.has_fulltext);
  CHECK_FALSE(r.year.has_value());
  CHECK(r.citation_count == 0);
  CHECK(unknown == 1);

  const auto f = parse_record(R"({"id":"x2","fulltext":"body text"})");
  CHECK(f.has_fulltext);
  const auto blank = parse_record(R"({"id":"x3","fulltext":"   "})");
  CHECK_FALSE(blank.has_fulltext);
}

TEST_CASE("parse_record rejects bad rows") {
  CHECK_THROWS_AS(parse_record("{not json", 7), ParseError);
  CHECK_THROWS_AS(parse_record("[1,2]"), ParseError);
  CHECK_THROWS_AS(parse_record(R"({"title":"no id"})"), ValidationError);
  CHECK_THROWS_AS(parse_record(R"({"id":""})"), ValidationError);
  CHECK_THROWS_AS(parse_record(R"({"id":"a","year":1200})"), ValidationError);
  CHECK_THROWS_AS(parse_record(R"({"id":"a","year":"2001"})"), ValidationError);
  CHECK_THROWS_AS(parse_record(R"({"id":"a","citation_count":-1})"), ValidationError);
  CHECK_THROWS_AS(parse_record(R"({"id":"a","authors":"Solo"})"), ValidationError);
  CHECK_THROWS_AS(parse_record(R"({"id":"a","has_thumbnail":"yes"})"), ValidationError);
  const std::string future = R"({"id":"a","year":)" + std::to_string(current_year() + 2) + "}";
  CHECK_THROWS_AS(parse_record(future), ValidationError);
  const std::string next = R"({"id":"a","year":)" + std::to_string(current_year() + 1) + "}";
  CHECK_NOTHROW(parse_record(next));
  try {
    parse_record("{oops", 12);
    FAIL("expected throw");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 12") != std::string::npos);
  }
}

TEST_CASE("read_corpus reports duplicate ids with both lines") {
  std::istringstream in("{\"id\":\"a\"}\n\n{\"id\":\"b\"}\n{\"id\":\"a\"}\n");
  try {
    read_corpus(in);
    FAIL("expected throw");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("lines 1 and 4") != std::string::npos);
  }
}

TEST_CASE("read_corpus strict vs skip_invalid") {
  const std::string text = "{\"id\":\"a\"}\n{\"id\":\"b\",\"year\":99}\nnot json\n{\"id\":\"c\",\"x\":1}\n";
  std::istringstream strict(text);
  CHECK_THROWS_AS(read_corpus(strict), ValidationError);
  std::istringstream lenient(text);
  const auto loaded = read_corpus(lenient, LoadOptions{true});
  CHECK(loaded.report.loaded == 2);
  CHECK(loaded.report.skipped == 2);
  CHECK(loaded.report.unknown_fields == 1);
  CHECK(loaded.store.size() == 2);
}

TEST_CASE("load_corpus on a missing file is an I/O error") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), IoError);
}

TEST_CASE("corpus write/read round trip is lossless") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto docs = testing::random_corpus(rng, {.docs = 40});
    docs[0].language = "en";
    docs[0].key_terms = std::vector<std::string>{"wa", "wb"};
    docs[1].title = "Ünïcode “quotes” \\ and \"escapes\"";
    const auto store = CorpusStore::from_records(docs);
    std::stringstream buffer;
    write_corpus(store, buffer);
    const auto back = read_corpus(buffer).store;
    REQUIRE(back.size() == store.size());
    for (std::size_t i = 0; i < store.size(); ++i) CHECK(back.at(i) == store.at(i));
  }
}

TEST_CASE("CorpusStore lookups") {
  std::vector<DocumentRecord> docs = {testing::make_doc("a", "Deep Learning", {"X"}, "", 2020),
                                      testing::make_doc("b", "deep  learning!", {"Y"}, "", 2021),
                                      testing::make_doc("c", "Other", {"Z"}, "", 2021)};
  docs[0].doi = "10.1/ABC";
  docs[2].doi = "10.1/abc";
  const auto store = CorpusStore::from_records(docs);
  CHECK(store.find_by_id("b")->title == "deep  learning!");
  CHECK(store.find_by_id("zz") == nullptr);
  CHECK(store.position_of("c") == 2);
  CHECK(store.find_by_doi("10.1/Abc").size() == 2);
  CHECK(store.find_by_title_key("deep learning").size() == 2);
  CHECK_THROWS_AS(CorpusStore::from_records({docs[0], docs[0]}), ValidationError);
}

TEST_CASE("match_reference precedence") {
  std::vector<DocumentRecord> docs = {testing::make_doc("a", "Deep Learning", {"X"}, "", 2020),
                                      testing::make_doc("b", "Deep Learning", {"Y"}, "", 2021),
                                      testing::make_doc("c", "Unique Title", {"Z"}, "", 2019)};
  docs[0].doi = "10.1/a";
  docs[1].doi = "10.1/dup";
  docs[2].doi = "10.1/DUP";
  const auto store = CorpusStore::from_records(docs);

  ReferenceDocument ref;
  ref.id = "c";
  ref.doi = "10.1/a";
  CHECK(match_reference(ref, store)->id == "c");

  ref = {};
  ref.id = "missing";
  ref.doi = "10.1/A";
  CHECK(match_reference(ref, store)->id == "a");

  ref = {};
  ref.doi = "10.1/dup";
  CHECK(match_reference(ref, store) == nullptr);
  ref.title = "unique title";
  CHECK(match_reference(ref, store)->id == "c");

  ref = {};
  ref.title = "Deep learning";
  CHECK(match_reference(ref, store) == nullptr);
  ref.year = 2021;
  CHECK(match_reference(ref, store)->id == "b");
  ref.year = 1999;
  CHECK(match_reference(ref, store) == nullptr);
}

TEST_CASE("reference_from_json field paths") {
  CHECK_THROWS_AS(reference_from_json(json::array()), ValidationError);
  try {
    reference_from_json(json::object());
    FAIL("expected throw");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "document");
  }
  try {
    reference_from_json(json{{"title", 5}});
    FAIL("expected throw");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "document.title");
  }
  const auto ref = reference_from_json(json{{"doi", "10.1/x"}, {"year", 2001}, {"authors", {"A"}}});
  CHECK(ref.doi == "10.1/x");
  CHECK(ref.year == 2001);
  CHECK(reference_from_json(to_json(ref)) == ref);
}
