#include <fstream>
#include <thread>

#include "doctest.h"
#include "scholrec/error.hpp"
#include "scholrec/feedback.hpp"
#include "synthetic.hpp"

using namespace scholrec;
using nlohmann::json;

namespace {

FeedbackEntry report(const std::string& ref, const std::string& doc, const std::string& who) {
  return {ref, doc, "2026-03-01T12:00:00Z", who};
}

InteractionEvent event(const std::string& user, const std::string& doc, EventKind kind) {
  InteractionEvent e;
  e.user_hash = user;
  e.doc_id = doc;
  e.access_time = "2026-03-01T12:00:00Z";
  e.kind = kind;
  return e;
}

}  // namespace

TEST_CASE("feedback json validation") {
  const json good = {{"reference_key", "r"}, {"recommended_id", "d"},
                     {"reported_at", "2026-01-01T00:00:00Z"}, {"reporter_hash", "h"}};
  const auto entry = feedback_from_json(good);
  CHECK(entry == FeedbackEntry{"r", "d", "2026-01-01T00:00:00Z", "h"});
  CHECK(feedback_from_json(to_json(entry)) == entry);
  for (const char* key : {"reference_key", "recommended_id", "reported_at", "reporter_hash"}) {
    auto broken = good;
    broken.erase(key);
    CHECK_THROWS_AS(feedback_from_json(broken), ValidationError);
  }
  auto bad_time = good;
  bad_time["reported_at"] = "last week";
  CHECK_THROWS_AS(feedback_from_json(bad_time), ValidationError);
  auto empty_doc = good;
  empty_doc["recommended_id"] = "";
  CHECK_THROWS_AS(feedback_from_json(empty_doc), ValidationError);
}

TEST_CASE("pair ban is immediate, global ban needs distinct reporters") {
  Blacklist bl(3);
  bl.apply(report("r1", "d", "u1"));
  CHECK(bl.is_blacklisted("r1", "d"));
  CHECK_FALSE(bl.is_blacklisted("r2", "d"));
  bl.apply(report("r2", "d", "u1"));
  CHECK(bl.distinct_reporters("d") == 1);
  bl.apply(report("r3", "d", "u2"));
  CHECK_FALSE(bl.is_globally_banned("d"));
  CHECK_FALSE(bl.is_blacklisted("r9", "d"));
  bl.apply(report("r1", "d", "u3"));
  CHECK(bl.is_globally_banned("d"));
  CHECK(bl.is_blacklisted("r9", "d"));
  CHECK_FALSE(bl.is_blacklisted("r9", "other"));
}

TEST_CASE("feedback log replay reproduces the blacklist") {
  const auto dir = testing::scratch_dir("feedback");
  const auto log = dir / "feedback.jsonl";
  std::vector<FeedbackEntry> entries;
  for (int i = 0; i < 40; ++i) {
    entries.push_back(report("r" + std::to_string(i % 7), "d" + std::to_string(i % 5), "u" + std::to_string(i % 4)));
  }
  {
    FeedbackStore store(3, log);
    for (const auto& e : entries) store.record_feedback(e);
    CHECK_THROWS_AS(store.record_feedback(report("", "d", "u")), ValidationError);
  }
  Blacklist memory(3);
  for (const auto& e : entries) memory.apply(e);
  const auto replayed = replay_feedback_log(log, 3);
  FeedbackStore reopened(3, log);
  for (int r = 0; r < 8; ++r) {
    for (int d = 0; d < 6; ++d) {
      const auto ref = "r" + std::to_string(r), doc = "d" + std::to_string(d);
      CHECK(replayed.is_blacklisted(ref, doc) == memory.is_blacklisted(ref, doc));
      CHECK(reopened.blacklist_check(ref, doc) == memory.is_blacklisted(ref, doc));
    }
  }
  // the rejected entry never reached the log
  std::ifstream in(log);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == entries.size());
}

TEST_CASE("malformed feedback log lines fail replay") {
  const auto dir = testing::scratch_dir("feedback-bad");
  const auto log = dir / "feedback.jsonl";
  std::ofstream(log) << "{\"reference_key\":\"r\"}\n";
  CHECK_THROWS(replay_feedback_log(log));
}

TEST_CASE("blacklist tolerates concurrent writers") {
  FeedbackStore store(3);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&store, t] {
      for (int i = 0; i < 200; ++i) store.record_feedback(report("r" + std::to_string(i), "d", "u" + std::to_string(t)));
    });
  }
  for (auto& th : threads) th.join();
  CHECK(store.blacklist().is_globally_banned("d"));
  CHECK(store.blacklist().distinct_reporters("d") == 4);
}

TEST_CASE("event json and validation") {
  auto e = event("u", "d", EventKind::kClick);
  e.variant = "B";
  e.source_doc_id = "ref";
  CHECK(event_from_json(to_json(e)) == e);
  auto j = to_json(e);
  j["kind"] = "hover";
  CHECK_THROWS_AS(event_from_json(j), ValidationError);
  j = to_json(e);
  j["access_time"] = "now";
  CHECK_THROWS_AS(event_from_json(j), ValidationError);
  j = to_json(e);
  j.erase("user_hash");
  CHECK_THROWS_AS(event_from_json(j), ValidationError);
}

TEST_CASE("event log flags orphans and persists") {
  const auto dir = testing::scratch_dir("events");
  const auto path = dir / "events.jsonl";
  {
    EventLog log(path);
    CHECK(log.record_event(event("u1", "d1", EventKind::kClick)).orphan);
    CHECK_FALSE(log.record_event(event("u1", "d1", EventKind::kImpression)).orphan);
    CHECK_FALSE(log.record_event(event("u1", "d1", EventKind::kClick)).orphan);
    CHECK(log.record_event(event("u2", "d1", EventKind::kClick)).orphan);
    CHECK(log.size() == 4);
  }
  const auto events = read_event_log(path);
  REQUIRE(events.size() == 4);
  CHECK(events[0].orphan);
  CHECK_FALSE(events[2].orphan);
  EventLog reopened(path);
  CHECK(reopened.size() == 4);
  CHECK_FALSE(reopened.record_event(event("u1", "d1", EventKind::kClick)).orphan);
}
