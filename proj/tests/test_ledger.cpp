/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <gtest/gtest.h>

#include <map>
#include <thread>

#include "confpipe/csv.hpp"
#include "confpipe/digest.hpp"
#include "confpipe/error.hpp"
#include "confpipe/intake.hpp"
#include "confpipe/ledger.hpp"
#include "confpipe/strings.hpp"
#include "test_util.hpp"

using namespace confpipe;
using test::TempDir;

namespace {

DatasetRecord clean_dataset(const std::string& url) {
  DatasetRecord d;
  d.url = url;
  d.track = Track::SocialProgress;
  d.ingestion_date = "2025-10-01";
  d.license_id = "CC-BY-4.0";
  d.permissions = {Permission::yes, Permission::yes, Permission::yes};
  d.ip_risk = false;
  return d;
}

std::string register_fixture_paper(Ledger& ledger, const std::string& url) {
  std::string ds = ledger.register_dataset_record(clean_dataset(url),
                                                  ActorId::agent("intake"));
  return ledger.register_paper(ds, Track::SocialProgress,
                               ActorId::agent("intake"));
}

}  // namespace

TEST(Ledger, FirstEventHasSeqOne) {
  TempDir dir("ledger-seq");
  Ledger ledger(dir.path(), test::sim_clock());
  uint64_t seq = ledger.append("DS-X", "-",
                               LedgerEvent::make_action("register",
                                                        {{"kind", "release"}}),
                               ActorId::agent("t"));
  EXPECT_EQ(seq, 1u);
}

TEST(Ledger, ConcurrentAppendsStayGapFree) {
  TempDir dir("ledger-conc");
  Ledger ledger(dir.path(), test::sim_clock());
  constexpr int kThreads = 8, kEach = 50;
  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < kEach; ++i) {
        ledger.append("RELEASE", "-", "note", ActorId::agent("w"));
      }
    });
  }
  for (auto& t : threads) t.join();
  auto events = ledger.events();
  ASSERT_EQ(events.size(), static_cast<size_t>(kThreads * kEach));
  for (size_t i = 0; i < events.size(); ++i)
    EXPECT_EQ(events[i].seq, i + 1) << "gap or duplicate at " << i;
}

TEST(Ledger, UnknownPaperRejectedForNonRegisterActions) {
  TempDir dir("ledger-unknown");
  Ledger ledger(dir.path(), test::sim_clock());
  EXPECT_THROW(ledger.append("PT1-SOCP-99", "-", "draft", ActorId::agent("t")),
               Error);
}

TEST(Ledger, ArtifactRoundTripAndDedup) {
  TempDir dir("ledger-artifact");
  Ledger ledger(dir.path(), test::sim_clock());
  std::string paper = register_fixture_paper(ledger, "https://example.org/ds");

  auto ref = ledger.put_artifact("draft body", ArtifactRole::draft, paper,
                                 "text/plain", ActorId::agent("t"));
  EXPECT_EQ(ledger.get_artifact(ref.content_hash), "draft body");

  // Same bytes again: identical ref, no rebinding error.
  auto ref2 = ledger.put_artifact("draft body", ArtifactRole::draft, paper,
                                  "text/plain", ActorId::agent("t"));
  EXPECT_EQ(ref.content_hash, ref2.content_hash);

  // Different bytes under a bound role violate immutability.
  EXPECT_THROW(ledger.put_artifact("other body", ArtifactRole::draft, paper,
                                   "text/plain", ActorId::agent("t")),
               Error);
  // Empty payloads are rejected outright.
  EXPECT_THROW(ledger.put_artifact("", ArtifactRole::review1, paper,
                                   "text/plain", ActorId::agent("t")),
               Error);
  EXPECT_THROW(ledger.get_artifact(std::string(64, '0')), Error);
}

// Digest of the single byte 0x61 must match an independent tool's output.
TEST(Ledger, ContentHashMatchesIndependentDigest) {
  TempDir dir("ledger-digest");
  Ledger ledger(dir.path(), test::sim_clock());
  std::string paper = register_fixture_paper(ledger, "https://example.org/ds");
  auto ref = ledger.put_artifact("a", ArtifactRole::draft, paper, "text/plain",
                                 ActorId::agent("t"));
  EXPECT_EQ(ref.content_hash,
            "ca978112ca1bbdcafac231b39a23dc4da786eff8147c4e72b9807785afee48bb");
}

TEST(Ledger, PersistsAcrossReopen) {
  TempDir dir("ledger-restart");
  std::string hash, paper;
  {
    Ledger ledger(dir.path(), test::sim_clock());
    paper = register_fixture_paper(ledger, "https://example.org/ds");
    hash = ledger
               .put_artifact("durable bytes", ArtifactRole::draft, paper,
                             "text/plain", ActorId::agent("t"))
               .content_hash;
    ledger.record_draft_meta(paper, "Durable Title", 9, 1.5,
                             ActorId::agent("t"));
  }
  Ledger reopened(dir.path(), test::sim_clock());
  EXPECT_EQ(reopened.get_artifact(hash), "durable bytes");
  auto p = reopened.paper(paper);
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->title, "Durable Title");
  EXPECT_EQ(p->pages, 9);
  EXPECT_EQ(p->artifact_refs.at(ArtifactRole::draft).content_hash, hash);
  EXPECT_TRUE(reopened.missing_artifacts().empty());
}

// Event-sourcing oracle: an independent reducer over the exported event-log
// lines must reconstruct the same paper states the live store reports.
namespace {

struct ReducedPaper {
  std::string stage = "Registered";
  std::map<std::string, std::string> roles;  // role -> hash
  std::string initial, final_decision = "pending";
  std::string title;
};

std::map<std::string, ReducedPaper> reference_fold(const std::string& log_text) {
  std::map<std::string, ReducedPaper> papers;
  for (const auto& line : split(log_text, '\n')) {
    if (line.empty()) continue;
    auto f = split(line, '|');  // seq|ts|paper|stage|action|actor|hashes
    if (f.size() != 7) {
      ADD_FAILURE() << "bad line " << line;
      continue;
    }
    const std::string& id = f[2];
    std::string action = f[4];
    std::string verb = action.substr(0, action.find(' '));
    auto args = decode_kv(action.find(' ') == std::string::npos
                              ? ""
                              : action.substr(action.find(' ') + 1));
    if (verb == "register" && args["kind"] == "paper") {
      papers[id] = ReducedPaper{};
    } else if (verb == "advance" && papers.count(id)) {
      papers[id].stage = f[3];
      if (f[3] == "TriageReject") papers[id].final_decision = "REJECT";
      if (f[3] == "Archived") papers[id].final_decision = "ACCEPT";
    } else if (verb == "artifact" && papers.count(id)) {
      papers[id].roles[args["role"]] = split(f[6], ',')[0];
    } else if (verb == "triage" && papers.count(id)) {
      papers[id].initial = args["decision"];
    } else if (verb == "final" && papers.count(id)) {
      papers[id].final_decision = args["decision"];
    } else if (verb == "draft" && papers.count(id)) {
      papers[id].title = args["title"];
    }
  }
  return papers;
}

}  // namespace

TEST(Ledger, ReplayMatchesReferenceReducer) {
  TempDir dir("ledger-fold");
  Ledger ledger(dir.path(), test::sim_clock());
  std::string p1 = register_fixture_paper(ledger, "https://example.org/one");
  std::string p2 = register_fixture_paper(ledger, "https://example.org/two");
  ledger.put_artifact("draft one", ArtifactRole::draft, p1, "text/plain",
                      ActorId::agent("t"));
  ledger.record_draft_meta(p1, "Paper One", 8, 1.5, ActorId::agent("t"));
  ledger.advance_stage(p1, StageState::Drafted, ActorId::agent("t"));
  ledger.record_triage(p2, 7.0, 4.0, 5.5, "Reject", ActorId::agent("t"));
  ledger.advance_stage(p2, StageState::TriageReject, ActorId::agent("t"));

  auto reference = reference_fold(test::read_file(dir.path() / "events.log"));
  auto live = ledger.papers();
  ASSERT_EQ(reference.size(), live.size());
  for (const auto& p : live) {
    const auto& ref = reference.at(p.paper_id);
    EXPECT_EQ(ref.stage, stage_name(p.stage)) << p.paper_id;
    EXPECT_EQ(ref.initial, p.decisions.initial) << p.paper_id;
    EXPECT_EQ(ref.final_decision, p.decisions.final_decision) << p.paper_id;
    EXPECT_EQ(ref.title, p.title) << p.paper_id;
    std::map<std::string, std::string> live_roles;
    for (const auto& [role, r] : p.artifact_refs)
      live_roles[role_name(role)] = r.content_hash;
    EXPECT_EQ(ref.roles, live_roles) << p.paper_id;
  }

  // And a full reopen agrees with both.
  Ledger reopened(dir.path(), test::sim_clock());
  auto again = reopened.papers();
  ASSERT_EQ(again.size(), live.size());
  for (size_t i = 0; i < live.size(); ++i) {
    EXPECT_EQ(stage_name(again[i].stage), stage_name(live[i].stage));
    EXPECT_EQ(again[i].title, live[i].title);
  }
}

TEST(Ledger, WorkbookEmptyTrackIsHeaderOnly) {
  TempDir dir("ledger-wb-empty");
  Ledger ledger(dir.path(), test::sim_clock());
  std::string wb = ledger.export_workbook(Track::PrecisionHealth);
  auto rows = csv::parse(wb);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], workbook_columns());
  EXPECT_EQ(rows[0][10], "Total Score (0–10)");
}

TEST(Ledger, WorkbookRoundTripIsByteIdentical) {
  TempDir dir("ledger-wb-rt");
  Ledger ledger(dir.path(), test::sim_clock());
  std::string p1 = register_fixture_paper(ledger, "https://example.org/one");
  ledger.record_draft_meta(p1, "Commas, Quotes \" and & Ampersands", 10, 1.5,
                           ActorId::agent("t"));
  ledger.record_review(p1, 1, 7.0, "Weak Accept", sha256_hex("r1"), 1,
                       ActorId::agent("t"));
  ledger.record_review(p1, 2, 8.0, "Weak Accept", sha256_hex("r2"), 1,
                       ActorId::agent("t"));
  ledger.record_triage(p1, 7.0, 8.0, 7.5, "Accept", ActorId::agent("t"));

  std::string exported = ledger.export_workbook(Track::SocialProgress);
  auto rows = csv::parse(exported);
  std::string reexported;
  for (const auto& row : rows) reexported += csv::encode_row(row);
  EXPECT_EQ(reexported, exported);
}

TEST(Ledger, DatasetRegistryExportCarriesRiskFields) {
  TempDir dir("ledger-registry");
  Ledger ledger(dir.path(), test::sim_clock());
  auto risky = clean_dataset("https://example.org/risky");
  risky.permissions.commercial_use = Permission::unknown;
  risky.ip_risk = true;
  ledger.register_dataset_record(risky, ActorId::agent("t"));
  auto rows = csv::parse(ledger.export_dataset_registry());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "dataset_id");
  EXPECT_EQ(rows[1][6], "unknown");  // commercial_use
  EXPECT_EQ(rows[1][8], "true");     // ip_risk
}

TEST(Ledger, DuplicateDatasetRejected) {
  TempDir dir("ledger-dup");
  Ledger ledger(dir.path(), test::sim_clock());
  ledger.register_dataset_record(clean_dataset("https://example.org/x"),
                                 ActorId::agent("t"));
  EXPECT_THROW(ledger.register_dataset_record(
                   clean_dataset("https://example.org/x"), ActorId::agent("t")),
               Error);
}
