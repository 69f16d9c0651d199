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

#include <fstream>
#include <random>

#include <json.hpp>

#include "confpipe/archive.hpp"
#include "confpipe/digest.hpp"
#include "confpipe/error.hpp"
#include "confpipe/orchestrator.hpp"
#include "test_util.hpp"

using namespace confpipe;
using namespace confpipe::archive;
using test::TempDir;

namespace {

// Drives the five-paper fixture to completion and hands back the engine's
// ledger for archive-level assertions.
struct ArchivedRun {
  TempDir dir{"archive-run"};
  std::shared_ptr<Ledger> ledger;
  std::unique_ptr<orchestrator::Engine> engine;

  ArchivedRun() {
    ledger = std::make_shared<Ledger>(dir.path() / "ledger", test::sim_clock());
    auto config = test::mock_config(dir.path() / "published");
    engine = std::make_unique<orchestrator::Engine>(*ledger, config);
    auto summary = engine->run();
    EXPECT_TRUE(summary.paper_errors.empty());
    EXPECT_EQ(summary.archived, 2);
  }

  std::vector<PaperRecord> archived_papers() {
    std::vector<PaperRecord> out;
    for (const auto& p : ledger->papers())
      if (p.stage == StageState::Archived) out.push_back(p);
    return out;
  }
};

}  // namespace

TEST(Manifest, EmptyListIsValid) {
  TempDir dir("manifest-empty");
  Ledger ledger(dir.path(), test::sim_clock());
  auto manifest = build_manifest(ledger, {});
  EXPECT_TRUE(manifest.entries.empty());
  EXPECT_EQ(manifest.hash_algorithm, "sha256");
  // Hash over the empty canonical form, still well defined.
  EXPECT_EQ(manifest.manifest_hash, sha256_hex(""));
}

TEST(Manifest, EntriesSortedAndComplete) {
  ArchivedRun run;
  auto papers = run.archived_papers();
  ASSERT_EQ(papers.size(), 2u);
  auto manifest = build_manifest(*run.ledger, papers);

  // Deterministic ordering by (paper_id, role).
  for (size_t i = 1; i < manifest.entries.size(); ++i) {
    EXPECT_LE(std::tie(manifest.entries[i - 1].paper_id,
                       manifest.entries[i - 1].role),
              std::tie(manifest.entries[i].paper_id, manifest.entries[i].role));
  }
  // Manifest completeness: every ref reachable from an archived paper is in.
  for (const auto& p : papers) {
    for (const auto& [role, ref] : p.artifact_refs) {
      bool found = false;
      for (const auto& e : manifest.entries)
        if (e.paper_id == p.paper_id && e.role == role_name(role) &&
            e.content_hash == ref.content_hash)
          found = true;
      EXPECT_TRUE(found) << p.paper_id << " " << role_name(role);
    }
  }
  // Every entry's hash exists in the store.
  for (const auto& e : manifest.entries)
    EXPECT_NO_THROW(run.ledger->get_artifact(e.content_hash)) << e.role;
}

TEST(Manifest, RebuildIsByteIdenticalModuloCreated) {
  ArchivedRun run;
  auto papers = run.archived_papers();
  auto first = build_manifest(*run.ledger, papers, true, "2025-10-02T00:00:00Z");
  auto second = build_manifest(*run.ledger, papers, true, "2025-10-03T00:00:00Z");
  EXPECT_EQ(first.canonical_entries(), second.canonical_entries());
  EXPECT_EQ(first.manifest_hash, second.manifest_hash);
  EXPECT_NE(first.to_file(), second.to_file());  // created_at differs
}

TEST(Manifest, ParsesItsOwnFileFormat) {
  ArchivedRun run;
  auto manifest = build_manifest(*run.ledger, run.archived_papers());
  auto parsed = ReleaseManifest::parse(manifest.to_file());
  EXPECT_EQ(parsed.hash_algorithm, manifest.hash_algorithm);
  EXPECT_EQ(parsed.created_at, manifest.created_at);
  EXPECT_EQ(parsed.entries, manifest.entries);
  EXPECT_EQ(parsed.manifest_hash, manifest.manifest_hash);
}

TEST(Manifest, IneligiblePapersRejected) {
  TempDir dir("manifest-inelig");
  Ledger ledger(dir.path() / "ledger", test::sim_clock());
  DatasetRecord d;
  d.url = "https://example.org/x";
  d.track = Track::SocialProgress;
  std::string ds = ledger.register_dataset_record(d, ActorId::agent("t"));
  std::string paper = ledger.register_paper(ds, Track::SocialProgress,
                                            ActorId::agent("t"));
  auto record = ledger.paper(paper);
  EXPECT_THROW(build_manifest(ledger, {*record}), Error);
}

TEST(Audit, PristinePublishMatches) {
  ArchivedRun run;
  auto manifest =
      ReleaseManifest::parse(run.ledger->get_artifact(run.ledger->manifest_artifact_hash()));
  auto report = audit(manifest, run.dir.path() / "published");
  EXPECT_EQ(report.checked, manifest.entries.size());
  EXPECT_EQ(report.matched, report.checked);
  EXPECT_TRUE(report.discrepancies.empty());
  EXPECT_TRUE(report.pass());
}

TEST(Audit, SingleByteFlipIsolatedToOneEntry) {
  ArchivedRun run;
  auto manifest =
      ReleaseManifest::parse(run.ledger->get_artifact(run.ledger->manifest_artifact_hash()));
  ASSERT_FALSE(manifest.entries.empty());
  const auto& victim = manifest.entries[manifest.entries.size() / 2];
  auto file = run.dir.path() / "published" / victim.public_url;
  std::string bytes = test::read_file(file);
  bytes[bytes.size() / 2] ^= 0x01;
  test::write_file(file, bytes);

  auto report = audit(manifest, run.dir.path() / "published");
  EXPECT_EQ(report.matched + 1, report.checked);
  ASSERT_EQ(report.discrepancies.size(), 1u);
  EXPECT_EQ(report.discrepancies[0].paper_id, victim.paper_id);
  EXPECT_EQ(report.discrepancies[0].role, victim.role);
  EXPECT_EQ(report.discrepancies[0].expected_hash, victim.content_hash);
  EXPECT_NE(report.discrepancies[0].actual_hash, victim.content_hash);
}

TEST(Audit, MissingFileReportsAbsent) {
  ArchivedRun run;
  auto manifest =
      ReleaseManifest::parse(run.ledger->get_artifact(run.ledger->manifest_artifact_hash()));
  const auto& victim = manifest.entries.front();
  std::filesystem::remove(run.dir.path() / "published" / victim.public_url);
  auto report = audit(manifest, run.dir.path() / "published");
  ASSERT_EQ(report.discrepancies.size(), 1u);
  EXPECT_EQ(report.discrepancies[0].actual_hash, "absent");

  EXPECT_THROW(audit(manifest, run.dir.path() / "no-such-dir"), Error);
}

TEST(Proceedings, GroupedByTrackAndSorted) {
  ArchivedRun run;
  std::string json_text = emit_proceedings(*run.ledger, run.archived_papers());
  auto j = nlohmann::json::parse(json_text);
  ASSERT_EQ(j["proceedings"].size(), 5u);  // the five thematic tracks
  EXPECT_EQ(j["proceedings"][0]["track"], "Social Progress");
  auto& sp = j["proceedings"][0]["papers"];
  ASSERT_EQ(sp.size(), 2u);
  EXPECT_LT(sp[0]["paper_id"].get<std::string>(),
            sp[1]["paper_id"].get<std::string>());
  EXPECT_FALSE(sp[0]["abstract"].get<std::string>().empty());
  EXPECT_GE(sp[0]["authors"].size(), 2u);
  EXPECT_FALSE(sp[0]["institution"].get<std::string>().empty());
  EXPECT_TRUE(sp[0]["links"].contains("camera_ready"));
}

TEST(Proceedings, UnlockedAuthorsRejected) {
  ArchivedRun run;
  auto papers = run.archived_papers();
  papers[0].authors.locked = false;
  EXPECT_THROW(emit_proceedings(*run.ledger, papers), Error);
}

TEST(Podcast, OneEpisodePerTrack) {
  std::vector<PodcastEpisode> episodes;
  for (Track t : all_tracks()) {
    episodes.push_back({t, "Episode " + track_name(t), "Track overview.",
                        1800.0, "transcripts/" + track_code(t) + ".txt"});
  }
  auto feed = nlohmann::json::parse(emit_podcast_feed(episodes));
  ASSERT_EQ(feed["episodes"].size(), 5u);
  EXPECT_EQ(feed["episodes"][0]["duration_s"], 1800.0);

  episodes.push_back({Track::SocialProgress, "Duplicate", "", 60.0, ""});
  EXPECT_THROW(emit_podcast_feed(episodes), Error);
}

TEST(Podcast, NegativeDurationRejected) {
  EXPECT_THROW(
      emit_podcast_feed({{Track::Sustainability, "Bad", "", -1.0, ""}}), Error);
}
