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

#include "confpipe/archive.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "confpipe/camera_ready.hpp"
#include "confpipe/digest.hpp"
#include "confpipe/error.hpp"
#include "confpipe/latex.hpp"
#include "confpipe/strings.hpp"

namespace confpipe::archive {

namespace fs = std::filesystem;

std::string ReleaseManifest::canonical_entries() const {
  std::string out;
  for (const auto& e : entries) {
    out += e.paper_id + "\t" + e.role + "\t" + e.content_hash + "\t" +
           std::to_string(e.byte_size) + "\t" + e.public_url + "\n";
  }
  return out;
}

std::string ReleaseManifest::to_file() const {
  return "algo: " + hash_algorithm + "\ncreated: " + created_at + "\n" +
         canonical_entries();
}

ReleaseManifest ReleaseManifest::parse(const std::string& text) {
  ReleaseManifest m;
  auto lines = split(text, '\n');
  size_t i = 0;
  for (; i < lines.size(); ++i) {
    if (starts_with(lines[i], "algo: ")) {
      m.hash_algorithm = lines[i].substr(6);
    } else if (starts_with(lines[i], "created: ")) {
      m.created_at = lines[i].substr(9);
    } else {
      break;
    }
  }
  for (; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = split(lines[i], '\t');
    if (fields.size() != 5)
      throw Error("bad_manifest", "malformed manifest line: " + lines[i]);
    m.entries.push_back({fields[0], fields[1], fields[2],
                         std::stoull(fields[3]), fields[4]});
  }
  m.manifest_hash = sha256_hex(m.canonical_entries());
  return m;
}

namespace {

std::string public_url_for(const std::string& paper_id, ArtifactRole role) {
  return "papers/" + paper_id + "/" + role_name(role) + role_extension(role);
}

bool review_role(ArtifactRole role) {
  return role == ArtifactRole::review1 || role == ArtifactRole::review2 ||
         role == ArtifactRole::response_letter;
}

}  // namespace

ReleaseManifest build_manifest(Ledger& ledger,
                               const std::vector<PaperRecord>& papers,
                               bool include_reviews, std::string timestamp) {
  ReleaseManifest m;
  m.hash_algorithm = kHashAlgorithm;
  m.created_at =
      timestamp.empty() ? ledger.clock().now_iso8601() : timestamp;

  std::set<std::string> ids;
  for (const auto& p : papers) {
    bool eligible = p.stage == StageState::CameraReady ||
                    p.stage == StageState::Presented ||
                    p.stage == StageState::Archived;
    if (!eligible)
      throw Error("not_eligible", p.paper_id + " is at stage " +
                                      stage_name(p.stage) +
                                      ", not archived-eligible");
    if (!p.has_artifact(ArtifactRole::camera_ready))
      throw Error("missing_artifact",
                  p.paper_id + " lacks a camera_ready artifact");
    ids.insert(p.paper_id);
    for (const auto& [role, ref] : p.artifact_refs) {
      if (!include_reviews && review_role(role)) continue;
      m.entries.push_back({p.paper_id, role_name(role), ref.content_hash,
                           ref.byte_size, public_url_for(p.paper_id, role)});
    }
  }
  std::sort(m.entries.begin(), m.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              return std::tie(a.paper_id, a.role) < std::tie(b.paper_id, b.role);
            });
  // created_at stays outside the hash so rebuilds are comparable.
  m.manifest_hash = sha256_hex(m.canonical_entries());

  std::string file = m.to_file();
  ledger.put_artifact(file, ArtifactRole::manifest, kReleaseScope, "text/plain",
                      ActorId::agent("archive"), timestamp);
  ledger.record_manifest(sha256_hex(file), ids, ActorId::agent("archive"),
                         timestamp);
  return m;
}

void publish(const Ledger& ledger, const ReleaseManifest& manifest,
             const fs::path& published_dir) {
  fs::create_directories(published_dir);
  for (const auto& e : manifest.entries) {
    fs::path dest = published_dir / e.public_url;
    fs::create_directories(dest.parent_path());
    std::ofstream out(dest, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("storage", "cannot publish " + dest.string());
    std::string bytes = ledger.get_artifact(e.content_hash);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  std::ofstream mout(published_dir / "manifest.txt",
                     std::ios::binary | std::ios::trunc);
  mout << manifest.to_file();

  // Metadata sidecars for each published paper.
  std::set<std::string> done;
  for (const auto& e : manifest.entries) {
    if (!done.insert(e.paper_id).second) continue;
    auto p = ledger.paper(e.paper_id);
    if (!p || !p->authors.locked) continue;
    std::string watermark_time;
    auto it = p->stage_timestamps.find(StageState::CameraReady);
    if (it != p->stage_timestamps.end()) watermark_time = it->second;
    std::ofstream side(published_dir / "papers" / e.paper_id / "metadata.json",
                       std::ios::trunc);
    side << camera::metadata_sidecar_json(p->paper_id, p->title, p->authors,
                                          p->track, watermark_time);
  }
}

AuditReport audit(const ReleaseManifest& manifest,
                  const fs::path& published_dir) {
  if (!fs::exists(published_dir) || !fs::is_directory(published_dir))
    throw Error("unreadable_dir",
                "published directory unreadable: " + published_dir.string());

  AuditReport report;
  for (const auto& e : manifest.entries) {
    ++report.checked;
    fs::path file = published_dir / e.public_url;
    if (!fs::exists(file)) {
      report.discrepancies.push_back(
          {e.paper_id, e.role, e.content_hash, "absent"});
      continue;
    }
    std::ifstream in(file, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string actual = sha256_hex(buf.str());
    if (actual == e.content_hash) {
      ++report.matched;
    } else {
      report.discrepancies.push_back(
          {e.paper_id, e.role, e.content_hash, actual});
    }
  }
  return report;
}

std::string emit_proceedings(const Ledger& ledger,
                             const std::vector<PaperRecord>& papers) {
  std::vector<PaperRecord> sorted = papers;
  std::sort(sorted.begin(), sorted.end(),
            [](const PaperRecord& a, const PaperRecord& b) {
              return a.paper_id < b.paper_id;
            });

  nlohmann::ordered_json tracks = nlohmann::ordered_json::array();
  for (Track t : all_tracks()) {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& p : sorted) {
      if (p.track != t) continue;
      if (!p.authors.locked)
        throw Error("unlocked_authors",
                    p.paper_id + " has no locked fictional author set");

      std::string abstract;
      auto cam = p.artifact_refs.find(ArtifactRole::camera_ready);
      if (cam != p.artifact_refs.end()) {
        auto doc = latex::scan(ledger.get_artifact(cam->second.content_hash));
        size_t a = doc.source.find("\\begin{abstract}");
        size_t b = doc.source.find("\\end{abstract}");
        if (a != std::string::npos && b != std::string::npos && b > a)
          abstract = normalize_ws(doc.source.substr(a + 16, b - a - 16));
      }

      nlohmann::ordered_json authors = nlohmann::ordered_json::array();
      for (const auto& a : p.authors.authors)
        authors.push_back({{"name", a.name}, {"origin_tag", a.origin_tag}});

      nlohmann::ordered_json links;
      for (ArtifactRole role : {ArtifactRole::camera_ready, ArtifactRole::slides,
                                ArtifactRole::avatar_job, ArtifactRole::video_meta}) {
        if (p.artifact_refs.count(role))
          links[role_name(role)] = public_url_for(p.paper_id, role);
      }

      entries.push_back({{"paper_id", p.paper_id},
                         {"title", p.title},
                         {"authors", authors},
                         {"institution", p.authors.institution},
                         {"abstract", abstract},
                         {"links", links}});
    }
    tracks.push_back({{"track", track_name(t)}, {"papers", entries}});
  }
  nlohmann::ordered_json j;
  j["proceedings"] = tracks;
  return j.dump(2);
}

std::string emit_podcast_feed(const std::vector<PodcastEpisode>& episodes) {
  std::set<std::string> seen;
  for (const auto& e : episodes) {
    if (!seen.insert(track_name(e.track)).second)
      throw Error("duplicate_episode",
                  "two episodes for track " + track_name(e.track));
    if (e.duration_s < 0.0)
      throw Error("bad_episode", "negative duration for episode " + e.title);
  }
  nlohmann::ordered_json eps = nlohmann::ordered_json::array();
  for (const auto& e : episodes) {
    eps.push_back({{"track", track_name(e.track)},
                   {"title", e.title},
                   {"description", e.description},
                   {"duration_s", e.duration_s},
                   {"transcript_ref", e.transcript_ref}});
  }
  nlohmann::ordered_json j;
  j["episodes"] = eps;
  return j.dump(2);
}

}  // namespace confpipe::archive
