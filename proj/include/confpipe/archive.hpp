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

#pragma once

// Release manifest over all archived artifacts, post-event audits comparing
// published files to archived bytes, and proceedings/podcast metadata.

#include <filesystem>
#include <string>
#include <vector>

#include "confpipe/ledger.hpp"
#include "confpipe/types.hpp"

namespace confpipe::archive {

struct ManifestEntry {
  std::string paper_id;
  std::string role;
  std::string content_hash;
  uint64_t byte_size = 0;
  std::string public_url;  // papers/<paper_id>/<role>.<ext>

  bool operator==(const ManifestEntry&) const = default;
};

struct ReleaseManifest {
  std::string hash_algorithm;  // named so audits are self-describing
  std::string created_at;
  std::vector<ManifestEntry> entries;  // sorted by (paper_id, role)
  std::string manifest_hash;  // over the canonical entry serialization only

  // Canonical line: paper_id<TAB>role<TAB>hash<TAB>size<TAB>url, LF.
  std::string canonical_entries() const;
  // 2-line header (algo, created) + canonical entries.
  std::string to_file() const;
  static ReleaseManifest parse(const std::string& text);
};

// One entry per (paper, artifact role present), deterministically ordered.
// Every listed paper must be in an archived-eligible stage (CameraReady or
// beyond) with a camera_ready artifact. The manifest is stored as its own
// artifact under the RELEASE scope and recorded in the event log.
// include_reviews covers reviews and response letters (publication policy).
ReleaseManifest build_manifest(Ledger& ledger,
                               const std::vector<PaperRecord>& papers,
                               bool include_reviews = true,
                               std::string timestamp = {});

// Writes every manifest entry's bytes under
// published_dir/papers/<paper_id>/<role>.<ext> plus the manifest file and
// per-paper metadata sidecars.
void publish(const Ledger& ledger, const ReleaseManifest& manifest,
             const std::filesystem::path& published_dir);

struct Discrepancy {
  std::string paper_id;
  std::string role;
  std::string expected_hash;
  std::string actual_hash;  // "absent" for missing files
};

struct AuditReport {
  uint64_t checked = 0;
  uint64_t matched = 0;
  std::vector<Discrepancy> discrepancies;
  bool pass() const { return checked == matched; }
};

// Re-hashes each published file against the manifest. Error on an
// unreadable published_dir.
AuditReport audit(const ReleaseManifest& manifest,
                  const std::filesystem::path& published_dir);

// Proceedings metadata grouped by the five thematic tracks; entries carry
// title, fictional authors, abstract, and links to the presentation assets.
// Error for a paper without a locked author set.
std::string emit_proceedings(const Ledger& ledger,
                             const std::vector<PaperRecord>& papers);

struct PodcastEpisode {
  Track track{};
  std::string title;
  std::string description;
  double duration_s = 0.0;
  std::string transcript_ref;
};

// At most one episode per track; negative durations are rejected.
std::string emit_podcast_feed(const std::vector<PodcastEpisode>& episodes);

}  // namespace confpipe::archive
