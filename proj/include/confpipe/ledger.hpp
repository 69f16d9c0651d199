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

// Append-only provenance ledger and content-addressed artifact store.
//
// INVARIANTS:
//   1. Events are append-only; seq is strictly increasing with no gaps.
//   2. Stored artifact bytes are write-once; the hash is the identity.
//   3. The in-memory paper/dataset state is exactly the fold of the event
//      log — replay on open rebuilds it bit for bit.
//   4. append() is the single serialization point; it is safe to call from
//      concurrent workers.
//
// On-disk layout under the ledger root:
//   events.log               one event per line:
//                            seq|iso8601|paper_id|stage|action|actor|hashes
//   objects/<hh>/<rest>      artifact bytes keyed by sha256 hex

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "confpipe/clock.hpp"
#include "confpipe/types.hpp"

namespace confpipe {

// Write-once content-addressed file store: objects/<hh>/<rest-of-hex>.
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path root);

  // Stores bytes, returns the sha256 hex key. Idempotent for equal bytes.
  std::string put(std::string_view bytes);
  std::string get(const std::string& content_hash) const;
  bool exists(const std::string& content_hash) const;

 private:
  std::filesystem::path path_for(const std::string& hash) const;
  std::filesystem::path root_;
};

struct AuditState {
  std::string manifest_hash;
  uint64_t checked = 0;
  uint64_t matched = 0;
  std::vector<std::string> discrepancy_hashes;
  std::string timestamp;
  bool pass() const { return checked == matched; }
};

// Reserved ledger-scope id for conference-level events (release manifest).
inline constexpr const char* kReleaseScope = "RELEASE";

class Ledger {
 public:
  // Opens or creates a ledger at `root`, replaying any existing event log.
  Ledger(std::filesystem::path root, std::shared_ptr<Clock> clock);

  // --- event log -----------------------------------------------------------

  // Appends an event and applies it to the live state. Assigns the next
  // seq. Empty timestamp means "ledger clock now". Returns the seq.
  uint64_t append(const std::string& paper_id, const std::string& stage,
                  const std::string& action, const ActorId& actor,
                  std::vector<std::string> artifact_hashes = {},
                  std::string timestamp = {});

  std::vector<LedgerEvent> events() const;
  uint64_t event_count() const;

  // --- artifacts -----------------------------------------------------------

  // Stores bytes content-addressed, binds the ref into the record's role
  // slot, and appends an `artifact` event. Errors: empty payload, unknown
  // paper, role already bound to a different hash.
  ArtifactRef put_artifact(std::string_view bytes, ArtifactRole role,
                           const std::string& paper_id,
                           const std::string& media_hint, const ActorId& actor,
                           std::string timestamp = {});

  // Returns the exact stored bytes. Error "unknown_hash" if absent.
  std::string get_artifact(const std::string& content_hash) const;

  // Content-addressed store without record binding (raw agent outputs,
  // re-review rounds). No event is appended; callers reference the hash in
  // their own events.
  std::string put_blob(std::string_view bytes);
  bool has_blob(const std::string& content_hash) const;

  // --- papers --------------------------------------------------------------

  // Mints the next PT<t>-<CODE>-<NN> id for the track and appends the
  // registration event. The dataset must be registered first.
  std::string register_paper(const std::string& dataset_id, Track track,
                             const ActorId& actor, std::string timestamp = {});

  std::optional<PaperRecord> paper(const std::string& paper_id) const;
  std::vector<PaperRecord> papers() const;
  std::vector<PaperRecord> papers_in_track(Track t) const;

  // --- datasets ------------------------------------------------------------

  // Appends a dataset registration event with a minted DS-<CODE>-<NN> id.
  std::string register_dataset_record(const DatasetRecord& record,
                                      const ActorId& actor,
                                      std::string timestamp = {});
  std::optional<DatasetRecord> dataset(const std::string& dataset_id) const;
  std::optional<DatasetRecord> dataset_by_url(const std::string& url,
                                              Track track) const;
  std::vector<DatasetRecord> datasets() const;

  // dataset_id,url,track,ingestion_date,license_id,redistribution,
  // commercial_use,modification,ip_risk
  std::string export_dataset_registry() const;

  // Imports registry rows in the export format, preserving dataset ids.
  // Rows whose (url, track) already exist are skipped; an id collision with
  // a different url is an error. Returns the number of records added.
  int import_dataset_registry(const std::string& csv_text,
                              const ActorId& actor, std::string timestamp = {});

  // --- workbook ------------------------------------------------------------

  // UTF-8 CSV, one row per paper in the track, workbook column set.
  std::string export_workbook(Track t) const;

  // --- typed event helpers ---------------------------------------------------

  void record_draft_meta(const std::string& paper_id, const std::string& title,
                         int pages, double hours, const ActorId& actor,
                         std::string timestamp = {});
  // Records the review driving triage for `slot` (1 or 2). `round` > 1
  // updates review_refs without touching the immutable role binding.
  void record_review(const std::string& paper_id, int slot, double score10,
                     const std::string& decision, const std::string& review_hash,
                     int round, const ActorId& actor,
                     std::string timestamp = {});
  void record_triage(const std::string& paper_id, double r1, double r2,
                     double total, const std::string& decision,
                     const ActorId& actor, std::string timestamp = {});
  void record_final(const std::string& paper_id, const std::string& decision,
                    const ActorId& actor, std::string timestamp = {});
  void record_gate(const std::string& paper_id, const std::string& gate,
                   const std::string& decision, const std::string& approver,
                   const std::string& note, std::string timestamp = {});
  void record_authors(const std::string& paper_id, const AuthorSet& authors,
                      const ActorId& actor, std::string timestamp = {});
  void record_camera_checks(const std::string& paper_id, bool pass,
                            const std::string& details, const ActorId& actor,
                            std::string timestamp = {});
  void record_manifest(const std::string& manifest_hash,
                       const std::set<std::string>& paper_ids,
                       const ActorId& actor, std::string timestamp = {});
  void record_audit(const AuditState& audit, const ActorId& actor,
                    std::string timestamp = {});
  // Stage transitions are validated by the orchestrator; the ledger only
  // records them.
  void advance_stage(const std::string& paper_id, StageState target,
                     const ActorId& actor, std::string timestamp = {});

  // --- release state ---------------------------------------------------------

  std::optional<AuditState> last_audit() const;
  std::set<std::string> manifest_paper_ids() const;
  std::string manifest_artifact_hash() const;

  // --- integrity --------------------------------------------------------------

  // Referential completeness: hashes referenced by any record but absent
  // from the store. Empty means consistent.
  std::vector<std::string> missing_artifacts() const;

  const std::filesystem::path& root() const { return root_; }
  Clock& clock() { return *clock_; }

 private:
  uint64_t append_locked(const std::string& paper_id, const std::string& stage,
                         const std::string& action, const ActorId& actor,
                         std::vector<std::string> artifact_hashes,
                         std::string timestamp);
  void apply(const LedgerEvent& e);
  void persist(const LedgerEvent& e);
  static LedgerEvent parse_line(const std::string& line);
  static std::string encode_line(const LedgerEvent& e);

  std::filesystem::path root_;
  std::shared_ptr<Clock> clock_;
  ArtifactStore store_;

  mutable std::shared_mutex mu_;
  std::vector<LedgerEvent> events_;
  uint64_t next_seq_ = 1;
  std::map<std::string, PaperRecord> papers_;
  std::map<std::string, DatasetRecord> datasets_;
  std::optional<AuditState> last_audit_;
  std::set<std::string> manifest_papers_;
  std::string manifest_hash_;
  std::unique_ptr<std::ofstream> log_out_;
};

// The exact workbook header, in order.
std::vector<std::string> workbook_columns();

}  // namespace confpipe
