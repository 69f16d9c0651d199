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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace confpipe {

// ---------------------------------------------------------------------------
// Conference tracks
// ---------------------------------------------------------------------------

enum class Track {
  SocialProgress,
  ProductiveEconomies,
  PrecisionHealth,
  Sustainability,
  ArtificialIntelligence,
};

inline constexpr int kTrackCount = 5;

// "Social Progress"
std::string track_name(Track t);
// Four-letter code used inside paper ids: SOCP, PROE, PREH, SUST, ARTI.
std::string track_code(Track t);
// 1-based track number (the PT<n> prefix).
int track_number(Track t);
std::optional<Track> track_from_name(const std::string& name);
std::optional<Track> track_from_code(const std::string& code);
std::vector<Track> all_tracks();

// Paper ids follow PT<track#>-<TRACK>-<NN>, e.g. PT1-SOCP-01.
std::string make_paper_id(Track t, int nn);
bool is_paper_id(const std::string& id);
// Extracts the track from a well-formed paper id; nullopt otherwise or when
// the PT number and track code disagree.
std::optional<Track> paper_id_track(const std::string& id);
// The -NN suffix (1-based); -1 if malformed.
int paper_id_number(const std::string& id);

// ---------------------------------------------------------------------------
// Pipeline stages
// ---------------------------------------------------------------------------

enum class StageState {
  Registered,
  Drafted,
  Reviewed,
  TriageAccept,
  TriageRevise,
  TriageReject,  // terminal
  Revised,
  CameraReady,
  Presented,
  Archived,
};

std::string stage_name(StageState s);
std::optional<StageState> stage_from_name(const std::string& name);
bool stage_is_terminal(StageState s);

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

enum class ArtifactRole {
  dataset_meta,
  draft,
  review1,
  review2,
  revised,
  response_letter,
  camera_ready,
  slides,
  narration,
  avatar_job,
  video_meta,
  manifest,
};

std::string role_name(ArtifactRole r);
std::optional<ArtifactRole> role_from_name(const std::string& name);
// File extension used when artifacts are published: .tex, .txt or .json.
std::string role_extension(ArtifactRole r);
std::vector<ArtifactRole> all_roles();

// Content-addressed handle to immutable stored bytes.
struct ArtifactRef {
  ArtifactRole role{};
  std::string content_hash;  // lowercase hex sha256
  uint64_t byte_size = 0;
  std::string media_hint;

  bool operator==(const ArtifactRef&) const = default;
};

// ---------------------------------------------------------------------------
// Ledger events
// ---------------------------------------------------------------------------

struct ActorId {
  bool human = false;
  std::string id;  // "chair", "gen-1", ...

  static ActorId human_actor(std::string name) { return {true, std::move(name)}; }
  static ActorId agent(std::string agent_id) { return {false, std::move(agent_id)}; }

  std::string to_string() const { return (human ? "human:" : "agent:") + id; }
  static ActorId parse(const std::string& s);
  bool operator==(const ActorId&) const = default;
};

struct LedgerEvent {
  uint64_t seq = 0;
  std::string timestamp;  // ISO-8601 UTC
  std::string paper_id;   // paper id, dataset id, or "RELEASE"
  std::string stage;      // stage name or "-"
  std::string action;     // "<verb>" or "<verb> <k=v&...>" (values pct-encoded)
  ActorId actor;
  std::vector<std::string> artifact_hashes;

  std::string verb() const;
  std::map<std::string, std::string> args() const;
  static std::string make_action(const std::string& verb,
                                 const std::map<std::string, std::string>& args);
};

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

enum class Permission { yes, no, unknown };

std::string permission_name(Permission p);
std::optional<Permission> permission_from_name(const std::string& s);

struct DuaItem {
  std::string item;
  bool satisfied = false;
  bool operator==(const DuaItem&) const = default;
};

struct LicensePermissions {
  Permission redistribution = Permission::unknown;
  Permission commercial_use = Permission::unknown;
  Permission modification = Permission::unknown;
  bool operator==(const LicensePermissions&) const = default;
};

struct DatasetRecord {
  std::string dataset_id;
  std::string url;
  Track track{};
  std::string ingestion_date;  // UTC date
  std::string license_id = "unknown";
  LicensePermissions permissions;
  std::vector<DuaItem> dua_checklist;
  bool ip_risk = true;
  std::string notes;
};

// ---------------------------------------------------------------------------
// Papers
// ---------------------------------------------------------------------------

struct ReviewSlot {
  double score = 0.0;        // on the 10-point workbook scale
  std::string decision;      // "Weak Accept", "Reject", ...
  std::string content_hash;  // current review artifact
  bool present = false;
};

struct AuthorSet {
  struct Author {
    std::string name;
    std::string origin_tag;
    bool operator==(const Author&) const = default;
  };
  std::vector<Author> authors;  // 2..3 once assigned
  std::string institution;
  uint64_t seed = 0;
  bool locked = false;
};

struct GateRecord {
  std::string decision;  // "approve" | "reject"
  std::string approver;
  std::string timestamp;
  std::string note;
};

// One paper's identity, stage, and links to every artifact and decision —
// the workbook row. Rebuilt from the event log on open.
struct PaperRecord {
  std::string paper_id;
  Track track{};
  std::string dataset_id;
  std::string title;
  int pages = 0;
  double generation_hours = 0.0;

  StageState stage = StageState::Registered;
  std::map<StageState, std::string> stage_timestamps;
  std::vector<std::pair<StageState, std::string>> stage_history;

  std::map<ArtifactRole, ArtifactRef> artifact_refs;
  // Current reviews driving triage. Slot 0 = reviewer 1. Re-review rounds
  // update these without rebinding the immutable review1/review2 roles.
  ReviewSlot review_refs[2];
  int review_round = 0;

  struct {
    std::string initial;         // "Accept" | "Revise" | "Reject" | ""
    std::string final_decision;  // "ACCEPT" | "REJECT" | "pending"
  } decisions{.initial = "", .final_decision = "pending"};
  double total_score = 0.0;

  struct {
    bool revised_paper = false;
    bool response_letter = false;
  } flags;

  AuthorSet authors;
  std::map<std::string, GateRecord> gates;  // keyed by gate name
  bool gate_terminated = false;  // dataset_clearance rejected
  int re_reviews_used = 0;
  bool camera_checks_pass = false;  // latest camera-ready verification result

  bool has_artifact(ArtifactRole r) const { return artifact_refs.count(r) > 0; }
};

inline constexpr const char* kGateDatasetClearance = "dataset_clearance";
inline constexpr const char* kGateRevisionValidation = "revision_validation";
inline constexpr const char* kGateReleaseApproval = "release_approval";

}  // namespace confpipe
