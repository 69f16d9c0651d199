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

#include "confpipe/ledger.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "confpipe/csv.hpp"
#include "confpipe/digest.hpp"
#include "confpipe/error.hpp"
#include "confpipe/strings.hpp"

namespace confpipe {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// ArtifactStore
// ---------------------------------------------------------------------------

ArtifactStore::ArtifactStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
}

fs::path ArtifactStore::path_for(const std::string& hash) const {
  return root_ / hash.substr(0, 2) / hash.substr(2);
}

std::string ArtifactStore::put(std::string_view bytes) {
  std::string hash = sha256_hex(bytes);
  fs::path dest = path_for(hash);
  if (fs::exists(dest)) return hash;  // write-once; equal bytes by hash
  fs::create_directories(dest.parent_path());
  fs::path tmp = dest;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("storage", "cannot write object " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error("storage", "short write for object " + hash);
  }
  fs::rename(tmp, dest);
  return hash;
}

bool ArtifactStore::exists(const std::string& hash) const {
  return is_hex_digest(hash) && fs::exists(path_for(hash));
}

std::string ArtifactStore::get(const std::string& hash) const {
  if (!exists(hash)) throw Error("unknown_hash", "no object for " + hash);
  std::ifstream in(path_for(hash), std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------
// Event line codec
// ---------------------------------------------------------------------------

std::string Ledger::encode_line(const LedgerEvent& e) {
  std::string hashes = join(e.artifact_hashes, ",");
  std::ostringstream out;
  out << e.seq << '|' << e.timestamp << '|' << e.paper_id << '|' << e.stage
      << '|' << e.action << '|' << e.actor.to_string() << '|' << hashes;
  return out.str();
}

LedgerEvent Ledger::parse_line(const std::string& line) {
  auto parts = split(line, '|');
  if (parts.size() != 7)
    throw Error("bad_event", "malformed event line: " + line);
  LedgerEvent e;
  e.seq = std::stoull(parts[0]);
  e.timestamp = parts[1];
  e.paper_id = parts[2];
  e.stage = parts[3];
  e.action = parts[4];
  e.actor = ActorId::parse(parts[5]);
  if (!parts[6].empty()) e.artifact_hashes = split(parts[6], ',');
  return e;
}

// ---------------------------------------------------------------------------
// Ledger
// ---------------------------------------------------------------------------

Ledger::Ledger(fs::path root, std::shared_ptr<Clock> clock)
    : root_(std::move(root)), clock_(std::move(clock)), store_(root_ / "objects") {
  fs::create_directories(root_);
  fs::path log_path = root_ / "events.log";
  if (fs::exists(log_path)) {
    std::ifstream in(log_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      LedgerEvent e = parse_line(line);
      if (e.seq != next_seq_)
        throw Error("bad_event",
                    "sequence gap at " + std::to_string(e.seq) + ", expected " +
                        std::to_string(next_seq_));
      apply(e);
      events_.push_back(std::move(e));
      ++next_seq_;
    }
  }
  log_out_ = std::make_unique<std::ofstream>(log_path, std::ios::app);
  if (!*log_out_) throw Error("storage", "cannot open " + log_path.string());
}

void Ledger::persist(const LedgerEvent& e) {
  *log_out_ << encode_line(e) << '\n';
  log_out_->flush();
  if (!*log_out_) throw Error("storage", "event log write failed");
}

uint64_t Ledger::append(const std::string& paper_id, const std::string& stage,
                        const std::string& action, const ActorId& actor,
                        std::vector<std::string> artifact_hashes,
                        std::string timestamp) {
  std::unique_lock lock(mu_);
  return append_locked(paper_id, stage, action, actor,
                       std::move(artifact_hashes), std::move(timestamp));
}

uint64_t Ledger::append_locked(const std::string& paper_id,
                               const std::string& stage,
                               const std::string& action, const ActorId& actor,
                               std::vector<std::string> artifact_hashes,
                               std::string timestamp) {
  LedgerEvent e;
  e.seq = next_seq_;
  e.timestamp = timestamp.empty() ? clock_->now_iso8601() : std::move(timestamp);
  e.paper_id = paper_id;
  e.stage = stage;
  e.action = action;
  e.actor = actor;
  e.artifact_hashes = std::move(artifact_hashes);

  std::string verb = e.verb();
  if (verb != "register" && paper_id != kReleaseScope &&
      !papers_.count(paper_id) && !datasets_.count(paper_id)) {
    throw Error("unknown_paper", "no record for id " + paper_id);
  }

  persist(e);
  apply(e);
  events_.push_back(e);
  return next_seq_++;
}

// The reducer. Replay of the log through this function rebuilds the exact
// live state; every mutation path goes through here.
void Ledger::apply(const LedgerEvent& e) {
  std::string verb = e.verb();
  auto args = e.args();

  if (verb == "register") {
    const std::string kind = args["kind"];
    if (kind == "dataset") {
      DatasetRecord d;
      d.dataset_id = e.paper_id;
      d.url = args["url"];
      if (auto t = track_from_name(args["track"])) d.track = *t;
      d.ingestion_date = args["date"];
      d.license_id = args["license"];
      d.permissions.redistribution =
          permission_from_name(args["red"]).value_or(Permission::unknown);
      d.permissions.commercial_use =
          permission_from_name(args["com"]).value_or(Permission::unknown);
      d.permissions.modification =
          permission_from_name(args["mod"]).value_or(Permission::unknown);
      d.ip_risk = args["risk"] == "1";
      d.notes = args["notes"];
      if (!args["dua"].empty()) {
        for (const auto& item : split(args["dua"], ';')) {
          auto colon = item.rfind(':');
          if (colon == std::string::npos) continue;
          d.dua_checklist.push_back(
              {pct_decode(item.substr(0, colon)), item.substr(colon + 1) == "1"});
        }
      }
      datasets_[d.dataset_id] = std::move(d);
    } else if (kind == "paper") {
      PaperRecord p;
      p.paper_id = e.paper_id;
      if (auto t = paper_id_track(e.paper_id)) p.track = *t;
      p.dataset_id = args["dataset"];
      p.stage = StageState::Registered;
      p.stage_timestamps[p.stage] = e.timestamp;
      p.stage_history.emplace_back(p.stage, e.timestamp);
      papers_[p.paper_id] = std::move(p);
    }
    // kind == "release" reserves the conference scope; no state.
    return;
  }

  auto it = papers_.find(e.paper_id);
  PaperRecord* p = it == papers_.end() ? nullptr : &it->second;

  if (verb == "advance" && p) {
    auto target = stage_from_name(e.stage);
    if (!target) throw Error("bad_stage", "unknown stage " + e.stage);
    if (p->stage == StageState::Revised && *target == StageState::Reviewed)
      p->re_reviews_used += 1;
    p->stage = *target;
    p->stage_timestamps[*target] = e.timestamp;
    p->stage_history.emplace_back(*target, e.timestamp);
    if (*target == StageState::TriageReject) p->decisions.final_decision = "REJECT";
    if (*target == StageState::Archived) p->decisions.final_decision = "ACCEPT";
    return;
  }

  if (verb == "artifact" && p) {
    auto role = role_from_name(args["role"]);
    if (!role || e.artifact_hashes.empty()) return;
    ArtifactRef ref;
    ref.role = *role;
    ref.content_hash = e.artifact_hashes.front();
    ref.byte_size = args.count("size") ? std::stoull(args["size"]) : 0;
    ref.media_hint = args["media"];
    p->artifact_refs[*role] = ref;
    p->flags.revised_paper = p->artifact_refs.count(ArtifactRole::revised) > 0;
    p->flags.response_letter =
        p->artifact_refs.count(ArtifactRole::response_letter) > 0;
    if (*role == ArtifactRole::review1) p->review_refs[0].content_hash = ref.content_hash;
    if (*role == ArtifactRole::review2) p->review_refs[1].content_hash = ref.content_hash;
    return;
  }

  if (verb == "draft" && p) {
    p->title = args["title"];
    if (args.count("pages")) p->pages = std::stoi(args["pages"]);
    if (args.count("hours")) p->generation_hours = std::stod(args["hours"]);
    return;
  }

  if (verb == "review" && p) {
    int slot = args.count("slot") ? std::stoi(args["slot"]) : 1;
    if (slot < 1 || slot > 2) return;
    ReviewSlot& r = p->review_refs[slot - 1];
    r.score = std::stod(args["score"]);
    r.decision = args["decision"];
    if (!e.artifact_hashes.empty()) r.content_hash = e.artifact_hashes.front();
    r.present = true;
    if (args.count("round")) p->review_round = std::stoi(args["round"]);
    return;
  }

  if (verb == "triage" && p) {
    p->decisions.initial = args["decision"];
    if (args.count("total")) p->total_score = std::stod(args["total"]);
    return;
  }

  if (verb == "final" && p) {
    p->decisions.final_decision = args["decision"];
    return;
  }

  if (verb == "gate" && p) {
    GateRecord g;
    g.decision = args["decision"];
    g.approver = args["approver"];
    g.note = args["note"];
    g.timestamp = e.timestamp;
    p->gates[args["gate"]] = std::move(g);
    if (args["gate"] == kGateDatasetClearance && args["decision"] == "reject") {
      p->gate_terminated = true;
      p->decisions.final_decision = "REJECT";
    }
    return;
  }

  if (verb == "authors" && p) {
    AuthorSet a;
    auto names = split(args["names"], ';');
    auto origins = split(args["origins"], ';');
    for (size_t i = 0; i < names.size(); ++i) {
      a.authors.push_back({pct_decode(names[i]),
                           i < origins.size() ? pct_decode(origins[i]) : ""});
    }
    a.institution = args["institution"];
    if (args.count("seed")) a.seed = std::stoull(args["seed"]);
    a.locked = true;
    p->authors = std::move(a);
    return;
  }

  if (verb == "camera_checks" && p) {
    p->camera_checks_pass = args["result"] == "pass";
    return;
  }

  if (verb == "manifest") {
    manifest_hash_ = e.artifact_hashes.empty() ? "" : e.artifact_hashes.front();
    manifest_papers_.clear();
    for (const auto& id : split(args["papers"], ';'))
      if (!id.empty()) manifest_papers_.insert(id);
    return;
  }

  if (verb == "audit") {
    AuditState a;
    a.manifest_hash = args["manifest"];
    a.checked = args.count("checked") ? std::stoull(args["checked"]) : 0;
    a.matched = args.count("matched") ? std::stoull(args["matched"]) : 0;
    a.discrepancy_hashes = e.artifact_hashes;
    a.timestamp = e.timestamp;
    last_audit_ = std::move(a);
    return;
  }

  // Remaining verbs (invoke, coi, note, validation results) are audit trail
  // only; they carry no fold state.
}

std::vector<LedgerEvent> Ledger::events() const {
  std::shared_lock lock(mu_);
  return events_;
}

uint64_t Ledger::event_count() const {
  std::shared_lock lock(mu_);
  return events_.size();
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

ArtifactRef Ledger::put_artifact(std::string_view bytes, ArtifactRole role,
                                 const std::string& paper_id,
                                 const std::string& media_hint,
                                 const ActorId& actor, std::string timestamp) {
  if (bytes.empty()) throw Error("empty_artifact", "empty artifact payload");
  std::unique_lock lock(mu_);

  PaperRecord* p = nullptr;
  if (paper_id == kReleaseScope) {
    if (role != ArtifactRole::manifest)
      throw Error("bad_role", "RELEASE scope only stores manifests");
  } else {
    auto it = papers_.find(paper_id);
    if (it == papers_.end())
      throw Error("unknown_paper", "no record for id " + paper_id);
    p = &it->second;
  }

  std::string hash = sha256_hex(bytes);
  if (p) {
    auto bound = p->artifact_refs.find(role);
    if (bound != p->artifact_refs.end()) {
      if (bound->second.content_hash != hash)
        throw Error("role_bound", "role " + role_name(role) + " of " +
                                      paper_id +
                                      " already bound to a different hash");
      store_.put(bytes);  // idempotent
      return bound->second;
    }
  }

  store_.put(bytes);
  ArtifactRef ref{role, hash, bytes.size(), media_hint};
  append_locked(paper_id, p ? stage_name(p->stage) : std::string("-"),
                LedgerEvent::make_action(
                    "artifact", {{"role", role_name(role)},
                                 {"size", std::to_string(bytes.size())},
                                 {"media", media_hint}}),
                actor, {hash}, std::move(timestamp));
  return ref;
}

std::string Ledger::get_artifact(const std::string& content_hash) const {
  return store_.get(content_hash);
}

std::string Ledger::put_blob(std::string_view bytes) {
  if (bytes.empty()) throw Error("empty_artifact", "empty artifact payload");
  return store_.put(bytes);
}

bool Ledger::has_blob(const std::string& content_hash) const {
  return store_.exists(content_hash);
}

// ---------------------------------------------------------------------------
// Registration
// ---------------------------------------------------------------------------

std::string Ledger::register_paper(const std::string& dataset_id, Track track,
                                   const ActorId& actor,
                                   std::string timestamp) {
  std::unique_lock lock(mu_);
  if (!datasets_.count(dataset_id))
    throw Error("unknown_dataset", "no dataset record for " + dataset_id);
  int nn = 0;
  for (const auto& [id, p] : papers_)
    if (p.track == track) ++nn;
  std::string paper_id = make_paper_id(track, nn + 1);
  while (papers_.count(paper_id)) paper_id = make_paper_id(track, ++nn + 1);
  append_locked(paper_id, stage_name(StageState::Registered),
                LedgerEvent::make_action("register", {{"kind", "paper"},
                                                      {"dataset", dataset_id}}),
                actor, {}, std::move(timestamp));
  return paper_id;
}

std::string Ledger::register_dataset_record(const DatasetRecord& record,
                                            const ActorId& actor,
                                            std::string timestamp) {
  std::unique_lock lock(mu_);
  for (const auto& [id, d] : datasets_) {
    if (d.url == record.url && d.track == record.track)
      throw Error("duplicate_dataset",
                  "dataset already registered for this track: " + record.url);
  }
  int nn = 0;
  for (const auto& [id, d] : datasets_)
    if (d.track == record.track) ++nn;
  std::string dataset_id;
  do {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "DS-%s-%02d",
                  track_code(record.track).c_str(), ++nn);
    dataset_id = buf;
  } while (datasets_.count(dataset_id));

  std::vector<std::string> dua;
  for (const auto& item : record.dua_checklist)
    dua.push_back(pct_encode(item.item) + ":" + (item.satisfied ? "1" : "0"));

  std::map<std::string, std::string> args{
      {"kind", "dataset"},
      {"url", record.url},
      {"track", track_name(record.track)},
      {"date", record.ingestion_date},
      {"license", record.license_id},
      {"red", permission_name(record.permissions.redistribution)},
      {"com", permission_name(record.permissions.commercial_use)},
      {"mod", permission_name(record.permissions.modification)},
      {"risk", record.ip_risk ? "1" : "0"},
      {"notes", record.notes},
      {"dua", join(dua, ";")},
  };
  append_locked(dataset_id, "-", LedgerEvent::make_action("register", args),
                actor, {}, std::move(timestamp));
  return dataset_id;
}

// ---------------------------------------------------------------------------
// Accessors
// ---------------------------------------------------------------------------

std::optional<PaperRecord> Ledger::paper(const std::string& paper_id) const {
  std::shared_lock lock(mu_);
  auto it = papers_.find(paper_id);
  if (it == papers_.end()) return std::nullopt;
  return it->second;
}

std::vector<PaperRecord> Ledger::papers() const {
  std::shared_lock lock(mu_);
  std::vector<PaperRecord> out;
  out.reserve(papers_.size());
  for (const auto& [id, p] : papers_) out.push_back(p);
  return out;
}

std::vector<PaperRecord> Ledger::papers_in_track(Track t) const {
  std::shared_lock lock(mu_);
  std::vector<PaperRecord> out;
  for (const auto& [id, p] : papers_)
    if (p.track == t) out.push_back(p);
  return out;
}

std::optional<DatasetRecord> Ledger::dataset(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = datasets_.find(id);
  if (it == datasets_.end()) return std::nullopt;
  return it->second;
}

std::optional<DatasetRecord> Ledger::dataset_by_url(const std::string& url,
                                                    Track track) const {
  std::shared_lock lock(mu_);
  for (const auto& [id, d] : datasets_)
    if (d.url == url && d.track == track) return d;
  return std::nullopt;
}

std::vector<DatasetRecord> Ledger::datasets() const {
  std::shared_lock lock(mu_);
  std::vector<DatasetRecord> out;
  out.reserve(datasets_.size());
  for (const auto& [id, d] : datasets_) out.push_back(d);
  return out;
}

std::string Ledger::export_dataset_registry() const {
  std::shared_lock lock(mu_);
  std::string out = csv::encode_row(
      {"dataset_id", "url", "track", "ingestion_date", "license_id",
       "redistribution", "commercial_use", "modification", "ip_risk"});
  for (const auto& [id, d] : datasets_) {
    out += csv::encode_row({d.dataset_id, d.url, track_name(d.track),
                            d.ingestion_date, d.license_id,
                            permission_name(d.permissions.redistribution),
                            permission_name(d.permissions.commercial_use),
                            permission_name(d.permissions.modification),
                            d.ip_risk ? "true" : "false"});
  }
  return out;
}

int Ledger::import_dataset_registry(const std::string& csv_text,
                                    const ActorId& actor,
                                    std::string timestamp) {
  auto rows = csv::parse(csv_text);
  int added = 0;
  std::unique_lock lock(mu_);
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() < 9 || r[0].empty()) continue;
    auto track = track_from_name(r[2]);
    if (!track) throw Error("bad_registry", "unknown track in row: " + r[2]);

    auto existing = datasets_.find(r[0]);
    if (existing != datasets_.end()) {
      if (existing->second.url != r[1])
        throw Error("bad_registry",
                    "dataset id " + r[0] + " already bound to a different url");
      continue;
    }
    bool url_known = false;
    for (const auto& [id, d] : datasets_)
      if (d.url == r[1] && d.track == *track) url_known = true;
    if (url_known) continue;

    std::map<std::string, std::string> args{
        {"kind", "dataset"}, {"url", r[1]},   {"track", track_name(*track)},
        {"date", r[3]},      {"license", r[4]}, {"red", r[5]},
        {"com", r[6]},       {"mod", r[7]},   {"risk", r[8] == "true" ? "1" : "0"},
        {"notes", ""},       {"dua", ""},
    };
    append_locked(r[0], "-", LedgerEvent::make_action("register", args), actor,
                  {}, timestamp);
    ++added;
  }
  return added;
}

// ---------------------------------------------------------------------------
// Workbook
// ---------------------------------------------------------------------------

std::vector<std::string> workbook_columns() {
  return {"Track",
          "Paper ID",
          "Dataset (link)",
          "Output Paper Title",
          "Pages",
          "Time (hrs)",
          "Rev 1 Score",
          "Rev 1 Decision",
          "Rev 2 Score",
          "Rev 2 Decision",
          "Total Score (0–10)",
          "Initial Decision",
          "Revised Paper / Response Letter",
          "Final Decision"};
}

std::string Ledger::export_workbook(Track t) const {
  std::shared_lock lock(mu_);
  std::string out = csv::encode_row(workbook_columns());

  std::vector<const PaperRecord*> rows;
  for (const auto& [id, p] : papers_)
    if (p.track == t) rows.push_back(&p);
  std::sort(rows.begin(), rows.end(),
            [](const PaperRecord* a, const PaperRecord* b) {
              return a->paper_id < b->paper_id;
            });

  auto upper = [](std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  };

  for (const PaperRecord* p : rows) {
    std::string dataset_url;
    auto dit = datasets_.find(p->dataset_id);
    if (dit != datasets_.end()) dataset_url = dit->second.url;

    const ReviewSlot& r1 = p->review_refs[0];
    const ReviewSlot& r2 = p->review_refs[1];
    std::string flags = std::string(p->flags.revised_paper ? "YES" : "NO") +
                        " / " + (p->flags.response_letter ? "YES" : "NO");
    out += csv::encode_row({
        track_name(p->track),
        p->paper_id,
        dataset_url,
        p->title,
        p->pages > 0 ? std::to_string(p->pages) : "",
        format_score(p->generation_hours),
        r1.present ? format_score(r1.score) : "",
        r1.decision,
        r2.present ? format_score(r2.score) : "",
        r2.decision,
        p->decisions.initial.empty() ? "" : format_score(p->total_score),
        upper(p->decisions.initial),
        flags,
        p->decisions.final_decision,
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Typed event helpers
// ---------------------------------------------------------------------------

namespace {
std::string stage_of(const std::map<std::string, PaperRecord>& papers,
                     const std::string& id) {
  auto it = papers.find(id);
  return it == papers.end() ? std::string("-") : stage_name(it->second.stage);
}
}  // namespace

void Ledger::record_draft_meta(const std::string& paper_id,
                               const std::string& title, int pages,
                               double hours, const ActorId& actor,
                               std::string timestamp) {
  std::unique_lock lock(mu_);
  append_locked(paper_id, stage_of(papers_, paper_id),
                LedgerEvent::make_action(
                    "draft", {{"title", title},
                              {"pages", std::to_string(pages)},
                              {"hours", format_score(hours)}}),
                actor, {}, std::move(timestamp));
}

void Ledger::record_review(const std::string& paper_id, int slot,
                           double score10, const std::string& decision,
                           const std::string& review_hash, int round,
                           const ActorId& actor, std::string timestamp) {
  std::unique_lock lock(mu_);
  append_locked(paper_id, stage_of(papers_, paper_id),
                LedgerEvent::make_action(
                    "review", {{"slot", std::to_string(slot)},
                               {"score", format_score(score10)},
                               {"decision", decision},
                               {"round", std::to_string(round)}}),
                actor, {review_hash}, std::move(timestamp));
}

void Ledger::record_triage(const std::string& paper_id, double r1, double r2,
                           double total, const std::string& decision,
                           const ActorId& actor, std::string timestamp) {
  std::unique_lock lock(mu_);
  append_locked(paper_id, stage_of(papers_, paper_id),
                LedgerEvent::make_action(
                    "triage", {{"r1", format_score(r1)},
                               {"r2", format_score(r2)},
                               {"total", format_score(total)},
                               {"decision", decision}}),
                actor, {}, std::move(timestamp));
}

void Ledger::record_final(const std::string& paper_id,
                          const std::string& decision, const ActorId& actor,
                          std::string timestamp) {
  std::unique_lock lock(mu_);
  append_locked(paper_id, stage_of(papers_, paper_id),
                LedgerEvent::make_action("final", {{"decision", decision}}),
                actor, {}, std::move(timestamp));
}

void Ledger::record_gate(const std::string& paper_id, const std::string& gate,
                         const std::string& decision,
                         const std::string& approver, const std::string& note,
                         std::string timestamp) {
  std::unique_lock lock(mu_);
  append_locked(paper_id, stage_of(papers_, paper_id),
                LedgerEvent::make_action("gate", {{"gate", gate},
                                                  {"decision", decision},
                                                  {"approver", approver},
                                                  {"note", note}}),
                ActorId::human_actor(approver), {}, std::move(timestamp));
}

void Ledger::record_authors(const std::string& paper_id,
                            const AuthorSet& authors, const ActorId& actor,
                            std::string timestamp) {
  std::unique_lock lock(mu_);
  std::vector<std::string> names, origins;
  for (const auto& a : authors.authors) {
    names.push_back(pct_encode(a.name));
    origins.push_back(pct_encode(a.origin_tag));
  }
  append_locked(paper_id, stage_of(papers_, paper_id),
                LedgerEvent::make_action(
                    "authors", {{"names", join(names, ";")},
                                {"origins", join(origins, ";")},
                                {"institution", authors.institution},
                                {"seed", std::to_string(authors.seed)}}),
                actor, {}, std::move(timestamp));
}

void Ledger::record_camera_checks(const std::string& paper_id, bool pass,
                                  const std::string& details,
                                  const ActorId& actor, std::string timestamp) {
  std::unique_lock lock(mu_);
  append_locked(paper_id, stage_of(papers_, paper_id),
                LedgerEvent::make_action(
                    "camera_checks",
                    {{"result", pass ? "pass" : "fail"}, {"details", details}}),
                actor, {}, std::move(timestamp));
}

void Ledger::record_manifest(const std::string& manifest_hash,
                             const std::set<std::string>& paper_ids,
                             const ActorId& actor, std::string timestamp) {
  std::unique_lock lock(mu_);
  std::vector<std::string> ids(paper_ids.begin(), paper_ids.end());
  append_locked(kReleaseScope, "-",
                LedgerEvent::make_action("manifest", {{"papers", join(ids, ";")}}),
                actor, {manifest_hash}, std::move(timestamp));
}

void Ledger::record_audit(const AuditState& audit, const ActorId& actor,
                          std::string timestamp) {
  std::unique_lock lock(mu_);
  append_locked(kReleaseScope, "-",
                LedgerEvent::make_action(
                    "audit", {{"manifest", audit.manifest_hash},
                              {"checked", std::to_string(audit.checked)},
                              {"matched", std::to_string(audit.matched)}}),
                actor, audit.discrepancy_hashes, std::move(timestamp));
}

void Ledger::advance_stage(const std::string& paper_id, StageState target,
                           const ActorId& actor, std::string timestamp) {
  std::unique_lock lock(mu_);
  append_locked(paper_id, stage_name(target), "advance", actor, {},
                std::move(timestamp));
}

// ---------------------------------------------------------------------------
// Release state and integrity
// ---------------------------------------------------------------------------

std::optional<AuditState> Ledger::last_audit() const {
  std::shared_lock lock(mu_);
  return last_audit_;
}

std::set<std::string> Ledger::manifest_paper_ids() const {
  std::shared_lock lock(mu_);
  return manifest_papers_;
}

std::string Ledger::manifest_artifact_hash() const {
  std::shared_lock lock(mu_);
  return manifest_hash_;
}

std::vector<std::string> Ledger::missing_artifacts() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> missing;
  auto check = [&](const std::string& hash) {
    if (!hash.empty() && !store_.exists(hash)) missing.push_back(hash);
  };
  for (const auto& [id, p] : papers_) {
    for (const auto& [role, ref] : p.artifact_refs) check(ref.content_hash);
    check(p.review_refs[0].content_hash);
    check(p.review_refs[1].content_hash);
  }
  check(manifest_hash_);
  return missing;
}

}  // namespace confpipe
