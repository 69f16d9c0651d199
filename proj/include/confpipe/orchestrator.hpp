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

// The pipeline state machine with human-approval gates, the batch runner,
// and operational metrics. Papers progress concurrently; within one paper
// stages are strictly sequential, and all shared state flows through the
// ledger's serialized appends.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "confpipe/agents.hpp"
#include "confpipe/archive.hpp"
#include "confpipe/camera_ready.hpp"
#include "confpipe/ledger.hpp"
#include "confpipe/review.hpp"
#include "confpipe/types.hpp"

namespace confpipe::orchestrator {

// Targets legally reachable from `from`, ignoring gate conditions.
std::vector<StageState> legal_targets(StageState from);

// Full transition validation: legality in the stage graph, the one
// re-review cap, terminality, and every gate condition for the target.
// Returns the failing condition, or nullopt when the transition may proceed.
std::optional<std::string> transition_blocker(const Ledger& ledger,
                                              const PaperRecord& paper,
                                              StageState target);

struct PipelineConfig {
  std::string adapter = "mock";  // "mock" | "http"
  std::string endpoint_host = "127.0.0.1";
  int endpoint_port = 8080;
  std::string endpoint_path = "/invoke";
  int timeout_ms = 30000;
  agents::RetryPolicy retry;
  uint64_t seed = 42;
  int parallelism = 1;
  double accept_threshold = 7.0;
  double narration_wpm = 150.0;
  double qa_overlap_threshold = 0.3;
  double total_budget_s = 600.0;
  std::string clock_kind = "simulated";  // "simulated" | "system"
  std::string sim_epoch = "2025-10-01T00:00:00Z";
  std::string model_family = "scholar-frontier-mock";
  std::string approver = "chair";
  bool publish_rejected = false;
  bool include_reviews_in_manifest = true;
  std::filesystem::path assets_dir = "assets";
  std::filesystem::path datasets_csv;
  std::filesystem::path score_table_csv;
  std::filesystem::path publish_dir = "published";

  // JSON config file; relative paths resolve against the file's directory.
  static PipelineConfig load(const std::filesystem::path& file);
};

struct RunSummary {
  int datasets = 0;
  int papers = 0;
  int drafts = 0;
  int reviews = 0;
  int archived = 0;
  std::map<std::string, int> final_stages;         // stage name -> count
  std::map<std::string, std::string> paper_errors;  // per-paper isolation

  std::string to_json() const;
};

struct StageDurationStats {
  uint64_t count = 0;
  double mean_s = 0.0;
  double min_s = 0.0;
  double max_s = 0.0;
};

struct PipelineMetrics {
  int throughput = 0;  // papers reaching Archived
  std::map<std::string, StageDurationStats> turnaround_s;
  double human_load = 0.0;      // human-actor events / gate-relevant events
  double audit_coverage = 0.0;  // verified artifact hashes / all artifacts

  std::string to_json() const;
};

// Deterministic function of the event log (plus the stored manifest the
// last audit refers to).
PipelineMetrics compute_metrics(const Ledger& ledger);

// Reads a fixture dataset CSV: url,track,license,dua,notes with dua items
// encoded item:1;item:0.
struct DatasetFixture {
  std::string url;
  Track track{};
  std::string license_text;
  std::vector<DuaItem> dua_items;
  std::string notes;
};
std::vector<DatasetFixture> load_dataset_fixtures(
    const std::filesystem::path& csv_file);

// Derives a human-readable dataset title from the URL slug.
std::string dataset_title_from_url(const std::string& url);

class Engine {
 public:
  Engine(Ledger& ledger, PipelineConfig config);

  // --- state machine -------------------------------------------------------

  // Validates and records the transition. Errors name the failing
  // condition ("illegal transition", "terminal", unmet gates).
  StageState advance(const std::string& paper_id, StageState target);

  // Gate approvals are the human checkpoints. Errors: wrong stage,
  // ip_risk on dataset clearance, release approval without a passing audit.
  void record_gate(const std::string& paper_id, const std::string& gate,
                   bool approve, const std::string& approver,
                   const std::string& note = "");

  // --- per-stage operations --------------------------------------------------

  // Registers the dataset (license parsing + risk tag) and mints the paper.
  std::string register_paper(const std::string& url, Track track,
                             const std::string& license_text,
                             const std::vector<DuaItem>& dua_items,
                             const std::string& notes = "");
  void generate(const std::string& paper_id);
  void review(const std::string& paper_id);
  review::TriageOutcome triage(const std::string& paper_id);
  void revise(const std::string& paper_id);
  void camera_ready(const std::string& paper_id);
  void present(const std::string& paper_id);

  // Release phase over every Presented/CameraReady paper: manifest,
  // publish, audit. Returns the audit report.
  archive::AuditReport release_audit();
  // Requires a manifest entry and an approved release gate.
  void archive_paper(const std::string& paper_id);

  // --- batch -----------------------------------------------------------------

  // Drives every fixture dataset through the full pipeline with per-paper
  // failure isolation, then runs the release phase for accepted papers.
  RunSummary run();

  Ledger& ledger() { return ledger_; }
  const PipelineConfig& config() const { return config_; }
  Clock& clock_for(const std::string& paper_id);

 private:
  void drive_paper(const std::string& paper_id, RunSummary& summary,
                   std::mutex& summary_mu);
  std::string manuscript_for_review(const PaperRecord& paper) const;
  void run_reviews(const std::string& paper_id, int round);
  std::string stamp(const std::string& paper_id, double advance_s);

  Ledger& ledger_;
  PipelineConfig config_;
  std::unique_ptr<agents::Adapter> adapter_;
  std::map<agents::TemplateRole, agents::PromptTemplate> templates_;
  std::map<agents::TemplateRole, agents::AgentProfile> profiles_;
  std::vector<camera::NamePoolEntry> name_pool_;
  std::vector<std::string> universe_tokens_;
  std::vector<std::string> form_tokens_;
  std::set<std::string> institution_denylist_;

  std::mutex clocks_mu_;
  std::map<std::string, std::shared_ptr<Clock>> paper_clocks_;
};

}  // namespace confpipe::orchestrator
