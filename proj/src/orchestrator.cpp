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

#include "confpipe/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "confpipe/csv.hpp"
#include "confpipe/digest.hpp"
#include "confpipe/error.hpp"
#include "confpipe/intake.hpp"
#include "confpipe/latex.hpp"
#include "confpipe/presentation.hpp"
#include "confpipe/revision.hpp"
#include "confpipe/strings.hpp"

namespace confpipe::orchestrator {

namespace fs = std::filesystem;

// Simulated stage durations (seconds). In simulated-clock mode each paper
// carries its own virtual clock advanced by these, which keeps batch runs
// reproducible under any worker scheduling. The generation step mirrors the
// 1.5 h the recorded worksheet shows.
namespace sim {
constexpr double kGate = 60.0;
constexpr double kGenerate = 5400.0;
constexpr double kReview = 600.0;
constexpr double kTriage = 60.0;
constexpr double kRevise = 900.0;
constexpr double kCamera = 300.0;
constexpr double kPresent = 600.0;
constexpr double kArchive = 60.0;
}  // namespace sim

std::vector<StageState> legal_targets(StageState from) {
  switch (from) {
    case StageState::Registered: return {StageState::Drafted};
    case StageState::Drafted: return {StageState::Reviewed};
    case StageState::Reviewed:
      return {StageState::TriageAccept, StageState::TriageRevise,
              StageState::TriageReject};
    case StageState::TriageAccept: return {StageState::Revised};
    case StageState::TriageRevise: return {StageState::Revised};
    case StageState::TriageReject: return {};
    case StageState::Revised:
      return {StageState::Reviewed, StageState::CameraReady};
    case StageState::CameraReady:
      return {StageState::Presented, StageState::Revised};
    case StageState::Presented: return {StageState::Archived};
    case StageState::Archived: return {};
  }
  return {};
}

std::optional<std::string> transition_blocker(const Ledger& ledger,
                                              const PaperRecord& p,
                                              StageState target) {
  if (stage_is_terminal(p.stage))
    return "terminal: no transitions leave " + stage_name(p.stage);
  if (p.gate_terminated)
    return "terminal: dataset clearance was rejected";

  auto targets = legal_targets(p.stage);
  if (std::find(targets.begin(), targets.end(), target) == targets.end())
    return "illegal transition: " + stage_name(p.stage) + " -> " +
           stage_name(target);

  switch (target) {
    case StageState::Drafted: {
      auto dataset = ledger.dataset(p.dataset_id);
      if (!dataset) return "unmet gate: dataset record missing";
      if (dataset->ip_risk) return "unmet gate: ip_risk on " + p.dataset_id;
      auto gate = p.gates.find(kGateDatasetClearance);
      if (gate == p.gates.end() || gate->second.decision != "approve")
        return "unmet gate: dataset_clearance approval missing";
      break;
    }
    case StageState::Reviewed: {
      if (p.stage == StageState::Drafted) {
        if (!p.has_artifact(ArtifactRole::draft))
          return "unmet gate: draft artifact missing";
      } else {  // re-review from Revised
        if (p.re_reviews_used >= 1)
          return "unmet gate: the single re-review cycle is spent";
        if (p.decisions.initial != "Revise")
          return "unmet gate: re-review requires a Revise triage";
        if (!p.has_artifact(ArtifactRole::revised))
          return "unmet gate: revised artifact missing";
      }
      // The Reviewed stage asserts both reviews are on the record.
      if (!p.review_refs[0].present || !p.review_refs[1].present)
        return "unmet gate: reviews missing";
      break;
    }
    case StageState::TriageAccept:
    case StageState::TriageRevise:
    case StageState::TriageReject: {
      std::string want = target == StageState::TriageAccept   ? "Accept"
                         : target == StageState::TriageRevise ? "Revise"
                                                              : "Reject";
      if (p.decisions.initial != want)
        return "unmet gate: recorded triage decision is '" +
               p.decisions.initial + "', not " + want;
      break;
    }
    case StageState::Revised: {
      if (p.stage == StageState::CameraReady) break;  // regression path
      if (!p.has_artifact(ArtifactRole::revised))
        return "unmet gate: revised artifact missing";
      if (!p.has_artifact(ArtifactRole::response_letter))
        return "unmet gate: response letter missing";
      break;
    }
    case StageState::CameraReady: {
      auto gate = p.gates.find(kGateRevisionValidation);
      if (gate == p.gates.end() || gate->second.decision != "approve")
        return "unmet gate: revision_validation approval missing";
      if (!p.camera_checks_pass)
        return "unmet gate: camera-ready checks have not passed";
      if (!p.has_artifact(ArtifactRole::camera_ready))
        return "unmet gate: camera_ready artifact missing";
      break;
    }
    case StageState::Presented: {
      for (ArtifactRole role : {ArtifactRole::slides, ArtifactRole::narration,
                                ArtifactRole::avatar_job}) {
        if (!p.has_artifact(role))
          return "unmet gate: " + role_name(role) + " artifact missing";
      }
      break;
    }
    case StageState::Archived: {
      if (!ledger.manifest_paper_ids().count(p.paper_id))
        return "unmet gate: no manifest entry for " + p.paper_id;
      auto gate = p.gates.find(kGateReleaseApproval);
      if (gate == p.gates.end() || gate->second.decision != "approve")
        return "unmet gate: release approval missing";
      break;
    }
    default:
      break;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

PipelineConfig PipelineConfig::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("storage", "cannot read config " + file.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw Error("bad_config", "config is not valid JSON: " + file.string());

  PipelineConfig c;
  c.adapter = j.value("adapter", c.adapter);
  c.endpoint_host = j.value("endpoint_host", c.endpoint_host);
  c.endpoint_port = j.value("endpoint_port", c.endpoint_port);
  c.endpoint_path = j.value("endpoint_path", c.endpoint_path);
  c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
  c.retry.attempts = j.value("retry_attempts", c.retry.attempts);
  c.retry.base_delay_ms = j.value("retry_base_delay_ms", c.retry.base_delay_ms);
  c.seed = j.value("seed", c.seed);
  c.parallelism = j.value("parallelism", c.parallelism);
  c.accept_threshold = j.value("accept_threshold", c.accept_threshold);
  c.narration_wpm = j.value("narration_wpm", c.narration_wpm);
  c.qa_overlap_threshold = j.value("qa_overlap_threshold", c.qa_overlap_threshold);
  c.total_budget_s = j.value("total_budget_s", c.total_budget_s);
  c.clock_kind = j.value("clock", c.clock_kind);
  c.sim_epoch = j.value("sim_epoch", c.sim_epoch);
  c.model_family = j.value("model_family", c.model_family);
  c.approver = j.value("approver", c.approver);
  c.publish_rejected = j.value("publish_rejected", c.publish_rejected);
  c.include_reviews_in_manifest =
      j.value("include_reviews_in_manifest", c.include_reviews_in_manifest);

  fs::path base = file.parent_path();
  auto resolve = [&](const std::string& key, fs::path fallback) {
    std::string v = j.value(key, std::string());
    if (v.empty()) return fallback;
    fs::path p(v);
    return p.is_absolute() ? p : base / p;
  };
  c.assets_dir = resolve("assets_dir", c.assets_dir);
  c.datasets_csv = resolve("datasets_csv", c.datasets_csv);
  c.score_table_csv = resolve("score_table_csv", c.score_table_csv);
  c.publish_dir = resolve("publish_dir", c.publish_dir);
  return c;
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

std::vector<DatasetFixture> load_dataset_fixtures(const fs::path& csv_file) {
  std::ifstream in(csv_file);
  if (!in) throw Error("storage", "cannot read " + csv_file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto rows = csv::parse(buf.str());
  std::vector<DatasetFixture> out;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() < 3 || r[0].empty()) continue;
    DatasetFixture f;
    f.url = r[0];
    auto t = track_from_name(r[1]);
    if (!t) throw Error("bad_fixture", "unknown track: " + r[1]);
    f.track = *t;
    f.license_text = r[2];
    if (r.size() > 3 && !r[3].empty()) {
      for (const auto& item : split(r[3], ';')) {
        auto colon = item.rfind(':');
        if (colon == std::string::npos) continue;
        f.dua_items.push_back({item.substr(0, colon), item.substr(colon + 1) == "1"});
      }
    }
    if (r.size() > 4) f.notes = r[4];
    out.push_back(std::move(f));
  }
  return out;
}

std::string dataset_title_from_url(const std::string& url) {
  std::string path = url;
  if (auto q = path.find('?'); q != std::string::npos) path = path.substr(0, q);
  while (!path.empty() && path.back() == '/') path.pop_back();
  auto slash = path.rfind('/');
  std::string slug = slash == std::string::npos ? path : path.substr(slash + 1);
  std::string out;
  bool cap = true;
  for (char c : slug) {
    if (c == '-' || c == '_') {
      out.push_back(' ');
      cap = true;
    } else {
      out.push_back(cap ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                        : c);
      cap = false;
    }
  }
  return out.empty() ? "Registered Dataset" : out;
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

Engine::Engine(Ledger& ledger, PipelineConfig config)
    : ledger_(ledger), config_(std::move(config)) {
  if (config_.adapter == "mock") {
    agents::ScoreTable table;
    if (!config_.score_table_csv.empty() && fs::exists(config_.score_table_csv))
      table = agents::load_score_table(config_.score_table_csv);
    adapter_ = std::make_unique<agents::MockAdapter>(std::move(table));
  } else if (config_.adapter == "http") {
    adapter_ = std::make_unique<agents::HttpAdapter>(
        config_.endpoint_host, config_.endpoint_port, config_.endpoint_path,
        config_.timeout_ms);
  } else {
    throw Error("bad_config", "unknown adapter kind: " + config_.adapter);
  }

  templates_ = agents::load_template_set(config_.assets_dir);

  const std::string& fam = config_.model_family;
  using TR = agents::TemplateRole;
  profiles_.emplace(TR::generation, agents::AgentProfile::make(
                                        "gen-1", fam, "1.0", TR::generation,
                                        "temperature=0.7"));
  profiles_.emplace(TR::reviewer1, agents::AgentProfile::make(
                                       "rev-1", fam, "1.1", TR::reviewer1,
                                       "temperature=0.2"));
  profiles_.emplace(TR::reviewer2, agents::AgentProfile::make(
                                       "rev-2", fam, "1.2", TR::reviewer2,
                                       "temperature=0.0"));
  profiles_.emplace(TR::revision, agents::AgentProfile::make(
                                      "edit-1", fam, "1.0", TR::revision,
                                      "temperature=0.3"));
  profiles_.emplace(TR::response_letter,
                    agents::AgentProfile::make("edit-2", fam, "1.0",
                                               TR::response_letter,
                                               "temperature=0.2"));
  profiles_.emplace(TR::narration, agents::AgentProfile::make(
                                       "narrate-1", fam, "1.0", TR::narration,
                                       "temperature=0.4"));

  name_pool_ = camera::load_name_pool(config_.assets_dir / "name_pool.txt");
  universe_tokens_ =
      camera::load_token_file(config_.assets_dir / "universe_tokens.txt");
  form_tokens_ =
      camera::load_token_file(config_.assets_dir / "institution_forms.txt");
  for (const auto& entry : camera::load_token_file(config_.assets_dir /
                                                   "institution_denylist.txt"))
    institution_denylist_.insert(entry);
}

Clock& Engine::clock_for(const std::string& paper_id) {
  std::lock_guard lock(clocks_mu_);
  auto it = paper_clocks_.find(paper_id);
  if (it == paper_clocks_.end()) {
    std::shared_ptr<Clock> clock;
    if (config_.clock_kind == "simulated")
      clock = std::make_shared<SimClock>(config_.sim_epoch);
    else
      clock = std::make_shared<SystemClock>();
    it = paper_clocks_.emplace(paper_id, std::move(clock)).first;
  }
  return *it->second;
}

// Advances the paper's virtual clock and returns the new timestamp.
std::string Engine::stamp(const std::string& paper_id, double advance_s) {
  Clock& clock = clock_for(paper_id);
  clock.advance_seconds(advance_s);
  return clock.now_iso8601();
}

StageState Engine::advance(const std::string& paper_id, StageState target) {
  auto paper = ledger_.paper(paper_id);
  if (!paper) throw Error("unknown_paper", "no record for " + paper_id);
  if (auto blocker = transition_blocker(ledger_, *paper, target))
    throw Error("bad_transition", *blocker);
  ledger_.advance_stage(paper_id, target, ActorId::agent("orchestrator"),
                        clock_for(paper_id).now_iso8601());
  return target;
}

void Engine::record_gate(const std::string& paper_id, const std::string& gate,
                         bool approve, const std::string& approver,
                         const std::string& note) {
  auto paper = ledger_.paper(paper_id);
  if (!paper) throw Error("unknown_paper", "no record for " + paper_id);

  StageState required_stage;
  if (gate == kGateDatasetClearance) required_stage = StageState::Registered;
  else if (gate == kGateRevisionValidation) required_stage = StageState::Revised;
  else if (gate == kGateReleaseApproval) required_stage = StageState::Presented;
  else throw Error("bad_gate", "unknown gate: " + gate);

  if (paper->stage != required_stage)
    throw Error("wrong_stage", "gate " + gate + " applies at stage " +
                                   stage_name(required_stage) + ", paper is at " +
                                   stage_name(paper->stage));
  if (paper->gate_terminated)
    throw Error("terminal", "dataset clearance was rejected for " + paper_id);

  if (gate == kGateDatasetClearance && approve) {
    auto dataset = ledger_.dataset(paper->dataset_id);
    if (!dataset || dataset->ip_risk)
      throw Error("ip_risk", "cannot approve dataset clearance: ip_risk on " +
                                 paper->dataset_id);
  }
  if (gate == kGateReleaseApproval && approve) {
    auto audit = ledger_.last_audit();
    if (!audit || !audit->pass())
      throw Error("no_audit",
                  "release approval requires a prior passing audit");
  }

  ledger_.record_gate(paper_id, gate, approve ? "approve" : "reject", approver,
                      note, stamp(paper_id, sim::kGate));
}

std::string Engine::register_paper(const std::string& url, Track track,
                                   const std::string& license_text,
                                   const std::vector<DuaItem>& dua_items,
                                   const std::string& notes) {
  // Datasets and papers share the registration timestamp.
  std::string ts;
  if (config_.clock_kind == "simulated")
    ts = SimClock(config_.sim_epoch).now_iso8601();
  else
    ts = SystemClock().now_iso8601();

  DatasetRecord dataset = intake::register_dataset(ledger_, url, track,
                                                   license_text, dua_items,
                                                   notes, ts);
  std::string paper_id = ledger_.register_paper(dataset.dataset_id, track,
                                                ActorId::agent("intake"), ts);
  clock_for(paper_id);  // pin this paper's virtual clock at the epoch
  return paper_id;
}

void Engine::generate(const std::string& paper_id) {
  auto paper = ledger_.paper(paper_id);
  if (!paper) throw Error("unknown_paper", "no record for " + paper_id);
  auto dataset = ledger_.dataset(paper->dataset_id);
  if (!dataset) throw Error("unknown_dataset", "no dataset for " + paper_id);
  if (auto blocker = transition_blocker(ledger_, *paper, StageState::Drafted))
    throw Error("bad_transition", *blocker);

  std::string ts = stamp(paper_id, sim::kGenerate);
  std::map<std::string, std::string> bindings{
      {"paper_id", paper_id},
      {"track", track_name(paper->track)},
      {"dataset_title", dataset_title_from_url(dataset->url)},
      {"dataset_url", dataset->url},
      {"dataset_description",
       dataset->notes.empty() ? "No further description was recorded."
                              : dataset->notes},
  };
  auto result = agents::invoke_and_record(
      ledger_, paper_id, profiles_.at(agents::TemplateRole::generation),
      templates_.at(agents::TemplateRole::generation), bindings, *adapter_,
      config_.retry, clock_for(paper_id), true, ts);

  auto doc = latex::scan(result.output_text);
  int pages = 0;
  size_t hint = result.output_text.find("% pages: ");
  if (hint != std::string::npos) {
    pages = std::atoi(result.output_text.c_str() + hint + 9);
  }
  if (pages <= 0)
    pages = static_cast<int>(result.output_text.size() / 3000) + 1;

  // Wall-clock stage duration: registration to draft completion.
  double hours = 0.0;
  auto reg = paper->stage_timestamps.find(StageState::Registered);
  if (reg != paper->stage_timestamps.end()) {
    auto delta = parse_iso8601(ts) - parse_iso8601(reg->second);
    hours = std::chrono::duration<double>(delta).count() / 3600.0;
  }
  ledger_.record_draft_meta(paper_id, doc.title, pages, hours,
                            ActorId::agent("gen-1"), ts);
  advance(paper_id, StageState::Drafted);
}

std::string Engine::manuscript_for_review(const PaperRecord& paper) const {
  ArtifactRole role = paper.stage == StageState::Revised
                          ? ArtifactRole::revised
                          : ArtifactRole::draft;
  auto it = paper.artifact_refs.find(role);
  if (it == paper.artifact_refs.end())
    throw Error("missing_artifact",
                paper.paper_id + " lacks a " + role_name(role) + " artifact");
  return ledger_.get_artifact(it->second.content_hash);
}

void Engine::run_reviews(const std::string& paper_id, int round) {
  auto paper = ledger_.paper(paper_id);
  if (!paper) throw Error("unknown_paper", "no record for " + paper_id);
  std::string manuscript = manuscript_for_review(*paper);

  const auto& gen = profiles_.at(agents::TemplateRole::generation);
  const auto& r1p = profiles_.at(agents::TemplateRole::reviewer1);
  const auto& r2p = profiles_.at(agents::TemplateRole::reviewer2);

  // Reviewers must be independent of the generator and of each other.
  for (const auto& [a, b] : std::vector<std::pair<const agents::AgentProfile*,
                                                  const agents::AgentProfile*>>{
           {&gen, &r1p}, {&gen, &r2p}, {&r1p, &r2p}}) {
    auto coi = agents::check_coi(*a, *b);
    ledger_.append(paper_id, "-",
                   LedgerEvent::make_action(
                       "coi", {{"a", a->agent_id},
                               {"b", b->agent_id},
                               {"result", coi.ok ? "ok" : "violation"}}),
                   ActorId::agent("orchestrator"), {},
                   clock_for(paper_id).now_iso8601());
    if (!coi.ok)
      throw Error("coi_violation", "conflict of interest between " +
                                       a->agent_id + " and " + b->agent_id +
                                       ": " + coi.detail);
  }

  std::map<std::string, std::string> bindings{
      {"paper_id", paper_id},
      {"manuscript", manuscript},
      {"round", std::to_string(round)},
  };

  std::string ts1 = stamp(paper_id, sim::kReview);
  auto res1 = agents::invoke_and_record(ledger_, paper_id, r1p,
                                        templates_.at(agents::TemplateRole::reviewer1),
                                        bindings, *adapter_, config_.retry,
                                        clock_for(paper_id), round == 1, ts1);
  auto r1 = review::parse_review_r1(res1.output_text);
  ledger_.record_review(paper_id, 1, round1(r1.overall),
                        review::r1_recommendation_name(r1.recommendation),
                        sha256_hex(res1.output_text), round,
                        ActorId::agent(r1p.agent_id), ts1);

  std::string ts2 = stamp(paper_id, sim::kReview);
  auto res2 = agents::invoke_and_record(ledger_, paper_id, r2p,
                                        templates_.at(agents::TemplateRole::reviewer2),
                                        bindings, *adapter_, config_.retry,
                                        clock_for(paper_id), round == 1, ts2);
  auto r2 = review::parse_review_r2(res2.output_text);
  ledger_.record_review(paper_id, 2, review::normalize_r2(r2),
                        review::r2_verdict_name(r2.verdict),
                        sha256_hex(res2.output_text), round,
                        ActorId::agent(r2p.agent_id), ts2);
}

void Engine::review(const std::string& paper_id) {
  auto paper = ledger_.paper(paper_id);
  if (!paper) throw Error("unknown_paper", "no record for " + paper_id);
  if (paper->gate_terminated)
    throw Error("terminal", "dataset clearance was rejected for " + paper_id);

  // Entry eligibility; the advance itself re-validates once the reviews are
  // recorded.
  int round;
  if (paper->stage == StageState::Drafted) {
    if (!paper->has_artifact(ArtifactRole::draft))
      throw Error("bad_transition", "unmet gate: draft artifact missing");
    round = 1;
  } else if (paper->stage == StageState::Revised) {
    if (paper->re_reviews_used >= 1)
      throw Error("bad_transition",
                  "unmet gate: the single re-review cycle is spent");
    if (paper->decisions.initial != "Revise")
      throw Error("bad_transition",
                  "unmet gate: re-review requires a Revise triage");
    if (!paper->has_artifact(ArtifactRole::revised))
      throw Error("bad_transition", "unmet gate: revised artifact missing");
    round = 2;
  } else {
    throw Error("bad_transition", "illegal transition: " +
                                      stage_name(paper->stage) + " -> Reviewed");
  }
  run_reviews(paper_id, round);
  advance(paper_id, StageState::Reviewed);
}

review::TriageOutcome Engine::triage(const std::string& paper_id) {
  auto paper = ledger_.paper(paper_id);
  if (!paper) throw Error("unknown_paper", "no record for " + paper_id);
  if (paper->stage != StageState::Reviewed)
    throw Error("wrong_stage", "triage requires stage Reviewed");
  if (!paper->review_refs[0].present || !paper->review_refs[1].present)
    throw Error("missing_review", "both reviews are required for triage");

  auto r1 = review::parse_review_r1(
      ledger_.get_artifact(paper->review_refs[0].content_hash));
  auto r2 = review::parse_review_r2(
      ledger_.get_artifact(paper->review_refs[1].content_hash));
  auto outcome = review::triage(r1, r2, config_.accept_threshold);

  std::string ts = stamp(paper_id, sim::kTriage);
  ledger_.record_triage(paper_id, outcome.r1_score, outcome.r2_score_normalized,
                        outcome.total,
                        review::triage_decision_name(outcome.decision),
                        ActorId::agent("orchestrator"), ts);
  switch (outcome.decision) {
    case review::TriageDecision::Accept:
      advance(paper_id, StageState::TriageAccept);
      break;
    case review::TriageDecision::Revise:
      advance(paper_id, StageState::TriageRevise);
      break;
    case review::TriageDecision::Reject:
      advance(paper_id, StageState::TriageReject);
      break;
  }
  return outcome;
}

void Engine::revise(const std::string& paper_id) {
  auto paper = ledger_.paper(paper_id);
  if (!paper) throw Error("unknown_paper", "no record for " + paper_id);
  if (paper->stage != StageState::TriageAccept &&
      paper->stage != StageState::TriageRevise)
    throw Error("wrong_stage", "revision starts from a triage stage");

  // One revision bundle per paper: a second pass through this stage (after
  // a re-review) keeps the existing bundle.
  if (!paper->has_artifact(ArtifactRole::revised)) {
    auto draft = paper->artifact_refs.find(ArtifactRole::draft);
    if (draft == paper->artifact_refs.end())
      throw Error("missing_artifact", paper_id + " lacks a draft artifact");
    std::string original = ledger_.get_artifact(draft->second.content_hash);
    std::string review1 =
        ledger_.get_artifact(paper->review_refs[0].content_hash);
    std::string review2 =
        ledger_.get_artifact(paper->review_refs[1].content_hash);

    std::map<std::string, std::string> bindings{
        {"paper_id", paper_id},
        {"manuscript", original},
        {"review1", review1},
        {"review2", review2},
    };

    std::string ts = stamp(paper_id, sim::kRevise);
    auto revised_res = agents::invoke_and_record(
        ledger_, paper_id, profiles_.at(agents::TemplateRole::revision),
        templates_.at(agents::TemplateRole::revision), bindings, *adapter_,
        config_.retry, clock_for(paper_id), true, ts);

    auto bundle = revision::validate_markup(original, revised_res.output_text);
    auto bullets = revision::check_no_bullets(bundle);
    if (!bullets.empty()) {
      std::vector<std::string> details;
      for (const auto& b : bullets)
        details.push_back(b.environment + " inside markup in " + b.section);
      throw Error("bullets_in_markup", "bullet lists inside inserted spans",
                  details);
    }
    auto expansion = revision::measure_expansion(
        bundle, {"methodology", "results", "discussion"});
    for (const auto& warning : expansion.warnings) {
      ledger_.append(paper_id, "-",
                     LedgerEvent::make_action("note", {{"text", warning}}),
                     ActorId::agent("orchestrator"), {}, ts);
    }

    auto letter_res = agents::invoke_and_record(
        ledger_, paper_id, profiles_.at(agents::TemplateRole::response_letter),
        templates_.at(agents::TemplateRole::response_letter), bindings,
        *adapter_, config_.retry, clock_for(paper_id), true, ts);

    auto letter = revision::parse_response_letter(letter_res.output_text);
    auto r1 = review::parse_review_r1(review1);
    auto r2 = review::parse_review_r2(review2);
    auto report = revision::validate_response_letter(letter, r1, r2, bundle);
    if (!report.pass) {
      std::vector<std::string> details = report.unmapped_comments;
      for (const auto& d : report.dangling_sections)
        details.push_back("dangling section_ref: " + d);
      for (const auto& d : report.unedited_sections)
        details.push_back("fully_addressed without an edit: " + d);
      throw Error("letter_incomplete",
                  "response letter failed completeness checks", details);
    }
    ledger_.append(paper_id, "-",
                   LedgerEvent::make_action("validate_revision",
                                            {{"result", "pass"}}),
                   ActorId::agent("orchestrator"), {}, ts);
  } else {
    stamp(paper_id, sim::kTriage);
  }
  advance(paper_id, StageState::Revised);
}

void Engine::camera_ready(const std::string& paper_id) {
  auto paper = ledger_.paper(paper_id);
  if (!paper) throw Error("unknown_paper", "no record for " + paper_id);
  if (paper->stage != StageState::Revised)
    throw Error("wrong_stage", "camera-ready preparation starts from Revised");
  // The human gate is checked before any work so a refused attempt leaves
  // no bound artifacts behind.
  auto gate = paper->gates.find(kGateRevisionValidation);
  if (gate == paper->gates.end() || gate->second.decision != "approve")
    throw Error("bad_transition",
                "unmet gate: revision_validation approval missing");

  // Re-entry after a CameraReady -> Revised regression: the bound bundle is
  // immutable, so re-verify the stored source and promote again.
  if (paper->has_artifact(ArtifactRole::camera_ready)) {
    std::string source = ledger_.get_artifact(
        paper->artifact_refs.at(ArtifactRole::camera_ready).content_hash);
    std::string ts = stamp(paper_id, sim::kCamera);
    auto wm = camera::extract_watermark(source);
    std::string sidecar = camera::metadata_sidecar_json(
        paper_id, paper->title, paper->authors, paper->track,
        wm ? wm->timestamp : ts);
    auto dataset = ledger_.dataset(paper->dataset_id);
    auto report = camera::run_all_checks(source, paper_id, paper->track,
                                         dataset ? &*dataset : nullptr, sidecar,
                                         paper->authors);
    ledger_.record_camera_checks(paper_id, report.all_pass(), report.summary(),
                                 ActorId::agent("orchestrator"), ts);
    if (!report.all_pass())
      throw Error("camera_checks_failed",
                  "camera-ready verification failed for " + paper_id);
    advance(paper_id, StageState::CameraReady);
    return;
  }

  ArtifactRole base_role = paper->has_artifact(ArtifactRole::revised)
                               ? ArtifactRole::revised
                               : ArtifactRole::draft;
  std::string base =
      ledger_.get_artifact(paper->artifact_refs.at(base_role).content_hash);

  // Names already taken by other papers; assignment slices make overlap
  // impossible under one seed, this is verified defence.
  std::set<std::string> prior;
  for (const auto& other : ledger_.papers()) {
    if (other.paper_id == paper_id || !other.authors.locked) continue;
    for (const auto& a : other.authors.authors) prior.insert(a.name);
  }
  AuthorSet authors = camera::assign_fictional_authors(
      name_pool_, universe_tokens_, form_tokens_, institution_denylist_,
      config_.seed, paper_id, prior);

  std::string ts = stamp(paper_id, sim::kCamera);
  ledger_.record_authors(paper_id, authors, ActorId::agent("orchestrator"), ts);

  std::string source = camera::apply_author_header(base, authors);
  source = camera::apply_watermark(source, paper_id, paper->track, ts);
  std::string sidecar = camera::metadata_sidecar_json(paper_id, paper->title,
                                                      authors, paper->track, ts);

  auto dataset = ledger_.dataset(paper->dataset_id);
  auto report = camera::run_all_checks(source, paper_id, paper->track,
                                       dataset ? &*dataset : nullptr, sidecar,
                                       authors);
  ledger_.record_camera_checks(paper_id, report.all_pass(), report.summary(),
                               ActorId::agent("orchestrator"), ts);
  if (!report.all_pass()) {
    std::vector<std::string> details;
    for (const auto& [name, result] : report.checks)
      for (const auto& d : result.details) details.push_back(name + ": " + d);
    throw Error("camera_checks_failed",
                "camera-ready verification failed for " + paper_id, details);
  }

  ledger_.put_artifact(source, ArtifactRole::camera_ready, paper_id,
                       "application/x-latex", ActorId::agent("orchestrator"), ts);
  advance(paper_id, StageState::CameraReady);
}

void Engine::present(const std::string& paper_id) {
  auto paper = ledger_.paper(paper_id);
  if (!paper) throw Error("unknown_paper", "no record for " + paper_id);
  if (paper->stage != StageState::CameraReady)
    throw Error("wrong_stage", "presentation synthesis starts from CameraReady");

  std::string camera_hash =
      paper->artifact_refs.at(ArtifactRole::camera_ready).content_hash;
  std::string manuscript = ledger_.get_artifact(camera_hash);

  std::string ts = stamp(paper_id, sim::kPresent);
  auto plan = present::plan_slides(manuscript, config_.total_budget_s);
  auto lineage = present::check_slide_lineage(plan, manuscript);
  if (!lineage.pass)
    throw Error("bad_plan", "planned slides carry dangling refs",
                lineage.dangling_refs);
  ledger_.put_artifact(present::slide_plan_to_json(plan), ArtifactRole::slides,
                       paper_id, "application/json",
                       ActorId::agent("orchestrator"), ts);

  std::string slide_list;
  for (const auto& s : plan.slides) {
    slide_list += "SLIDE " + std::to_string(s.index) + "|" + s.title + "|" +
                  format_score(s.time_budget_s) + "\n";
  }
  auto narration_res = agents::invoke_and_record(
      ledger_, paper_id, profiles_.at(agents::TemplateRole::narration),
      templates_.at(agents::TemplateRole::narration),
      {{"paper_id", paper_id}, {"slide_list", slide_list}}, *adapter_,
      config_.retry, clock_for(paper_id), /*bind_role=*/false, ts);

  auto segmented = present::segment_narration(narration_res.output_text, plan,
                                              config_.narration_wpm);
  auto contiguity = present::check_contiguity(segmented.script);
  if (!contiguity.empty())
    throw Error("bad_narration", "narration blocks are not contiguous",
                contiguity);
  ledger_.put_artifact(present::narration_to_json(segmented.script),
                       ArtifactRole::narration, paper_id, "application/json",
                       ActorId::agent("orchestrator"), ts);

  auto job = present::build_avatar_job(
      paper_id, paper->track, camera_hash,
      "lib:presenter-" + to_lower(track_code(paper->track)), std::nullopt);
  ledger_.put_artifact(present::avatar_job_to_json(job), ArtifactRole::avatar_job,
                       paper_id, "application/json",
                       ActorId::agent("orchestrator"), ts);
  advance(paper_id, StageState::Presented);
}

archive::AuditReport Engine::release_audit() {
  std::vector<PaperRecord> eligible;
  for (const auto& p : ledger_.papers()) {
    if (p.stage == StageState::Presented || p.stage == StageState::CameraReady ||
        p.stage == StageState::Archived)
      eligible.push_back(p);
  }
  std::sort(eligible.begin(), eligible.end(),
            [](const PaperRecord& a, const PaperRecord& b) {
              return a.paper_id < b.paper_id;
            });
  auto manifest = archive::build_manifest(ledger_, eligible,
                                          config_.include_reviews_in_manifest);
  archive::publish(ledger_, manifest, config_.publish_dir);
  auto report = archive::audit(manifest, config_.publish_dir);

  AuditState state;
  state.manifest_hash = ledger_.manifest_artifact_hash();
  state.checked = report.checked;
  state.matched = report.matched;
  for (const auto& d : report.discrepancies)
    state.discrepancy_hashes.push_back(d.expected_hash);
  ledger_.record_audit(state, ActorId::agent("archive"));
  return report;
}

void Engine::archive_paper(const std::string& paper_id) {
  record_gate(paper_id, kGateReleaseApproval, true, config_.approver,
              "post-audit release");
  stamp(paper_id, sim::kArchive);
  advance(paper_id, StageState::Archived);
}

// ---------------------------------------------------------------------------
// Batch runner
// ---------------------------------------------------------------------------

void Engine::drive_paper(const std::string& paper_id, RunSummary& summary,
                         std::mutex& summary_mu) {
  try {
    auto paper = ledger_.paper(paper_id);
    auto dataset = ledger_.dataset(paper->dataset_id);
    if (dataset->ip_risk) {
      record_gate(paper_id, kGateDatasetClearance, false, config_.approver,
                  "unresolved restrictions");
      return;
    }
    record_gate(paper_id, kGateDatasetClearance, true, config_.approver,
                "license and DUA clear");
    generate(paper_id);
    review(paper_id);
    auto outcome = triage(paper_id);

    if (outcome.decision == review::TriageDecision::Reject) return;

    revise(paper_id);
    if (outcome.decision == review::TriageDecision::Revise) {
      // The single re-review cycle.
      review(paper_id);
      auto second = triage(paper_id);
      if (second.decision == review::TriageDecision::Reject) return;
      revise(paper_id);
    }
    record_gate(paper_id, kGateRevisionValidation, true, config_.approver,
                "revision bundle validated");
    camera_ready(paper_id);
    present(paper_id);
  } catch (const std::exception& e) {
    std::lock_guard lock(summary_mu);
    summary.paper_errors[paper_id] = e.what();
  }
}

RunSummary Engine::run() {
  RunSummary summary;
  if (config_.datasets_csv.empty())
    throw Error("bad_config", "run requires a datasets_csv fixture set");
  auto fixtures = load_dataset_fixtures(config_.datasets_csv);
  summary.datasets = static_cast<int>(fixtures.size());

  std::vector<std::string> paper_ids;
  for (const auto& f : fixtures) {
    try {
      paper_ids.push_back(
          register_paper(f.url, f.track, f.license_text, f.dua_items, f.notes));
    } catch (const std::exception& e) {
      summary.paper_errors[f.url] = e.what();
    }
  }
  summary.papers = static_cast<int>(paper_ids.size());

  // Per-paper pipelines run on a bounded worker pool; each worker owns its
  // papers end to end so per-paper stage order is strictly sequential.
  std::mutex summary_mu;
  std::atomic<size_t> next{0};
  int workers = std::max(1, config_.parallelism);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= paper_ids.size()) break;
        drive_paper(paper_ids[i], summary, summary_mu);
      }
    });
  }
  for (auto& t : pool) t.join();

  // Release phase for everything that reached presentation.
  bool any_presented = false;
  for (const auto& p : ledger_.papers())
    if (p.stage == StageState::Presented) any_presented = true;
  if (any_presented) {
    auto report = release_audit();
    if (report.pass()) {
      std::vector<std::string> ready;
      for (const auto& p : ledger_.papers())
        if (p.stage == StageState::Presented) ready.push_back(p.paper_id);
      std::sort(ready.begin(), ready.end());
      for (const auto& id : ready) {
        try {
          archive_paper(id);
        } catch (const std::exception& e) {
          summary.paper_errors[id] = e.what();
        }
      }
    }
  }

  // Proceedings metadata for everything that made it to the archive.
  std::vector<PaperRecord> archived;
  for (const auto& p : ledger_.papers())
    if (p.stage == StageState::Archived) archived.push_back(p);
  if (!archived.empty()) {
    std::ofstream out(config_.publish_dir / "proceedings.json",
                      std::ios::trunc);
    out << archive::emit_proceedings(ledger_, archived);
  }

  for (const auto& p : ledger_.papers()) {
    summary.final_stages[stage_name(p.stage)] += 1;
    if (p.has_artifact(ArtifactRole::draft)) summary.drafts += 1;
    if (p.stage == StageState::Archived) summary.archived += 1;
  }
  for (const auto& e : ledger_.events())
    if (e.verb() == "review") summary.reviews += 1;
  return summary;
}

std::string RunSummary::to_json() const {
  nlohmann::ordered_json j;
  j["datasets"] = datasets;
  j["papers"] = papers;
  j["drafts"] = drafts;
  j["reviews"] = reviews;
  j["archived"] = archived;
  j["final_stages"] = final_stages;
  j["errors"] = paper_errors;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

PipelineMetrics compute_metrics(const Ledger& ledger) {
  PipelineMetrics m;

  auto papers = ledger.papers();
  std::sort(papers.begin(), papers.end(),
            [](const PaperRecord& a, const PaperRecord& b) {
              return a.paper_id < b.paper_id;
            });

  std::map<std::string, std::vector<double>> durations;
  for (const auto& p : papers) {
    if (p.stage == StageState::Archived) m.throughput += 1;
    for (size_t i = 1; i < p.stage_history.size(); ++i) {
      auto delta = parse_iso8601(p.stage_history[i].second) -
                   parse_iso8601(p.stage_history[i - 1].second);
      durations[stage_name(p.stage_history[i].first)].push_back(
          std::chrono::duration<double>(delta).count());
    }
  }
  for (const auto& [stage, values] : durations) {
    StageDurationStats stats;
    stats.count = values.size();
    stats.min_s = values.front();
    stats.max_s = values.front();
    double sum = 0.0;
    for (double v : values) {
      sum += v;
      stats.min_s = std::min(stats.min_s, v);
      stats.max_s = std::max(stats.max_s, v);
    }
    stats.mean_s = sum / static_cast<double>(values.size());
    m.turnaround_s[stage] = stats;
  }

  // Gate-relevant events: human gate decisions plus the automated gate
  // evaluations (triage, camera checks, audits, revision validation).
  uint64_t human = 0, gate_relevant = 0;
  for (const auto& e : ledger.events()) {
    std::string verb = e.verb();
    bool relevant = verb == "gate" || verb == "triage" ||
                    verb == "camera_checks" || verb == "audit" ||
                    verb == "validate_revision";
    if (!relevant) continue;
    gate_relevant += 1;
    if (e.actor.human) human += 1;
  }
  m.human_load = gate_relevant == 0
                     ? 0.0
                     : static_cast<double>(human) / static_cast<double>(gate_relevant);

  // Verified hashes come from the last audit's manifest minus its
  // discrepancies; the denominator is every role-bound artifact.
  std::set<std::string> all_hashes;
  for (const auto& p : papers)
    for (const auto& [role, ref] : p.artifact_refs)
      all_hashes.insert(ref.content_hash);

  std::set<std::string> verified;
  auto audit = ledger.last_audit();
  if (audit && !audit->manifest_hash.empty() &&
      ledger.has_blob(audit->manifest_hash)) {
    auto manifest =
        archive::ReleaseManifest::parse(ledger.get_artifact(audit->manifest_hash));
    std::set<std::string> bad(audit->discrepancy_hashes.begin(),
                              audit->discrepancy_hashes.end());
    for (const auto& entry : manifest.entries)
      if (!bad.count(entry.content_hash)) verified.insert(entry.content_hash);
  }
  if (!all_hashes.empty()) {
    size_t covered = 0;
    for (const auto& h : all_hashes)
      if (verified.count(h)) ++covered;
    m.audit_coverage =
        static_cast<double>(covered) / static_cast<double>(all_hashes.size());
  }
  return m;
}

std::string PipelineMetrics::to_json() const {
  nlohmann::ordered_json j;
  j["throughput"] = throughput;
  nlohmann::ordered_json turnaround;
  for (const auto& [stage, stats] : turnaround_s) {
    turnaround[stage] = {{"count", stats.count},
                         {"mean_s", stats.mean_s},
                         {"min_s", stats.min_s},
                         {"max_s", stats.max_s}};
  }
  j["turnaround_s"] = turnaround;
  j["human_load"] = human_load;
  j["audit_coverage"] = audit_coverage;
  return j.dump(2);
}

}  // namespace confpipe::orchestrator
