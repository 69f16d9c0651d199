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

// Prompt-template governance (locking, rendering) and the pluggable
// agent-adapter boundary all generative work flows through, with
// conflict-of-interest guards. The adapter contract is text-in/text-out
// with structured metadata; no streaming.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "confpipe/clock.hpp"
#include "confpipe/ledger.hpp"
#include "confpipe/types.hpp"

namespace confpipe::agents {

enum class TemplateRole {
  generation,
  reviewer1,
  reviewer2,
  revision,
  response_letter,
  slides,
  narration,
};

std::string template_role_name(TemplateRole r);
std::optional<TemplateRole> template_role_from_name(const std::string& s);
// Artifact role the output of a template role is stored under.
ArtifactRole artifact_role_for(TemplateRole r);

// A prompt template with `{placeholder}` slots. Locking freezes the body;
// the lock hash proves which wording produced which output.
class PromptTemplate {
 public:
  PromptTemplate(std::string template_id, TemplateRole role, std::string body);

  const std::string& template_id() const { return template_id_; }
  TemplateRole role() const { return role_; }
  const std::string& body() const { return body_; }
  bool locked() const { return !lock_hash_.empty(); }
  const std::string& lock_hash() const { return lock_hash_; }

  // Errors: "already_locked".
  std::string lock();
  // Errors: "locked" once the template is locked.
  void set_body(std::string body);
  // Substitutes every placeholder. Errors: "unlocked_template";
  // "missing_binding" listing the unresolved slot names.
  std::string render(const std::map<std::string, std::string>& bindings) const;

  // Parses a UTF-8 template file with a YAML front-matter block carrying
  // template_id and role.
  static PromptTemplate load(const std::filesystem::path& file);

 private:
  std::string template_id_;
  TemplateRole role_;
  std::string body_;
  std::string lock_hash_;
};

// Loads and locks the seven shipped templates from an assets directory.
std::map<TemplateRole, PromptTemplate> load_template_set(
    const std::filesystem::path& assets_dir);

// ---------------------------------------------------------------------------
// Profiles and COI
// ---------------------------------------------------------------------------

struct AgentProfile {
  std::string agent_id;
  std::string model_family;
  std::string model_version;
  TemplateRole role{};
  std::string config;              // role-neutral config string
  std::string config_fingerprint;  // sha256(family, version, config)

  static AgentProfile make(std::string agent_id, std::string family,
                           std::string version, TemplateRole role,
                           std::string config = "");
};

struct CoiCheck {
  bool ok = true;
  std::string detail;
};

// Violation iff the two config fingerprints are identical — the same model
// configuration must never review its own outputs.
CoiCheck check_coi(const AgentProfile& generator, const AgentProfile& reviewer);

// ---------------------------------------------------------------------------
// Adapters
// ---------------------------------------------------------------------------

struct AdapterRequest {
  std::string template_id;
  std::string prompt;
  std::string agent_id;
};

class Adapter {
 public:
  virtual ~Adapter() = default;
  // Throws TransportError for retryable transport failures and
  // ContentError for invalid output.
  virtual std::string invoke(const AdapterRequest& request) = 0;
};

// Recorded review scores the mock adapter replays, keyed by paper id
// (optionally "<paper_id>:2" for a re-review round).
struct ScoreRow {
  std::string title;
  int pages = 8;
  double r1_overall = 7.0;
  std::string r1_recommendation = "Weak Accept";  // R1 five-step ladder
  double r2_score10 = 8.0;  // already on the 10-point workbook scale
  std::string r2_verdict = "Weak Accept";
};

using ScoreTable = std::map<std::string, ScoreRow>;

// Loads paper_id,title,pages,r1_overall,r1_recommendation,r2_score,r2_verdict.
ScoreTable load_score_table(const std::filesystem::path& csv_file);

// Deterministic offline backend: output is a pure function of
// (prompt, agent_id) and the recorded score table. Emits schema-valid
// fixtures per role — drafts with the full section set, reviews matching
// the rubric grammar, red-marked revisions, mapped response letters and
// slide-marked narration — so every downstream parser is exercised
// without a model.
class MockAdapter : public Adapter {
 public:
  explicit MockAdapter(ScoreTable table = {});
  std::string invoke(const AdapterRequest& request) override;

 private:
  ScoreTable table_;
};

// HTTP backend: POST {template_id, prompt, agent_id} as JSON, response
// {"output": ...}. Connection and 5xx failures surface as TransportError.
class HttpAdapter : public Adapter {
 public:
  HttpAdapter(std::string host, int port, std::string path = "/invoke",
              int timeout_ms = 30000);
  std::string invoke(const AdapterRequest& request) override;

 private:
  std::string host_;
  int port_;
  std::string path_;
  int timeout_ms_;
};

// ---------------------------------------------------------------------------
// Invocation
// ---------------------------------------------------------------------------

struct RetryPolicy {
  int attempts = 3;
  int base_delay_ms = 500;
  double multiplier = 2.0;
};

struct AgentResult {
  std::string output_text;
  AgentProfile agent;
  std::string prompt_hash;
  std::string started;
  std::string finished;
  int attempts_used = 1;
};

// Invokes the adapter with bounded retries on transport errors only.
// Content failures (including empty output) surface immediately.
AgentResult invoke_agent(const AgentProfile& profile,
                         const std::string& template_id,
                         const std::string& rendered_prompt, Adapter& adapter,
                         const RetryPolicy& retry, const Clock& clock);

// Full contract: renders the locked template, invokes, persists the output
// as an artifact (role per template role when bind_role, raw blob
// otherwise) and appends the invocation event with agent_id + prompt_hash.
AgentResult invoke_and_record(Ledger& ledger, const std::string& paper_id,
                              const AgentProfile& profile,
                              const PromptTemplate& tmpl,
                              const std::map<std::string, std::string>& bindings,
                              Adapter& adapter, const RetryPolicy& retry,
                              const Clock& clock, bool bind_role = true,
                              std::string timestamp = {});

}  // namespace confpipe::agents
