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

// Command-line surface of the pipeline engine. Every verb operates on a
// ledger directory; generative verbs additionally need a config naming the
// adapter and asset locations. Exit code 0 on success; failures print a
// machine-readable JSON error on stderr.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "confpipe/archive.hpp"
#include "confpipe/error.hpp"
#include "confpipe/ledger.hpp"
#include "confpipe/orchestrator.hpp"
#include "confpipe/strings.hpp"

namespace fs = std::filesystem;
using namespace confpipe;

namespace {

struct CliState {
  std::string ledger_dir = "ledger";
  std::string config_file;
  std::string paper_id;
};

orchestrator::PipelineConfig load_config(const CliState& state) {
  if (!state.config_file.empty())
    return orchestrator::PipelineConfig::load(state.config_file);
  orchestrator::PipelineConfig config;
  config.assets_dir = "assets";
  return config;
}

std::shared_ptr<Clock> make_clock(const orchestrator::PipelineConfig& config) {
  if (config.clock_kind == "simulated")
    return std::make_shared<SimClock>(config.sim_epoch);
  return std::make_shared<SystemClock>();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("storage", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit_error(const std::exception& e) {
  nlohmann::ordered_json j;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["error"] = {{"code", err->code()}, {"message", err->what()}};
    if (!err->details().empty()) j["error"]["details"] = err->details();
  } else {
    j["error"] = {{"code", "internal"}, {"message", e.what()}};
  }
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conference pipeline engine"};
  app.require_subcommand(1);

  CliState state;
  app.add_option("--ledger", state.ledger_dir, "Ledger directory")
      ->envname("CONFPIPE_LEDGER");
  app.add_option("--config", state.config_file, "Pipeline config JSON");

  // register
  std::string url, track_str, license_file, license_id, notes;
  std::vector<std::string> dua_args;
  auto* cmd_register = app.add_subcommand("register",
                                          "Register a dataset and mint its paper");
  cmd_register->add_option("--url", url)->required();
  cmd_register->add_option("--track", track_str)->required();
  cmd_register->add_option("--license-file", license_file);
  cmd_register->add_option("--license", license_id);
  cmd_register->add_option("--dua", dua_args,
                           "DUA item as '<text>:1' (satisfied) or '<text>:0'");
  cmd_register->add_option("--notes", notes);

  // stage verbs
  auto add_paper_cmd = [&](const char* name, const char* desc) {
    auto* cmd = app.add_subcommand(name, desc);
    cmd->add_option("--paper", state.paper_id)->required();
    return cmd;
  };
  auto* cmd_generate = add_paper_cmd("generate", "Draft the manuscript");
  auto* cmd_review = add_paper_cmd("review", "Run both AI reviews");
  auto* cmd_triage = add_paper_cmd("triage", "Compute the triage decision");
  auto* cmd_revise = add_paper_cmd("revise", "Produce and validate the revision bundle");
  auto* cmd_camera = add_paper_cmd("camera-ready", "Run the camera-ready gate");
  auto* cmd_present = add_paper_cmd("present", "Plan slides, narration, avatar job");

  // approve <gate>
  std::string gate, approver = "chair", note;
  bool reject = false;
  auto* cmd_approve = app.add_subcommand("approve", "Record a human gate decision");
  cmd_approve->add_option("gate", gate,
                          "dataset_clearance | revision_validation | release_approval")
      ->required();
  cmd_approve->add_option("--paper", state.paper_id)->required();
  cmd_approve->add_option("--approver", approver);
  cmd_approve->add_option("--note", note);
  cmd_approve->add_flag("--reject", reject);

  // archive
  auto* cmd_archive = app.add_subcommand(
      "archive", "Build manifest + publish + audit, or advance one paper");
  cmd_archive->add_option("--paper", state.paper_id);

  auto* cmd_audit = app.add_subcommand("audit",
                                       "Re-audit the published directory");
  auto* cmd_metrics = app.add_subcommand("metrics", "Operational metrics JSON");

  std::string out_file;
  auto* cmd_workbook = app.add_subcommand("export-workbook",
                                          "Export the tracking workbook CSV");
  cmd_workbook->add_option("--track", track_str)->required();
  cmd_workbook->add_option("--out", out_file);

  auto* cmd_run = app.add_subcommand("run", "Drive every fixture dataset");

  std::string registry_out;
  auto* cmd_registry = app.add_subcommand("export-registry",
                                          "Export the dataset registry CSV");
  cmd_registry->add_option("--out", registry_out);

  std::string registry_in;
  auto* cmd_import = app.add_subcommand("import-registry",
                                        "Import a dataset registry CSV");
  cmd_import->add_option("--file", registry_in)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = load_config(state);
    Ledger ledger(state.ledger_dir, make_clock(config));

    if (cmd_register->parsed()) {
      auto track = track_from_name(track_str);
      if (!track) throw Error("bad_track", "unknown track: " + track_str);
      std::string license_text = license_id;
      if (!license_file.empty()) license_text = read_file(license_file);
      std::vector<DuaItem> dua;
      for (const auto& item : dua_args) {
        auto colon = item.rfind(':');
        if (colon == std::string::npos)
          dua.push_back({item, false});
        else
          dua.push_back({item.substr(0, colon), item.substr(colon + 1) == "1"});
      }
      orchestrator::Engine engine(ledger, config);
      std::string paper_id =
          engine.register_paper(url, *track, license_text, dua, notes);
      auto paper = ledger.paper(paper_id);
      auto dataset = ledger.dataset(paper->dataset_id);
      nlohmann::ordered_json j;
      j["paper_id"] = paper_id;
      j["dataset_id"] = paper->dataset_id;
      j["license_id"] = dataset->license_id;
      j["ip_risk"] = dataset->ip_risk;
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (cmd_approve->parsed()) {
      orchestrator::Engine engine(ledger, config);
      engine.record_gate(state.paper_id, gate, !reject, approver, note);
      std::cout << "{\"gate\": \"" << gate << "\", \"decision\": \""
                << (reject ? "reject" : "approve") << "\"}\n";
      return 0;
    }

    auto run_stage = [&](auto&& fn) {
      orchestrator::Engine engine(ledger, config);
      fn(engine);
      auto paper = ledger.paper(state.paper_id);
      nlohmann::ordered_json j;
      j["paper_id"] = state.paper_id;
      j["stage"] = stage_name(paper->stage);
      std::cout << j.dump(2) << "\n";
    };

    if (cmd_generate->parsed()) {
      run_stage([&](auto& e) { e.generate(state.paper_id); });
      return 0;
    }
    if (cmd_review->parsed()) {
      run_stage([&](auto& e) { e.review(state.paper_id); });
      return 0;
    }
    if (cmd_triage->parsed()) {
      orchestrator::Engine engine(ledger, config);
      auto outcome = engine.triage(state.paper_id);
      nlohmann::ordered_json j;
      j["paper_id"] = state.paper_id;
      j["r1_score"] = outcome.r1_score;
      j["r2_score_normalized"] = outcome.r2_score_normalized;
      j["total"] = outcome.total;
      j["decision"] = review::triage_decision_name(outcome.decision);
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (cmd_revise->parsed()) {
      run_stage([&](auto& e) { e.revise(state.paper_id); });
      return 0;
    }
    if (cmd_camera->parsed()) {
      run_stage([&](auto& e) { e.camera_ready(state.paper_id); });
      return 0;
    }
    if (cmd_present->parsed()) {
      run_stage([&](auto& e) { e.present(state.paper_id); });
      return 0;
    }

    if (cmd_archive->parsed()) {
      orchestrator::Engine engine(ledger, config);
      if (state.paper_id.empty()) {
        auto report = engine.release_audit();
        nlohmann::ordered_json j;
        j["checked"] = report.checked;
        j["matched"] = report.matched;
        j["pass"] = report.pass();
        std::cout << j.dump(2) << "\n";
        return report.pass() ? 0 : 1;
      }
      engine.archive_paper(state.paper_id);
      std::cout << "{\"paper_id\": \"" << state.paper_id
                << "\", \"stage\": \"Archived\"}\n";
      return 0;
    }

    if (cmd_audit->parsed()) {
      std::string manifest_hash = ledger.manifest_artifact_hash();
      if (manifest_hash.empty())
        throw Error("no_manifest", "no release manifest has been built");
      auto manifest =
          archive::ReleaseManifest::parse(ledger.get_artifact(manifest_hash));
      auto report = archive::audit(manifest, config.publish_dir);
      AuditState audit_state;
      audit_state.manifest_hash = manifest_hash;
      audit_state.checked = report.checked;
      audit_state.matched = report.matched;
      for (const auto& d : report.discrepancies)
        audit_state.discrepancy_hashes.push_back(d.expected_hash);
      ledger.record_audit(audit_state, ActorId::human_actor("auditor"));
      nlohmann::ordered_json j;
      j["checked"] = report.checked;
      j["matched"] = report.matched;
      nlohmann::ordered_json ds = nlohmann::ordered_json::array();
      for (const auto& d : report.discrepancies)
        ds.push_back({{"paper_id", d.paper_id},
                      {"role", d.role},
                      {"expected", d.expected_hash},
                      {"actual", d.actual_hash}});
      j["discrepancies"] = ds;
      std::cout << j.dump(2) << "\n";
      return report.pass() ? 0 : 1;
    }

    if (cmd_metrics->parsed()) {
      std::cout << orchestrator::compute_metrics(ledger).to_json() << "\n";
      return 0;
    }

    if (cmd_workbook->parsed()) {
      auto track = track_from_name(track_str);
      if (!track) throw Error("bad_track", "unknown track: " + track_str);
      std::string csv = ledger.export_workbook(*track);
      if (out_file.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
        out << csv;
      }
      return 0;
    }

    if (cmd_registry->parsed()) {
      std::string csv = ledger.export_dataset_registry();
      if (registry_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(registry_out, std::ios::binary | std::ios::trunc);
        out << csv;
      }
      return 0;
    }

    if (cmd_import->parsed()) {
      int added = ledger.import_dataset_registry(read_file(registry_in),
                                                 ActorId::human_actor("importer"));
      std::cout << "{\"imported\": " << added << "}\n";
      return 0;
    }

    if (cmd_run->parsed()) {
      if (state.config_file.empty())
        throw Error("bad_config", "run requires --config");
      orchestrator::Engine engine(ledger, config);
      auto summary = engine.run();
      std::cout << summary.to_json() << "\n";
      return summary.paper_errors.empty() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    emit_error(e);
    return 2;
  }
  return 0;
}
