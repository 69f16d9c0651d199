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

#include "confpipe/presentation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "confpipe/error.hpp"
#include "confpipe/latex.hpp"
#include "confpipe/strings.hpp"

namespace confpipe::present {

namespace {

int word_count(const std::string& text) {
  int n = 0;
  bool in_word = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

}  // namespace

SlidePlan plan_slides(const std::string& manuscript, double total_budget_s) {
  if (total_budget_s <= 0.0)
    throw Error("bad_budget", "non-positive budget");

  auto doc = latex::scan(manuscript);
  auto body_len = [&](const char* canonical) -> double {
    const latex::Section* s = doc.find_section(canonical);
    return s ? static_cast<double>(normalize_ws(doc.section_body(*s)).size()) : 0.0;
  };

  // Core coverage: introduction, methods, results, and a concluding anchor
  // (conclusion when present, discussion otherwise).
  for (const char* core : {"introduction", "methodology", "results"}) {
    if (!doc.find_section(core))
      throw Error("missing_section",
                  std::string("manuscript missing a core section: ") + core);
  }
  std::string closing_anchor;
  if (doc.find_section("conclusion")) closing_anchor = "conclusion";
  else if (doc.find_section("discussion")) closing_anchor = "discussion";
  else
    throw Error("missing_section",
                "manuscript missing a core section: conclusion");

  double content_budget = total_budget_s - 2.0 * kFixedEndSlideBudgetS;
  if (content_budget <= 0.0)
    throw Error("bad_budget",
                "budget cannot cover the fixed title and closing slides");

  double intro = body_len("introduction");
  double methods = body_len("methodology");
  double results = body_len("results");
  double discussion = body_len("discussion");
  bool has_discussion_slide =
      closing_anchor != "discussion" && doc.find_section("discussion");
  double content_total =
      intro + methods + results + (has_discussion_slide ? discussion : 0.0);
  if (content_total <= 0.0)
    throw Error("missing_section", "core sections carry no content");

  // Base deck: title, intro, methods x2, results x2, [discussion], closing.
  // Long introductions or results earn one continuation slide each, which
  // keeps the count inside [8,10].
  int intro_slides = intro / content_total >= 0.25 ? 2 : 1;
  int results_slides = results / content_total >= 0.35 ? 3 : 2;

  struct ContentSpec {
    std::string title;
    std::string anchor;
    double weight;
  };
  std::vector<ContentSpec> specs;
  for (int i = 0; i < intro_slides; ++i)
    specs.push_back({i == 0 ? "Introduction" : "Introduction (cont.)",
                     "introduction", intro / intro_slides});
  specs.push_back({"Methodology", "methodology", methods / 2.0});
  specs.push_back({"Methodology Details", "methodology", methods / 2.0});
  for (int i = 0; i < results_slides; ++i)
    specs.push_back({i == 0 ? "Results" : "Results (cont.)", "results",
                     results / results_slides});
  if (has_discussion_slide)
    specs.push_back({"Discussion", "discussion", discussion});

  // Short manuscripts (no separate discussion slide) can fall under the
  // 8-slide floor; split the heaviest section until the deck is full.
  while (specs.size() + 2 < static_cast<size_t>(kMinSlides)) {
    size_t heaviest = 0;
    for (size_t i = 1; i < specs.size(); ++i)
      if (specs[i].weight > specs[heaviest].weight) heaviest = i;
    ContentSpec split = specs[heaviest];
    split.weight /= 2.0;
    specs[heaviest].weight /= 2.0;
    split.title += " (cont.)";
    specs.insert(specs.begin() + static_cast<long>(heaviest) + 1, split);
  }

  SlidePlan plan;
  plan.total_budget_s = total_budget_s;

  Slide title_slide;
  title_slide.index = 1;
  title_slide.title = doc.title.empty() ? "Title" : doc.title;
  title_slide.time_budget_s = kFixedEndSlideBudgetS;
  plan.slides.push_back(title_slide);

  double weight_total = 0.0;
  for (const auto& s : specs) weight_total += s.weight;
  double assigned = 0.0;
  for (size_t i = 0; i < specs.size(); ++i) {
    Slide s;
    s.index = static_cast<int>(plan.slides.size()) + 1;
    s.title = specs[i].title;
    s.content_refs = {specs[i].anchor};
    if (i + 1 == specs.size()) {
      s.time_budget_s = content_budget - assigned;  // absorbs rounding
    } else {
      s.time_budget_s = round1(content_budget * specs[i].weight / weight_total);
      assigned += s.time_budget_s;
    }
    plan.slides.push_back(std::move(s));
  }

  Slide closing;
  closing.index = static_cast<int>(plan.slides.size()) + 1;
  closing.title = closing_anchor == "conclusion" ? "Conclusion" : "Closing Remarks";
  closing.content_refs = {closing_anchor};
  closing.time_budget_s = kFixedEndSlideBudgetS;
  plan.slides.push_back(std::move(closing));

  int n = static_cast<int>(plan.slides.size());
  if (n < kMinSlides || n > kMaxSlides)
    throw Error("bad_plan", "slide count " + std::to_string(n) +
                                " left the [8,10] contract");
  return plan;
}

std::string slide_plan_to_json(const SlidePlan& plan) {
  nlohmann::ordered_json j;
  j["total_budget_s"] = plan.total_budget_s;
  nlohmann::ordered_json slides = nlohmann::ordered_json::array();
  for (const auto& s : plan.slides) {
    slides.push_back({{"index", s.index},
                      {"title", s.title},
                      {"content_refs", s.content_refs},
                      {"time_budget_s", s.time_budget_s}});
  }
  j["slides"] = slides;
  return j.dump(2);
}

SlidePlan slide_plan_from_json(const std::string& json_text) {
  auto j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded())
    throw Error("bad_plan", "slide plan is not valid JSON");
  SlidePlan plan;
  plan.total_budget_s = j.value("total_budget_s", 0.0);
  for (const auto& js : j.value("slides", nlohmann::json::array())) {
    Slide s;
    s.index = js.value("index", 0);
    s.title = js.value("title", "");
    s.time_budget_s = js.value("time_budget_s", 0.0);
    for (const auto& ref : js.value("content_refs", nlohmann::json::array()))
      s.content_refs.push_back(ref.get<std::string>());
    plan.slides.push_back(std::move(s));
  }
  return plan;
}

LineageResult check_slide_lineage(const SlidePlan& plan,
                                  const std::string& manuscript) {
  auto doc = latex::scan(manuscript);
  LineageResult out;
  for (const auto& slide : plan.slides) {
    for (const auto& ref : slide.content_refs) {
      std::string canonical = latex::canonical_section(ref);
      bool resolves = doc.find_section(canonical) != nullptr ||
                      (canonical == "abstract" && doc.has_abstract);
      if (!resolves)
        out.dangling_refs.push_back("slide " + std::to_string(slide.index) +
                                    ": " + ref);
    }
  }
  out.pass = out.dangling_refs.empty();
  return out;
}

SegmentResult segment_narration(const std::string& script_text,
                                const SlidePlan& plan, double wpm) {
  if (wpm <= 0.0) throw Error("bad_rate", "non-positive narration rate");
  SegmentResult out;

  std::map<int, std::string> texts;
  int current = 0;
  int last_marker = 0;
  for (const auto& raw : split(script_text, '\n')) {
    std::string line = trim(raw);
    if (starts_with(line, "[SLIDE ") && line.back() == ']') {
      std::string num = line.substr(7, line.size() - 8);
      int n;
      try {
        n = std::stoi(num);
      } catch (...) {
        throw Error("bad_marker", "malformed slide marker: " + line);
      }
      if (n < 1 || n > static_cast<int>(plan.slides.size()))
        throw Error("bad_marker",
                    "marker for nonexistent slide " + std::to_string(n));
      if (n <= last_marker)
        throw Error("bad_marker", "slide markers out of order at " + line);
      last_marker = n;
      current = n;
      texts[n];  // marker with no text still yields a block
      continue;
    }
    if (current == 0) {
      if (!line.empty())
        throw Error("unmarked_text",
                    "narration text precedes the first slide marker");
      continue;
    }
    if (!texts[current].empty()) texts[current] += " ";
    texts[current] += line;
  }

  double cursor = 0.0;
  for (const auto& slide : plan.slides) {
    NarrationBlock block;
    block.slide_index = slide.index;
    block.start_s = cursor;
    auto it = texts.find(slide.index);
    block.text = it == texts.end() ? "" : trim(it->second);
    int words = word_count(block.text);
    block.duration_s = static_cast<double>(words) / wpm * 60.0;
    if (words == 0)
      out.warnings.push_back("slide " + std::to_string(slide.index) +
                             " has no narration");
    if (block.duration_s > slide.time_budget_s * (1.0 + kBudgetSlack))
      out.warnings.push_back(
          "slide " + std::to_string(slide.index) + " narration runs " +
          format_score(block.duration_s) + " s against a budget of " +
          format_score(slide.time_budget_s) + " s");
    cursor += block.duration_s;
    out.script.blocks.push_back(std::move(block));
  }
  return out;
}

std::string narration_to_json(const NarrationScript& script) {
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (const auto& b : script.blocks) {
    blocks.push_back({{"slide_index", b.slide_index},
                      {"start_s", b.start_s},
                      {"duration_s", b.duration_s},
                      {"text", b.text}});
  }
  nlohmann::ordered_json j;
  j["blocks"] = blocks;
  return j.dump(2);
}

std::vector<std::string> check_contiguity(const NarrationScript& script) {
  std::vector<std::string> violations;
  double expected_start = 0.0;
  for (const auto& b : script.blocks) {
    if (std::abs(b.start_s - expected_start) > 1e-9) {
      violations.push_back("block for slide " + std::to_string(b.slide_index) +
                           " starts at " + format_score(b.start_s) +
                           " s, expected " + format_score(expected_start) + " s");
    }
    expected_start = b.start_s + b.duration_s;
  }
  return violations;
}

// ---------------------------------------------------------------------------
// Avatar jobs
// ---------------------------------------------------------------------------

AvatarJob build_avatar_job(const std::string& paper_id, Track track,
                           const std::string& version_hash,
                           const std::string& avatar_id,
                           std::optional<Consent> consent) {
  bool real_likeness = starts_with(avatar_id, "real:");
  if (real_likeness && (!consent || !consent->granted))
    throw Error("consent_violation",
                "real-likeness avatar requires granted consent: " + avatar_id);

  AvatarJob job;
  job.paper_id = paper_id;
  job.avatar_id = avatar_id;
  job.consent = std::move(consent);
  job.label_text = kAvatarLabel;
  job.embed_metadata.paper_id = paper_id;
  job.embed_metadata.track_code = track_code(track);
  job.embed_metadata.version_hash = version_hash;
  return job;
}

std::string avatar_job_to_json(const AvatarJob& job) {
  nlohmann::ordered_json j;
  j["paper_id"] = job.paper_id;
  j["avatar_id"] = job.avatar_id;
  if (job.consent) {
    j["consent"] = {{"granted", job.consent->granted},
                    {"scope", job.consent->scope}};
  }
  j["label_text"] = job.label_text;
  j["embed_metadata"] = {{"paper_id", job.embed_metadata.paper_id},
                         {"track", job.embed_metadata.track_code},
                         {"version_hash", job.embed_metadata.version_hash}};
  j["resolution"] = job.resolution;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Q&A scope filter
// ---------------------------------------------------------------------------

namespace {

std::set<std::string> terms_of(const std::string& text) {
  std::set<std::string> out;
  std::string word;
  auto flush = [&] {
    if (word.size() > 2) out.insert(word);
    word.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

}  // namespace

QaResult qa_scope_filter(const std::string& question,
                         const std::string& paper_text,
                         double overlap_threshold, int top_k) {
  QaResult out;
  auto question_terms = terms_of(question);
  if (question_terms.empty()) {
    out.refused = true;
    return out;
  }

  // Passages are blank-line separated paragraphs.
  std::vector<std::string> passages;
  std::string current;
  for (const auto& line : split(paper_text, '\n')) {
    if (trim(line).empty()) {
      if (!trim(current).empty()) passages.push_back(trim(current));
      current.clear();
    } else {
      current += line;
      current += ' ';
    }
  }
  if (!trim(current).empty()) passages.push_back(trim(current));

  std::vector<std::pair<double, size_t>> scored;
  for (size_t i = 0; i < passages.size(); ++i) {
    auto passage_terms = terms_of(passages[i]);
    size_t hit = 0;
    for (const auto& t : question_terms)
      if (passage_terms.count(t)) ++hit;
    double overlap =
        static_cast<double>(hit) / static_cast<double>(question_terms.size());
    if (overlap > overlap_threshold) scored.emplace_back(overlap, i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  for (size_t i = 0; i < scored.size() && i < static_cast<size_t>(top_k); ++i)
    out.grounded_passages.push_back(passages[scored[i].second]);
  out.refused = out.grounded_passages.empty();
  return out;
}

}  // namespace confpipe::present
