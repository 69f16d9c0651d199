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

// Slide-deck and narration planning from camera-ready manuscripts, slide
// lineage verification, policy-checked avatar render jobs, and the lexical
// Q&A scope filter. Plans are declarative (titles, section anchors, time
// budgets) — rendering backends consume the emitted JSON.

#include <optional>
#include <string>
#include <vector>

#include "confpipe/types.hpp"

namespace confpipe::present {

struct Slide {
  int index = 0;  // 1-based
  std::string title;
  std::vector<std::string> content_refs;  // canonical section anchors
  double time_budget_s = 0.0;
};

struct SlidePlan {
  std::vector<Slide> slides;  // 8..10 of them
  double total_budget_s = 0.0;
};

inline constexpr int kMinSlides = 8;
inline constexpr int kMaxSlides = 10;
inline constexpr double kFixedEndSlideBudgetS = 30.0;  // title + closing

// Plans a deck with balanced coverage of introduction, methods, results and
// the concluding section. Title and closing slides carry fixed 30 s
// budgets; content budgets are proportional to section length. Errors:
// non-positive or too-small budget, missing core section.
SlidePlan plan_slides(const std::string& manuscript, double total_budget_s);

std::string slide_plan_to_json(const SlidePlan& plan);
SlidePlan slide_plan_from_json(const std::string& json_text);

// Every content_ref anchor must exist in the manuscript.
struct LineageResult {
  bool pass = false;
  std::vector<std::string> dangling_refs;
};
LineageResult check_slide_lineage(const SlidePlan& plan,
                                  const std::string& manuscript);

struct NarrationBlock {
  int slide_index = 0;
  double start_s = 0.0;
  double duration_s = 0.0;
  std::string text;
};

struct NarrationScript {
  std::vector<NarrationBlock> blocks;
};

inline constexpr double kDefaultWordsPerMinute = 150.0;
inline constexpr double kBudgetSlack = 0.10;

struct SegmentResult {
  NarrationScript script;
  std::vector<std::string> warnings;  // over-budget or empty slides
};

// Splits `[SLIDE n]`-marked text into contiguous time-coded blocks at
// wpm words per minute. Errors: marker for a nonexistent slide, markers out
// of order, unmarked leading text.
SegmentResult segment_narration(const std::string& script_text,
                                const SlidePlan& plan,
                                double wpm = kDefaultWordsPerMinute);

std::string narration_to_json(const NarrationScript& script);

// Contiguity: block k+1 starts exactly where block k ends; no gaps or
// overlaps. Returns violations (empty = holds).
std::vector<std::string> check_contiguity(const NarrationScript& script);

// ---------------------------------------------------------------------------
// Avatar jobs
// ---------------------------------------------------------------------------

inline constexpr const char* kAvatarLabel = "AI-generated presenter";

struct Consent {
  bool granted = false;
  std::string scope;
};

struct AvatarJob {
  std::string paper_id;
  std::string avatar_id;  // "lib:<id>" or "real:<id>"
  std::optional<Consent> consent;
  std::string label_text;  // always carries kAvatarLabel
  struct {
    std::string paper_id;
    std::string track_code;
    std::string version_hash;
  } embed_metadata;
  std::string resolution = "1920x1080";
};

// Library avatars need no consent; real-likeness avatars are refused
// without granted consent. The label is always present.
AvatarJob build_avatar_job(const std::string& paper_id, Track track,
                           const std::string& version_hash,
                           const std::string& avatar_id,
                           std::optional<Consent> consent);

std::string avatar_job_to_json(const AvatarJob& job);

// ---------------------------------------------------------------------------
// Q&A scope filter
// ---------------------------------------------------------------------------

struct QaResult {
  bool refused = false;
  std::vector<std::string> grounded_passages;
};

// Lexical-overlap retrieval over the paper's paragraphs: a passage
// qualifies when the fraction of question terms it contains exceeds the
// threshold. Refusal when nothing qualifies keeps answers inside the
// validated research context.
QaResult qa_scope_filter(const std::string& question,
                         const std::string& paper_text,
                         double overlap_threshold = 0.3, int top_k = 3);

}  // namespace confpipe::present
