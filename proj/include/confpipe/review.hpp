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

// Parsing of the two structured reviewer outputs, score normalization and
// aggregation, and the accept/revise/reject triage decision.

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace confpipe::review {

// Reviewer 1: six categories scored 1-10 plus an overall and a five-step
// recommendation ladder.
enum class R1Recommendation { StrongAccept, Accept, WeakAccept, WeakReject, Reject };

std::string r1_recommendation_name(R1Recommendation r);
std::optional<R1Recommendation> r1_recommendation_from_name(const std::string& s);

inline const std::vector<std::string>& r1_categories() {
  static const std::vector<std::string> kCats{
      "originality",   "scientific_rigor", "clarity",
      "reproducibility", "significance",   "ethics"};
  return kCats;
}

struct ReviewR1 {
  std::map<std::string, double> category_scores;  // keyed by r1_categories()
  double overall = 0.0;
  R1Recommendation recommendation{};
  std::string summary;
  std::vector<std::string> major_flaws;
  std::vector<std::string> minor_flaws;
  std::vector<std::string> suggestions;
};

// Reviewer 2: six dimensions scored 0-5 and a three-step verdict.
enum class R2Verdict { Accept, WeakAccept, Reject };

std::string r2_verdict_name(R2Verdict v);
std::optional<R2Verdict> r2_verdict_from_name(const std::string& s);

inline const std::vector<std::string>& r2_dimensions() {
  static const std::vector<std::string> kDims{
      "problem_definition",      "methodological_soundness",
      "results_and_evidence",    "contribution_to_field",
      "writing_and_presentation", "ethical_transparency"};
  return kDims;
}

struct ReviewR2 {
  std::map<std::string, double> dimension_scores;  // keyed by r2_dimensions()
  R2Verdict verdict{};
  std::string overall_impression;
  std::vector<std::string> strengths;
  std::vector<std::string> weaknesses;
  std::vector<std::string> recommendations;
};

// Parsers for the structured review grammar. All missing or malformed
// fields are enumerated in Error::details().
ReviewR1 parse_review_r1(const std::string& text);
ReviewR2 parse_review_r2(const std::string& text);

// JSON export with the exact category/dimension key names.
std::string r1_to_json(const ReviewR1& r);
std::string r2_to_json(const ReviewR2& r);

// Mean of the six dimension scores mapped linearly from [0,5] to [0,10],
// one decimal.
double normalize_r2(const ReviewR2& r);

enum class TriageDecision { Accept, Revise, Reject };
std::string triage_decision_name(TriageDecision d);

struct TriageOutcome {
  double r1_score = 0.0;
  double r2_score_normalized = 0.0;
  double total = 0.0;  // arithmetic mean of the two 10-scale scores, 1 decimal
  TriageDecision decision{};
};

// Reject dominates: either reviewer rejecting forces Reject regardless of
// the total. Otherwise Accept at total >= accept_threshold, Revise below.
TriageOutcome triage(const ReviewR1& r1, const ReviewR2& r2,
                     double accept_threshold = 7.0);

}  // namespace confpipe::review
