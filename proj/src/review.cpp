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

#include "confpipe/review.hpp"

#include <array>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "confpipe/error.hpp"
#include "confpipe/strings.hpp"

namespace confpipe::review {

namespace {

constexpr std::array<std::pair<R1Recommendation, const char*>, 5> kR1Recs{{
    {R1Recommendation::StrongAccept, "Strong Accept"},
    {R1Recommendation::Accept, "Accept"},
    {R1Recommendation::WeakAccept, "Weak Accept"},
    {R1Recommendation::WeakReject, "Weak Reject"},
    {R1Recommendation::Reject, "Reject"},
}};

constexpr std::array<std::pair<R2Verdict, const char*>, 3> kR2Verdicts{{
    {R2Verdict::Accept, "Accept"},
    {R2Verdict::WeakAccept, "Weak Accept"},
    {R2Verdict::Reject, "Reject"},
}};

// A labeled block: "SECTION:" heading followed by free text or "- " items,
// ending at the next known heading.
struct Block {
  bool present = false;
  std::string text;
  std::vector<std::string> items;
};

std::map<std::string, Block> split_blocks(const std::string& text,
                                          const std::vector<std::string>& headings) {
  std::map<std::string, Block> out;
  std::string current;
  for (const auto& raw : split(text, '\n')) {
    std::string line = trim(raw);
    bool heading = false;
    for (const auto& h : headings) {
      if (to_lower(line) == to_lower(h) + ":" ||
          starts_with(to_lower(line), to_lower(h) + ":")) {
        // Inline content after the colon (e.g. "RECOMMENDATION: Accept").
        current = to_lower(h);
        out[current].present = true;
        std::string rest = trim(line.substr(h.size() + 1));
        if (!rest.empty()) out[current].text += rest;
        heading = true;
        break;
      }
    }
    if (heading) continue;
    if (current.empty() || line.empty()) continue;
    Block& b = out[current];
    if (starts_with(line, "- ")) {
      b.items.push_back(trim(line.substr(2)));
    } else {
      if (!b.text.empty()) b.text += " ";
      b.text += line;
    }
  }
  return out;
}

// "Scientific Rigor" -> "scientific_rigor"
std::string key_of(const std::string& label) {
  std::string out;
  for (char c : to_lower(label)) out.push_back(c == ' ' ? '_' : c);
  return out;
}

std::string label_of(const std::string& key) {
  std::string out;
  bool cap = true;
  for (char c : key) {
    if (c == '_') {
      out.push_back(' ');
      cap = true;
    } else {
      out.push_back(cap ? static_cast<char>(std::toupper(c)) : c);
      cap = false;
    }
  }
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) return std::nullopt;
  while (*end == ' ') ++end;
  if (*end != '\0') return std::nullopt;
  return v;
}

// Parses "Label: 7.0" score lines out of a SCORES block body.
std::map<std::string, double> parse_scores(const std::string& text,
                                           const std::string& scores_heading) {
  std::map<std::string, double> out;
  bool in_scores = false;
  for (const auto& raw : split(text, '\n')) {
    std::string line = trim(raw);
    if (to_lower(line) == to_lower(scores_heading) + ":") {
      in_scores = true;
      continue;
    }
    if (!in_scores) continue;
    if (line.empty()) {
      if (!out.empty()) break;
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos) break;
    auto value = parse_number(trim(line.substr(colon + 1)));
    if (!value) break;
    out[key_of(trim(line.substr(0, colon)))] = *value;
  }
  return out;
}

}  // namespace

std::string r1_recommendation_name(R1Recommendation r) {
  for (const auto& [v, n] : kR1Recs)
    if (v == r) return n;
  return "Reject";
}

std::optional<R1Recommendation> r1_recommendation_from_name(const std::string& s) {
  std::string norm = to_lower(normalize_ws(s));
  for (const auto& [v, n] : kR1Recs)
    if (norm == to_lower(n)) return v;
  return std::nullopt;
}

std::string r2_verdict_name(R2Verdict v) {
  for (const auto& [val, n] : kR2Verdicts)
    if (val == v) return n;
  return "Reject";
}

std::optional<R2Verdict> r2_verdict_from_name(const std::string& s) {
  std::string norm = to_lower(normalize_ws(s));
  for (const auto& [v, n] : kR2Verdicts)
    if (norm == to_lower(n)) return v;
  return std::nullopt;
}

ReviewR1 parse_review_r1(const std::string& text) {
  static const std::vector<std::string> kHeadings{
      "SUMMARY", "SCORES", "MAJOR FLAWS", "MINOR FLAWS", "SUGGESTIONS",
      "RECOMMENDATION"};
  auto blocks = split_blocks(text, kHeadings);
  std::vector<std::string> problems;
  for (const auto& h : kHeadings)
    if (!blocks[to_lower(h)].present) problems.push_back("missing section: " + h);

  ReviewR1 r;
  r.summary = blocks["summary"].text;
  r.major_flaws = blocks["major flaws"].items;
  r.minor_flaws = blocks["minor flaws"].items;
  r.suggestions = blocks["suggestions"].items;

  auto scores = parse_scores(text, "SCORES");
  for (const auto& cat : r1_categories()) {
    auto it = scores.find(cat);
    if (it == scores.end()) {
      problems.push_back("missing score: " + label_of(cat));
      continue;
    }
    if (it->second < 1.0 || it->second > 10.0) {
      problems.push_back("score out of range [1,10]: " + label_of(cat) + " = " +
                         format_score(it->second));
      continue;
    }
    r.category_scores[cat] = it->second;
  }
  if (auto it = scores.find("overall"); it != scores.end()) {
    if (it->second < 1.0 || it->second > 10.0)
      problems.push_back("score out of range [1,10]: Overall = " +
                         format_score(it->second));
    else
      r.overall = it->second;
  } else {
    problems.push_back("missing score: Overall");
  }

  const std::string rec_text = blocks["recommendation"].text;
  if (auto rec = r1_recommendation_from_name(rec_text)) {
    r.recommendation = *rec;
  } else if (blocks["recommendation"].present) {
    problems.push_back("unparseable recommendation: " + rec_text);
  }

  if (!problems.empty())
    throw Error("bad_review", "reviewer 1 output failed to parse", problems);
  return r;
}

ReviewR2 parse_review_r2(const std::string& text) {
  static const std::vector<std::string> kHeadings{
      "OVERALL IMPRESSION", "SCORES", "STRENGTHS", "WEAKNESSES",
      "RECOMMENDATIONS", "VERDICT"};
  auto blocks = split_blocks(text, kHeadings);
  std::vector<std::string> problems;
  for (const auto& h : kHeadings)
    if (!blocks[to_lower(h)].present) problems.push_back("missing section: " + h);

  ReviewR2 r;
  r.overall_impression = blocks["overall impression"].text;
  r.strengths = blocks["strengths"].items;
  r.weaknesses = blocks["weaknesses"].items;
  r.recommendations = blocks["recommendations"].items;

  auto scores = parse_scores(text, "SCORES");
  for (const auto& dim : r2_dimensions()) {
    auto it = scores.find(dim);
    if (it == scores.end()) {
      problems.push_back("missing score: " + label_of(dim));
      continue;
    }
    if (it->second < 0.0 || it->second > 5.0) {
      problems.push_back("score out of range [0,5]: " + label_of(dim) + " = " +
                         format_score(it->second));
      continue;
    }
    r.dimension_scores[dim] = it->second;
  }

  const std::string verdict_text = blocks["verdict"].text;
  if (auto v = r2_verdict_from_name(verdict_text)) {
    r.verdict = *v;
  } else if (blocks["verdict"].present) {
    problems.push_back("unparseable verdict: " + verdict_text);
  }

  if (!problems.empty())
    throw Error("bad_review", "reviewer 2 output failed to parse", problems);
  return r;
}

std::string r1_to_json(const ReviewR1& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json scores;
  for (const auto& cat : r1_categories()) {
    auto it = r.category_scores.find(cat);
    scores[cat] = it == r.category_scores.end() ? 0.0 : it->second;
  }
  j["category_scores"] = scores;
  j["overall"] = r.overall;
  j["recommendation"] = r1_recommendation_name(r.recommendation);
  j["summary"] = r.summary;
  j["major_flaws"] = r.major_flaws;
  j["minor_flaws"] = r.minor_flaws;
  j["suggestions"] = r.suggestions;
  return j.dump(2);
}

std::string r2_to_json(const ReviewR2& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json scores;
  for (const auto& dim : r2_dimensions()) {
    auto it = r.dimension_scores.find(dim);
    scores[dim] = it == r.dimension_scores.end() ? 0.0 : it->second;
  }
  j["dimension_scores"] = scores;
  j["verdict"] = r2_verdict_name(r.verdict);
  j["overall_impression"] = r.overall_impression;
  j["strengths"] = r.strengths;
  j["weaknesses"] = r.weaknesses;
  j["recommendations"] = r.recommendations;
  return j.dump(2);
}

double normalize_r2(const ReviewR2& r) {
  double sum = 0.0;
  for (const auto& dim : r2_dimensions()) {
    auto it = r.dimension_scores.find(dim);
    if (it != r.dimension_scores.end()) sum += it->second;
  }
  double mean = sum / static_cast<double>(r2_dimensions().size());
  return round1(mean * 2.0);
}

std::string triage_decision_name(TriageDecision d) {
  switch (d) {
    case TriageDecision::Accept: return "Accept";
    case TriageDecision::Revise: return "Revise";
    case TriageDecision::Reject: return "Reject";
  }
  return "Reject";
}

TriageOutcome triage(const ReviewR1& r1, const ReviewR2& r2,
                     double accept_threshold) {
  TriageOutcome out;
  out.r1_score = round1(r1.overall);
  out.r2_score_normalized = normalize_r2(r2);
  out.total = round1((out.r1_score + out.r2_score_normalized) / 2.0);

  bool r1_rejects = r1.recommendation == R1Recommendation::Reject ||
                    r1.recommendation == R1Recommendation::WeakReject;
  bool r2_rejects = r2.verdict == R2Verdict::Reject;
  if (r1_rejects || r2_rejects) {
    out.decision = TriageDecision::Reject;
  } else if (out.total >= accept_threshold) {
    out.decision = TriageDecision::Accept;
  } else {
    out.decision = TriageDecision::Revise;
  }
  return out;
}

}  // namespace confpipe::review
