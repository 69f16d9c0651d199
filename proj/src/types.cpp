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

#include "confpipe/types.hpp"

#include <array>
#include <cctype>
#include <cstdio>

#include "confpipe/error.hpp"
#include "confpipe/strings.hpp"

namespace confpipe {

namespace {

struct TrackInfo {
  Track track;
  const char* name;
  const char* code;
  int number;
};

constexpr std::array<TrackInfo, kTrackCount> kTracks{{
    {Track::SocialProgress, "Social Progress", "SOCP", 1},
    {Track::ProductiveEconomies, "Productive Economies", "PROE", 2},
    {Track::PrecisionHealth, "Precision Health", "PREH", 3},
    {Track::Sustainability, "Sustainability", "SUST", 4},
    {Track::ArtificialIntelligence, "Artificial Intelligence", "ARTI", 5},
}};

const TrackInfo& info(Track t) {
  for (const auto& ti : kTracks)
    if (ti.track == t) return ti;
  throw Error("bad_track", "unknown track value");
}

}  // namespace

std::string track_name(Track t) { return info(t).name; }
std::string track_code(Track t) { return info(t).code; }
int track_number(Track t) { return info(t).number; }

std::optional<Track> track_from_name(const std::string& name) {
  // Accept both "Social Progress" and "SocialProgress".
  std::string squeezed;
  for (char c : name)
    if (c != ' ') squeezed.push_back(c);
  for (const auto& ti : kTracks) {
    std::string n;
    for (const char* p = ti.name; *p; ++p)
      if (*p != ' ') n.push_back(*p);
    if (n == squeezed) return ti.track;
  }
  return std::nullopt;
}

std::optional<Track> track_from_code(const std::string& code) {
  for (const auto& ti : kTracks)
    if (code == ti.code) return ti.track;
  return std::nullopt;
}

std::vector<Track> all_tracks() {
  std::vector<Track> out;
  for (const auto& ti : kTracks) out.push_back(ti.track);
  return out;
}

std::string make_paper_id(Track t, int nn) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "PT%d-%s-%02d", track_number(t),
                track_code(t).c_str(), nn);
  return buf;
}

bool is_paper_id(const std::string& id) {
  return paper_id_track(id).has_value();
}

std::optional<Track> paper_id_track(const std::string& id) {
  // PT<d>-<AAAA>-<NN>
  if (id.size() < 11 || id[0] != 'P' || id[1] != 'T') return std::nullopt;
  if (!std::isdigit(static_cast<unsigned char>(id[2])) || id[3] != '-')
    return std::nullopt;
  auto second_dash = id.find('-', 4);
  if (second_dash == std::string::npos) return std::nullopt;
  std::string code = id.substr(4, second_dash - 4);
  auto t = track_from_code(code);
  if (!t) return std::nullopt;
  if (id[2] - '0' != track_number(*t)) return std::nullopt;
  std::string nn = id.substr(second_dash + 1);
  if (nn.empty() || nn.size() > 3) return std::nullopt;
  for (char c : nn)
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  return t;
}

int paper_id_number(const std::string& id) {
  auto dash = id.rfind('-');
  if (dash == std::string::npos) return -1;
  int n = 0;
  for (char c : id.substr(dash + 1)) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return -1;
    n = n * 10 + (c - '0');
  }
  return n;
}

namespace {
constexpr std::array<std::pair<StageState, const char*>, 10> kStages{{
    {StageState::Registered, "Registered"},
    {StageState::Drafted, "Drafted"},
    {StageState::Reviewed, "Reviewed"},
    {StageState::TriageAccept, "TriageAccept"},
    {StageState::TriageRevise, "TriageRevise"},
    {StageState::TriageReject, "TriageReject"},
    {StageState::Revised, "Revised"},
    {StageState::CameraReady, "CameraReady"},
    {StageState::Presented, "Presented"},
    {StageState::Archived, "Archived"},
}};
}  // namespace

std::string stage_name(StageState s) {
  for (const auto& [st, n] : kStages)
    if (st == s) return n;
  throw Error("bad_stage", "unknown stage value");
}

std::optional<StageState> stage_from_name(const std::string& name) {
  for (const auto& [st, n] : kStages)
    if (name == n) return st;
  return std::nullopt;
}

bool stage_is_terminal(StageState s) { return s == StageState::TriageReject; }

namespace {
constexpr std::array<std::pair<ArtifactRole, const char*>, 12> kRoles{{
    {ArtifactRole::dataset_meta, "dataset_meta"},
    {ArtifactRole::draft, "draft"},
    {ArtifactRole::review1, "review1"},
    {ArtifactRole::review2, "review2"},
    {ArtifactRole::revised, "revised"},
    {ArtifactRole::response_letter, "response_letter"},
    {ArtifactRole::camera_ready, "camera_ready"},
    {ArtifactRole::slides, "slides"},
    {ArtifactRole::narration, "narration"},
    {ArtifactRole::avatar_job, "avatar_job"},
    {ArtifactRole::video_meta, "video_meta"},
    {ArtifactRole::manifest, "manifest"},
}};
}  // namespace

std::string role_name(ArtifactRole r) {
  for (const auto& [role, n] : kRoles)
    if (role == r) return n;
  throw Error("bad_role", "unknown artifact role value");
}

std::optional<ArtifactRole> role_from_name(const std::string& name) {
  for (const auto& [role, n] : kRoles)
    if (name == n) return role;
  return std::nullopt;
}

std::string role_extension(ArtifactRole r) {
  switch (r) {
    case ArtifactRole::draft:
    case ArtifactRole::revised:
    case ArtifactRole::camera_ready:
      return ".tex";
    case ArtifactRole::review1:
    case ArtifactRole::review2:
    case ArtifactRole::response_letter:
    case ArtifactRole::manifest:
      return ".txt";
    default:
      return ".json";
  }
}

std::vector<ArtifactRole> all_roles() {
  std::vector<ArtifactRole> out;
  for (const auto& [role, n] : kRoles) out.push_back(role);
  return out;
}

ActorId ActorId::parse(const std::string& s) {
  if (starts_with(s, "human:")) return {true, s.substr(6)};
  if (starts_with(s, "agent:")) return {false, s.substr(6)};
  throw Error("bad_actor", "malformed actor: " + s);
}

std::string LedgerEvent::verb() const {
  auto sp = action.find(' ');
  return sp == std::string::npos ? action : action.substr(0, sp);
}

std::map<std::string, std::string> LedgerEvent::args() const {
  auto sp = action.find(' ');
  if (sp == std::string::npos) return {};
  return decode_kv(std::string_view(action).substr(sp + 1));
}

std::string LedgerEvent::make_action(
    const std::string& verb, const std::map<std::string, std::string>& args) {
  if (args.empty()) return verb;
  return verb + " " + encode_kv(args);
}

std::string permission_name(Permission p) {
  switch (p) {
    case Permission::yes: return "yes";
    case Permission::no: return "no";
    default: return "unknown";
  }
}

std::optional<Permission> permission_from_name(const std::string& s) {
  if (s == "yes") return Permission::yes;
  if (s == "no") return Permission::no;
  if (s == "unknown") return Permission::unknown;
  return std::nullopt;
}

}  // namespace confpipe
