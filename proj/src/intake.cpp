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

#include "confpipe/intake.hpp"

#include <array>

#include "confpipe/error.hpp"
#include "confpipe/strings.hpp"

namespace confpipe::intake {

namespace {

constexpr Permission Y = Permission::yes;
constexpr Permission N = Permission::no;

struct KnownLicense {
  const char* id;
  LicensePermissions permissions;
  // Alternate spellings accepted for the exact-identifier match.
  std::array<const char*, 3> aliases;
};

// Permissions encode each license's grant clauses for redistribution,
// commercial use, and modification, in that order.
constexpr std::array<KnownLicense, 8> kKnownLicenses{{
    {"CC0-1.0", {Y, Y, Y}, {"cc0", "cc0 1.0", "creative commons zero"}},
    {"CC-BY-4.0", {Y, Y, Y}, {"cc by 4.0", "cc-by", "creative commons attribution 4.0"}},
    {"CC-BY-SA-4.0", {Y, Y, Y}, {"cc by-sa 4.0", "cc-by-sa", nullptr}},
    {"CC-BY-NC-4.0", {Y, N, Y}, {"cc by-nc 4.0", "cc-by-nc", nullptr}},
    {"CC-BY-ND-4.0", {Y, Y, N}, {"cc by-nd 4.0", "cc-by-nd", nullptr}},
    {"ODbL-1.0", {Y, Y, Y}, {"odbl", "open database license", nullptr}},
    {"PDDL", {Y, Y, Y}, {"pddl-1.0", "public domain dedication and license", nullptr}},
    {"proprietary", {N, N, N}, {"all rights reserved", "closed", nullptr}},
}};

}  // namespace

LicenseClassification classify_license(const std::string& license_text_or_id) {
  LicenseClassification out;
  std::string norm = to_lower(trim(license_text_or_id));
  if (norm.empty()) return out;

  for (const auto& lic : kKnownLicenses) {
    if (norm == to_lower(lic.id)) {
      out.license_id = lic.id;
      out.permissions = lic.permissions;
      return out;
    }
    for (const char* alias : lic.aliases) {
      if (alias && norm == alias) {
        out.license_id = lic.id;
        out.permissions = lic.permissions;
        return out;
      }
    }
  }

  // Keyword fallback. Conservative: never upgrades unknown to yes except on
  // an explicit redistribution grant, and an identifier is never inferred.
  if (norm.find("non-commercial") != std::string::npos ||
      norm.find("noncommercial") != std::string::npos) {
    out.permissions.commercial_use = Permission::no;
  }
  if (norm.find("no derivatives") != std::string::npos ||
      norm.find("no derivative") != std::string::npos) {
    out.permissions.modification = Permission::no;
  }
  if (norm.find("redistribut") != std::string::npos) {
    out.permissions.redistribution = Permission::yes;
  }
  return out;
}

bool evaluate_ip_risk(const LicensePermissions& p,
                      const std::vector<DuaItem>& dua_checklist) {
  if (p.redistribution != Permission::yes) return true;
  if (p.modification != Permission::yes) return true;
  if (p.commercial_use == Permission::unknown) return true;
  for (const auto& item : dua_checklist)
    if (!item.satisfied) return true;
  return false;
}

bool is_well_formed_url(const std::string& url) {
  std::string u = trim(url);
  size_t scheme_end;
  if (starts_with(u, "https://")) scheme_end = 8;
  else if (starts_with(u, "http://")) scheme_end = 7;
  else return false;
  std::string rest = u.substr(scheme_end);
  auto slash = rest.find('/');
  std::string host = slash == std::string::npos ? rest : rest.substr(0, slash);
  if (host.empty() || host.find('.') == std::string::npos) return false;
  return u.find(' ') == std::string::npos;
}

DatasetRecord register_dataset(Ledger& ledger, const std::string& url,
                               Track track, const std::string& license_text,
                               const std::vector<DuaItem>& dua_items,
                               const std::string& notes,
                               std::string timestamp) {
  if (!is_well_formed_url(url))
    throw Error("malformed_url", "not a well-formed http(s) url: " + url);
  if (ledger.dataset_by_url(url, track))
    throw Error("duplicate_dataset",
                "dataset already registered for this track: " + url);

  DatasetRecord rec;
  rec.url = trim(url);
  rec.track = track;
  rec.notes = notes;
  rec.dua_checklist = dua_items;
  auto cls = classify_license(license_text);
  rec.license_id = cls.license_id;
  rec.permissions = cls.permissions;
  rec.ip_risk = evaluate_ip_risk(rec.permissions, rec.dua_checklist);
  TimePoint now = timestamp.empty() ? ledger.clock().now() : parse_iso8601(timestamp);
  rec.ingestion_date = format_utc_date(now);

  rec.dataset_id = ledger.register_dataset_record(
      rec, ActorId::agent("intake"), std::move(timestamp));
  return rec;
}

}  // namespace confpipe::intake
