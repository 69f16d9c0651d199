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

// Dataset registration: license parsing, DUA checklists, IP-risk tagging.
// Gatekeeper for pipeline entry — a paper cannot leave Registered while its
// dataset carries an IP risk.

#include <string>
#include <vector>

#include "confpipe/clock.hpp"
#include "confpipe/ledger.hpp"
#include "confpipe/types.hpp"

namespace confpipe::intake {

struct LicenseClassification {
  std::string license_id = "unknown";
  LicensePermissions permissions;
};

// Exact identifier match against the built-in table, else a conservative
// keyword scan, else all unknown. Deterministic and total.
LicenseClassification classify_license(const std::string& license_text_or_id);

// Intended use is fixed as "redistribute + modify, non-commercial academic":
// risk unless redistribution and modification are both explicitly granted.
// Any `unknown` counts as unresolved; an explicit commercial "no" does not.
// Unsatisfied DUA items always flag risk.
bool evaluate_ip_risk(const LicensePermissions& permissions,
                      const std::vector<DuaItem>& dua_checklist);

// Classifies the license, evaluates risk, persists the record through the
// ledger. Errors: malformed url, duplicate (url, track).
DatasetRecord register_dataset(Ledger& ledger, const std::string& url,
                               Track track, const std::string& license_text,
                               const std::vector<DuaItem>& dua_items,
                               const std::string& notes = "",
                               std::string timestamp = {});

bool is_well_formed_url(const std::string& url);

}  // namespace confpipe::intake
