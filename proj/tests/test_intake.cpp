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

#include <gtest/gtest.h>

#include "confpipe/error.hpp"
#include "confpipe/intake.hpp"
#include "test_util.hpp"

using namespace confpipe;
using namespace confpipe::intake;
using test::TempDir;

namespace {
constexpr Permission Y = Permission::yes;
constexpr Permission N = Permission::no;
constexpr Permission U = Permission::unknown;
}  // namespace

// Expected permissions encode each license's grant clauses, read once and
// frozen here: CC-BY grants redistribution, commercial use and adaptation;
// the NC variant withholds commercial use; ND withholds adaptation.
TEST(License, KnownIdentifierTable) {
  struct Case {
    const char* id;
    LicensePermissions expected;
  };
  const Case cases[] = {
      {"CC0-1.0", {Y, Y, Y}},
      {"CC-BY-4.0", {Y, Y, Y}},
      {"CC-BY-SA-4.0", {Y, Y, Y}},
      {"CC-BY-NC-4.0", {Y, N, Y}},
      {"CC-BY-ND-4.0", {Y, Y, N}},
      {"ODbL-1.0", {Y, Y, Y}},
      {"PDDL", {Y, Y, Y}},
      {"proprietary", {N, N, N}},
  };
  for (const auto& c : cases) {
    auto got = classify_license(c.id);
    EXPECT_EQ(got.license_id, c.id);
    EXPECT_EQ(got.permissions, c.expected) << c.id;
  }
  // Identifier match is case-insensitive and trims whitespace.
  EXPECT_EQ(classify_license("  cc-by-4.0 ").license_id, "CC-BY-4.0");
}

TEST(License, KeywordFallbackIsConservative) {
  auto nc = classify_license(
      "This data may be used for non-commercial research purposes only.");
  EXPECT_EQ(nc.license_id, "unknown");
  EXPECT_EQ(nc.permissions.commercial_use, N);
  EXPECT_EQ(nc.permissions.redistribution, U);

  auto nd = classify_license("No derivatives of this dataset are permitted.");
  EXPECT_EQ(nd.permissions.modification, N);

  auto redist = classify_license("You may redistribute this data freely.");
  EXPECT_EQ(redist.permissions.redistribution, Y);
  EXPECT_EQ(redist.permissions.commercial_use, U);
}

TEST(License, GibberishStaysUnknown) {
  auto got = classify_license("zxqv blorp 17 unintelligible");
  EXPECT_EQ(got.license_id, "unknown");
  EXPECT_EQ(got.permissions, (LicensePermissions{U, U, U}));
  // Deterministic and total: same text, same outcome.
  EXPECT_EQ(classify_license("zxqv blorp 17 unintelligible").permissions,
            got.permissions);
  EXPECT_EQ(classify_license("").permissions, (LicensePermissions{U, U, U}));
}

TEST(IpRisk, MatrixOverIntendedUse) {
  std::vector<DuaItem> satisfied{{"attribution recorded", true}};
  std::vector<DuaItem> unsatisfied{{"attribution recorded", false}};

  EXPECT_FALSE(evaluate_ip_risk({Y, Y, Y}, satisfied));
  // An explicit commercial "no" is compatible with academic use.
  EXPECT_FALSE(evaluate_ip_risk({Y, N, Y}, satisfied));
  // Unknown always counts as unresolved.
  EXPECT_TRUE(evaluate_ip_risk({Y, U, Y}, satisfied));
  EXPECT_TRUE(evaluate_ip_risk({U, Y, Y}, satisfied));
  EXPECT_TRUE(evaluate_ip_risk({Y, Y, N}, satisfied));
  EXPECT_TRUE(evaluate_ip_risk({N, Y, Y}, satisfied));
  // A single unsatisfied DUA item flags risk on its own.
  EXPECT_TRUE(evaluate_ip_risk({Y, Y, Y}, unsatisfied));
  EXPECT_FALSE(evaluate_ip_risk({Y, Y, Y}, {}));
}

TEST(Intake, RegisterClassifiesAndTags) {
  TempDir dir("intake-register");
  Ledger ledger(dir.path(), test::sim_clock());
  auto rec = register_dataset(
      ledger, "https://www.kaggle.com/datasets/nandinivishwanathan/social-progress-index/",
      Track::SocialProgress, "CC-BY-4.0", {{"attribution recorded", true}});
  EXPECT_EQ(rec.license_id, "CC-BY-4.0");
  EXPECT_FALSE(rec.ip_risk);
  EXPECT_EQ(rec.dataset_id, "DS-SOCP-01");
  EXPECT_EQ(rec.ingestion_date, "2025-10-01");
  ASSERT_TRUE(ledger.dataset(rec.dataset_id).has_value());
}

TEST(Intake, EmptyLicenseMeansUnknownAndRisky) {
  TempDir dir("intake-empty");
  Ledger ledger(dir.path(), test::sim_clock());
  auto rec = register_dataset(ledger, "https://example.org/data",
                              Track::Sustainability, "", {});
  EXPECT_EQ(rec.license_id, "unknown");
  EXPECT_EQ(rec.permissions, (LicensePermissions{U, U, U}));
  EXPECT_TRUE(rec.ip_risk);
}

TEST(Intake, RejectsMalformedUrlAndDuplicates) {
  TempDir dir("intake-errors");
  Ledger ledger(dir.path(), test::sim_clock());
  EXPECT_THROW(register_dataset(ledger, "not a url", Track::SocialProgress,
                                "CC0-1.0", {}),
               Error);
  EXPECT_THROW(register_dataset(ledger, "ftp://example.org/x",
                                Track::SocialProgress, "CC0-1.0", {}),
               Error);
  register_dataset(ledger, "https://example.org/same", Track::SocialProgress,
                   "CC0-1.0", {});
  EXPECT_THROW(register_dataset(ledger, "https://example.org/same",
                                Track::SocialProgress, "CC0-1.0", {}),
               Error);
  // Same URL on a different track is a distinct registration.
  auto other = register_dataset(ledger, "https://example.org/same",
                                Track::PrecisionHealth, "CC0-1.0", {});
  EXPECT_EQ(other.dataset_id, "DS-PREH-01");
}

TEST(Intake, UrlValidation) {
  EXPECT_TRUE(is_well_formed_url("https://stats.oecd.org/Index.aspx?DataSetCode=BLI"));
  EXPECT_TRUE(is_well_formed_url("http://example.org/path"));
  EXPECT_FALSE(is_well_formed_url(""));
  EXPECT_FALSE(is_well_formed_url("https://nodot"));
  EXPECT_FALSE(is_well_formed_url("https://exa mple.org/x"));
}
