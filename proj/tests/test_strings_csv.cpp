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

#include <random>

#include "confpipe/csv.hpp"
#include "confpipe/strings.hpp"

using namespace confpipe;

TEST(Strings, PctEncodingReservesFramingChars) {
  std::string raw = "a=b&c;d|e\nf%g";
  std::string enc = pct_encode(raw);
  EXPECT_EQ(enc.find('|'), std::string::npos);
  EXPECT_EQ(enc.find('&'), std::string::npos);
  EXPECT_EQ(enc.find('\n'), std::string::npos);
  EXPECT_EQ(pct_decode(enc), raw);
}

TEST(Strings, PctRoundTripRandom) {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    std::string s;
    int len = static_cast<int>(rng() % 64);
    for (int k = 0; k < len; ++k) s.push_back(static_cast<char>(rng() % 256));
    EXPECT_EQ(pct_decode(pct_encode(s)), s);
  }
}

TEST(Strings, KvRoundTrip) {
  std::map<std::string, std::string> kv{
      {"title", "Earnings, & Work | Time"}, {"empty", ""}, {"x", "1=2&3"}};
  EXPECT_EQ(decode_kv(encode_kv(kv)), kv);
}

TEST(Strings, NormalizeWs) {
  EXPECT_EQ(normalize_ws("  a\t b\n\nc  "), "a b c");
  EXPECT_EQ(normalize_ws(""), "");
}

TEST(Strings, ScoreFormatting) {
  EXPECT_EQ(format_score(7.45), "7.5");
  EXPECT_EQ(format_score(6.9), "6.9");
  EXPECT_EQ(format_score(-0.0), "0.0");
  EXPECT_DOUBLE_EQ(round1(6.85), 6.9);
}

TEST(Csv, QuotingRules) {
  EXPECT_EQ(csv::encode_row({"a", "b,c", "d\"e", "f\ng"}),
            "a,\"b,c\",\"d\"\"e\",\"f\ng\"\n");
  EXPECT_EQ(csv::encode_row({"plain"}), "plain\n");
}

TEST(Csv, ParseHandlesQuotedFields) {
  auto rows = csv::parse("x,\"a,b\",\"q\"\"q\"\ny,z,w\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "a,b", "q\"q"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"y", "z", "w"}));
}

// Round-trip property over random field content: parse(encode(row)) == row.
TEST(Csv, EncodeParseRoundTripRandom) {
  std::mt19937 rng(11);
  const std::string alphabet = "abc,\"\n XYZ%&|;=";
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> row;
    int fields = 1 + static_cast<int>(rng() % 6);
    for (int f = 0; f < fields; ++f) {
      std::string field;
      int len = static_cast<int>(rng() % 12);
      for (int k = 0; k < len; ++k) field.push_back(alphabet[rng() % alphabet.size()]);
      row.push_back(field);
    }
    auto rows = csv::parse(csv::encode_row(row));
    ASSERT_EQ(rows.size(), 1u) << "iteration " << i;
    EXPECT_EQ(rows[0], row) << "iteration " << i;
  }
}
