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

#include "confpipe/clock.hpp"
#include "confpipe/digest.hpp"
#include "confpipe/error.hpp"

using namespace confpipe;

// Expected values computed with an independent tool (sha256sum).
TEST(Digest, MatchesIndependentTool) {
  EXPECT_EQ(sha256_hex("a"),
            "ca978112ca1bbdcafac231b39a23dc4da786eff8147c4e72b9807785afee48bb");
  EXPECT_EQ(sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Digest, DeterministicOverBytes) {
  std::string payload(10000, '\x7f');
  EXPECT_EQ(sha256_hex(payload), sha256_hex(payload));
  payload[5000] = '\x00';
  EXPECT_NE(sha256_hex(payload), sha256_hex(std::string(10000, '\x7f')));
}

TEST(Digest, HexDigestShape) {
  EXPECT_TRUE(is_hex_digest(sha256_hex("x")));
  EXPECT_FALSE(is_hex_digest("abc"));
  EXPECT_FALSE(is_hex_digest(std::string(64, 'G')));
}

TEST(Clock, Iso8601RoundTrip) {
  std::string ts = "2025-10-01T12:34:56Z";
  EXPECT_EQ(format_iso8601(parse_iso8601(ts)), ts);
  EXPECT_EQ(format_utc_date(parse_iso8601(ts)), "2025-10-01");
  EXPECT_THROW(parse_iso8601("yesterday"), Error);
}

TEST(Clock, SimClockAdvances) {
  SimClock clock(std::string("2025-10-01T00:00:00Z"));
  clock.advance_seconds(5400);
  EXPECT_EQ(clock.now_iso8601(), "2025-10-01T01:30:00Z");
}
