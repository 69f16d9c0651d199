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

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace confpipe {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, const std::string& sep);
// Collapses runs of whitespace to single spaces and trims the ends.
std::string normalize_ws(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

// Percent-encoding used for event-log action arguments; reserves the
// characters that would break the line or k=v framing.
std::string pct_encode(std::string_view s);
std::string pct_decode(std::string_view s);

// "k1=v1&k2=v2" with percent-encoded values.
std::string encode_kv(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> decode_kv(std::string_view s);

// One decimal place, round-half-away-from-zero: 7.45 -> "7.5".
std::string format_score(double v);
double round1(double v);

}  // namespace confpipe
