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

#include <string>
#include <string_view>
#include <vector>

namespace confpipe::csv {

// RFC-4180 style: fields containing comma, quote, or newline are quoted,
// quotes doubled. Rows end with LF.
std::string encode_row(const std::vector<std::string>& fields);
std::vector<std::string> parse_row(std::string_view line);

// Parses a whole document (LF or CRLF) into rows. Quoted fields may span
// lines.
std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace confpipe::csv
