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

namespace confpipe {

// Name of the content-hash algorithm, written into manifest headers so
// audits are self-describing.
inline constexpr const char* kHashAlgorithm = "sha256";

// SHA-256 digest of `data`, lowercase hex (64 chars).
std::string sha256_hex(std::string_view data);

// True iff `s` is a well-formed lowercase-hex 256-bit digest.
bool is_hex_digest(std::string_view s);

}  // namespace confpipe
