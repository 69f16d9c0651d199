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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace confpipe {

// Error carries a stable machine-readable code plus optional detail items
// (e.g. the list of missing sections or unresolved placeholders).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message,
        std::vector<std::string> details = {})
      : std::runtime_error(message),
        code_(std::move(code)),
        details_(std::move(details)) {}

  const std::string& code() const noexcept { return code_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  std::string code_;
  std::vector<std::string> details_;
};

// Transport-level adapter failure. Retryable.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message)
      : Error("transport", message) {}
};

// Content-level adapter failure (empty or malformed output). Never retried.
class ContentError : public Error {
 public:
  explicit ContentError(const std::string& message)
      : Error("content", message) {}
};

}  // namespace confpipe
