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

#include <chrono>
#include <memory>
#include <string>

namespace confpipe {

using TimePoint = std::chrono::system_clock::time_point;

// "2025-10-01T00:00:00Z" (UTC, second precision).
std::string format_iso8601(TimePoint tp);
// "2025-10-01"
std::string format_utc_date(TimePoint tp);
// Parses the format emitted by format_iso8601. Throws Error("bad_timestamp").
TimePoint parse_iso8601(const std::string& s);

// Time source for everything that records a timestamp. Deterministic runs
// swap in a SimClock.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual TimePoint now() const = 0;
  // Advance simulated time; no-op on real clocks.
  virtual void advance_seconds(double) {}
  std::string now_iso8601() const { return format_iso8601(now()); }
};

class SystemClock final : public Clock {
 public:
  TimePoint now() const override {
    return std::chrono::system_clock::now();
  }
};

// Virtual clock that only moves when told to. One instance per paper keeps
// batch runs reproducible regardless of worker scheduling.
class SimClock final : public Clock {
 public:
  explicit SimClock(TimePoint epoch) : now_(epoch) {}
  explicit SimClock(const std::string& epoch_iso)
      : now_(parse_iso8601(epoch_iso)) {}

  TimePoint now() const override { return now_; }
  void advance_seconds(double s) override {
    now_ += std::chrono::milliseconds(static_cast<long long>(s * 1000.0));
  }

 private:
  TimePoint now_;
};

}  // namespace confpipe
