// Copyright 2026 The genebench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "genebench/clock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "genebench/error.hpp"

namespace genebench {

SystemClock& system_clock() {
  static SystemClock clock;
  return clock;
}

RateLimiter::RateLimiter(double per_second, Clock& clock) : clock_(clock) {
  if (!(per_second >= 1.0) || !std::isfinite(per_second)) {
    fail(ErrorKind::kConfigInvalid, "rate limit must be at least 1 request per second");
  }
  limit_ = static_cast<std::size_t>(std::floor(per_second));
}

double RateLimiter::acquire() {
  std::lock_guard lock(mu_);
  double t = clock_.now();
  while (true) {
    while (!recent_.empty() && recent_.front() + 1.0 <= t) recent_.pop_front();
    if (recent_.size() < limit_) {
      recent_.push_back(t);
      return t;
    }
    const double target = recent_.front() + 1.0;
    clock_.sleep_for(target - t);
    // now() can land an ulp short of the target; the slot is free either way.
    t = std::max(clock_.now(), target);
  }
}

}  // namespace genebench
