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

#ifndef GENEBENCH_CLOCK_HPP_
#define GENEBENCH_CLOCK_HPP_

#include <chrono>
#include <cstddef>
#include <deque>
#include <mutex>
#include <thread>
#include <vector>

namespace genebench {

// Seconds on a monotonic time line, plus a way to wait on it. Tests swap in
// ManualClock so waits cost nothing and every timestamp is observable.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() = 0;
  virtual void sleep_for(double seconds) = 0;
};

class SystemClock : public Clock {
 public:
  double now() override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
  }
  void sleep_for(double seconds) override {
    if (seconds > 0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  }
};

// Virtual time: sleep_for advances now() immediately.
class ManualClock : public Clock {
 public:
  double now() override {
    std::lock_guard lock(mu_);
    return t_;
  }
  void sleep_for(double seconds) override {
    std::lock_guard lock(mu_);
    if (seconds > 0) t_ += seconds;
    sleeps_.push_back(seconds);
  }
  void advance(double seconds) { sleep_for(seconds); }
  std::vector<double> sleeps() const {
    std::lock_guard lock(mu_);
    return sleeps_;
  }

 private:
  mutable std::mutex mu_;
  double t_ = 0.0;
  std::vector<double> sleeps_;
};

SystemClock& system_clock();

// At most `per_second` acquisitions inside any half-open window of one
// second. Thread-safe; callers block (via the clock) until a slot frees up.
class RateLimiter {
 public:
  RateLimiter(double per_second, Clock& clock);

  // Blocks until a request may be issued; returns the issue time.
  double acquire();
  std::size_t limit() const { return limit_; }

 private:
  std::size_t limit_;
  Clock& clock_;
  std::mutex mu_;
  std::deque<double> recent_;
};

}  // namespace genebench

#endif  // GENEBENCH_CLOCK_HPP_
