// Copyright 2026 The Scalepool Authors.
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

#include "scalepool/harness/clock.h"

#include <algorithm>

namespace scalepool::harness {

void LogicalClock::schedule_at(Timestamp t, Task task) {
  queue_.push(std::max(t, now_), std::move(task));
}

bool LogicalClock::run_next() {
  if (queue_.empty()) return false;
  EventQueue::Event e = queue_.pop();
  now_ = std::max(now_, e.t);
  ++executed_;
  e.task();
  return true;
}

void LogicalClock::run_until(Timestamp t) {
  while (!queue_.empty() && queue_.next_time() <= t) run_next();
  now_ = std::max(now_, t);
}

void LogicalClock::run_all() {
  while (run_next()) {
  }
}

RealtimeLoop::~RealtimeLoop() { stop(); }

void RealtimeLoop::start() {
  std::lock_guard lock(mu_);
  if (worker_.joinable()) return;
  origin_ = std::chrono::steady_clock::now();
  stopping_ = false;
  worker_ = std::thread([this] { run(); });
}

void RealtimeLoop::stop() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable() && !on_loop_thread()) worker_.join();
  // Dropping queued work breaks the promises of any pending call().
  EventQueue dropped;
  {
    std::lock_guard lock(mu_);
    std::swap(dropped, queue_);
  }
}

Timestamp RealtimeLoop::now() const {
  const auto elapsed = std::chrono::steady_clock::now() - origin_;
  return Timestamp(std::chrono::duration_cast<Duration>(elapsed));
}

void RealtimeLoop::schedule_at(Timestamp t, Task task) {
  {
    std::lock_guard lock(mu_);
    if (stopping_) return;
    queue_.push(t, std::move(task));
  }
  cv_.notify_all();
}

void RealtimeLoop::run() {
  std::unique_lock lock(mu_);
  while (!stopping_) {
    if (queue_.empty()) {
      cv_.wait(lock);
      continue;
    }
    const Timestamp due = queue_.next_time();
    const auto wake = origin_ + due.time_since_epoch();
    if (std::chrono::steady_clock::now() < wake) {
      cv_.wait_until(lock, wake);
      continue;
    }
    EventQueue::Event e = queue_.pop();
    lock.unlock();
    e.task();
    lock.lock();
  }
}

}  // namespace scalepool::harness
