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

#ifndef SCALEPOOL_HARNESS_CLOCK_H_
#define SCALEPOOL_HARNESS_CLOCK_H_

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <future>
#include <mutex>
#include <queue>
#include <thread>
#include <type_traits>
#include <vector>

#include "scalepool/common/time.h"

namespace scalepool::harness {

using Task = std::function<void()>;

// Where module messages run. Exactly one task executes at a time.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual Timestamp now() const = 0;
  virtual void schedule_at(Timestamp t, Task task) = 0;
  void schedule_after(Duration d, Task task) { schedule_at(now() + d, std::move(task)); }
};

// Ordered (time, sequence) event queue: ties run in scheduling order.
class EventQueue {
 public:
  struct Event {
    Timestamp t;
    uint64_t seq;
    Task task;
  };

  void push(Timestamp t, Task task) { heap_.push(Event{t, next_seq_++, std::move(task)}); }
  bool empty() const { return heap_.empty(); }
  size_t size() const { return heap_.size(); }
  Timestamp next_time() const { return heap_.top().t; }
  Event pop() {
    Event e = std::move(const_cast<Event&>(heap_.top()));
    heap_.pop();
    return e;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.t != b.t ? a.t > b.t : a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  uint64_t next_seq_ = 0;
};

// Simulated time. Nothing moves unless run_* is called; now() never
// decreases. Scheduling in the past runs the task at the current time.
class LogicalClock final : public Executor {
 public:
  Timestamp now() const override { return now_; }
  void schedule_at(Timestamp t, Task task) override;

  // Runs one event; false when the queue is empty.
  bool run_next();
  // Runs every event with time <= t, then advances now() to t.
  void run_until(Timestamp t);
  void run_all();

  bool idle() const { return queue_.empty(); }
  size_t pending() const { return queue_.size(); }
  uint64_t executed() const { return executed_; }

 private:
  Timestamp now_{};
  EventQueue queue_;
  uint64_t executed_ = 0;
};

// Wall-clock time on one worker thread. now() is milliseconds since start().
// Other threads hand work in with post() or call().
class RealtimeLoop final : public Executor {
 public:
  RealtimeLoop() = default;
  ~RealtimeLoop() override;
  RealtimeLoop(const RealtimeLoop&) = delete;
  RealtimeLoop& operator=(const RealtimeLoop&) = delete;

  void start();
  void stop();

  Timestamp now() const override;
  void schedule_at(Timestamp t, Task task) override;
  void post(Task task) { schedule_at(now(), std::move(task)); }

  // Runs fn on the loop thread and waits for its result. Must not be called
  // from the loop thread itself.
  template <typename F>
  auto call(F&& fn) -> std::invoke_result_t<F> {
    using R = std::invoke_result_t<F>;
    auto job = std::make_shared<std::packaged_task<R()>>(std::forward<F>(fn));
    auto fut = job->get_future();
    post([job] { (*job)(); });
    return fut.get();
  }

  bool on_loop_thread() const { return std::this_thread::get_id() == worker_.get_id(); }

 private:
  void run();

  std::chrono::steady_clock::time_point origin_ = std::chrono::steady_clock::now();
  mutable std::mutex mu_;
  std::condition_variable cv_;
  EventQueue queue_;
  bool stopping_ = false;
  std::thread worker_;
};

}  // namespace scalepool::harness

#endif  // SCALEPOOL_HARNESS_CLOCK_H_
