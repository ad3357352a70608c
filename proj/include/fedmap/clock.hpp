#pragma once

#include <atomic>
#include <chrono>

namespace fedmap {

using Millis = std::chrono::milliseconds;

/// Injectable time source. Times are milliseconds on an arbitrary epoch.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Millis now() const = 0;
};

class SystemClock final : public Clock {
 public:
  Millis now() const override {
    return std::chrono::duration_cast<Millis>(
        std::chrono::steady_clock::now().time_since_epoch());
  }
};

/// Simulated clock; only moves when told to.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Millis start = Millis{0}) : now_(start.count()) {}
  Millis now() const override { return Millis{now_.load()}; }
  void advance(Millis d) { now_ += d.count(); }
  void set(Millis t) { now_ = t.count(); }

 private:
  std::atomic<Millis::rep> now_;
};

}  // namespace fedmap
