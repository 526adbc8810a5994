#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace agentos {

// Milliseconds since the Unix epoch.
using Timestamp = std::int64_t;

class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() = 0;
};

class SystemClock final : public Clock {
public:
    Timestamp now() override {
        using namespace std::chrono;
        return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
    }
};

// Deterministic clock for replay and tests. Each read returns the current value
// and then advances it by `step` milliseconds (0 freezes time).
class ManualClock final : public Clock {
public:
    explicit ManualClock(Timestamp start = 0, Timestamp step = 0) : value_(start), step_(step) {}

    Timestamp now() override { return value_.fetch_add(step_); }

    void set(Timestamp t) { value_.store(t); }
    void advance(Timestamp delta) { value_.fetch_add(delta); }
    Timestamp peek() const { return value_.load(); }

private:
    std::atomic<Timestamp> value_;
    Timestamp step_;
};

} // namespace agentos
