#pragma once

#include <coroutine>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace cpe {

// What an algorithm run ends with. Best-Set runs fill `set`, General-Samp
// runs fill `region`; a failed run has ok == false and a reason.
struct Outcome {
    bool ok = false;
    IndexSet set;
    int region = -1;
    int rounds = 0;
    std::string reason;

    static Outcome answer(IndexSet s, int rounds)
    {
        Outcome o;
        o.ok = true;
        o.set = std::move(s);
        o.rounds = rounds;
        return o;
    }
    static Outcome answer_region(int k, int rounds)
    {
        Outcome o;
        o.ok = true;
        o.region = k;
        o.rounds = rounds;
        return o;
    }
    static Outcome error(std::string why, int rounds)
    {
        Outcome o;
        o.reason = std::move(why);
        o.rounds = rounds;
        return o;
    }
};

// Per-round diagnostics. Vectors are filled only when the log asks for
// them (they are what the audit tests replay).
struct RoundLog {
    int r = 0;
    std::size_t survivors = 0;      // |F_r| where it is known
    std::uint64_t pulls = 0;        // pulls requested this round
    double opt = 0.0;
    double theta = 0.0;
    int solver_iterations = 0;
    std::vector<IndexSet> family;   // F_r (naive)
    std::vector<double> means;      // empirical means of this round
    bool verify = false;
};

struct RunLog {
    bool keep_vectors = false;
    std::vector<RoundLog> rounds;
    // LPSample
    double lp_value = 0.0;
    double stage1_radius = 0.0;
    long long stage1_steps = 0;
    double statistic = 0.0;
    double statistic_threshold = 0.0;
};

// A resumable algorithm run. The coroutine suspends at every sample request
// (`co_await draw(counts)`), and the driver answers with per-arm sums of
// fresh draws. A request for c_i samples of arm i stands for sum_i c_i
// single-sample steps; the driver decides how to schedule them.
class SampleTask {
public:
    struct promise_type;
    using handle = std::coroutine_handle<promise_type>;

    struct promise_type {
        std::optional<Outcome> result;
        std::exception_ptr failure;
        const std::vector<std::uint64_t>* request = nullptr;
        std::vector<double> sums;

        SampleTask get_return_object() { return SampleTask(handle::from_promise(*this)); }
        std::suspend_always initial_suspend() noexcept { return {}; }
        std::suspend_always final_suspend() noexcept { return {}; }
        void return_value(Outcome o) { result = std::move(o); }
        void unhandled_exception() { failure = std::current_exception(); }
    };

    SampleTask() = default;
    explicit SampleTask(handle h) : h_(h) {}
    SampleTask(SampleTask&& o) noexcept : h_(std::exchange(o.h_, {})) {}
    SampleTask& operator=(SampleTask&& o) noexcept
    {
        if (this != &o) {
            if (h_) h_.destroy();
            h_ = std::exchange(o.h_, {});
        }
        return *this;
    }
    SampleTask(const SampleTask&) = delete;
    SampleTask& operator=(const SampleTask&) = delete;
    ~SampleTask()
    {
        if (h_) h_.destroy();
    }

    // Run until the next request or the end. Exceptions thrown inside the
    // algorithm resurface here.
    void advance()
    {
        if (!h_ || h_.done()) throw Error("resume of a finished run");
        h_.promise().request = nullptr;
        h_.resume();
        if (h_.promise().failure) std::rethrow_exception(std::exchange(h_.promise().failure, nullptr));
    }

    bool started() const { return started_; }
    void start()
    {
        started_ = true;
        advance();
    }

    bool done() const { return h_ && h_.done(); }
    const std::vector<std::uint64_t>& request() const
    {
        if (!h_ || h_.done() || !h_.promise().request) throw Error("run has no pending request");
        return *h_.promise().request;
    }
    void supply(std::vector<double> sums)
    {
        h_.promise().sums = std::move(sums);
        advance();
    }
    const Outcome& outcome() const
    {
        if (!done() || !h_.promise().result) throw Error("run has not finished");
        return *h_.promise().result;
    }

private:
    handle h_;
    bool started_ = false;
};

struct SampleAwaiter {
    std::vector<std::uint64_t> counts;
    SampleTask::promise_type* promise = nullptr;

    bool await_ready() const noexcept { return false; }
    void await_suspend(SampleTask::handle h) noexcept
    {
        promise = &h.promise();
        promise->request = &counts;
    }
    std::vector<double> await_resume() { return std::move(promise->sums); }
};

// co_await draw(counts) -> per-arm sums of counts[i] fresh samples
inline SampleAwaiter draw(std::vector<std::uint64_t> counts) { return SampleAwaiter{std::move(counts)}; }

inline std::uint64_t request_total(const std::vector<std::uint64_t>& counts)
{
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

// Drive a run against one environment until it finishes. `pull_cap`
// bounds the total pulls served; exceeding it ends the run with an error.
inline Outcome run_task(SampleTask task, GaussianEnvironment& env, std::uint64_t pull_cap = 1000000000ull)
{
    task.start();
    while (!task.done()) {
        const auto& req = task.request();
        if (env.total_pulls() + request_total(req) > pull_cap) return Outcome::error("pull cap exceeded", 0);
        task.supply(env.sample_sums(req));
    }
    return task.outcome();
}

} // namespace cpe
