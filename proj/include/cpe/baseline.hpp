#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "instance.hpp"
#include "sampling_task.hpp"

namespace cpe {

// Per-arm confidence strawman: every arm is pulled until its own mean is
// eps-accurate with confidence delta / n, then the empirical best set wins.
inline std::uint64_t uniform_samples_per_arm(std::size_t n, double delta, double eps)
{
    if (!(eps > 0.0)) throw Error("uniform baseline needs eps > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0,1)");
    return static_cast<std::uint64_t>(std::ceil(8.0 * std::log(2.0 * static_cast<double>(n) / delta) / (eps * eps)));
}

inline SampleTask uniform_baseline_task(BestSetInstance inst, double delta, double eps)
{
    const std::size_t n = inst.arms();
    const std::uint64_t m = uniform_samples_per_arm(n, delta, eps);
    const auto sums = co_await draw(std::vector<std::uint64_t>(n, m));
    std::vector<double> mean(n);
    for (std::size_t i = 0; i < n; ++i) mean[i] = sums[i] / static_cast<double>(m);
    co_return Outcome::answer(inst.family().argmax(mean), 1);
}

inline Outcome uniform_baseline(GaussianEnvironment& env, const BestSetInstance& inst, double delta, double eps)
{
    return run_task(uniform_baseline_task(inst, delta, eps), env);
}

} // namespace cpe
