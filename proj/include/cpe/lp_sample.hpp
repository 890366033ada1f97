#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "lower_bounds.hpp"
#include "regions.hpp"
#include "sampling_task.hpp"
#include "stats.hpp"

namespace cpe {

struct LpSampleOptions {
    double delta0 = 0.01;
    double beta = 64.0;
    double accept = 36.0;
    std::uint64_t stage1_pull_cap = 10000000;
    CuttingPlaneOptions lp;
};

// Stage 1 pulls every arm once per step until the ball of radius 3 r_t around
// the running means meets exactly one region; a fresh batch of M pulls per
// arm then gives the center mu_bar. Stage 2 samples by the LP over Alt
// centered at mu_bar and accepts on a chi-square style statistic.
inline SampleTask lp_sample_task(GeneralSampInstance inst, double delta, LpSampleOptions opt = {}, RunLog* log = nullptr)
{
    if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0,1)");
    const std::size_t n = inst.arms();
    const int ni = static_cast<int>(n);
    const auto& regions = inst.regions();
    const std::vector<double> unit(n, 1.0);
    const std::vector<std::uint64_t> once(n, 1);

    std::vector<double> sums(n, 0.0);
    long long t = 0;
    double r = 0.0;
    int cand = -1;
    for (;;) {
        if (static_cast<std::uint64_t>(t + 1) * n > opt.stage1_pull_cap)
            co_return Outcome::error("stage-1 pull cap exceeded", 1);
        ++t;
        const auto step = co_await draw(once);
        std::vector<double> mean(n);
        for (std::size_t i = 0; i < n; ++i) {
            sums[i] += step[i];
            mean[i] = sums[i] / static_cast<double>(t);
        }
        r = conf_radius(t, ni, opt.delta0);
        int hits = 0;
        for (std::size_t k = 0; k < regions.size() && hits < 2; ++k)
            if (regions[k].min_sqdist(unit, mean).value <= 9.0 * r * r) {
                ++hits;
                cand = static_cast<int>(k);
            }
        if (hits == 1) break;
    }
    std::vector<double> stage1_mean(n);
    for (std::size_t i = 0; i < n; ++i) stage1_mean[i] = sums[i] / static_cast<double>(t);
    if (log) {
        log->stage1_steps = t;
        log->stage1_radius = r;
    }

    const double alpha2 = r * r / (8.0 * n);
    const auto M = static_cast<std::uint64_t>(std::ceil((2.0 * n + 3.0 * std::log(2.0 / opt.delta0)) / alpha2));
    const auto bar_sums = co_await draw(std::vector<std::uint64_t>(n, M));
    std::vector<double> bar(n);
    for (std::size_t i = 0; i < n; ++i) bar[i] = bar_sums[i] / static_cast<double>(M);

    std::vector<const AnswerRegion*> alt;
    for (std::size_t k = 0; k < regions.size(); ++k)
        if (static_cast<int>(k) != cand) alt.push_back(&regions[k]);
    for (const auto* a : alt)
        if (a->min_sqdist(unit, bar).value <= r * r) co_return Outcome::error("refined center is near an alternative", 1);

    const LowSolution lp = solve_alt_lp(alt, bar, opt.lp);
    const double L = std::log(1.0 / delta) + static_cast<double>(n);
    std::vector<std::uint64_t> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<std::uint64_t>(std::ceil(opt.beta * lp.allocation.budget[i] * L));
    std::vector<double> x_sums(n, 0.0);
    if (request_total(m) > 0) x_sums = co_await draw(m);
    double stat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i] == 0) continue;
        const double diff = x_sums[i] / static_cast<double>(m[i]) - bar[i];
        stat += static_cast<double>(m[i]) * diff * diff;
    }
    if (log) {
        log->lp_value = lp.value;
        log->statistic = stat;
        log->statistic_threshold = opt.accept * L;
        RoundLog s1;
        s1.r = 1;
        s1.pulls = static_cast<std::uint64_t>(t) * n + M * n;
        RoundLog s2;
        s2.r = 2;
        s2.pulls = request_total(m);
        s2.solver_iterations = lp.iterations;
        s2.verify = true;
        // stage-1 means, then the refined center
        if (log->keep_vectors) {
            s1.means = stage1_mean;
            s2.means = bar;
        }
        log->rounds.push_back(std::move(s1));
        log->rounds.push_back(std::move(s2));
    }
    if (stat <= opt.accept * L) co_return Outcome::answer_region(cand, 2);
    co_return Outcome::error("verification statistic too large", 2);
}

inline Outcome lp_sample(GaussianEnvironment& env, const GeneralSampInstance& inst, double delta,
                         LpSampleOptions opt = {}, RunLog* log = nullptr)
{
    return run_task(lp_sample_task(inst, delta, opt, log), env);
}

} // namespace cpe
