#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "core.hpp"
#include "instance.hpp"
#include "regions.hpp"

namespace cpe {

// Equal-size subsets of [n] with pairwise intersections at most ell / 2.
struct DesignFamily {
    int n = 0;
    int m = 0;
    int ell = 0;
    std::vector<IndexSet> sets;

    // checks every pair
    bool verify() const
    {
        if (static_cast<int>(sets.size()) != m) return false;
        for (const auto& s : sets)
            if (static_cast<int>(s.size()) != ell) return false;
        for (std::size_t i = 0; i < sets.size(); ++i)
            for (std::size_t j = i + 1; j < sets.size(); ++j)
                if (2 * intersection_size(sets[i], sets[j]) > ell) return false;
        return true;
    }

    static int intersection_size(const IndexSet& a, const IndexSet& b)
    {
        int c = 0;
        auto i = a.begin(), j = b.begin();
        while (i != a.end() && j != b.end()) {
            if (*i < *j) ++i;
            else if (*j < *i) ++j;
            else {
                ++c;
                ++i;
                ++j;
            }
        }
        return c;
    }
};

// Draws uniform ell-subsets one at a time and keeps a draw only if it meets
// every kept set in at most ell/2 elements. A family that stalls is thrown
// away; after 100 such families the request is refused.
inline DesignFamily nw_design(int n, int m, std::uint64_t seed, int stall_limit = 2000)
{
    if (n < 20) throw Error("nw_design needs n >= 20");
    if (m < 2) throw Error("nw_design needs m >= 2");
    DesignFamily d;
    d.n = n;
    d.m = m;
    d.ell = n / 10;
    // distinct sets are necessary: m <= C(n, ell)
    double log_choose = std::lgamma(n + 1.0) - std::lgamma(d.ell + 1.0) - std::lgamma(n - d.ell + 1.0);
    if (std::log(static_cast<double>(m)) > log_choose + 1e-9)
        throw Error("nw_design: m exceeds the number of ell-subsets");

    std::mt19937_64 rng(seed);
    std::vector<int> universe(n);
    std::iota(universe.begin(), universe.end(), 0);
    for (int attempt = 0; attempt < 100; ++attempt) {
        d.sets.clear();
        int stalls = 0;
        while (static_cast<int>(d.sets.size()) < m && stalls < stall_limit) {
            IndexSet s;
            std::sample(universe.begin(), universe.end(), std::back_inserter(s), d.ell, rng);
            bool ok = true;
            for (const auto& t : d.sets)
                if (2 * DesignFamily::intersection_size(s, t) > d.ell) {
                    ok = false;
                    break;
                }
            if (ok) {
                d.sets.push_back(std::move(s));
                stalls = 0;
            } else {
                ++stalls;
            }
        }
        if (static_cast<int>(d.sets.size()) == m && d.verify()) return d;
    }
    throw Error("nw_design: retries exhausted");
}

// Arms 0..k-1 form A with mean eps, arms k..2k-1 form B with mean 0.
inline BestSetInstance disj_sets_instance(int k, double eps)
{
    if (k < 1) throw Error("disj_sets_instance needs k >= 1");
    if (!(eps > 0.0)) throw Error("disj_sets_instance needs eps > 0");
    std::vector<double> mu(2 * k, 0.0);
    IndexSet a, b;
    for (int i = 0; i < k; ++i) {
        mu[i] = eps;
        a.push_back(i);
        b.push_back(k + i);
    }
    return make_explicit_instance(std::move(mu), {a, b});
}

// Same instance as s-t paths: two vertex-disjoint chains of k edges from
// s = 0 to t = 1. Edge j of the first chain is arm j.
inline BestSetInstance disj_sets_path_instance(int k, double eps)
{
    if (k < 1) throw Error("disj_sets_path_instance needs k >= 1");
    if (!(eps > 0.0)) throw Error("disj_sets_path_instance needs eps > 0");
    Graph g;
    g.s = 0;
    g.t = 1;
    int next = 2;
    std::vector<double> mu;
    for (int chain = 0; chain < 2; ++chain) {
        int prev = 0;
        for (int j = 0; j < k; ++j) {
            const int v = j + 1 == k ? 1 : next++;
            g.edges.push_back({prev, v});
            mu.push_back(chain == 0 ? eps : 0.0);
            prev = v;
        }
    }
    g.vertices = next;
    return {MeanProfile(std::move(mu)), FamilyOracle::st_path(std::move(g))};
}

// Region 0 holds the n profiles gap * e_i, region 1 the zero profile.
// special = nullopt puts the means at zero.
inline GeneralSampInstance or_instance(int n, double gap, std::optional<int> special)
{
    if (n < 1) throw Error("or_instance needs n >= 1");
    if (!(gap > 0.0 && gap <= 1.0)) throw Error("or_instance needs gap in (0,1]");
    if (special && (*special < 0 || *special >= n)) throw Error("or_instance: special arm out of range");
    const auto N = static_cast<std::size_t>(n);
    std::vector<std::vector<double>> spikes;
    for (int i = 0; i < n; ++i) {
        std::vector<double> p(N, 0.0);
        p[i] = gap;
        spikes.push_back(std::move(p));
    }
    std::vector<double> mu(N, 0.0);
    if (special) mu[*special] = gap;
    return GeneralSampInstance(MeanProfile(std::move(mu)),
                               {AnswerRegion::point_set(std::move(spikes), N),
                                AnswerRegion::point_set({std::vector<double>(N, 0.0)}, N)});
}

struct BallCaseConfig {
    std::vector<double> u;
    double r = 1.0;
    double c1 = 8.0;
    double c2 = 32.0;
};

struct BallCaseResult {
    bool inside = true;
    int stage = 0;           // stage that fired, 0 if none
    int stages_run = 0;
    std::uint64_t pulls = 0;
};

inline int ball_stage_count(std::size_t n) { return static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) + 2; }

inline std::uint64_t ball_stage_arms(std::size_t n, double delta, int k, const BallCaseConfig& cfg)
{
    const double nn = static_cast<double>(n);
    return static_cast<std::uint64_t>(std::ceil(cfg.c1 * nn * std::log(nn) * std::ldexp(1.0, -k) * std::log(1.0 / delta)));
}

inline std::uint64_t ball_stage_budget(std::size_t n, double delta, int k, const BallCaseConfig& cfg)
{
    const double nn = static_cast<double>(n);
    return static_cast<std::uint64_t>(
        std::ceil(cfg.c2 / (cfg.r * cfg.r) * std::ldexp(1.0, k) * (std::log(nn) + std::log(1.0 / delta))));
}

// Decides x = u against |x - u|_2 >= r, where arm a has mean x_a. Stage k
// draws arms uniformly with replacement and pulls each draw afresh; any draw
// whose mean minus u_a exceeds r 2^{-k/2-1} in absolute value means outside.
inline BallCaseResult ball_case_test(GaussianEnvironment& env, const BallCaseConfig& cfg, double delta)
{
    const std::size_t n = env.arms();
    if (cfg.u.size() != n) throw Error("ball center has wrong length");
    if (!(cfg.r > 0.0 && cfg.r <= 1.0)) throw Error("ball radius must lie in (0,1]");
    if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0,1)");
    if (n < 2) throw Error("ball case test needs at least two arms");
    std::mt19937_64 pick(mix_seed(env.seed(), 0xba11));
    std::uniform_int_distribution<std::size_t> arm(0, n - 1);
    BallCaseResult res;
    const int K = ball_stage_count(n);
    for (int k = 1; k <= K; ++k) {
        const std::uint64_t N = ball_stage_arms(n, delta, k, cfg);
        const std::uint64_t b = ball_stage_budget(n, delta, k, cfg);
        const double trigger = cfg.r * std::pow(2.0, -k / 2.0 - 1.0);
        bool fired = false;
        for (std::uint64_t j = 0; j < N; ++j) {
            const std::size_t a = arm(pick);
            const double mean = env.pull_sum(a, b) / static_cast<double>(b) - cfg.u[a];
            fired = fired || std::abs(mean) > trigger;
        }
        res.pulls += N * b;
        res.stages_run = k;
        if (fired) {
            res.inside = false;
            res.stage = k;
            return res;
        }
    }
    return res;
}

} // namespace cpe
