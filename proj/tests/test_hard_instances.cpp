#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "cpe/baseline.hpp"
#include "cpe/hard_instances.hpp"
#include "cpe/lower_bounds.hpp"
#include "cpe/lp_sample.hpp"

using namespace cpe;

namespace {

bool design_ok(const DesignFamily& d)
{
    std::set<IndexSet> distinct;
    for (const auto& s : d.sets) {
        if (static_cast<int>(std::set<int>(s.begin(), s.end()).size()) != d.ell) return false;
        for (int i : s)
            if (i < 0 || i >= d.n) return false;
        distinct.insert(s);
    }
    if (static_cast<int>(distinct.size()) != d.m) return false;
    for (std::size_t i = 0; i < d.sets.size(); ++i)
        for (std::size_t j = i + 1; j < d.sets.size(); ++j) {
            IndexSet common;
            std::set_intersection(d.sets[i].begin(), d.sets[i].end(), d.sets[j].begin(), d.sets[j].end(),
                                  std::back_inserter(common));
            if (2 * static_cast<int>(common.size()) > d.ell) return false;
        }
    return true;
}

double median(std::vector<double> v)
{
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

} // namespace

TEST(NwDesign, SpecSizes)
{
    const auto t0 = std::chrono::steady_clock::now();
    for (auto [n, m] : {std::pair{100, 16}, std::pair{200, 64}}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto d = nw_design(n, m, seed);
            EXPECT_EQ(d.ell, n / 10);
            EXPECT_EQ(static_cast<int>(d.sets.size()), m);
            EXPECT_TRUE(design_ok(d));
            EXPECT_TRUE(d.verify());
        }
    }
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.0);
}

TEST(NwDesign, TwoSetsAndCapacity)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) EXPECT_TRUE(design_ok(nw_design(20, 2, seed)));
    EXPECT_THROW(nw_design(20, 1 << 20, 1), Error);
    EXPECT_THROW(nw_design(19, 2, 1), Error);
    EXPECT_THROW(nw_design(100, 1, 1), Error);
}

TEST(NwDesign, DeterministicPerSeed)
{
    EXPECT_EQ(nw_design(100, 16, 3).sets, nw_design(100, 16, 3).sets);
    EXPECT_NE(nw_design(100, 16, 3).sets, nw_design(100, 16, 4).sets);
}

TEST(NwDesign, VerifyRejectsBadFamilies)
{
    DesignFamily d{20, 2, 2, {{0, 1}, {0, 1}}};
    EXPECT_FALSE(d.verify());
    d.sets = {{0, 1}, {1, 2}};
    EXPECT_TRUE(d.verify());
    d.sets = {{0, 1}, {1, 2, 3}};
    EXPECT_FALSE(d.verify());
}

TEST(DisjSets, ClosedForms)
{
    for (int k : {1, 2, 4, 8})
        for (double eps : {0.25, 0.5}) {
            const auto inst = disj_sets_instance(k, eps);
            EXPECT_EQ(inst.arms(), static_cast<std::size_t>(2 * k));
            IndexSet a(k);
            std::iota(a.begin(), a.end(), 0);
            EXPECT_EQ(inst.optimum(), a);
            // one constraint over all 2k arms with right-hand side (k eps)^2
            const double low = solve_low_bestset(inst).value;
            const double hc = hardness_hc(inst).value;
            EXPECT_NEAR(low, 4.0 / (eps * eps), 1e-6 * low);
            EXPECT_NEAR(hc, 2.0 / (k * eps * eps), 1e-9 * hc);
            EXPECT_NEAR(low / hc, 2.0 * k, 1e-6 * k);
        }
}

TEST(DisjSets, PathVariantMatchesExplicit)
{
    for (int k : {1, 3, 6}) {
        const auto e = disj_sets_instance(k, 0.3);
        const auto p = disj_sets_path_instance(k, 0.3);
        EXPECT_EQ(p.profile().values(), e.profile().values());
        EXPECT_EQ(p.optimum(), e.optimum());
        auto fp = p.family().enumerate();
        std::sort(fp.begin(), fp.end());
        auto fe = e.family().enumerate();
        std::sort(fe.begin(), fe.end());
        EXPECT_EQ(fp, fe);
    }
    EXPECT_THROW(disj_sets_instance(0, 0.1), Error);
    EXPECT_THROW(disj_sets_instance(2, 0.0), Error);
}

TEST(OrInstance, LowAndAnswers)
{
    for (int n : {2, 5, 12})
        for (double gap : {0.2, 0.5, 1.0}) {
            for (int i : {0, n - 1}) {
                const auto inst = or_instance(n, gap, i);
                EXPECT_EQ(inst.answer(), 0);
                const double low = solve_low_general(inst).value;
                EXPECT_NEAR(low * gap * gap, 1.0, 1e-5);
            }
            const auto none = or_instance(n, gap, std::nullopt);
            EXPECT_EQ(none.answer(), 1);
            // every spike must be separated: n constraints, one per arm
            EXPECT_NEAR(solve_low_general(none).value * gap * gap, static_cast<double>(n), 1e-4 * n);
        }
    EXPECT_THROW(or_instance(4, 0.0, 1), Error);
    EXPECT_THROW(or_instance(4, 1.5, 1), Error);
    EXPECT_THROW(or_instance(4, 0.5, 4), Error);
}

TEST(OrInstance, RegionsSeparatedInSupNorm)
{
    const double gap = 0.3;
    const auto inst = or_instance(6, gap, 2);
    const auto& a = inst.regions()[0].points();
    const auto& b = inst.regions()[1].points();
    for (const auto& p : a)
        for (const auto& q : b) {
            double sup = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) sup = std::max(sup, std::abs(p[i] - q[i]));
            EXPECT_GE(sup, gap / 2);
        }
}

TEST(OrInstance, LpSamplePullsGrowWithN)
{
    auto aggregate = [](int n) {
        std::vector<double> tot;
        for (int i = 0; i < n; ++i) {
            const auto inst = or_instance(n, 1.0, i);
            for (int t = 0; t < 3; ++t) {
                GaussianEnvironment env(inst.profile(), mix_seed(n * 100 + i, t));
                const auto out = lp_sample(env, inst, 0.05);
                EXPECT_TRUE(!out.ok || out.region == 0);
                tot.push_back(static_cast<double>(env.total_pulls()));
            }
        }
        return median(tot);
    };
    const double small = aggregate(2), large = aggregate(8);
    EXPECT_GT(large, 2.0 * small);
}

TEST(BallCase, StageFormulas)
{
    BallCaseConfig cfg{std::vector<double>(64, 0.0), 0.5};
    const double L = std::log(20.0), ln = std::log(64.0);
    EXPECT_EQ(ball_stage_count(64), 8);
    EXPECT_EQ(ball_stage_count(65), 9);
    EXPECT_EQ(ball_stage_arms(64, 0.05, 1, cfg), static_cast<std::uint64_t>(std::ceil(8 * 64 * ln * 0.5 * L)));
    EXPECT_EQ(ball_stage_budget(64, 0.05, 3, cfg), static_cast<std::uint64_t>(std::ceil(32 * 4 * 8 * (ln + L))));
}

TEST(BallCase, InsideOutsideAndAccounting)
{
    const int n = 64;
    const double r = 0.5, delta = 0.05;
    BallCaseConfig cfg{std::vector<double>(n, 0.0), r};
    std::uint64_t full = 0;
    for (int k = 1; k <= ball_stage_count(n); ++k)
        full += ball_stage_arms(n, delta, k, cfg) * ball_stage_budget(n, delta, k, cfg);
    int inside = 0, outside = 0;
    const int trials = 60;
    for (int t = 0; t < trials; ++t) {
        GaussianEnvironment env(MeanProfile(std::vector<double>(n, 0.0)), mix_seed(91, t));
        const auto res = ball_case_test(env, cfg, delta);
        inside += res.inside;
        EXPECT_EQ(res.pulls, env.total_pulls());
        if (res.inside) {
            EXPECT_EQ(res.pulls, full);
        }

        std::vector<double> x(n, 0.0);
        x[0] = r;
        GaussianEnvironment far(MeanProfile(x), mix_seed(92, t));
        const auto o = ball_case_test(far, cfg, delta);
        outside += !o.inside;
        EXPECT_EQ(o.pulls, far.total_pulls());
        std::uint64_t upto = 0;
        for (int k = 1; k <= o.stages_run; ++k)
            upto += ball_stage_arms(n, delta, k, cfg) * ball_stage_budget(n, delta, k, cfg);
        EXPECT_EQ(o.pulls, upto);
    }
    EXPECT_GE(inside, 0.95 * trials);
    EXPECT_GE(outside, 0.95 * trials);
}

TEST(BallCase, SpreadMassIsFound)
{
    // |x| = r spread evenly over 16 coordinates: each carries r/4
    const int n = 64;
    const double r = 0.5;
    std::vector<double> x(n, 0.0);
    for (int i = 0; i < 16; ++i) x[i * 4] = r / 4.0;
    BallCaseConfig cfg{std::vector<double>(n, 0.0), r};
    int outside = 0;
    for (int t = 0; t < 30; ++t) {
        GaussianEnvironment env(MeanProfile(x), mix_seed(93, t));
        outside += !ball_case_test(env, cfg, 0.05).inside;
    }
    EXPECT_GE(outside, 28);
}

TEST(BallCase, NearLinearScaling)
{
    auto full = [](int n) {
        BallCaseConfig cfg{std::vector<double>(n, 0.0), 0.5};
        std::uint64_t s = 0;
        for (int k = 1; k <= ball_stage_count(n); ++k)
            s += ball_stage_arms(n, 0.05, k, cfg) * ball_stage_budget(n, 0.05, k, cfg);
        return static_cast<double>(s);
    };
    EXPECT_LE(full(256) / full(64), 8.0);
    EXPECT_GT(full(256) / full(64), 4.0);
}

TEST(Baseline, UniformBudgetAndAnswer)
{
    EXPECT_EQ(uniform_samples_per_arm(8, 0.05, 0.25), static_cast<std::uint64_t>(std::ceil(128.0 * std::log(320.0))));
    const auto inst = disj_sets_instance(4, 0.25);
    int correct = 0;
    for (int t = 0; t < 50; ++t) {
        GaussianEnvironment env(inst.profile(), mix_seed(94, t));
        const auto out = uniform_baseline(env, inst, 0.05, 0.25);
        correct += out.ok && out.set == inst.optimum();
        EXPECT_EQ(env.total_pulls(), 8 * uniform_samples_per_arm(8, 0.05, 0.25));
    }
    EXPECT_EQ(correct, 50);
}
