#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cpe/allocation.hpp"
#include "cpe/efficient_gap_elim.hpp"
#include "cpe/naive_gap_elim.hpp"
#include "support/random_instances.hpp"

using namespace cpe;
using cpe_test::disjoint_pair;
using cpe_test::random_explicit;

namespace {

double pair_load(const std::vector<double>& m, const IndexSet& a, const IndexSet& b)
{
    double s = 0.0;
    for (int i : symmetric_difference(a, b)) s += 1.0 / m[i];
    return s;
}

double max_pair_load(const std::vector<IndexSet>& fam, const std::vector<double>& m)
{
    double worst = 0.0;
    for (const auto& a : fam)
        for (const auto& b : fam) worst = std::max(worst, pair_load(m, a, b));
    return worst;
}

double tightened_optimum(std::size_t n, const std::vector<IndexSet>& fam, double bound)
{
    std::vector<InverseConstraint> cons;
    for (std::size_t a = 0; a < fam.size(); ++a)
        for (std::size_t b = a + 1; b < fam.size(); ++b) cons.push_back({symmetric_difference(fam[a], fam[b]), bound});
    if (cons.empty()) return 0.0;
    double total = 0.0;
    for (double v : solve_inverse_allocation(n, cons).m) total += v;
    return total;
}

BestSetInstance four_cycle_trees()
{
    Graph g;
    g.vertices = 4;
    g.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    // dropping edge 3 leaves weight 3, every other tree weighs 2.5
    return BestSetInstance(MeanProfile({1.0, 1.0, 1.0, 0.5}), FamilyOracle::spanning_tree(g));
}

BestSetInstance two_path_disjoint(int k, double eps)
{
    // s=0 -> ... -> t=1 along two vertex-disjoint chains of k edges each
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
    return BestSetInstance(MeanProfile(mu), FamilyOracle::st_path(g));
}

} // namespace

TEST(ThresholdFamily, Members)
{
    const auto inst = make_explicit_instance({0.9, 0.5, 0.1}, {{0}, {1}, {2}, {0, 1}});
    ThresholdFamily f{inst.profile().values(), 0.5};
    EXPECT_EQ(f.members(inst.family()), (std::vector<IndexSet>{{0}, {1}, {0, 1}}));
}

TEST(Unique, Examples)
{
    const auto F = FamilyOracle::explicit_list(2, {{0}, {1}});
    EXPECT_TRUE(unique_above(F, {1, 0}, 0.5));
    EXPECT_FALSE(unique_above(F, {1, 0}, -1));
    EXPECT_FALSE(unique_above(F, {1, 0}, 2));
    const auto one = FamilyOracle::explicit_list(2, {{0, 1}});
    EXPECT_TRUE(unique_above(one, {0.3, 0.2}, 0.5));
    EXPECT_FALSE(unique_above(one, {0.3, 0.2}, 0.6));
}

TEST(Ellipsoid, KnownPrograms)
{
    const EllipsoidOptions tight{1e-3, 16.0};
    // y0 + y1 <= 1: optimum y = (1/2, 1/2), value 4
    auto two = minimize_inverse_sum(2, [](const Eigen::VectorXd& y) -> std::optional<LinearCut> {
        if (y(0) + y(1) <= 1.0) return std::nullopt;
        return LinearCut{Eigen::Vector2d(1.0, 1.0), 1.0};
    }, tight);
    EXPECT_TRUE(two.converged);
    EXPECT_NEAR(two.value, 4.0, 4e-3 * 4.0);
    EXPECT_LE(two.y[0] + two.y[1], 1.0 + 1e-12);
    // one variable, y <= 0.3
    auto one = minimize_inverse_sum(1, [](const Eigen::VectorXd& y) -> std::optional<LinearCut> {
        if (y(0) <= 0.3) return std::nullopt;
        Eigen::VectorXd a(1);
        a(0) = 1.0;
        return LinearCut{a, 0.3};
    }, tight);
    EXPECT_NEAR(one.value, 1.0 / 0.3, 2e-3 / 0.3);
    // unconstrained except for the box: y = 1
    auto box = minimize_inverse_sum(3, [](const Eigen::VectorXd&) { return std::optional<LinearCut>(); }, tight);
    EXPECT_NEAR(box.value, 3.0, 3e-3 * 3.0);
    // x0 >= 2 inside the unit box has no point
    EXPECT_THROW(minimize_inverse_sum(2, [](const Eigen::VectorXd& y) -> std::optional<LinearCut> {
                     if (y(0) >= 2.0) return std::nullopt;
                     return LinearCut{Eigen::Vector2d(-1.0, 0.0), -2.0};
                 }),
                 Error);
}

TEST(Separation, SingletonAndDisjointExamples)
{
    const auto one = FamilyOracle::explicit_list(2, {{0, 1}});
    EXPECT_FALSE(separation_2approx(one, {0.5, 0.5}, 0.5, 0.4, {1e-6, 1e-6}, 1.0).violated);
    // F = {A, B} disjoint, m_i = c: pair value |A xor B| / c
    for (int k : {1, 2, 4}) {
        const auto inst = disjoint_pair(k, 0.5);
        const auto& F = inst.family();
        const std::vector<double> mu = inst.profile().values();
        const double c = 10.0;
        const double pair = 2.0 * k / c;
        // violation whenever the pair value is at least 4 * bound
        EXPECT_TRUE(separation_2approx(F, mu, -1.0, -2.0, std::vector<double>(2 * k, c), pair / 4.0).violated);
        // and never when every pair is within bound/4 - bound/200
        EXPECT_FALSE(separation_2approx(F, mu, -1.0, -2.0, std::vector<double>(2 * k, c), pair * 4.5).violated);
    }
}

TEST(Separation, AgreesWithEnumerationUpToBand)
{
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> M(1.0, 20.0), B(0.05, 2.0);
    for (int trial = 0; trial < 300; ++trial) {
        const auto inst = random_explicit(rng, 0.0);
        const auto& F = inst.family();
        const auto& mu = inst.profile().values();
        const double best = set_weight(mu, inst.optimum());
        const double th = best - 0.6, tl = best - 0.8;
        std::vector<double> m(inst.arms());
        for (auto& v : m) v = M(rng);
        const double bound = B(rng);
        const auto s = separation_2approx(F, mu, th, tl, m, bound);
        const auto high = ThresholdFamily{mu, th}.members(F);
        const auto low = ThresholdFamily{mu, tl}.members(F);
        if (!s.violated) {
            EXPECT_LE(max_pair_load(high, m), bound * (1 + 1e-12));
        } else {
            EXPECT_GT(pair_load(m, s.a, s.b), bound / 4.0 - bound / 400.0);
            EXPECT_TRUE((ThresholdFamily{mu, tl}.contains(s.b)));
            EXPECT_GT(max_pair_load(low, m), bound / 4.0 - bound / 400.0);
        }
        // beyond the band the verdict is forced
        if (max_pair_load(high, m) > bound) {
            EXPECT_TRUE(s.violated);
        }
        if (max_pair_load(low, m) <= bound / 4.0 - bound / 200.0) {
            EXPECT_FALSE(s.violated);
        }
    }
}

TEST(EllipsoidSimult, FeasibleAndWithinFactorEight)
{
    std::mt19937_64 rng(52);
    double worst = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
        const auto inst = random_explicit(rng, 0.0);
        const auto& F = inst.family();
        const auto& mu = inst.profile().values();
        const double best = set_weight(mu, inst.optimum());
        const double th = best - 0.5, tl = best - 0.7;
        const double bound = 1e-3;
        const auto sol = ellipsoid_simult(F, mu, th, tl).scaled(bound);
        const auto high = ThresholdFamily{mu, th}.members(F);
        const auto low = ThresholdFamily{mu, tl}.members(F);
        for (const auto& a : high)
            for (const auto& b : high)
                if (a != b) {
                    EXPECT_LE(pair_load(sol.budget, a, b), bound * (1 + 1e-9));
                }
        const double ref = tightened_optimum(inst.arms(), low, bound);
        if (ref == 0.0) {
            EXPECT_EQ(sol.total(), 0.0);
            continue;
        }
        EXPECT_LE(sol.total(), 8.0 * ref);
        worst = std::max(worst, sol.total() / ref);
    }
    EXPECT_GT(worst, 0.0);
}

TEST(EllipsoidVerify, FeasibleAgainstEnumeration)
{
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 40; ++trial) {
        const auto inst = random_explicit(rng, 0.0);
        const auto& F = inst.family();
        const auto& mu = inst.profile().values();
        const double best = set_weight(mu, inst.optimum());
        std::vector<VerifyBlock> blocks{{{std::vector<double>(inst.arms(), 0.0), -0.05}, -0.1, 1e-3},
                                        {{mu, best - 0.5}, best - 0.55, 2.5e-4}};
        const auto m = ellipsoid_verify(F, inst.optimum(), blocks);
        for (const auto& b : blocks)
            for (const auto& a : b.family.members(F))
                if (a != inst.optimum()) {
                    EXPECT_LE(pair_load(m.budget, inst.optimum(), a), b.bound * (1 + 1e-9));
                }
    }
}

TEST(EfficientGapElim, SingleSetNeedsNoPulls)
{
    const auto inst = make_explicit_instance({0.2, 0.7}, {{0, 1}});
    GaussianEnvironment env(inst.profile(), 5);
    const auto out = efficient_gap_elim(env, inst, 0.005);
    EXPECT_TRUE(out.ok);
    EXPECT_EQ(out.set, (IndexSet{0, 1}));
    EXPECT_EQ(env.total_pulls(), 0u);
}

TEST(EfficientGapElim, FourCycleSpanningTree)
{
    const auto inst = four_cycle_trees();
    int correct = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        GaussianEnvironment env(inst.profile(), mix_seed(61, t));
        const auto out = efficient_gap_elim(env, inst, 0.01);
        correct += out.ok && out.set == inst.optimum();
    }
    EXPECT_GE(correct, 0.99 * trials);
}

TEST(EfficientGapElim, AgreesWithNaiveOnExplicitInstances)
{
    std::mt19937_64 rng(54);
    int agree = 0, right = 0;
    const int trials = 40;
    for (int t = 0; t < trials; ++t) {
        const auto inst = random_explicit(rng, 0.05);
        GaussianEnvironment e1(inst.profile(), mix_seed(9, t)), e2(inst.profile(), mix_seed(9, t));
        const auto a = efficient_gap_elim(e1, inst, 0.005);
        const auto b = naive_gap_elim(e2, inst, 0.005);
        agree += a.ok && b.ok && a.set == b.set;
        right += a.ok && a.set == inst.optimum();
    }
    EXPECT_GE(agree, trials - 2);
    EXPECT_GE(right, trials - 2);
}

TEST(EfficientGapElim, SandwichAndSurvivalOnGoodTrials)
{
    std::mt19937_64 rng(55);
    const EfficientOptions opt;
    const double lam = opt.lambda;
    auto eps = [](int r) { return std::ldexp(1.0, -r); };
    int good_trials = 0;
    for (int t = 0; t < 30; ++t) {
        const auto inst = random_explicit(rng, 0.05);
        const auto& F = inst.family();
        const auto& mu = inst.profile().values();
        GaussianEnvironment env(inst.profile(), mix_seed(10, t));
        RunLog log;
        log.keep_vectors = true;
        const auto out = efficient_gap_elim(env, inst, 0.005, opt, &log);
        // rebuild mu^(k), theta_k
        std::vector<std::vector<double>> means{std::vector<double>(inst.arms(), 0.0)};
        std::vector<double> theta{0.0};
        for (const auto& r : log.rounds) {
            if (r.verify) break;
            means.push_back(r.means);
            theta.push_back(r.theta);
        }
        // good event: pairs of the relaxed family k within eps_k / lambda in every later round
        bool good = true;
        for (std::size_t r = 1; r < means.size(); ++r)
            for (std::size_t k = 1; k <= r; ++k) {
                const auto fam = ThresholdFamily{means[k - 1], theta[k - 1] - eps(k - 1) / lam}.members(F);
                for (const auto& a : fam)
                    for (const auto& b : fam) {
                        const double est = set_weight(means[r], a) - set_weight(means[r], b);
                        const double truth = set_weight(mu, a) - set_weight(mu, b);
                        good = good && std::abs(est - truth) < eps(k) / lam;
                    }
            }
        if (!good) continue;
        ++good_trials;
        EXPECT_TRUE(out.ok);
        EXPECT_EQ(out.set, inst.optimum());
        for (std::size_t r = 1; r < means.size(); ++r) {
            const ThresholdFamily tilde{means[r], theta[r] - eps(static_cast<int>(r)) / lam};
            const ThresholdFamily plain{means[r], theta[r]};
            EXPECT_TRUE(plain.contains(inst.optimum()));
            for (const auto& a : F.enumerate()) {
                const double gap = inst.gap(a);
                if (tilde.contains(a)) {
                    EXPECT_LE(gap, eps(static_cast<int>(r)));
                }
                if (plain.contains(a)) {
                    EXPECT_TRUE(tilde.contains(a));
                }
                if (gap <= eps(static_cast<int>(r) + 1)) {
                    EXPECT_TRUE(plain.contains(a));
                }
            }
        }
    }
    EXPECT_GT(good_trials, 20);
}

TEST(EfficientGapElim, TwoPathDisjointSetsFlatInN)
{
    auto median_pulls = [](int k) {
        const auto inst = two_path_disjoint(k, 0.25);
        EfficientOptions opt;
        opt.scale = k;
        std::vector<std::uint64_t> pulls;
        for (int t = 0; t < 11; ++t) {
            GaussianEnvironment env(inst.profile(), mix_seed(k, t));
            const auto out = efficient_gap_elim(env, inst, 0.05, opt);
            EXPECT_TRUE(out.ok && out.set == inst.optimum());
            pulls.push_back(env.total_pulls());
        }
        std::nth_element(pulls.begin(), pulls.begin() + 5, pulls.end());
        return static_cast<double>(pulls[5]);
    };
    const double a = median_pulls(4), b = median_pulls(16);
    EXPECT_LE(b / a, 2.0);
    EXPECT_GE(b / a, 0.5);
}
