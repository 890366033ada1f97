#pragma once

#include <cmath>
#include <vector>

#include "ellipsoid.hpp"
#include "instance.hpp"
#include "pareto.hpp"
#include "sampling_task.hpp"

namespace cpe {

struct EfficientOptions {
    double delta0 = 0.01;
    double lambda = 20.0;
    double scale = 1.0;  // eps_r = scale * 2^-r, as in GapElimOptions
    int max_rounds = 64;
    EllipsoidOptions ellipsoid;
};

// Elimination with survivors kept as threshold families
// F_r = {A : mu^(r-1)(A) >= theta_{r-1}}. Allocations come from the
// Ellipsoid solver, so no step enumerates F.
inline SampleTask efficient_gap_elim_task(BestSetInstance inst, double delta, EfficientOptions opt = {},
                                          RunLog* log = nullptr)
{
    if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0,1)");
    const FamilyOracle& F = inst.family();
    const std::size_t n = inst.arms();
    const double logF = F.log_count_upper();
    const double lam = opt.lambda;
    auto eps = [&](int r) { return opt.scale * std::ldexp(1.0, -r); };

    // index k holds mu^(k) and theta_k; k = 0 is the all-zero start
    std::vector<std::vector<double>> means{std::vector<double>(n, 0.0)};
    std::vector<double> theta{0.0};
    // normalized SimultEst solution on family k, filled at round k
    std::vector<NormalizedAllocation> simult;

    for (int r = 1; r <= opt.max_rounds; ++r) {
        const double e_prev = eps(r - 1);
        if (unique_above(F, means[r - 1], theta[r - 1] - e_prev / lam)) {
            const IndexSet o_hat = F.argmax(means[r - 1]);
            const double l2 = 2.0 * (std::log(2.0) - std::log(delta) + std::log(static_cast<double>(r)) + logF);
            std::vector<VerifyBlock> blocks;
            for (int k = 1; k <= r; ++k) {
                const double ek = eps(k - 1);
                const double acc = eps(k) / lam;
                blocks.push_back({{means[k - 1], theta[k - 1] - ek / lam}, theta[k - 1] - 2.0 * ek / lam, acc * acc / l2});
            }
            int iters = 0;
            const Allocation m = ellipsoid_verify(F, o_hat, blocks, opt.ellipsoid, &iters);
            const auto counts = m.ceiled();
            std::vector<double> sums(n, 0.0);
            if (request_total(counts) > 0) sums = co_await draw(counts);
            const auto mu = EmpiricalMeans::from_sums(sums, counts);
            if (log) {
                RoundLog rl;
                rl.r = r;
                rl.survivors = 1;
                rl.pulls = request_total(counts);
                rl.solver_iterations = iters;
                rl.verify = true;
                if (log->keep_vectors) rl.means = mu.values;
                log->rounds.push_back(std::move(rl));
            }
            for (int k = 1; k <= r - 1; ++k)
                if (!check_approx(F, o_hat, means[k], mu.values, theta[k], eps(k) / lam))
                    co_return Outcome::error("verification failed", r);
            co_return Outcome::answer(o_hat, r);
        }

        const double e = eps(r);
        const double l2 = 2.0 * (std::log(2.0) - std::log(opt.delta0) + std::log(10.0) +
                                 3.0 * std::log(static_cast<double>(r)) + 2.0 * logF);
        simult.push_back(ellipsoid_simult(F, means[r - 1], theta[r - 1] - e_prev / lam,
                                          theta[r - 1] - 2.0 * e_prev / lam, opt.ellipsoid));
        std::vector<double> m(n, 0.0);
        for (int k = 1; k <= r; ++k) {
            const double acc = eps(k) / lam;
            const auto part = simult[k - 1].scaled(acc * acc / l2);
            for (std::size_t i = 0; i < n; ++i) m[i] += part.budget[i];
        }
        Allocation alloc;
        alloc.budget = m;
        const auto counts = alloc.ceiled();
        const auto sums = co_await draw(counts);
        auto mu = EmpiricalMeans::from_sums(sums, counts).values;
        const IndexSet a = opt_approx(F, means[r - 1], theta[r - 1], mu, e_prev / lam);
        const double opt_r = set_weight(mu, a);
        const double th = opt_r - (0.5 + 2.0 / lam) * e;
        if (log) {
            RoundLog rl;
            rl.r = r;
            rl.pulls = request_total(counts);
            rl.opt = opt_r;
            rl.theta = th;
            rl.solver_iterations = simult.back().iterations;
            if (log->keep_vectors) rl.means = mu;
            log->rounds.push_back(std::move(rl));
        }
        means.push_back(std::move(mu));
        theta.push_back(th);
    }
    co_return Outcome::error("round cap exceeded", opt.max_rounds);
}

inline Outcome efficient_gap_elim(GaussianEnvironment& env, const BestSetInstance& inst, double delta,
                                  EfficientOptions opt = {}, RunLog* log = nullptr)
{
    return run_task(efficient_gap_elim_task(inst, delta, opt, log), env);
}

} // namespace cpe
