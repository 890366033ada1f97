#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "allocation.hpp"
#include "instance.hpp"
#include "sampling_task.hpp"

namespace cpe {

struct GapElimOptions {
    double delta0 = 0.01;
    double lambda = 10.0;
    // eps_r = scale * 2^-r. 1 is the published schedule; a larger power of
    // two suits instances whose gaps exceed 1.
    double scale = 1.0;
    int max_rounds = 64;
};

inline double round_eps(const GapElimOptions& opt, int r) { return opt.scale * std::ldexp(1.0, -r); }

// Samples per arm so that every pairwise gap in U is estimated to within
// eps with probability 1 - delta:
//   min sum m  s.t.  sum_{i in A xor B} 1/m_i <= eps^2 / (2 ln(2/delta)).
inline Allocation simult_est(const std::vector<IndexSet>& U, double eps, double delta, std::size_t n,
                             int* iterations = nullptr)
{
    if (!(eps > 0.0) || !(delta > 0.0 && delta < 1.0)) throw Error("simult_est needs eps > 0 and delta in (0,1)");
    Allocation out;
    out.budget.assign(n, 0.0);
    if (U.size() < 2) return out;
    const double bound = eps * eps / (2.0 * std::log(2.0 / delta));
    std::vector<InverseConstraint> cons;
    for (std::size_t a = 0; a < U.size(); ++a)
        for (std::size_t b = a + 1; b < U.size(); ++b) {
            if (U[a] == U[b]) throw Error("simult_est: repeated set");
            cons.push_back({symmetric_difference(U[a], U[b]), bound});
        }
    const auto sol = solve_inverse_allocation(n, cons);
    if (iterations) *iterations = sol.newton_steps;
    out.budget = sol.m;
    return out;
}

// Samples per arm so that mu(O_hat) - mu(A) is estimated to eps_k / lambda
// for every round k and A in F_k (families[k-1] = F_k, eps_k = scale 2^-k).
inline Allocation verify_alloc(const std::vector<std::vector<IndexSet>>& families, const IndexSet& o_hat, double delta,
                               std::size_t n, double lambda = 10.0, double scale = 1.0, int* iterations = nullptr)
{
    if (families.empty() || families.back().size() != 1 || families.back()[0] != o_hat)
        throw Error("verify_alloc: the last family must be the conjectured set alone");
    if (!(delta > 0.0 && delta < 1.0)) throw Error("verify_alloc needs delta in (0,1)");
    Allocation out;
    out.budget.assign(n, 0.0);
    const double l2 = 2.0 * std::log(2.0 / delta);
    std::vector<InverseConstraint> cons;
    for (std::size_t k = 0; k < families.size(); ++k) {
        const double eps = scale * std::ldexp(1.0, -static_cast<int>(k + 1)) / lambda;
        for (const auto& a : families[k]) {
            if (a == o_hat) continue;
            cons.push_back({symmetric_difference(o_hat, a), eps * eps / l2});
        }
    }
    if (cons.empty()) return out;
    const auto sol = solve_inverse_allocation(n, cons);
    if (iterations) *iterations = sol.newton_steps;
    out.budget = sol.m;
    return out;
}

// Elimination over an explicit family. Round r samples fresh by
// simult_est(F_r, eps_r / lambda, delta_r) and keeps the sets within
// eps_r/2 + 2 eps_r/lambda of the empirical best; once one set is left it
// is verified against every eliminated set.
inline SampleTask naive_gap_elim_task(BestSetInstance inst, double delta, GapElimOptions opt = {},
                                      RunLog* log = nullptr)
{
    if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0,1)");
    const std::size_t n = inst.arms();
    const std::vector<IndexSet> all = inst.family().enumerate();
    const double F = static_cast<double>(all.size());
    std::vector<std::vector<IndexSet>> fams{all};
    std::sort(fams[0].begin(), fams[0].end());

    for (int r = 1; r <= opt.max_rounds; ++r) {
        const auto& cur = fams.back();
        if (cur.size() == 1) {
            const IndexSet o_hat = cur[0];
            int iters = 0;
            const Allocation m = verify_alloc(fams, o_hat, delta / (r * F), n, opt.lambda, opt.scale, &iters);
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
            // A is tested at the first round k whose family no longer holds it
            const double top = set_weight(mu.values, o_hat);
            for (const auto& a : all) {
                if (a == o_hat) continue;
                for (int k = 1; k <= r; ++k) {
                    if (std::binary_search(fams[k - 1].begin(), fams[k - 1].end(), a)) continue;
                    if (top - set_weight(mu.values, a) < round_eps(opt, k) / opt.lambda)
                        co_return Outcome::error("verification failed", r);
                    break;
                }
            }
            co_return Outcome::answer(o_hat, r);
        }

        const double eps = round_eps(opt, r);
        const double delta_r = opt.delta0 / (10.0 * r * r * F * F);
        int iters = 0;
        const Allocation m = simult_est(cur, eps / opt.lambda, delta_r, n, &iters);
        const auto counts = m.ceiled();
        const auto sums = co_await draw(counts);
        const auto mu = EmpiricalMeans::from_sums(sums, counts);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& a : cur) best = std::max(best, set_weight(mu.values, a));
        const double cut = best - eps / 2.0 - 2.0 * eps / opt.lambda;
        std::vector<IndexSet> next;
        for (const auto& a : cur)
            if (set_weight(mu.values, a) >= cut) next.push_back(a);
        if (log) {
            RoundLog rl;
            rl.r = r;
            rl.survivors = cur.size();
            rl.pulls = request_total(counts);
            rl.opt = best;
            rl.theta = cut;
            rl.solver_iterations = iters;
            if (log->keep_vectors) {
                rl.family = cur;
                rl.means = mu.values;
            }
            log->rounds.push_back(std::move(rl));
        }
        std::sort(next.begin(), next.end());
        fams.push_back(std::move(next));
    }
    co_return Outcome::error("round cap exceeded", opt.max_rounds);
}

inline Outcome naive_gap_elim(GaussianEnvironment& env, const BestSetInstance& inst, double delta,
                              GapElimOptions opt = {}, RunLog* log = nullptr)
{
    return run_task(naive_gap_elim_task(inst, delta, opt, log), env);
}

} // namespace cpe
