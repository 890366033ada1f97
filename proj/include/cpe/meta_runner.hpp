#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "core.hpp"
#include "sampling_task.hpp"

namespace cpe {

struct ParallelOptions {
    std::uint64_t pull_cap = 1000000000ull;
    int max_runs = 62;
};

struct ParallelResult {
    Outcome outcome;
    int winner = -1;                   // k of the run whose answer is returned
    std::uint64_t finish_slot = 0;     // time slot at which it finished
    std::uint64_t total_pulls = 0;     // samples handed out up to that slot
    std::vector<std::uint64_t> pulls;  // per run k
};

// Runs A_0, A_1, ... where A_k has confidence delta / 2^{k+1} and is resumed
// at the slots divisible by 2^k. The first resumption starts a run; each
// later one hands it a single sample. A request for c samples is therefore
// answered after c resumptions, all at once. Returns the first run to finish
// without error (ties within a slot go to the smaller k).
//
// Runs are advanced independently up to a doubling horizon instead of slot
// by slot; the result is the same as the slot-by-slot schedule.
class ParallelSimulation {
public:
    using Factory = std::function<SampleTask(double delta)>;

    ParallelSimulation(Factory factory, double delta, MeanProfile profile, std::uint64_t seed, ParallelOptions opt = {})
        : factory_(std::move(factory)), delta_(delta), profile_(std::move(profile)), seed_(seed), opt_(opt)
    {
        if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0,1)");
    }

    ParallelResult run()
    {
        ParallelResult res;
        for (std::uint64_t H = 1;; H *= 2) {
            for (int k = 0; k < opt_.max_runs && (std::uint64_t{1} << k) <= H; ++k) {
                if (k == static_cast<int>(runs_.size())) runs_.push_back(std::make_unique<Run>(k, *this));
                advance(*runs_[k], H);
            }
            // winner among runs finished by H
            int best = -1;
            for (std::size_t k = 0; k < runs_.size(); ++k) {
                const Run& r = *runs_[k];
                if (!r.succeeded() || r.finish_slot > H) continue;
                if (best < 0 || r.finish_slot < runs_[best]->finish_slot) best = static_cast<int>(k);
            }
            if (best >= 0) {
                const std::uint64_t T = runs_[best]->finish_slot;
                res.outcome = runs_[best]->task.outcome();
                res.winner = best;
                res.finish_slot = T;
                res.pulls.assign(runs_.size(), 0);
                for (std::size_t k = 0; k < runs_.size(); ++k) {
                    const int kk = static_cast<int>(k);
                    const std::uint64_t p = std::uint64_t{1} << k;
                    // a later k is not resumed in slot T
                    const std::uint64_t resumptions = kk <= best ? T / p : (T - 1) / p;
                    const std::uint64_t avail = resumptions > 0 ? resumptions - 1 : 0;
                    res.pulls[k] = kk == best ? runs_[k]->demand : std::min(runs_[k]->demand, avail);
                    res.total_pulls += res.pulls[k];
                }
                return res;
            }
            std::uint64_t used = 0;
            bool all_errored = static_cast<int>(runs_.size()) == opt_.max_runs;
            for (const auto& r : runs_) {
                const std::uint64_t p = std::uint64_t{1} << r->k;
                const std::uint64_t avail = H / p > 0 ? H / p - 1 : 0;
                used += std::min(r->demand, avail);
                all_errored = all_errored && r->finished();
            }
            if (used > opt_.pull_cap || all_errored || H > (std::numeric_limits<std::uint64_t>::max() >> 2)) {
                res.outcome = Outcome::error(all_errored ? "every run failed" : "pull cap exceeded", 0);
                res.total_pulls = used;
                return res;
            }
        }
    }

private:
    struct Run {
        int k;
        SampleTask task;
        GaussianEnvironment env;
        std::uint64_t delivered = 0;   // samples of completed requests
        std::uint64_t demand = 0;      // delivered plus the pending request
        std::uint64_t finish_slot = 0;
        bool failed = false;  // the algorithm threw

        bool finished() const { return failed || task.done(); }
        bool succeeded() const { return !failed && task.done() && task.outcome().ok; }

        Run(int k_, ParallelSimulation& sim)
            : k(k_), task(sim.factory_(sim.delta_ / static_cast<double>(std::uint64_t{2} << k_))),
              env(sim.profile_, mix_seed(sim.seed_, static_cast<std::uint64_t>(k_)))
        {
        }
    };

    // Serve run r every request that completes by slot H.
    void advance(Run& r, std::uint64_t H)
    {
        const std::uint64_t p = std::uint64_t{1} << r.k;
        const std::uint64_t avail = H / p > 0 ? H / p - 1 : 0;
        if (H < p || r.failed) return;
        try {
            if (!r.task.started()) {
                r.task.start();
                settle(r);
            }
            while (!r.task.done() && r.demand <= avail) {
                r.task.supply(r.env.sample_sums(r.task.request()));
                r.delivered = r.demand;
                settle(r);
            }
        } catch (const Error&) {
            // a failing run behaves like one that returned an error
            r.failed = true;
            r.demand = r.delivered;
        }
    }

    // After a resumption: note the pending request, or the finishing slot.
    static void settle(Run& r)
    {
        for (;;) {
            if (r.task.done()) {
                r.demand = r.delivered;
                r.finish_slot = (r.delivered + 1) << r.k;
                return;
            }
            const auto& req = r.task.request();
            const std::uint64_t c = request_total(req);
            if (c > 0) {
                r.demand = r.delivered + c;
                return;
            }
            r.task.supply(std::vector<double>(req.size(), 0.0));
        }
    }

    Factory factory_;
    double delta_;
    MeanProfile profile_;
    std::uint64_t seed_;
    ParallelOptions opt_;
    std::vector<std::unique_ptr<Run>> runs_;
};

inline ParallelResult parallel_simulate(ParallelSimulation::Factory factory, double delta, const MeanProfile& profile,
                                        std::uint64_t seed, ParallelOptions opt = {})
{
    return ParallelSimulation(std::move(factory), delta, profile, seed, opt).run();
}

} // namespace cpe
