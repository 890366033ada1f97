#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "allocation.hpp"
#include "covering_lp.hpp"
#include "instance.hpp"
#include "regions.hpp"

namespace cpe {

struct LowSolution {
    double value = 0.0;
    Allocation allocation;
    std::vector<IndexSet> active;           // Best-Set: the sets A whose constraint binds
    std::vector<std::vector<double>> cuts;  // General-Samp: binding alternative points
    int iterations = 0;
};

struct HardnessReport {
    double value = 0.0;
    std::vector<std::optional<double>> per_arm;  // gap^-2, nullopt for unconstrained arms
};

// min sum tau  s.t.  sum_{i in O xor A} 1/tau_i <= (mu(O) - mu(A))^2  for A != O
inline LowSolution solve_low_bestset(const BestSetInstance& inst)
{
    const auto& sets = inst.family().enumerate(100000);
    std::vector<InverseConstraint> cons;
    std::vector<IndexSet> owners;
    for (const auto& a : sets) {
        if (a == inst.optimum()) continue;
        const double g = inst.gap(a);
        cons.push_back({symmetric_difference(inst.optimum(), a), g * g});
        owners.push_back(a);
    }
    LowSolution out;
    out.allocation.budget.assign(inst.arms(), 0.0);
    if (cons.empty()) return out;
    const InverseAllocation sol = solve_inverse_allocation(inst.arms(), cons);
    out.allocation.budget = sol.m;
    out.value = sol.value;
    out.iterations = sol.newton_steps;
    for (std::size_t j : sol.active) out.active.push_back(owners[j]);
    return out;
}

inline HardnessReport hardness_hc(const BestSetInstance& inst)
{
    HardnessReport out;
    out.per_arm.resize(inst.arms());
    for (std::size_t i = 0; i < inst.arms(); ++i) {
        const auto g = arm_gap(inst, static_cast<int>(i));
        if (!g) continue;
        out.per_arm[i] = 1.0 / (*g * *g);
        out.value += *out.per_arm[i];
    }
    return out;
}

// Best-Set gap between the optimum and the runner-up set.
inline double best_set_gap(const BestSetInstance& inst)
{
    const auto& sets = inst.family().enumerate();
    double g = std::numeric_limits<double>::infinity();
    for (const auto& a : sets)
        if (a != inst.optimum()) g = std::min(g, inst.gap(a));
    return g;
}

struct CuttingPlaneOptions {
    int max_cuts = 500;
    double tol = 1e-6;
};

// min sum x  s.t.  sum_i (y_i - c_i)^2 x_i >= 1  for every y in the closure of
// the given regions. Cutting planes: solve the LP over the current cuts, add
// each region's weighted-nearest point when it violates, stop when none does.
// The result is scaled up by the worst remaining ratio so it is feasible.
inline LowSolution solve_alt_lp(const std::vector<const AnswerRegion*>& alt, const std::vector<double>& center,
                                CuttingPlaneOptions opt = {})
{
    const std::size_t n = center.size();
    LowSolution out;
    out.allocation.budget.assign(n, 0.0);
    if (alt.empty()) return out;

    std::vector<std::vector<double>> rows, points;
    auto add_cut = [&](const std::vector<double>& y) {
        std::vector<double> row(n);
        for (std::size_t i = 0; i < n; ++i) row[i] = (y[i] - center[i]) * (y[i] - center[i]);
        rows.push_back(std::move(row));
        points.push_back(y);
    };

    {
        const std::vector<double> unit(n, 1.0);
        SqDist nearest{std::numeric_limits<double>::infinity(), {}};
        for (const auto* r : alt) {
            SqDist d = r->min_sqdist(unit, center);
            if (d.value < nearest.value) nearest = std::move(d);
        }
        if (!(nearest.value > 0.0)) throw Error("center lies in the closure of an alternative region");
        add_cut(nearest.argmin);
    }

    std::vector<double> tau;
    double worst = 0.0;
    for (int it = 0;; ++it) {
        const CoveringLpResult lp = solve_covering_lp(rows, n);
        tau = lp.tau;
        bool added = false;
        worst = std::numeric_limits<double>::infinity();
        for (const auto* r : alt) {
            SqDist d = r->min_sqdist(tau, center);
            worst = std::min(worst, d.value);
            if (d.value < 1.0 - opt.tol) {
                add_cut(d.argmin);
                added = true;
            }
        }
        out.iterations = it + 1;
        if (!added) break;
        if (static_cast<int>(rows.size()) > opt.max_cuts) throw Error("cutting-plane cap exceeded");
    }
    if (!(worst > 0.0)) throw Error("cutting-plane solution is degenerate");
    const double lift = worst < 1.0 ? 1.0 / worst : 1.0;
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.allocation.budget[i] = tau[i] * lift;
        value += out.allocation.budget[i];
    }
    out.value = value;
    // binding cuts
    for (std::size_t j = 0; j < rows.size(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += rows[j][i] * out.allocation.budget[i];
        if (s <= 1.0 + 1e-6) out.cuts.push_back(points[j]);
    }
    return out;
}

// Instance bound for General-Samp: the LP over Alt centred at the true means.
inline LowSolution solve_low_general(const GeneralSampInstance& inst, CuttingPlaneOptions opt = {})
{
    std::vector<const AnswerRegion*> alt;
    for (std::size_t k = 0; k < inst.regions().size(); ++k)
        if (static_cast<int>(k) != inst.answer()) alt.push_back(&inst.regions()[k]);
    return solve_alt_lp(alt, inst.profile().values(), opt);
}

// Euclidean distance from the mean profile to the closure of Alt.
inline double distance_to_alt(const GeneralSampInstance& inst)
{
    const std::vector<double> unit(inst.arms(), 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < inst.regions().size(); ++k) {
        if (static_cast<int>(k) == inst.answer()) continue;
        best = std::min(best, inst.regions()[k].min_sqdist(unit, inst.profile().values()).value);
    }
    return std::sqrt(best);
}

} // namespace cpe
