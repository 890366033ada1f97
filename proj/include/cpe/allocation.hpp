#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "nnls.hpp"

namespace cpe {

// One constraint sum_{i in arms} 1/m_i <= bound.
struct InverseConstraint {
    IndexSet arms;
    double bound;
};

struct InverseAllocation {
    std::vector<double> m;             // m_i; 0 for arms in no constraint
    double value = 0.0;                // sum of m
    double lower_bound = 0.0;          // dual bound on the optimum
    std::vector<std::size_t> active;   // input indices with a significant multiplier
    std::vector<double> multipliers;   // per input constraint (duplicates share one)
    int newton_steps = 0;
};

// minimize sum_i m_i  s.t.  sum_{i in D_j} 1/m_i <= b_j.
// Solved in x = 1/m, where the constraints are linear and the objective
// sum 1/x_i is convex, by a log-barrier method with damped Newton steps.
// rel_tol bounds the duality gap relative to the objective.
inline InverseAllocation solve_inverse_allocation(std::size_t n, const std::vector<InverseConstraint>& cons,
                                                  double rel_tol = 1e-9)
{
    InverseAllocation out;
    out.m.assign(n, 0.0);
    out.multipliers.assign(cons.size(), 0.0);

    // merge constraints on identical arm sets, keeping the tightest bound
    std::map<IndexSet, std::size_t> index_of;
    std::vector<IndexSet> sets;
    std::vector<double> bounds;
    std::vector<std::size_t> origin(cons.size(), static_cast<std::size_t>(-1));
    for (std::size_t j = 0; j < cons.size(); ++j) {
        const auto& c = cons[j];
        if (c.arms.empty()) continue;
        if (!(c.bound > 0.0) || !std::isfinite(c.bound)) throw Error("allocation constraint bound must be positive");
        for (int i : c.arms)
            if (i < 0 || static_cast<std::size_t>(i) >= n) throw Error("allocation constraint arm out of range");
        auto [it, fresh] = index_of.emplace(c.arms, sets.size());
        if (fresh) {
            sets.push_back(c.arms);
            bounds.push_back(c.bound);
        } else {
            bounds[it->second] = std::min(bounds[it->second], c.bound);
        }
        origin[j] = it->second;
    }
    if (sets.empty()) return out;

    // drop constraints implied by a tighter one on a superset
    const std::size_t m0 = sets.size();
    std::vector<char> keep(m0, 1);
    for (std::size_t j = 0; j < m0; ++j) {
        for (std::size_t k = 0; k < m0 && keep[j]; ++k) {
            if (k == j || !keep[k] || sets[k].size() < sets[j].size()) continue;
            if (bounds[k] > bounds[j]) continue;
            if (sets[k].size() == sets[j].size() && bounds[k] == bounds[j] && k > j) continue;
            if (std::includes(sets[k].begin(), sets[k].end(), sets[j].begin(), sets[j].end())) keep[j] = 0;
        }
    }

    std::vector<int> col(n, -1);
    std::vector<int> arm_of;
    for (std::size_t j = 0; j < m0; ++j)
        for (int i : sets[j])
            if (col[i] < 0) {
                col[i] = 0;
            }
    for (std::size_t i = 0; i < n; ++i)
        if (col[i] == 0) {
            col[i] = static_cast<int>(arm_of.size());
            arm_of.push_back(static_cast<int>(i));
        }
    const Eigen::Index d = static_cast<Eigen::Index>(arm_of.size());

    std::vector<std::size_t> rows;
    for (std::size_t j = 0; j < m0; ++j)
        if (keep[j]) rows.push_back(j);
    const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, d);
    Eigen::VectorXd b(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (int i : sets[rows[r]]) A(r, col[i]) = 1.0;
        b(r) = bounds[rows[r]];
    }

    // strictly feasible start: half of the even split of each constraint
    Eigen::VectorXd x(d);
    for (Eigen::Index c = 0; c < d; ++c) x(c) = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < m; ++r) {
        const double share = 0.5 * b(r) / A.row(r).sum();
        for (Eigen::Index c = 0; c < d; ++c)
            if (A(r, c) != 0.0) x(c) = std::min(x(c), share);
    }

    auto objective = [](const Eigen::VectorXd& v) { return v.cwiseInverse().sum(); };
    auto barrier = [&](const Eigen::VectorXd& v, double t, bool& ok) {
        ok = (v.array() > 0.0).all();
        if (!ok) return 0.0;
        Eigen::VectorXd s = b - A * v;
        ok = (s.array() > 0.0).all();
        if (!ok) return 0.0;
        return t * objective(v) - s.array().log().sum();
    };

    double t = static_cast<double>(m) / objective(x);
    int steps = 0;
    for (int outer = 0; outer < 200; ++outer) {
        for (int it = 0; it < 200; ++it) {
            Eigen::VectorXd s = b - A * x;
            Eigen::VectorXd inv_s = s.cwiseInverse();
            Eigen::VectorXd g = -t * x.array().square().inverse().matrix() + A.transpose() * inv_s;
            Eigen::MatrixXd H = A.transpose() * inv_s.array().square().matrix().asDiagonal() * A;
            H.diagonal() += (2.0 * t * x.array().cube().inverse()).matrix();
            Eigen::VectorXd scale = H.diagonal().cwiseSqrt().cwiseInverse();
            Eigen::MatrixXd Hs = scale.asDiagonal() * H * scale.asDiagonal();
            Eigen::VectorXd dx = scale.asDiagonal() * Hs.ldlt().solve(-(scale.asDiagonal() * g));
            const double dec = -g.dot(dx);
            ++steps;
            if (!(dec > 1e-20)) break;
            bool ok = false;
            const double f0 = barrier(x, t, ok);
            double step = 1.0;
            Eigen::VectorXd trial;
            for (int ls = 0; ls < 80; ++ls, step *= 0.5) {
                trial = x + step * dx;
                const double f1 = barrier(trial, t, ok);
                // near the center the decrease drops below the rounding of f,
                // so the full step is taken on feasibility alone
                if (ok && (f1 <= f0 - 0.25 * step * dec || (step == 1.0 && dec < 1e-4))) break;
                ok = false;
            }
            if (!ok) break;
            x = trial;
        }
        const double f = objective(x);
        if (static_cast<double>(m) / t <= rel_tol * f) break;
        t *= 8.0;
    }

    Eigen::VectorXd s = b - A * x;
    const double f = objective(x);
    out.value = f;
    out.lower_bound = f - static_cast<double>(m) / t;
    out.newton_steps = steps;
    for (Eigen::Index c = 0; c < d; ++c) out.m[arm_of[c]] = 1.0 / x(c);

    // Barrier multipliers 1/(t s_j) lose digits because s_j is tiny; refit
    // them on the near-binding rows from stationarity 1/x^2 = A' lambda.
    Eigen::VectorXd lam = (t * s.array()).inverse().matrix();
    {
        std::vector<Eigen::Index> act;
        for (Eigen::Index r = 0; r < m; ++r)
            if (s(r) <= 1e-6 * b(r)) act.push_back(r);
        Eigen::MatrixXd At(d, static_cast<Eigen::Index>(act.size()));
        for (std::size_t k = 0; k < act.size(); ++k) At.col(static_cast<Eigen::Index>(k)) = A.row(act[k]).transpose();
        const Eigen::VectorXd target = x.array().square().inverse().matrix();
        const Eigen::VectorXd fit = detail::nnls(At, target);
        if ((At * fit - target).norm() <= 1e-7 * target.norm()) {
            lam.setZero();
            for (std::size_t k = 0; k < act.size(); ++k) lam(act[k]) = fit(static_cast<Eigen::Index>(k));
        }
    }
    // Lagrangian dual bound: min_x sum 1/x_i + x_i (A'lam)_i - lam'b
    const Eigen::VectorXd price = A.transpose() * lam;
    out.lower_bound = std::max(out.lower_bound, 2.0 * price.cwiseSqrt().sum() - lam.dot(b));

    std::vector<double> lam_set(m0, 0.0);
    for (Eigen::Index r = 0; r < m; ++r) lam_set[rows[r]] = lam(r);
    std::vector<char> claimed(m0, 0);
    for (std::size_t j = 0; j < cons.size(); ++j) {
        if (origin[j] == static_cast<std::size_t>(-1)) continue;
        const std::size_t k = origin[j];
        if (cons[j].bound != bounds[k] || claimed[k]) continue;
        claimed[k] = 1;
        out.multipliers[j] = lam_set[k];
        if (lam_set[k] * bounds[k] >= 1e-6 * f) out.active.push_back(j);
    }
    return out;
}

} // namespace cpe
