#pragma once

#include <cmath>
#include <vector>

#include "core.hpp"

namespace cpe {

struct CoveringLpResult {
    std::vector<double> tau;
    double value = 0.0;
    int pivots = 0;
};

// minimize sum_i tau_i  s.t.  rows[j] . tau >= 1,  tau >= 0, with nonnegative rows.
// Solved through its packing dual  max sum_j y_j  s.t.  sum_j y_j rows[j] <= 1,
// y >= 0, whose slack basis is feasible; tau is read off the dual prices.
inline CoveringLpResult solve_covering_lp(const std::vector<std::vector<double>>& rows, std::size_t n)
{
    CoveringLpResult out;
    out.tau.assign(n, 0.0);
    const std::size_t K = rows.size();
    if (K == 0) return out;
    for (const auto& r : rows) {
        if (r.size() != n) throw Error("covering LP row has wrong length");
        bool any = false;
        for (double v : r) {
            if (v < 0.0 || !std::isfinite(v)) throw Error("covering LP rows must be finite and nonnegative");
            any = any || v > 0.0;
        }
        if (!any) throw Error("covering LP is infeasible (zero cut)");
    }

    // tableau: n rows, columns y_1..y_K, s_1..s_n, rhs
    const std::size_t cols = K + n;
    std::vector<std::vector<double>> T(n, std::vector<double>(cols + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < K; ++j) T[i][j] = rows[j][i];
        T[i][K + i] = 1.0;
        T[i][cols] = 1.0;
    }
    std::vector<double> z(cols + 1, 0.0);  // reduced costs, z[cols] = objective
    for (std::size_t j = 0; j < K; ++j) z[j] = -1.0;
    std::vector<std::size_t> basis(n);
    for (std::size_t i = 0; i < n; ++i) basis[i] = K + i;

    const double tol = 1e-12;
    const int max_pivots = 50000;
    int degenerate_run = 0;
    for (int it = 0; it < max_pivots; ++it) {
        // Dantzig rule, Bland's rule after a run of degenerate pivots
        std::size_t enter = cols;
        if (degenerate_run < 50) {
            double best = -1e-11;
            for (std::size_t j = 0; j < cols; ++j)
                if (z[j] < best) {
                    best = z[j];
                    enter = j;
                }
        } else {
            for (std::size_t j = 0; j < cols; ++j)
                if (z[j] < -1e-11) {
                    enter = j;
                    break;
                }
        }
        if (enter == cols) break;
        std::size_t leave = n;
        double ratio = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (T[i][enter] <= tol) continue;
            const double q = T[i][cols] / T[i][enter];
            if (leave == n || q < ratio - 1e-15 || (std::abs(q - ratio) <= 1e-15 && basis[i] < basis[leave])) {
                leave = i;
                ratio = q;
            }
        }
        if (leave == n) throw Error("covering LP is infeasible (unbounded dual)");
        degenerate_run = ratio <= 1e-15 ? degenerate_run + 1 : 0;

        const double p = T[leave][enter];
        for (double& v : T[leave]) v /= p;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == leave) continue;
            const double f = T[i][enter];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols; ++j) T[i][j] -= f * T[leave][j];
        }
        const double f = z[enter];
        for (std::size_t j = 0; j <= cols; ++j) z[j] -= f * T[leave][j];
        basis[leave] = enter;
        ++out.pivots;
        if (it + 1 == max_pivots) throw Error("covering LP pivot cap exceeded");
    }

    for (std::size_t i = 0; i < n; ++i) out.tau[i] = std::max(0.0, z[K + i]);
    out.value = z[cols];
    return out;
}

} // namespace cpe
