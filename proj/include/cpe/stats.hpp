#pragma once

#include <algorithm>
#include <cmath>

#include "core.hpp"

namespace cpe {

inline double kl_gaussian(double mu1, double mu2)
{
    const double d = mu1 - mu2;
    return 0.5 * d * d;
}

inline double binary_rel_entropy(double x, double y)
{
    if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0)) throw Error("binary_rel_entropy arguments must lie in (0,1)");
    return x * std::log(x / y) + (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
}

// Bound on Pr[|sum_{i in T} (hat mu_i - mu_i)| >= eps] when arm i gets tau_i
// samples and inverse_budget_sum = sum_{i in T} 1/tau_i.
inline double sum_dev_tail(double epsilon, double inverse_budget_sum)
{
    if (!(epsilon > 0.0) || !(inverse_budget_sum > 0.0)) throw Error("sum_dev_tail needs positive arguments");
    return std::min(1.0, 2.0 * std::exp(-epsilon * epsilon / (2.0 * inverse_budget_sum)));
}

// Bound on Pr[X >= 2n + 3x] for X chi-squared with n degrees of freedom.
inline double chi2_tail(int n, double x)
{
    if (n < 1) throw Error("chi2_tail needs n >= 1");
    if (!(x >= 0.0)) throw Error("chi2_tail needs x >= 0");
    return std::min(1.0, std::exp(-x));
}

inline double conf_radius(long long t, int n, double delta0)
{
    if (t < 1 || n < 1 || !(delta0 > 0.0 && delta0 < 1.0)) throw Error("conf_radius: invalid arguments");
    const double td = static_cast<double>(t);
    return std::sqrt((2.0 * n + 3.0 * std::log(4.0 * td * td / delta0)) / td);
}

} // namespace cpe
