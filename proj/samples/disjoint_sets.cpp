// Disjoint-sets walk-through: lower bounds against H_C, then naive gap
// elimination pulls as k grows.
#include <algorithm>
#include <cstdio>
#include <vector>

#include "cpe/experiment.hpp"

int main()
{
    using namespace cpe;
    const double eps = 0.25, delta = 0.01;
    std::printf("k,low,hc,ratio,median_pulls\n");
    for (int k : {2, 4, 8, 16}) {
        const auto inst = disj_sets_instance(k, eps);
        const double low = solve_low_bestset(inst).value;
        const double hc = hardness_hc(inst).value;
        GapElimOptions opt;
        opt.scale = k;  // the gap between A and B is k * eps
        std::vector<std::uint64_t> pulls;
        for (int t = 0; t < 21; ++t) {
            GaussianEnvironment env(inst.profile(), mix_seed(k, t));
            naive_gap_elim(env, inst, delta, opt);
            pulls.push_back(env.total_pulls());
        }
        std::nth_element(pulls.begin(), pulls.begin() + 10, pulls.end());
        std::printf("%d,%.4f,%.4f,%.2f,%llu\n", k, low, hc, low / hc, static_cast<unsigned long long>(pulls[10]));
    }
}
