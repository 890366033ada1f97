#pragma once

#include <optional>
#include <vector>

#include "core.hpp"
#include "oracles.hpp"

namespace cpe {

// Arms plus a feasible family with a unique maximum-weight member.
class BestSetInstance {
public:
    BestSetInstance(MeanProfile profile, FamilyOracle family)
        : profile_(std::move(profile)), family_(std::move(family))
    {
        if (family_.arms() != profile_.size()) throw Error("family and mean profile disagree on the number of arms");
        optimum_ = family_.argmax(profile_.values());
        const double top = set_weight(profile_, optimum_);
        std::optional<IndexSet> second;
        try {
            second = family_.second_best(profile_.values());
        } catch (const Error&) {
            // single-member family
        }
        if (second && !(set_weight(profile_, *second) < top)) throw Error("best set is not unique");
    }

    const MeanProfile& profile() const { return profile_; }
    const FamilyOracle& family() const { return family_; }
    const IndexSet& optimum() const { return optimum_; }
    std::size_t arms() const { return profile_.size(); }

    double gap(const IndexSet& a) const { return set_weight(profile_, optimum_) - set_weight(profile_, a); }

    // Same family, different means (the optimum is recomputed).
    BestSetInstance with_means(std::vector<double> means) const { return {MeanProfile(std::move(means)), family_}; }

private:
    MeanProfile profile_;
    FamilyOracle family_;
    IndexSet optimum_;
};

// Gap of arm i: mu(O) minus the best weight among sets that disagree with O
// on i. nullopt when no set disagrees (the arm is unconstrained).
inline std::optional<double> arm_gap(const BestSetInstance& inst, int arm)
{
    const auto& sets = inst.family().enumerate();
    const bool in_opt = contains(inst.optimum(), arm);
    std::optional<double> best;
    for (const auto& s : sets) {
        if (contains(s, arm) == in_opt) continue;
        const double w = set_weight(inst.profile(), s);
        if (!best || w > *best) best = w;
    }
    if (!best) return std::nullopt;
    return set_weight(inst.profile(), inst.optimum()) - *best;
}

inline BestSetInstance make_explicit_instance(std::vector<double> means, std::vector<IndexSet> sets)
{
    const std::size_t n = means.size();
    return {MeanProfile(std::move(means)), FamilyOracle::explicit_list(n, std::move(sets))};
}

} // namespace cpe
