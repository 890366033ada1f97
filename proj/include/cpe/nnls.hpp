#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Dense>

namespace cpe {

namespace detail {

// min |M l - y| over l >= 0 (Lawson-Hanson active set).
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& M, const Eigen::VectorXd& y)
{
    const Eigen::Index k = M.cols();
    Eigen::VectorXd l = Eigen::VectorXd::Zero(k);
    std::vector<char> passive(k, 0);
    auto solve_passive = [&] {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < k; ++j)
            if (passive[j]) idx.push_back(j);
        Eigen::MatrixXd P(M.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t q = 0; q < idx.size(); ++q) P.col(static_cast<Eigen::Index>(q)) = M.col(idx[q]);
        const Eigen::VectorXd z = P.colPivHouseholderQr().solve(y);
        Eigen::VectorXd full = Eigen::VectorXd::Zero(k);
        for (std::size_t q = 0; q < idx.size(); ++q) full(idx[q]) = z(static_cast<Eigen::Index>(q));
        return full;
    };
    const double tol = 1e-12 * (M.norm() * y.norm() + 1.0);
    for (int outer = 0; outer < 30 * k + 30; ++outer) {
        const Eigen::VectorXd w = M.transpose() * (y - M * l);
        Eigen::Index best = -1;
        for (Eigen::Index j = 0; j < k; ++j)
            if (!passive[j] && w(j) > tol && (best < 0 || w(j) > w(best))) best = j;
        if (best < 0) break;
        passive[best] = 1;
        for (int inner = 0; inner < 3 * k + 3; ++inner) {
            const Eigen::VectorXd z = solve_passive();
            double alpha = 1.0;
            bool clipped = false;
            for (Eigen::Index j = 0; j < k; ++j)
                if (passive[j] && z(j) <= 0.0) {
                    alpha = std::min(alpha, l(j) / (l(j) - z(j)));
                    clipped = true;
                }
            if (!clipped) {
                l = z;
                break;
            }
            l += alpha * (z - l);
            for (Eigen::Index j = 0; j < k; ++j)
                if (passive[j] && l(j) <= 0.0) {
                    passive[j] = 0;
                    l(j) = 0.0;
                }
        }
    }
    return l;
}

} // namespace detail

} // namespace cpe
