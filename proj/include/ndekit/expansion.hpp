#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ndekit/errors.hpp"
#include "ndekit/potential.hpp"

namespace ndekit {

struct ExpansionResult {
    MultipoleTail tail;
    double rms_relative_residual = 0.0;  // relative to |V - D| at each sample
    double max_relative_residual = 0.0;
    double condition = 0.0;  // of the column-scaled design matrix
};

// Least-squares fit of V(R) - V(inf) to sum_k C_k / R^k on [r_lo, r_hi].
// Rows are weighted by R^k0 (k0 = lowest power) so that every sample counts
// in relative terms.
inline ExpansionResult expand_branch(const PotentialCurve& curve, const std::vector<int>& powers, double r_lo,
                                     double r_hi, int samples = 64, double max_condition = 1e12) {
    if (powers.empty()) throw ValidationError("expand_branch: no powers requested");
    for (std::size_t i = 1; i < powers.size(); ++i)
        if (!(powers[i] > powers[i - 1])) throw ValidationError("expand_branch: powers must be sorted ascending");
    if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw ValidationError("expand_branch: need 0 < R_lo < R_hi");
    const auto range = curve.validity();
    if (!range.contains(r_lo) || !range.contains(r_hi))
        throw ValidationError("expand_branch: fit window outside the curve's validity range");
    if (!curve.dissociates()) throw ValidationError("expand_branch: curve has no finite asymptote");
    if (samples < static_cast<int>(powers.size()) + 2) samples = static_cast<int>(powers.size()) + 2;

    const int k0 = powers.front();
    const int p = static_cast<int>(powers.size());
    Eigen::MatrixXd A(samples, p);
    Eigen::VectorXd y(samples);
    for (int i = 0; i < samples; ++i) {
        const double t = samples == 1 ? 0.0 : double(i) / (samples - 1);
        const double r = r_lo * std::pow(r_hi / r_lo, t);
        for (int j = 0; j < p; ++j) A(i, j) = std::pow(r, k0 - powers[j]);
        y(i) = -curve.binding(r) * std::pow(r, k0);
    }
    Eigen::VectorXd scale(p);
    for (int j = 0; j < p; ++j) {
        scale(j) = A.col(j).cwiseAbs().maxCoeff();
        A.col(j) /= scale(j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / sv(p - 1);
    if (!(cond < max_condition))
        throw NumericError("expand_branch: ill-conditioned fit (condition " + std::to_string(cond) +
                           "); widen the window or drop a power");
    Eigen::VectorXd c = svd.solve(y);
    ExpansionResult out;
    out.condition = cond;
    out.tail.D = curve.asymptote();
    for (int j = 0; j < p; ++j) out.tail.terms.emplace_back(powers[j], c(j) / scale(j));
    const Eigen::VectorXd res = A * c - y;
    double s2 = 0.0, mx = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double rel = std::fabs(res(i)) / std::max(std::fabs(y(i)), 1e-300);
        s2 += rel * rel;
        mx = std::max(mx, rel);
    }
    out.rms_relative_residual = std::sqrt(s2 / samples);
    out.max_relative_residual = mx;
    return out;
}

}  // namespace ndekit
