#pragma once

#include "overtaking/evaluate.hpp"
#include "overtaking/mdp.hpp"
#include "overtaking/strategy.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <utility>

namespace overtaking {

/**
 * Constants with  c~ rho^t <= M^t(s,z) <= c t^k rho^t  for all entries, the
 * lower bound for t >= m (k = order of M; the upper bound holds without the
 * polynomial factor when M is diagonalizable).
 */
struct JordanConstants {
    double c = 0.0;
    double c_tilde = 0.0;
    std::size_t m = 1;
    bool diagonalizable = true;
    double rho = 0.0;
    /// Largest modulus among the other eigenvalues.
    double mu = 0.0;
};

/// Eigenvector matrices with a condition number above this are treated as defective.
inline constexpr double kDiagonalizableCond = 1e8;

/// Requires an irreducible nonnegative matrix with a simple Perron root.
JordanConstants jordan_constants(const Eigen::MatrixXd& m);

/**
 * Smallest exponent T >= m with t^order (ratio)^t < bound for every t >= T.
 * ratio must lie in (0, 1).
 */
std::size_t smallest_dominance_exponent(std::size_t order, double ratio, double bound, std::size_t m);

struct HorizonCertificate {
    StationaryStrategy sigma;
    StationaryStrategy sigma2;
    std::pair<double, double> lambda2_pair;
    double c = 0.0;
    double c_tilde = 0.0;
    std::size_t m = 1;
    /// First period from which sigma's curve is certified to dominate.
    std::size_t T = 1;
    bool diagonalizable = true;
    /// Entry bounds (positive models) or survival-vector bounds on the reachable part.
    bool entrywise = true;
    std::vector<std::size_t> verified_states;
    Window verified_window{0, 0};
};

/**
 * Certified horizon for sigma dominating sigma2 (sigma must have the smaller
 * lambda2 under Reach, the larger under Safety). Dominance is re-checked on
 * [T, T+50] from every verified state before the certificate is returned.
 */
HorizonCertificate certified_horizon(const Mdp& mdp, const StationaryStrategy& sigma,
                                     const StationaryStrategy& sigma2);

/// Smallest T0 such that a is strictly better than b on every period of [T0, horizon].
std::optional<std::size_t> empirical_crossover(const ReachCurve& a, const ReachCurve& b, Objective objective);

} // namespace overtaking
