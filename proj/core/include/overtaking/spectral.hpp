#pragma once

#include "overtaking/mdp.hpp"
#include "overtaking/strategy.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace overtaking {

/// Induced matrix with the target row and column removed, non-target states in declaration order.
Eigen::MatrixXd reduced_matrix(const TransitionMatrix& t);

/// All eigenvalues, by modulus descending; near-equal moduli ordered by real part, then imaginary part, descending.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m);

struct PerronResult {
    double root = 0.0;
    /// Positive eigenvector (entries sum to 1), only for irreducible input.
    std::optional<Eigen::VectorXd> vector;
};

/**
 * Perron root of a nonnegative matrix. Each irreducible diagonal block is
 * handled by shifted power iteration with Collatz-Wielandt bounds and checked
 * against the dense eigensolver; a disagreement above 1e-8 throws NumericalError.
 */
PerronResult perron(const Eigen::MatrixXd& m);
inline double perron_root(const Eigen::MatrixXd& m) { return perron(m).root; }

struct Lambda2 {
    double value = 0.0;
    /// Second-largest modulus of the full induced matrix, when the cross-check ran.
    std::optional<double> full_spectrum;
};

/**
 * Perron root of the reduced matrix, restricted to states reachable under
 * sigma from the source components of the model graph. States no initial
 * state can reach do not influence any reach curve.
 */
Lambda2 lambda2(const Mdp& mdp, const StationaryStrategy& sigma);

/// Non-target states that lie in a source component of the union-of-actions graph.
std::vector<std::size_t> root_states(const Mdp& mdp);

/// Non-target states reachable from root_states under sigma (mask over all states).
std::vector<bool> relevant_states(const Mdp& mdp, const StationaryStrategy& sigma);

enum class SpectralOrder { First, Second, Tie };

inline constexpr double kDefaultGapTol = 1e-9;

SpectralOrder spectral_compare(const Mdp& mdp, const StationaryStrategy& sigma, const StationaryStrategy& sigma2,
                               double gap_tol = kDefaultGapTol);

struct SpectralEntry {
    StationaryStrategy strategy;
    double lambda2 = 0.0;
    /// Distance to the nearest other lambda2 (infinite when alone).
    double gap = 0.0;
    std::vector<std::complex<double>> spectrum;
};

struct SpectralReport {
    std::vector<SpectralEntry> entries;
    double min_gap = 0.0;
    bool generic = true;
    std::size_t selected = 0;
};

SpectralReport genericity_check(const Mdp& mdp, double gap_tol = kDefaultGapTol);

/// Reach: argmin lambda2; Safety: argmax. Ties go to the lowest enumeration index.
std::pair<StationaryStrategy, SpectralReport> best_pure_stationary(const Mdp& mdp, double gap_tol = kDefaultGapTol);

/// (alpha, lambda1(alpha A + (1 - alpha) B)) on an even grid of `grid` points in [0, 1].
std::vector<std::pair<double, double>> mix_one_row_scan(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                        std::size_t grid);

} // namespace overtaking
