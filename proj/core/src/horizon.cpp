#include "overtaking/horizon.hpp"

#include "overtaking/error.hpp"
#include "overtaking/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace overtaking {

namespace {

constexpr double kSimpleRootTol = 1e-8;
constexpr std::size_t kVerifyPeriods = 50;
constexpr std::size_t kMaxCertifiedPeriod = 50'000'000;

double condition_number(const Eigen::MatrixXcd& v) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
    const auto& sv = svd.singularValues();
    const double lo = sv(sv.size() - 1);
    return lo > 0.0 ? sv(0) / lo : std::numeric_limits<double>::infinity();
}

Eigen::Index closest_to(const Eigen::VectorXcd& vals, double rho) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < vals.size(); ++i)
        if (std::abs(vals(i) - rho) < std::abs(vals(best) - rho)) best = i;
    return best;
}

// Smallest m >= 1 with kappa * q^m <= target, q in [0, 1).
std::size_t decay_index(double kappa, double q, double target) {
    if (kappa <= target || q == 0.0) return 1;
    double guess = std::ceil(std::log(target / kappa) / std::log(q));
    auto m = static_cast<std::size_t>(std::max(1.0, guess));
    while (kappa * std::pow(q, static_cast<double>(m)) > target) ++m;
    while (m > 1 && kappa * std::pow(q, static_cast<double>(m - 1)) <= target) --m;
    return m;
}

double log_binomial(std::size_t t, std::size_t j) {
    return std::lgamma(static_cast<double>(t) + 1.0) - std::lgamma(static_cast<double>(j) + 1.0) -
           std::lgamma(static_cast<double>(t - j) + 1.0);
}

// Schur-form bound on ||R^t|| / rho^t, with R = Q (D + N) Q*.
struct SchurBound {
    double q;  // spectral radius of R over rho
    double nu; // ||N||_F over rho
    std::size_t order;

    double log_ratio(std::size_t t) const {
        double acc = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j <= std::min(t, order - 1); ++j) {
            if ((q == 0.0 && j < t) || (nu == 0.0 && j > 0)) continue;
            const double term = log_binomial(t, j) + static_cast<double>(t - j) * std::log(q) +
                                static_cast<double>(j) * std::log(nu);
            const double hi = std::max(acc, term);
            acc = hi + std::log(std::exp(acc - hi) + std::exp(term - hi));
        }
        return acc;
    }
};

SchurBound schur_bound(const Eigen::MatrixXd& r, double rho) {
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(r.cast<std::complex<double>>());
    const Eigen::MatrixXcd t = schur.matrixT();
    double radius = 0.0;
    for (Eigen::Index i = 0; i < t.rows(); ++i) radius = std::max(radius, std::abs(t(i, i)));
    Eigen::MatrixXcd n = t.triangularView<Eigen::StrictlyUpper>();
    return {radius / rho, n.norm() / rho, static_cast<std::size_t>(r.rows())};
}

} // namespace

JordanConstants jordan_constants(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() == 0) throw ModelError("Jordan constants need a square matrix");
    const PerronResult right = perron(m);
    if (!right.vector || right.root <= 0.0)
        throw ModelError("Jordan constants need an irreducible matrix with a positive Perron root");
    const PerronResult left = perron(m.transpose());
    const double rho = right.root;
    const Eigen::VectorXd v = *right.vector;
    const Eigen::VectorXd w = *left.vector / left.vector->dot(v);

    const auto spectrum = eigenvalues(m);
    std::size_t at_root = 0;
    double mu = 0.0;
    bool skipped = false;
    for (const auto& lambda : spectrum) {
        if (std::abs(lambda - rho) <= kSimpleRootTol) {
            ++at_root;
            if (!skipped) {
                skipped = true;
                continue;
            }
        }
        mu = std::max(mu, std::abs(lambda));
    }
    if (at_root != 1) throw ModelError("non-generic instance: the Perron root is not simple");

    JordanConstants out;
    out.rho = rho;
    out.mu = mu;
    out.c_tilde = 0.5 * v.minCoeff() * w.minCoeff();
    const Eigen::Index k = m.rows();
    if (k == 1) {
        out.c = 1.0;
        out.m = 1;
        return out;
    }

    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, true);
    const Eigen::MatrixXcd vecs = solver.eigenvectors();
    if (condition_number(vecs) <= kDiagonalizableCond) {
        const Eigen::MatrixXcd inv = vecs.inverse();
        const Eigen::Index p = closest_to(solver.eigenvalues(), rho);
        double c = 0.0, kappa = 0.0;
        for (Eigen::Index s = 0; s < k; ++s)
            for (Eigen::Index z = 0; z < k; ++z) {
                double all = 0.0, rest = 0.0;
                for (Eigen::Index i = 0; i < k; ++i) {
                    const double term = std::abs(vecs(s, i)) * std::abs(inv(i, z));
                    all += term;
                    if (i != p) rest += term;
                }
                c = std::max(c, all);
                kappa = std::max(kappa, rest);
            }
        out.c = c;
        out.m = decay_index(kappa, mu / rho, out.c_tilde);
        return out;
    }

    out.diagonalizable = false;
    const SchurBound whole = schur_bound(m, rho);
    for (std::size_t j = 0; j < whole.order; ++j) out.c += std::pow(whole.nu, static_cast<double>(j));

    const SchurBound rest = schur_bound(m - rho * v * w.transpose(), rho);
    const double target = std::log(out.c_tilde);
    // terms decrease once (t+1)/(t+2-k) * q < 1
    std::size_t settle = rest.order;
    while (rest.q > 0.0 && static_cast<double>(settle + 1) / static_cast<double>(settle + 2 - rest.order) * rest.q >= 1.0)
        ++settle;
    std::size_t m_idx = 1;
    for (std::size_t t = 1; t <= settle; ++t)
        if (rest.log_ratio(t) > target) m_idx = t + 1;
    while (rest.log_ratio(m_idx) > target) {
        if (++m_idx > kMaxCertifiedPeriod) throw NumericalError("Schur remainder bound does not decay");
    }
    out.m = m_idx;
    return out;
}

std::size_t smallest_dominance_exponent(std::size_t order, double ratio, double bound, std::size_t m) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ModelError("dominance ratio must lie in (0, 1)");
    if (!(bound > 0.0)) throw ModelError("dominance bound must be positive");
    const double lr = std::log(ratio);
    const double lb = std::log(bound);
    const double k = static_cast<double>(order);
    auto holds = [&](double t) { return k * std::log(t) + t * lr < lb; };

    const double peak = std::max(1.0, -k / lr);
    double top = std::floor(peak);
    if (!holds(top) || !holds(top + 1.0)) {
        // first integer beyond the peak where the decreasing branch drops below the bound
        double lo = top, hi = top + 1.0;
        while (!holds(hi)) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e15) throw NumericalError("no finite dominance horizon");
        }
        while (hi - lo > 1.0) {
            const double mid = std::floor((lo + hi) / 2.0);
            (holds(mid) ? hi : lo) = mid;
        }
        return std::max(m, static_cast<std::size_t>(hi));
    }
    return m;
}

namespace {

struct Restricted {
    Eigen::MatrixXd matrix;
    std::vector<std::size_t> states; // source indices
};

Restricted restricted_matrix(const Mdp& mdp, const StationaryStrategy& sigma) {
    const TransitionMatrix t = induced_matrix(mdp, sigma);
    const auto mask = relevant_states(mdp, sigma);
    Restricted r;
    for (std::size_t s = 0; s < mask.size(); ++s)
        if (mask[s]) r.states.push_back(s);
    const auto k = static_cast<Eigen::Index>(r.states.size());
    r.matrix.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            r.matrix(i, j) = t.p(static_cast<Eigen::Index>(r.states[i]), static_cast<Eigen::Index>(r.states[j]));
    return r;
}

struct SurvivalConstants {
    double c;
    double c_tilde;
    std::size_t m;
};

// Bounds on the survival vector M^t 1 at the given rows, via an eigendecomposition.
SurvivalConstants survival_constants(const Eigen::MatrixXd& m, double rho, const std::vector<Eigen::Index>& rows) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, true);
    const Eigen::MatrixXcd vecs = solver.eigenvectors();
    if (condition_number(vecs) > kDiagonalizableCond)
        throw NumericalError("survival bounds need a diagonalizable matrix");
    const Eigen::VectorXcd g = vecs.partialPivLu().solve(Eigen::VectorXcd::Ones(m.rows()));
    const auto& vals = solver.eigenvalues();
    const Eigen::Index p = closest_to(vals, rho);
    double mu = 0.0;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (i == p) continue;
        if (std::abs(std::abs(vals(i)) - rho) <= kSimpleRootTol)
            throw ModelError("non-generic instance: another eigenvalue shares the Perron modulus");
        mu = std::max(mu, std::abs(vals(i)));
    }
    double c = 0.0, kappa = 0.0, lead = std::numeric_limits<double>::infinity();
    for (Eigen::Index s : rows) {
        double all = 0.0, rest = 0.0;
        for (Eigen::Index i = 0; i < vals.size(); ++i) {
            const double term = std::abs(vecs(s, i) * g(i));
            all += term;
            if (i != p) rest += term;
        }
        c = std::max(c, all);
        kappa = std::max(kappa, rest);
        lead = std::min(lead, (vecs(s, p) * g(p)).real());
    }
    if (!(lead > 0.0)) throw ModelError("the Perron mode does not reach every initial state");
    const double c_tilde = 0.5 * lead;
    return {c, c_tilde, decay_index(kappa, mu / rho, c_tilde)};
}

} // namespace

HorizonCertificate certified_horizon(const Mdp& mdp, const StationaryStrategy& sigma,
                                     const StationaryStrategy& sigma2) {
    const double l1 = lambda2(mdp, sigma).value;
    const double l2 = lambda2(mdp, sigma2).value;
    if (std::abs(l1 - l2) <= kDefaultGapTol) throw ModelError("lambda2 tie: no horizon can be certified");
    const bool reach = mdp.objective() == Objective::Reach;
    if (reach ? l1 > l2 : l1 < l2)
        throw ModelError("the first strategy is not the spectrally better one for this objective");

    // fast: smaller lambda2 (upper bound); slow: larger lambda2 (lower bound)
    const StationaryStrategy& fast = l1 < l2 ? sigma : sigma2;
    const StationaryStrategy& slow = l1 < l2 ? sigma2 : sigma;
    const double rho_fast = std::min(l1, l2);
    const double rho_slow = std::max(l1, l2);

    HorizonCertificate cert;
    cert.sigma = sigma;
    cert.sigma2 = sigma2;
    cert.lambda2_pair = {l1, l2};

    if (validate(mdp).positivity) {
        const JordanConstants jf = jordan_constants(reduced_matrix(induced_matrix(mdp, fast)));
        const JordanConstants js = jordan_constants(reduced_matrix(induced_matrix(mdp, slow)));
        cert.c = jf.c;
        cert.c_tilde = js.c_tilde;
        cert.m = js.m;
        cert.diagonalizable = jf.diagonalizable && js.diagonalizable;
        cert.entrywise = true;
        cert.verified_states = mdp.non_target_states();
    } else {
        const auto roots = root_states(mdp);
        auto rows_of = [&](const Restricted& r) {
            std::vector<Eigen::Index> rows;
            for (std::size_t s : roots) {
                auto it = std::find(r.states.begin(), r.states.end(), s);
                rows.push_back(it - r.states.begin());
            }
            return rows;
        };
        const Restricted rf = restricted_matrix(mdp, fast);
        const Restricted rs = restricted_matrix(mdp, slow);
        const SurvivalConstants sf = survival_constants(rf.matrix, rho_fast, rows_of(rf));
        const SurvivalConstants ss = survival_constants(rs.matrix, rho_slow, rows_of(rs));
        cert.c = sf.c;
        cert.c_tilde = ss.c_tilde;
        cert.m = ss.m;
        cert.entrywise = false;
        cert.verified_states = roots;
    }

    const std::size_t exponent =
        smallest_dominance_exponent(mdp.state_count(), rho_fast / rho_slow, cert.c_tilde / cert.c, cert.m);
    // bounds are on t-1 transitions at period t
    cert.T = exponent + 1;
    if (cert.T + kVerifyPeriods > kMaxCertifiedPeriod)
        throw NumericalError("certified horizon " + std::to_string(cert.T) + " is too large to verify");
    cert.verified_window = {cert.T, cert.T + kVerifyPeriods};

    for (std::size_t s0 : cert.verified_states) {
        const ReachCurve a = reach_curve(mdp, sigma, s0, cert.T + kVerifyPeriods);
        const ReachCurve b = reach_curve(mdp, sigma2, s0, cert.T + kVerifyPeriods);
        for (std::size_t t = cert.T; t <= cert.T + kVerifyPeriods; ++t)
            if (!(relative_advantage(a, b, t, mdp.objective()) > 0.0))
                throw NumericalError("certificate with T = " + std::to_string(cert.T) + " fails at period " +
                                     std::to_string(t) + " from state '" + mdp.state_name(s0) + "'");
    }
    return cert;
}

std::optional<std::size_t> empirical_crossover(const ReachCurve& a, const ReachCurve& b, Objective objective) {
    if (a.initial() != b.initial()) throw ModelError("compared curves start from different states");
    if (a.horizon() != b.horizon()) throw ModelError("compared curves have different horizons");
    std::size_t t = a.horizon();
    if (t == 0 || !(relative_advantage(a, b, t, objective) > 0.0)) return std::nullopt;
    while (t > 1 && relative_advantage(a, b, t - 1, objective) > 0.0) --t;
    return t;
}

} // namespace overtaking
