#include "overtaking/spectral.hpp"

#include "overtaking/detail/graph.hpp"
#include "overtaking/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace overtaking {

Eigen::MatrixXd reduced_matrix(const TransitionMatrix& t) {
    const Eigen::Index n = t.p.rows();
    const auto tg = static_cast<Eigen::Index>(t.target);
    Eigen::MatrixXd r(n - 1, n - 1);
    for (Eigen::Index i = 0, ri = 0; i < n; ++i) {
        if (i == tg) continue;
        for (Eigen::Index j = 0, rj = 0; j < n; ++j) {
            if (j == tg) continue;
            r(ri, rj++) = t.p(i, j);
        }
        ++ri;
    }
    return r;
}

namespace {

double inf_norm(const Eigen::MatrixXd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

} // namespace

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ModelError("eigenvalues need a square matrix");
    if (!m.allFinite()) throw ModelError("matrix has non-finite entries");
    if (m.size() == 0) return {};

    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, true);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "eigensolver did not converge; partial eigenvalues:";
        for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) msg << ' ' << solver.eigenvalues()(i);
        throw NumericalError(msg.str());
    }
    const double norm = inf_norm(m);
    const Eigen::MatrixXcd mc = m.cast<std::complex<double>>();
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        const Eigen::VectorXcd v = vecs.col(i);
        const double residual = (mc * v - vals(i) * v).norm();
        if (residual > 1e-10 * norm * v.norm() + 1e-300)
            throw NumericalError("eigenpair residual " + std::to_string(residual) + " exceeds tolerance");
    }

    std::vector<std::complex<double>> out(vals.data(), vals.data() + vals.size());
    std::sort(out.begin(), out.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
    const double tol = 1e-10 * std::max(1.0, norm);
    for (auto first = out.begin(); first != out.end();) {
        const double mod = std::abs(*first);
        auto last = std::find_if(first, out.end(), [&](auto z) { return mod - std::abs(z) > tol; });
        std::sort(first, last, [&](auto a, auto b) {
            const auto ka = std::llround(a.real() / tol), kb = std::llround(b.real() / tol);
            if (ka != kb) return ka > kb;
            return a.imag() > b.imag();
        });
        first = last;
    }
    return out;
}

namespace {

constexpr std::size_t kPowerIterationCap = 1'000'000;
constexpr double kPerronAgreement = 1e-8;

struct BlockRoot {
    double root;
    Eigen::VectorXd vector;
};

// Irreducible block of order >= 2: power iteration on B + I, which is primitive.
BlockRoot irreducible_root(const Eigen::MatrixXd& b) {
    const Eigen::Index k = b.rows();
    const Eigen::MatrixXd s = b + Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd x = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double best_lo = 0.0, best_hi = hi;
    std::size_t since_best = 0;
    for (std::size_t it = 0; it < kPowerIterationCap && since_best < 200; ++it) {
        const Eigen::VectorXd y = s * x;
        const Eigen::ArrayXd ratio = y.array() / x.array();
        lo = ratio.minCoeff();
        hi = ratio.maxCoeff();
        x = y / y.sum();
        if (hi - lo < best_hi - best_lo) {
            best_lo = lo;
            best_hi = hi;
            since_best = 0;
        } else {
            ++since_best; // rounding floor reached
        }
        if (hi - lo <= 1e-14 * hi) break;
    }
    return {0.5 * (best_lo + best_hi) - 1.0, x};
}

double max_modulus(const Eigen::MatrixXd& m) {
    const auto vals = eigenvalues(m);
    return vals.empty() ? 0.0 : std::abs(vals.front());
}

} // namespace

PerronResult perron(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() == 0) throw ModelError("Perron root needs a nonempty square matrix");
    if (!m.allFinite() || (m.array() < 0.0).any()) throw ModelError("Perron root needs a nonnegative matrix");

    const auto comps = detail::strongly_connected_components(detail::support_graph(m));
    PerronResult result;
    for (const auto& comp : comps) {
        const auto k = static_cast<Eigen::Index>(comp.size());
        double root = 0.0;
        if (k == 1) {
            const auto i = static_cast<Eigen::Index>(comp[0]);
            root = m(i, i);
            if (comps.size() == 1) result.vector = Eigen::VectorXd::Ones(1);
        } else {
            Eigen::MatrixXd b(k, k);
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = 0; j < k; ++j)
                    b(i, j) = m(static_cast<Eigen::Index>(comp[i]), static_cast<Eigen::Index>(comp[j]));
            const BlockRoot br = irreducible_root(b);
            const double check = max_modulus(b);
            if (std::abs(br.root - check) > kPerronAgreement)
                throw NumericalError("power iteration (" + std::to_string(br.root) + ") and eigensolver (" +
                                     std::to_string(check) + ") disagree on the Perron root");
            root = br.root;
            if (comps.size() == 1) result.vector = br.vector;
        }
        result.root = std::max(result.root, root);
    }
    return result;
}

std::vector<std::size_t> root_states(const Mdp& mdp) {
    const std::size_t n = mdp.state_count();
    detail::Adjacency g(n);
    for (std::size_t s : mdp.non_target_states())
        for (std::size_t z = 0; z < n; ++z) {
            if (z == mdp.target()) continue;
            for (std::size_t a = 0; a < mdp.action_count(s); ++a)
                if (mdp.prob(s, a, z) > 0.0) {
                    g[s].push_back(z);
                    break;
                }
        }
    const auto comps = detail::strongly_connected_components(g);
    std::vector<std::size_t> comp_of(n);
    for (std::size_t c = 0; c < comps.size(); ++c)
        for (std::size_t v : comps[c]) comp_of[v] = c;
    std::vector<bool> entered(comps.size(), false);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t z : g[s])
            if (comp_of[z] != comp_of[s]) entered[comp_of[z]] = true;
    std::vector<std::size_t> roots;
    for (std::size_t s : mdp.non_target_states())
        if (!entered[comp_of[s]]) roots.push_back(s);
    return roots;
}

std::vector<bool> relevant_states(const Mdp& mdp, const StationaryStrategy& sigma) {
    TransitionMatrix t = induced_matrix(mdp, sigma);
    const auto tg = static_cast<Eigen::Index>(t.target);
    t.p.col(tg).setZero();
    auto mask = detail::reachable_from(detail::support_graph(t.p), root_states(mdp));
    mask[t.target] = false;
    return mask;
}

Lambda2 lambda2(const Mdp& mdp, const StationaryStrategy& sigma) {
    const TransitionMatrix t = induced_matrix(mdp, sigma);
    const auto mask = relevant_states(mdp, sigma);
    std::vector<Eigen::Index> keep;
    for (std::size_t s = 0; s < mask.size(); ++s)
        if (mask[s]) keep.push_back(static_cast<Eigen::Index>(s));
    const auto k = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd r(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) r(i, j) = t.p(keep[i], keep[j]);

    Lambda2 out;
    out.value = k == 0 ? 0.0 : perron_root(r);
    if (validate(mdp).positivity) {
        const auto spectrum = eigenvalues(t.p);
        const double second = spectrum.size() > 1 ? std::abs(spectrum[1]) : 0.0;
        if (std::abs(second - out.value) > kPerronAgreement)
            throw NumericalError("reduced Perron root " + std::to_string(out.value) +
                                 " differs from the second eigenvalue modulus " + std::to_string(second));
        out.full_spectrum = second;
    }
    return out;
}

SpectralOrder spectral_compare(const Mdp& mdp, const StationaryStrategy& sigma, const StationaryStrategy& sigma2,
                               double gap_tol) {
    const double l1 = lambda2(mdp, sigma).value;
    const double l2 = lambda2(mdp, sigma2).value;
    if (std::abs(l1 - l2) <= gap_tol) return SpectralOrder::Tie;
    const bool first_smaller = l1 < l2;
    const bool first_wins = mdp.objective() == Objective::Reach ? first_smaller : !first_smaller;
    return first_wins ? SpectralOrder::First : SpectralOrder::Second;
}

SpectralReport genericity_check(const Mdp& mdp, double gap_tol) {
    SpectralReport report;
    for (auto& sigma : enumerate_pure_stationary(mdp)) {
        SpectralEntry e;
        e.lambda2 = lambda2(mdp, sigma).value;
        e.spectrum = eigenvalues(induced_matrix(mdp, sigma).p);
        e.strategy = std::move(sigma);
        report.entries.push_back(std::move(e));
    }
    const double inf = std::numeric_limits<double>::infinity();
    report.min_gap = inf;
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        auto& ei = report.entries[i];
        ei.gap = inf;
        for (std::size_t j = 0; j < report.entries.size(); ++j)
            if (j != i) ei.gap = std::min(ei.gap, std::abs(ei.lambda2 - report.entries[j].lambda2));
        report.min_gap = std::min(report.min_gap, ei.gap);
    }
    report.generic = report.min_gap > gap_tol;

    const bool reach = mdp.objective() == Objective::Reach;
    for (std::size_t i = 1; i < report.entries.size(); ++i) {
        const double cur = report.entries[i].lambda2;
        const double best = report.entries[report.selected].lambda2;
        if (reach ? cur < best : cur > best) report.selected = i;
    }
    return report;
}

std::pair<StationaryStrategy, SpectralReport> best_pure_stationary(const Mdp& mdp, double gap_tol) {
    SpectralReport report = genericity_check(mdp, gap_tol);
    StationaryStrategy best = report.entries.at(report.selected).strategy;
    return {std::move(best), std::move(report)};
}

std::vector<std::pair<double, double>> mix_one_row_scan(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                        std::size_t grid) {
    if (a.rows() != a.cols() || a.rows() != b.rows() || a.cols() != b.cols() || a.rows() == 0)
        throw ModelError("row mixing needs two square matrices of the same order");
    if (grid < 3) throw ModelError("row mixing scan needs at least 3 grid points");
    std::size_t differing = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        if (a.row(i) != b.row(i)) ++differing;
    if (differing > 1)
        throw ModelError("matrices differ in " + std::to_string(differing) +
                         " rows; the one-row mixing bound does not apply");
    if ((a.array() <= 0.0).any() || (b.array() <= 0.0).any())
        throw ModelError("row mixing needs strictly positive matrices");

    std::vector<std::pair<double, double>> out;
    out.reserve(grid);
    for (std::size_t i = 0; i < grid; ++i) {
        const double alpha = static_cast<double>(i) / static_cast<double>(grid - 1);
        out.emplace_back(alpha, perron_root(alpha * a + (1.0 - alpha) * b));
    }
    return out;
}

} // namespace overtaking
