// dynamics.hpp
// Spectra of H = K(2 - T - T^dag) restricted to verified paths, time
// evolution e^{-iHt} on a truncated window, and the sum-over-paths
// amplitude built from repeated sparse application of H.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qtm/paths.hpp"
#include "qtm/step_operator.hpp"

namespace qtm {

// The restriction of H to a distinct path: real symmetric tridiagonal with
// diagonal 2K and bond couplings -K*d_k; cyclic paths add a corner coupling.
struct PathHamiltonian {
    int n = 0;
    double K = 1.0;
    bool cyclic = false;
    std::vector<double> diag;     // all 2K
    std::vector<double> offdiag;  // -K*d_k, size n-1 (plus corner() if cyclic)
    double corner = 0.0;          // cyclic wrap coupling, 0 for open walls
    bool all_weights_one = true;
};

inline PathHamiltonian path_hamiltonian(const PathRecord& path, double K) {
    if (!path.verified)
        throw std::invalid_argument("path_hamiltonian requires a DPG-verified path");
    if (K <= 0.0) throw std::invalid_argument("K must be > 0");
    PathHamiltonian h;
    h.n = static_cast<int>(path.length());
    h.K = K;
    h.cyclic = path.cyclic_period.has_value();
    h.diag.assign(h.n, 2.0 * K);
    for (int k = 0; k + 1 < h.n; ++k) {
        const double d = path.weight(path.m_min + k);
        h.offdiag.push_back(-K * d);
        if (std::abs(d - 1.0) > 1e-9) h.all_weights_one = false;
    }
    if (h.cyclic) {
        const double d = path.weight(path.m_max);
        h.corner = -K * d;
        if (std::abs(d - 1.0) > 1e-9) h.all_weights_one = false;
    }
    return h;
}

inline Eigen::MatrixXd to_dense(const PathHamiltonian& h) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(h.n, h.n);
    for (int i = 0; i < h.n; ++i) m(i, i) = h.diag[i];
    for (int i = 0; i + 1 < h.n; ++i) {
        m(i, i + 1) = h.offdiag[i];
        m(i + 1, i) = h.offdiag[i];
    }
    if (h.cyclic && h.n > 2) {
        m(0, h.n - 1) += h.corner;
        m(h.n - 1, 0) += h.corner;
    } else if (h.cyclic && h.n == 2) {
        // period-2 cycle: the wrap bond coincides with the single off-diagonal
        m(0, 1) += h.corner;
        m(1, 0) += h.corner;
    }
    return m;
}

struct EigenSystem {
    std::vector<double> numeric_eigenvalues;            // ascending
    Eigen::MatrixXd eigenvectors;                       // columns, path-state basis
    std::vector<double> dirichlet_formula_eigenvalues;  // 2K(1-cos(pi m/(n+1)))
    std::vector<double> reported_formula_eigenvalues;   // k = 2 pi m/(b-a) quantization
    bool formulas_emitted = false;
    bool reported_formula_matches = false;
    double dirichlet_formula_max_deviation = 0.0;
    std::string note;
};

// Numeric diagonalization of the path Hamiltonian (the oracle of record),
// with closed-form candidate spectra reported alongside when all weights
// are 1. The finite-path quantization k = 2 pi m/(b-a) with m = 1..b-a-1
// yields one level too few for a path of b-a+1 states; the standard
// Dirichlet quantization k = pi m/(n+1) is what the tridiagonal spectrum
// actually gives, and the comparison says which one agrees.
inline EigenSystem eigensystem(const PathHamiltonian& h) {
    EigenSystem out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_dense(h));
    out.eigenvectors = solver.eigenvectors();
    for (int i = 0; i < h.n; ++i) out.numeric_eigenvalues.push_back(solver.eigenvalues()(i));

    if (!h.all_weights_one) {
        out.note = "weights differ from 1 (potential barriers present); no closed form emitted";
        return out;
    }
    out.formulas_emitted = true;
    if (h.cyclic) {
        for (int m = 0; m < h.n; ++m)
            out.dirichlet_formula_eigenvalues.push_back(
                2.0 * h.K * (1.0 - std::cos(2.0 * std::numbers::pi * m / h.n)));
        out.reported_formula_eigenvalues = out.dirichlet_formula_eigenvalues;
        out.reported_formula_matches = true;
        out.note = "cyclic path: E = 2K(1 - cos(2 pi m/n)), m = 0..n-1";
    } else {
        for (int m = 1; m <= h.n; ++m)
            out.dirichlet_formula_eigenvalues.push_back(
                2.0 * h.K * (1.0 - std::cos(std::numbers::pi * m / (h.n + 1))));
        // a path of n states spans lattice interval b-a = n-1
        const int span = h.n - 1;
        for (int m = 1; m <= span - 1; ++m)
            out.reported_formula_eigenvalues.push_back(
                2.0 * h.K * (1.0 - std::cos(2.0 * std::numbers::pi * m / span)));
        out.reported_formula_matches =
            out.reported_formula_eigenvalues.size() == out.numeric_eigenvalues.size();
        if (!out.reported_formula_matches)
            out.note = "finite-path quantization k = 2 pi m/(b-a) yields " +
                       std::to_string(out.reported_formula_eigenvalues.size()) +
                       " levels for a path of " + std::to_string(h.n) +
                       " states; the Dirichlet quantization k = pi m/(n+1) matches the "
                       "numeric spectrum";
    }
    std::vector<double> sorted = out.dirichlet_formula_eigenvalues;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        out.dirichlet_formula_max_deviation = std::max(
            out.dirichlet_formula_max_deviation,
            std::abs(sorted[i] - out.numeric_eigenvalues[i]));
    return out;
}

struct WindowSpec {
    std::optional<int> depth;          // breadth-first closure depth under T, T^dag
    std::size_t max_dimension = 20000;
};

struct EvolveResult {
    WaveState state;
    int window_dimension = 0;
    int depth_used = 0;
    bool leakage_warning = false;
    double boundary_mass = 0.0;  // evolved probability sitting on the window edge
};

namespace detail {

// Basis vectors reachable from the support of psi0 under up to `depth`
// applications of T or T^dag, with the closure distance of each.
inline std::map<BasisVector, int> window_closure(const StepOperator& T, const WaveState& psi0,
                                                 int depth, std::size_t max_dimension) {
    std::map<BasisVector, int> seen;
    std::deque<std::pair<BasisVector, int>> frontier;
    for (const auto& [b, amp] : psi0.terms()) {
        seen.emplace(b, 0);
        frontier.emplace_back(b, 0);
    }
    while (!frontier.empty()) {
        auto [b, dist] = frontier.front();
        frontier.pop_front();
        if (dist >= depth) continue;
        WaveState unit = WaveState::basis(T.head_dim(), T.qudit_dim(), b);
        for (const WaveState& image : {apply(T, unit), apply_adjoint(T, unit)})
            for (const auto& [bp, amp] : image.terms())
                if (seen.emplace(bp, dist + 1).second) {
                    if (seen.size() > max_dimension)
                        throw std::runtime_error(
                            "evolution window exceeded " + std::to_string(max_dimension) +
                            " basis states; reduce the depth or enlarge the cap");
                    frontier.emplace_back(bp, dist + 1);
                }
    }
    return seen;
}

}  // namespace detail

// e^{-iHt} psi0 by spectral decomposition of H on the subspace reachable
// from psi0 within the window. Amplitude produced outside the window is
// dropped and reported as boundary mass.
inline EvolveResult evolve(const StepOperator& T, double K, const WaveState& psi0, double t,
                           const WindowSpec& window = {}) {
    T.check_compatible(psi0);
    if (K <= 0.0) throw std::invalid_argument("K must be > 0");
    EvolveResult result{T.zero_state(psi0.prune_eps())};
    if (psi0.empty() || t == 0.0) {
        result.state = psi0;
        return result;
    }

    const int depth =
        window.depth.value_or(2 * static_cast<int>(std::ceil(K * std::abs(t))) + 20);
    result.depth_used = depth;
    const std::map<BasisVector, int> closure =
        detail::window_closure(T, psi0, depth, window.max_dimension);
    const int dim = static_cast<int>(closure.size());
    result.window_dimension = dim;
    std::vector<BasisVector> basis;
    std::vector<bool> on_edge;  // discovered at the closure horizon
    basis.reserve(closure.size());
    std::map<BasisVector, int> index;
    for (const auto& [b, dist] : closure) {
        index[b] = static_cast<int>(basis.size());
        basis.push_back(b);
        on_edge.push_back(dist >= depth);
    }

    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
    for (int col = 0; col < dim; ++col) {
        WaveState unit = WaveState::basis(T.head_dim(), T.qudit_dim(), basis[col]);
        WaveState column = hamiltonian_apply(T, K, unit);
        for (const auto& [bp, amp] : column.terms()) {
            auto it = index.find(bp);
            if (it != index.end()) H(it->second, col) = amp;
        }
    }

    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    for (const auto& [b, amp] : psi0.terms()) v(index.at(b)) = amp;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H);
    Eigen::VectorXcd coeffs = solver.eigenvectors().adjoint() * v;
    for (int i = 0; i < dim; ++i)
        coeffs(i) *= std::exp(Complex(0.0, -solver.eigenvalues()(i) * t));
    Eigen::VectorXcd evolved = solver.eigenvectors() * coeffs;

    for (int i = 0; i < dim; ++i) {
        if (on_edge[i]) result.boundary_mass += std::norm(evolved(i));
        if (std::abs(evolved(i)) > psi0.prune_eps()) result.state.add(basis[i], evolved(i));
    }
    result.state.prune();

    // the truncated H is still Hermitian, so the norm is conserved even when
    // the window is too small; the honest leakage signal is probability
    // reaching the closure horizon
    const double norm_defect = std::abs(result.state.norm() - psi0.norm());
    result.leakage_warning = norm_defect > 1e-10 || result.boundary_mass > 1e-12;
    return result;
}

struct PathEvolveResult {
    WaveState state;
    std::vector<Complex> coefficients;  // evolved expansion in the path-state basis
    double residual_mass = 0.0;         // probability of psi0 outside the path span
};

// e^{-iHt} psi0 for a state inside the span of a verified path, computed
// exactly with the tridiagonal path Hamiltonian. Because H maps the path
// span to itself, no window truncation is involved.
inline PathEvolveResult evolve_on_path(const PathRecord& path, double K, const WaveState& psi0,
                                       double t) {
    const PathHamiltonian h = path_hamiltonian(path, K);
    const EigenSystem eig = eigensystem(h);

    Eigen::VectorXcd c(h.n);
    double inside = 0.0;
    for (int k = 0; k < h.n; ++k) {
        c(k) = inner_product(path.state(path.m_min + k), psi0);
        inside += std::norm(c(k));
    }
    PathEvolveResult out{WaveState(psi0.head_dim(), psi0.qudit_dim(), psi0.prune_eps())};
    out.residual_mass = std::max(0.0, psi0.norm() * psi0.norm() - inside);

    Eigen::VectorXcd modal = eig.eigenvectors.transpose().cast<Complex>() * c;
    for (int i = 0; i < h.n; ++i)
        modal(i) *= std::exp(Complex(0.0, -eig.numeric_eigenvalues[i] * t));
    const Eigen::VectorXcd evolved = eig.eigenvectors.cast<Complex>() * modal;

    std::vector<std::pair<Complex, WaveState>> combo;
    for (int k = 0; k < h.n; ++k) {
        out.coefficients.push_back(evolved(k));
        combo.emplace_back(evolved(k), path.state(path.m_min + k));
    }
    out.state = superpose(combo);
    return out;
}

// <b'| H^n |b> by repeated sparse application (exact, no window).
inline Complex h_power_element(const StepOperator& T, double K, const WaveState& bra,
                               const WaveState& ket, int n) {
    WaveState cur = ket;
    for (int k = 0; k < n; ++k) cur = hamiltonian_apply(T, K, cur);
    return inner_product(bra, cur);
}

// Truncated sum-over-paths amplitude
// sum_{n <= n_max} (-it)^n / n! <b'| H^n |b>.
inline Complex pathsum_amplitude(const StepOperator& T, double K, const WaveState& from,
                                 const WaveState& to, double t, int n_max) {
    if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    Complex total(0.0);
    Complex prefactor(1.0);  // (-it)^n / n!
    WaveState cur = from;
    for (int n = 0; n <= n_max; ++n) {
        total += prefactor * inner_product(to, cur);
        if (n == n_max) break;
        cur = hamiltonian_apply(T, K, cur);
        prefactor *= Complex(0.0, -t) / static_cast<double>(n + 1);
    }
    return total;
}

inline Complex pathsum_amplitude(const StepOperator& T, double K, const BasisVector& from,
                                 const BasisVector& to, double t, int n_max) {
    return pathsum_amplitude(T, K, WaveState::basis(T.head_dim(), T.qudit_dim(), from),
                             WaveState::basis(T.head_dim(), T.qudit_dim(), to), t, n_max);
}

}  // namespace qtm
