// step_operator.hpp
// The step operator T as a finite sum of elementary terms and its exact
// sparse application. Each term carries a positive weight gamma, a head
// shift delta in {-1, 0, +1}, an LxL matrix acting on the head level and
// a dxd matrix acting on the qudit at the pre-shift head site. The
// Hamiltonian H = K(2 - T - T^dag) is applied through the same machinery.

#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qtm/state.hpp"

namespace qtm {

using Matrix = std::vector<std::vector<Complex>>;  // [row][col]

inline Matrix identity_matrix(int n) {
    Matrix m(n, std::vector<Complex>(n, Complex(0.0)));
    for (int i = 0; i < n; ++i) m[i][i] = Complex(1.0);
    return m;
}

inline Matrix zero_matrix(int rows, int cols) {
    return Matrix(rows, std::vector<Complex>(cols, Complex(0.0)));
}

// One elementary step: gamma * head_matrix (x) shift-by-delta (x) qubit_matrix,
// the qubit matrix acting at the head site before the shift.
struct StepTerm {
    double gamma = 1.0;
    int delta = 0;
    Matrix head_matrix;   // entry [l'][l]
    Matrix qubit_matrix;  // entry [s'][s]
    std::string label;    // optional, e.g. a term number for reports

    StepTerm(double g, int dl, Matrix head, Matrix qubit, std::string name = {})
        : gamma(g), delta(dl), head_matrix(std::move(head)), qubit_matrix(std::move(qubit)),
          label(std::move(name)) {
        if (gamma <= 0.0) throw std::invalid_argument("term gamma must be > 0");
        if (delta < -1 || delta > 1) throw std::invalid_argument("term delta must be in {-1,0,+1}");
    }
};

class StepOperator {
public:
    StepOperator(std::string name, int head_dim, int qudit_dim, std::vector<StepTerm> terms)
        : name_(std::move(name)), L_(head_dim), d_(qudit_dim), terms_(std::move(terms)) {
        if (L_ < 1 || d_ < 2) throw DimensionError("invalid machine dimensions");
        for (const auto& t : terms_) {
            if (t.head_matrix.size() != static_cast<std::size_t>(L_))
                throw DimensionError("head matrix of term '" + t.label + "' is not " +
                                     std::to_string(L_) + "x" + std::to_string(L_));
            for (const auto& row : t.head_matrix)
                if (row.size() != static_cast<std::size_t>(L_))
                    throw DimensionError("head matrix of term '" + t.label + "' is ragged");
            if (t.qubit_matrix.size() != static_cast<std::size_t>(d_))
                throw DimensionError("qubit matrix of term '" + t.label + "' is not " +
                                     std::to_string(d_) + "x" + std::to_string(d_));
            for (const auto& row : t.qubit_matrix)
                if (row.size() != static_cast<std::size_t>(d_))
                    throw DimensionError("qubit matrix of term '" + t.label + "' is ragged");
        }
    }

    const std::string& name() const { return name_; }
    int head_dim() const { return L_; }
    int qudit_dim() const { return d_; }
    const std::vector<StepTerm>& terms() const { return terms_; }

    void check_compatible(const WaveState& psi) const {
        if (psi.head_dim() != L_ || psi.qudit_dim() != d_)
            throw DimensionError("state dimensions (L=" + std::to_string(psi.head_dim()) + ",d=" +
                                 std::to_string(psi.qudit_dim()) + ") do not match machine '" +
                                 name_ + "' (L=" + std::to_string(L_) + ",d=" +
                                 std::to_string(d_) + ")");
    }

    WaveState zero_state(double prune_eps = kDefaultPruneEps) const {
        return WaveState(L_, d_, prune_eps);
    }

private:
    std::string name_;
    int L_;
    int d_;
    std::vector<StepTerm> terms_;
};

// T|psi>. Each basis component |l, j, s> receives, per term,
// gamma * head[l'][l] * qubit[s'][s(j)] on |l', j+delta, s with site j := s'>.
inline WaveState apply(const StepOperator& T, const WaveState& psi) {
    T.check_compatible(psi);
    WaveState out = T.zero_state(psi.prune_eps());
    for (const auto& [b, amp] : psi.terms()) {
        const int s = b.lattice.level_at(b.head_pos);
        for (const auto& term : T.terms()) {
            for (int sp = 0; sp < T.qudit_dim(); ++sp) {
                const Complex q = term.qubit_matrix[sp][s];
                if (q == Complex(0.0)) continue;
                const QuditLattice lat = b.lattice.with_level(b.head_pos, sp);
                for (int lp = 0; lp < T.head_dim(); ++lp) {
                    const Complex h = term.head_matrix[lp][b.head_level];
                    if (h == Complex(0.0)) continue;
                    out.add(BasisVector(lp, b.head_pos + term.delta, lat), term.gamma * h * q * amp);
                }
            }
        }
    }
    out.prune();
    return out;
}

// T^dag|phi>. A component |l', j', s'> receives, per term,
// conj(gamma * head[l'][l] * qubit[s'(j'-delta)][s]) on
// |l, j'-delta, s' with site (j'-delta) := s>.
inline WaveState apply_adjoint(const StepOperator& T, const WaveState& phi) {
    T.check_compatible(phi);
    WaveState out = T.zero_state(phi.prune_eps());
    for (const auto& [b, amp] : phi.terms()) {
        for (const auto& term : T.terms()) {
            const std::int64_t src_site = b.head_pos - term.delta;
            const int sp = b.lattice.level_at(src_site);
            for (int s = 0; s < T.qudit_dim(); ++s) {
                const Complex q = term.qubit_matrix[sp][s];
                if (q == Complex(0.0)) continue;
                const QuditLattice lat = b.lattice.with_level(src_site, s);
                for (int l = 0; l < T.head_dim(); ++l) {
                    const Complex h = term.head_matrix[b.head_level][l];
                    if (h == Complex(0.0)) continue;
                    out.add(BasisVector(l, src_site, lat),
                            term.gamma * std::conj(h) * std::conj(q) * amp);
                }
            }
        }
    }
    out.prune();
    return out;
}

// K(2 - T - T^dag)|psi>.
inline WaveState hamiltonian_apply(const StepOperator& T, double K, const WaveState& psi) {
    if (K <= 0.0) throw std::invalid_argument("K must be > 0");
    return superpose({{Complex(2.0 * K), psi},
                      {Complex(-K), apply(T, psi)},
                      {Complex(-K), apply_adjoint(T, psi)}},
                     psi.prune_eps());
}

// The finite matrix of T at fixed head position 0, exploiting homogeneity.
// Rows are (l', delta, s'), columns (l, s).
struct ReducedMatrix {
    int L = 0;
    int d = 0;
    // entry(l', delta, s', l, s): sum over terms with that delta of
    // gamma * head[l'][l] * qubit[s'][s]
    std::vector<Complex> data;  // row-major, rows L*3*d, cols L*d

    std::size_t row_index(int lp, int delta, int sp) const {
        return (static_cast<std::size_t>(lp) * 3 + (delta + 1)) * d + sp;
    }
    std::size_t col_index(int l, int s) const { return static_cast<std::size_t>(l) * d + s; }
    std::size_t rows() const { return static_cast<std::size_t>(L) * 3 * d; }
    std::size_t cols() const { return static_cast<std::size_t>(L) * d; }

    Complex& at(int lp, int delta, int sp, int l, int s) {
        return data[row_index(lp, delta, sp) * cols() + col_index(l, s)];
    }
    Complex at(int lp, int delta, int sp, int l, int s) const {
        return data[row_index(lp, delta, sp) * cols() + col_index(l, s)];
    }
};

inline ReducedMatrix reduced_matrix(const StepOperator& T) {
    ReducedMatrix m;
    m.L = T.head_dim();
    m.d = T.qudit_dim();
    m.data.assign(m.rows() * m.cols(), Complex(0.0));
    for (const auto& term : T.terms())
        for (int lp = 0; lp < m.L; ++lp)
            for (int l = 0; l < m.L; ++l)
                for (int sp = 0; sp < m.d; ++sp)
                    for (int s = 0; s < m.d; ++s)
                        m.at(lp, term.delta, sp, l, s) +=
                            term.gamma * term.head_matrix[lp][l] * term.qubit_matrix[sp][s];
    return m;
}

constexpr double kEpsZero = 1e-12;

struct DpgBasisWitness {
    bool row = false;  // offending line is an output row (else an input column)
    int l = 0;
    int s = 0;
    std::vector<std::string> entries;

    std::string describe() const {
        std::ostringstream os;
        os << (row ? "output (l'=" : "input (l=") << l << ", s" << (row ? "'=" : "=") << s
           << ") has " << entries.size() << " nonzero matrix elements:";
        for (const auto& e : entries) os << ' ' << e;
        return os.str();
    }
};

struct DpgBasisDecision {
    bool distinct_path_generating = false;
    std::optional<DpgBasisWitness> witness;
};

// Decides whether T is distinct path generating in the computation basis:
// every row and column of the reduced matrix must have at most one entry
// with modulus above eps. By homogeneity, the row test for an output state
// (l', 0, s') collects inputs (l, -delta, s) over all delta.
inline DpgBasisDecision check_dpg_computation_basis(const StepOperator& T,
                                                    double eps = kEpsZero) {
    const ReducedMatrix m = reduced_matrix(T);
    DpgBasisDecision out;
    // columns: one input basis state feeds at most one output
    for (int l = 0; l < m.L; ++l)
        for (int s = 0; s < m.d; ++s) {
            std::vector<std::string> hits;
            for (int lp = 0; lp < m.L; ++lp)
                for (int delta = -1; delta <= 1; ++delta)
                    for (int sp = 0; sp < m.d; ++sp)
                        if (std::abs(m.at(lp, delta, sp, l, s)) > eps) {
                            std::ostringstream os;
                            os << "(l'=" << lp << ",delta=" << delta << ",s'=" << sp << ")";
                            hits.push_back(os.str());
                        }
            if (hits.size() > 1) {
                out.witness = DpgBasisWitness{false, l, s, std::move(hits)};
                return out;
            }
        }
    // rows: one output basis state is fed by at most one input
    for (int lp = 0; lp < m.L; ++lp)
        for (int sp = 0; sp < m.d; ++sp) {
            std::vector<std::string> hits;
            for (int l = 0; l < m.L; ++l)
                for (int delta = -1; delta <= 1; ++delta)
                    for (int s = 0; s < m.d; ++s)
                        if (std::abs(m.at(lp, delta, sp, l, s)) > eps) {
                            std::ostringstream os;
                            os << "(l=" << l << ",delta=" << delta << ",s=" << s << ")";
                            hits.push_back(os.str());
                        }
            if (hits.size() > 1) {
                out.witness = DpgBasisWitness{true, lp, sp, std::move(hits)};
                return out;
            }
        }
    out.distinct_path_generating = true;
    return out;
}

struct HomogeneityReport {
    bool ok = true;
    int samples = 0;
    std::string witness;
};

// Regression guard over random basis vectors: the application must change
// the lattice only at the head site, move the head at most one site, and
// commute with lattice translation. `apply_fn` is injectable so a corrupted
// application can be exercised in tests.
inline HomogeneityReport check_homogeneity_locality(
    const StepOperator& T, int samples, unsigned seed = 12345,
    const std::function<WaveState(const StepOperator&, const WaveState&)>& apply_fn = apply) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    HomogeneityReport report;
    report.samples = samples;
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> level_dist(0, T.head_dim() - 1);
    std::uniform_int_distribution<int> qudit_dist(0, T.qudit_dim() - 1);
    std::uniform_int_distribution<std::int64_t> pos_dist(-6, 6);
    std::uniform_int_distribution<int> count_dist(0, 3);
    std::uniform_int_distribution<std::int64_t> shift_dist(-50, 50);

    for (int i = 0; i < samples; ++i) {
        QuditLattice lat(T.qudit_dim());
        const int sites = count_dist(rng);
        for (int k = 0; k < sites; ++k) lat = lat.with_level(pos_dist(rng), qudit_dist(rng));
        BasisVector b(level_dist(rng), pos_dist(rng), lat);
        WaveState psi = WaveState::basis(T.head_dim(), T.qudit_dim(), b);
        WaveState image = apply_fn(T, psi);
        for (const auto& [bp, amp] : image.terms()) {
            if (std::llabs(bp.head_pos - b.head_pos) > 1) {
                report.ok = false;
                report.witness = "head moved by more than one site (sample " + std::to_string(i) +
                                 ", from " + std::to_string(b.head_pos) + " to " +
                                 std::to_string(bp.head_pos) + ")";
                return report;
            }
            for (const auto& [site, lvl] : bp.lattice.entries())
                if (site != b.head_pos && lvl != b.lattice.level_at(site)) {
                    report.ok = false;
                    report.witness = "lattice changed away from the head (sample " +
                                     std::to_string(i) + ", site " + std::to_string(site) + ")";
                    return report;
                }
            for (const auto& [site, lvl] : b.lattice.entries())
                if (site != b.head_pos && bp.lattice.level_at(site) != lvl) {
                    report.ok = false;
                    report.witness = "lattice entry erased away from the head (sample " +
                                     std::to_string(i) + ", site " + std::to_string(site) + ")";
                    return report;
                }
        }
        // translation invariance: apply(T, b+k) == apply(T, b)+k exactly
        const std::int64_t k = shift_dist(rng);
        WaveState shifted = apply_fn(T, psi.translated(k));
        WaveState expected = image.translated(k);
        if (shifted.size() != expected.size()) {
            report.ok = false;
            report.witness = "translated image has different support (sample " +
                             std::to_string(i) + ")";
            return report;
        }
        for (const auto& [bp, amp] : expected.terms())
            if (shifted.amplitude(bp) != amp) {
                report.ok = false;
                report.witness = "translated amplitudes differ (sample " + std::to_string(i) + ")";
                return report;
            }
    }
    return report;
}

struct TermActivityReport {
    // per component: indices of terms with a nonzero contribution
    std::vector<std::pair<BasisVector, std::vector<std::size_t>>> per_component;
    std::size_t max_active = 0;
    std::optional<BasisVector> witness;  // a component reaching max_active
};

// Which terms act on each basis component of psi. The add-1 machine is
// built so at most one term is active on any reachable state.
inline TermActivityReport term_activity(const StepOperator& T, const WaveState& psi,
                                        double eps = kEpsZero) {
    T.check_compatible(psi);
    TermActivityReport report;
    for (const auto& [b, amp] : psi.terms()) {
        const int s = b.lattice.level_at(b.head_pos);
        std::vector<std::size_t> active;
        for (std::size_t t = 0; t < T.terms().size(); ++t) {
            const auto& term = T.terms()[t];
            double weight = 0.0;
            for (int lp = 0; lp < T.head_dim(); ++lp)
                for (int sp = 0; sp < T.qudit_dim(); ++sp)
                    weight += std::abs(term.head_matrix[lp][b.head_level] *
                                       term.qubit_matrix[sp][s]);
            if (term.gamma * weight > eps) active.push_back(t);
        }
        if (active.size() > report.max_active) {
            report.max_active = active.size();
            report.witness = b;
        }
        report.per_component.emplace_back(b, std::move(active));
    }
    return report;
}

}  // namespace qtm
