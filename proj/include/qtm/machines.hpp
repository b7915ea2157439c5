// machines.hpp
// Builders for the example machines and their special states: free head
// motion, the erasure operator, the product-transformation-plus-add-1
// machine, the two interferometer machines (plus the deliberately broken
// variant), and a small cyclic fixture.

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "qtm/state.hpp"
#include "qtm/step_operator.hpp"

namespace qtm {
namespace machines {

inline double unitarity_defect(const Matrix& v) {
    const std::size_t n = v.size();
    double defect = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Complex e(0.0);
            for (std::size_t k = 0; k < n; ++k) e += std::conj(v[k][i]) * v[k][j];
            if (i == j) e -= Complex(1.0);
            defect = std::max(defect, std::abs(e));
        }
    return defect;
}

inline void require_unitary(const Matrix& v, const char* what) {
    if (unitarity_defect(v) > 1e-12)
        throw std::invalid_argument(std::string(what) + " must be unitary");
}

// (sigma_z + sigma_x)/sqrt(2)
inline Matrix hadamard_like_v() {
    const double r = 1.0 / std::numbers::sqrt2;
    return {{Complex(r), Complex(r)}, {Complex(r), Complex(-r)}};
}

namespace detail {

// head matrix for a projector onto head level l
inline Matrix head_projector(int L, int l) {
    Matrix m = zero_matrix(L, L);
    m[l][l] = Complex(1.0);
    return m;
}

// head matrix sending |l> to |l + shift mod L>, restricted to input level l
inline Matrix head_shift_into(int L, int l, int shift) {
    Matrix m = zero_matrix(L, L);
    m[(l + shift % L + L) % L][l] = Complex(1.0);
    return m;
}

// qubit matrix: project onto level s then set level s'
inline Matrix qubit_set(int d, int s_in, int s_out) {
    Matrix m = zero_matrix(d, d);
    m[s_out][s_in] = Complex(1.0);
    return m;
}

// expand a 2x2 unitary to d levels acting on {0,1}, identity elsewhere
inline Matrix expand_two_level(const Matrix& v, int d) {
    Matrix m = identity_matrix(d);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m[i][j] = v[i][j];
    return m;
}

// column restriction: M * P_s (keep only input column s)
inline Matrix project_input(const Matrix& m, int s) {
    Matrix out = zero_matrix(static_cast<int>(m.size()), static_cast<int>(m.size()));
    for (std::size_t r = 0; r < m.size(); ++r) out[r][s] = m[r][s];
    return out;
}

// row restriction: P_s * M (keep only output row s)
inline Matrix project_output(const Matrix& m, int s) {
    Matrix out = zero_matrix(static_cast<int>(m.size()), static_cast<int>(m.size()));
    for (std::size_t c = 0; c < m.size(); ++c) out[s][c] = m[s][c];
    return out;
}

inline Matrix adjoint(const Matrix& m) {
    Matrix out = zero_matrix(static_cast<int>(m.size()), static_cast<int>(m.size()));
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < m.size(); ++c) out[c][r] = std::conj(m[r][c]);
    return out;
}

}  // namespace detail

// Free head motion: a single identity term shifting the head right.
inline StepOperator free_motion(int qudit_dim = 2) {
    return StepOperator("free", 1, qudit_dim,
                        {StepTerm(1.0, +1, identity_matrix(1), identity_matrix(qudit_dim), "1")});
}

// The erasure operator: (sigma_x P_1 + P_0)/sqrt(2) followed by a right
// shift. No internal head states are needed.
inline StepOperator erasure() {
    const double g = 1.0 / std::numbers::sqrt2;
    return StepOperator("erasure", 1, 2,
                        {StepTerm(g, +1, identity_matrix(1), detail::qubit_set(2, 1, 0), "1"),
                         StepTerm(g, +1, identity_matrix(1), detail::qubit_set(2, 0, 0), "2")});
}

// Equivalent single-term transcription sqrt(2) P_0 P_+ u: the projector
// onto |+> composed with the reset to |0>.
inline StepOperator erasure_projector_form() {
    Matrix q = zero_matrix(2, 2);
    q[0][0] = Complex(0.5);
    q[0][1] = Complex(0.5);
    return StepOperator("erasure_p+", 1, 2,
                        {StepTerm(std::numbers::sqrt2, +1, identity_matrix(1), q, "1")});
}

// Product qubit transformation followed by add 1 mod 2^n. Head levels
// 0..3, ternary qudits with level 2 the marker. The nine terms keep their
// narrative numbering in the labels.
inline StepOperator add1(const Matrix& v = hadamard_like_v()) {
    require_unitary(v, "v");
    const int L = 4, d = 3;
    const Matrix v3 = detail::expand_two_level(v, d);
    std::vector<StepTerm> terms;
    // 1: Q0 P0 u
    terms.emplace_back(1.0, +1, detail::head_projector(L, 0), detail::qubit_set(d, 0, 0), "1");
    // 2: w Q0 P2 u
    terms.emplace_back(1.0, +1, detail::head_shift_into(L, 0, 1), detail::qubit_set(d, 2, 2), "2");
    // 3: Q1 v P0 u
    terms.emplace_back(1.0, +1, detail::head_projector(L, 1), detail::project_input(v3, 0), "3");
    // 4: w Q1 P2 u^dag
    terms.emplace_back(1.0, -1, detail::head_shift_into(L, 1, 1), detail::qubit_set(d, 2, 2), "4");
    // 5: Q2 sigma_x P1 u^dag
    terms.emplace_back(1.0, -1, detail::head_projector(L, 2), detail::qubit_set(d, 1, 0), "5");
    // 6: w Q2 sigma_x P0 u
    terms.emplace_back(1.0, +1, detail::head_shift_into(L, 2, 1), detail::qubit_set(d, 0, 1), "6");
    // 7: w Q2 P2 u
    terms.emplace_back(1.0, +1, detail::head_shift_into(L, 2, 1), detail::qubit_set(d, 2, 2), "7");
    // 8: Q3 P0 u
    terms.emplace_back(1.0, +1, detail::head_projector(L, 3), detail::qubit_set(d, 0, 0), "8");
    // 9: w Q3 P2 u
    terms.emplace_back(1.0, +1, detail::head_shift_into(L, 3, 1), detail::qubit_set(d, 2, 2), "9");
    return StepOperator("add1", L, d, std::move(terms));
}

// First interferometer machine: head levels 0..2, the branch opened by
// w|0> = (|1> + |2>)/sqrt(2) over a level-1 qudit and closed by Q0 w^dag.
inline StepOperator interferometer1() {
    const int L = 3, d = 2;
    const double r = 1.0 / std::numbers::sqrt2;
    Matrix open = zero_matrix(L, L);  // w Q0
    open[1][0] = Complex(r);
    open[2][0] = Complex(r);
    Matrix arms = zero_matrix(L, L);  // Q1 + Q2
    arms[1][1] = Complex(1.0);
    arms[2][2] = Complex(1.0);
    Matrix close = zero_matrix(L, L);  // Q0 w^dag
    close[0][1] = Complex(r);
    close[0][2] = Complex(r);
    return StepOperator(
        "interf1", L, d,
        {StepTerm(1.0, +1, detail::head_projector(L, 0), detail::qubit_set(d, 0, 0), "1"),
         StepTerm(1.0, +1, open, detail::qubit_set(d, 1, 1), "2"),
         StepTerm(1.0, +1, arms, detail::qubit_set(d, 0, 0), "3"),
         StepTerm(1.0, +1, close, detail::qubit_set(d, 1, 1), "4")});
}

// Second interferometer machine: nine head levels, nine terms, with the
// arbitrary unitary v applied in one arm and undone before closure.
// The closing operator is taken as w'_78|0> = (|7> + |8>)/sqrt(2): the
// merged arm head states are 7 and 8 and the branch amplitudes must
// recombine to modulus 1.
inline StepOperator interferometer2(const Matrix& v = hadamard_like_v(), bool broken = false) {
    require_unitary(v, "v");
    const int L = 9, d = 2;
    const double r = 1.0 / std::numbers::sqrt2;
    Matrix open = zero_matrix(L, L);  // w'_12 Q0
    open[1][0] = Complex(r);
    open[2][0] = Complex(r);
    Matrix close = zero_matrix(L, L);  // Q0 (w'_78)^dag
    close[0][7] = Complex(r);
    close[0][8] = Complex(r);
    // P0 v^dag on the qubit: project to |0> after undoing v
    Matrix undo = detail::project_output(detail::adjoint(v), 0);
    const int d4 = broken ? +1 : -1;  // term 4 head shift
    const int d6 = broken ? -1 : +1;  // term 6 head shift
    std::vector<StepTerm> terms;
    terms.emplace_back(1.0, +1, detail::head_projector(L, 0), detail::qubit_set(d, 0, 0), "1");
    terms.emplace_back(1.0, +1, open, detail::qubit_set(d, 1, 1), "2");
    terms.emplace_back(1.0, -1, detail::head_shift_into(L, 1, 2), detail::project_input(v, 0),
                       "3");
    terms.emplace_back(1.0, d4, detail::head_shift_into(L, 2, 2), detail::qubit_set(d, 0, 0),
                       "4");
    terms.emplace_back(1.0, +1, detail::head_shift_into(L, 3, 2), detail::qubit_set(d, 1, 1),
                       "5");
    terms.emplace_back(1.0, d6, detail::head_shift_into(L, 4, 2), detail::qubit_set(d, 1, 1),
                       "6");
    terms.emplace_back(1.0, +1, detail::head_shift_into(L, 5, 2), undo, "7");
    terms.emplace_back(1.0, +1, detail::head_shift_into(L, 6, 2), detail::qubit_set(d, 0, 0),
                       "8");
    terms.emplace_back(1.0, +1, close, detail::qubit_set(d, 1, 1), "9");
    return StepOperator(broken ? "interf2_broken" : "interf2", L, d, std::move(terms));
}

inline StepOperator interferometer2_broken(const Matrix& v = hadamard_like_v()) {
    return interferometer2(v, true);
}

// Test fixture for cyclic shift paths: a single stationary term cycling
// the head level through L states.
inline StepOperator cycle(int L = 3) {
    if (L < 2) throw std::invalid_argument("cycle needs L >= 2");
    Matrix perm = zero_matrix(L, L);
    for (int l = 0; l < L; ++l) perm[(l + 1) % L][l] = Complex(1.0);
    return StepOperator("cycle", L, 2, {StepTerm(1.0, 0, perm, identity_matrix(2), "1")});
}

// ---------------------------------------------------------------------------
// Special states

// Which site the zero block of the erasure path state ends at. As written
// literally, the formula puts the head site inside the zero block; shifting
// the block down one site (head over |+>) makes a forward step carry
// weight exactly 1, so that is the default.
enum class ErasureConvention { head_site_plus, head_site_zero };

// The one-way-infinite erasure path state |n> (x) theta_n: zeros to the
// left, |+> factors up to b-1, |-> at b, and an arbitrary 0-tail beyond b.
inline WaveState erasure_bt_state(std::int64_t head_pos, std::int64_t wall,
                                  const std::vector<std::pair<std::int64_t, int>>& tail = {},
                                  ErasureConvention convention =
                                      ErasureConvention::head_site_plus) {
    if (head_pos > wall) throw std::invalid_argument("head must not be right of the wall");
    QuditLattice base(2);
    for (const auto& [site, lvl] : tail) {
        if (site <= wall)
            throw std::invalid_argument("tail entries must lie strictly right of the wall");
        base = base.with_level(site, lvl);
    }
    const std::int64_t first_plus =
        convention == ErasureConvention::head_site_plus ? head_pos : head_pos + 1;
    // factor sites: |+> at first_plus..wall-1, |-> at wall
    std::vector<std::int64_t> sites;
    for (std::int64_t s = first_plus; s <= wall; ++s) sites.push_back(s);
    const double r = 1.0 / std::numbers::sqrt2;

    WaveState out(1, 2);
    const std::size_t count = sites.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << count); ++mask) {
        QuditLattice lat = base;
        double amp = 1.0;
        for (std::size_t i = 0; i < count; ++i) {
            const bool one = (mask >> i) & 1;
            const bool minus = sites[i] == wall;
            amp *= (one && minus) ? -r : r;
            if (one) lat = lat.with_level(sites[i], 1);
        }
        out.add(BasisVector(0, head_pos, lat), Complex(amp));
    }
    out.prune();
    return out;
}

// Finite-path variant with a left wall: a level-1 qudit at a-1 blocks
// backward motion, so the head never leaves [a, b].
inline WaveState erasure_bt_state_finite(std::int64_t head_pos, std::int64_t left_wall,
                                         std::int64_t wall,
                                         ErasureConvention convention =
                                             ErasureConvention::head_site_plus) {
    if (head_pos < left_wall) throw std::invalid_argument("head must not be left of the wall");
    WaveState s = erasure_bt_state(head_pos, wall, {}, convention);
    WaveState out(1, 2);
    for (const auto& [b, amp] : s.terms())
        out.add(BasisVector(b.head_level, b.head_pos, b.lattice.with_level(left_wall - 1, 1)),
                amp);
    out.prune();
    return out;
}

// Initial state for the add-1 machine: marker qudits at level 2, the head
// at level 0 strictly left of the first marker.
inline WaveState add1_initial_state(const std::vector<std::int64_t>& marker_sites,
                                    std::int64_t head_pos) {
    if (marker_sites.empty()) throw std::invalid_argument("need at least one marker");
    for (std::size_t i = 1; i < marker_sites.size(); ++i)
        if (marker_sites[i] <= marker_sites[i - 1])
            throw std::invalid_argument("markers must be strictly increasing");
    // the canonical 3n+4-step count starts with the head on the first marker
    if (head_pos > marker_sites.front())
        throw std::invalid_argument("head must not start right of the first marker");
    QuditLattice lat(3);
    for (auto site : marker_sites) lat = lat.with_level(site, 2);
    return WaveState::basis(4, 3, BasisVector(0, head_pos, lat));
}

// The closed-form state after 3n+4 steps from the two-marker seed with
// markers at 0 and n+1 and head starting at site 0. Component j has the
// head at 3n+2-2j, a carry-completed suffix (|1> at n-j, zeros above) and
// unresolved v|0> factors below; j = n is the mod-2^n wraparound with all
// n qubits reset to zero and no carry site.
inline WaveState add1_final_state(int n, const Matrix& v = hadamard_like_v()) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    require_unitary(v, "v");
    const Complex v00 = v[0][0];
    const Complex v10 = v[1][0];
    QuditLattice markers(3);
    markers = markers.with_level(0, 2).with_level(n + 1, 2);

    WaveState out(4, 3);
    for (int j = 0; j <= n; ++j) {
        Complex coeff = (j < n ? v00 : Complex(1.0)) * std::pow(v10, j);
        const std::int64_t head = 3 * static_cast<std::int64_t>(n) + 2 - 2 * j;
        // sites 1..n-1-j carry v|0>; expand the tensor product
        const int free_sites = std::max(0, n - 1 - j);
        for (std::size_t mask = 0; mask < (std::size_t{1} << free_sites); ++mask) {
            QuditLattice lat = markers;
            Complex amp = coeff;
            for (int i = 0; i < free_sites; ++i) {
                const bool one = (mask >> i) & 1;
                amp *= one ? v10 : v00;
                if (one) lat = lat.with_level(i + 1, 1);
            }
            if (j < n) lat = lat.with_level(n - j, 1);
            out.add(BasisVector(0, head, lat), amp);
        }
    }
    out.prune();
    return out;
}

// Interferometer seeds. interf1: level-1 qudits at 1 and 2+gap with the
// head left of site 1. interf2: the two-qubit pattern 1, 0, 1 at sites
// 1..3 with the head at site 0.
inline WaveState interferometer1_seed(int gap, std::int64_t head_pos = 0) {
    if (gap < 0) throw std::invalid_argument("gap must be >= 0");
    if (head_pos >= 1) throw std::invalid_argument("head must start left of site 1");
    QuditLattice lat(2);
    lat = lat.with_level(1, 1).with_level(2 + gap, 1);
    return WaveState::basis(3, 2, BasisVector(0, head_pos, lat));
}

inline WaveState interferometer2_seed() {
    QuditLattice lat(2);
    lat = lat.with_level(1, 1).with_level(3, 1);
    return WaveState::basis(9, 2, BasisVector(0, 0, lat));
}

// n repetitions of the 1, 0, 1 pattern separated by a zero: a string of
// n chained interferometers.
inline WaveState interferometer2_chain_seed(int repetitions) {
    if (repetitions < 1) throw std::invalid_argument("need at least one repetition");
    QuditLattice lat(2);
    for (int k = 0; k < repetitions; ++k) {
        const std::int64_t base = 1 + 4 * static_cast<std::int64_t>(k);
        lat = lat.with_level(base, 1).with_level(base + 2, 1);
    }
    return WaveState::basis(9, 2, BasisVector(0, 0, lat));
}

}  // namespace machines
}  // namespace qtm
