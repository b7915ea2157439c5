// oracle.hpp
// Independent matrix-element oracle for the step operator.
//
// The sparse application in step_operator.hpp is checked against a direct
// transcription of the defining matrix element
//
//   <l', j', s'| T |l, j, s> = [s' = s off site j] *
//       sum over terms with delta = j' - j of
//           gamma * head[l'][l] * qubit[s'(j)][s(j)]
//
// evaluated with no shared code beyond the data structures. The check
// enumerates every basis column in a truncated window (head position and
// lattice support within [-W, W], at most `max_sites` nonzero sites),
// verifies every amplitude the application produced, and separately
// verifies completeness over all candidate rows, so a dropped or spurious
// matrix element in either direction is caught.

#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qtm/step_operator.hpp"

namespace qtm::oracle {

// Direct transcription of the matrix element definition above.
inline Complex element(const StepOperator& T, const BasisVector& row, const BasisVector& col) {
    // the lattices must agree everywhere except the column head site
    for (const auto& [site, lvl] : row.lattice.entries())
        if (site != col.head_pos && col.lattice.level_at(site) != lvl) return Complex(0.0);
    for (const auto& [site, lvl] : col.lattice.entries())
        if (site != col.head_pos && row.lattice.level_at(site) != lvl) return Complex(0.0);

    const int s_in = col.lattice.level_at(col.head_pos);
    const int s_out = row.lattice.level_at(col.head_pos);
    Complex out(0.0);
    for (const auto& term : T.terms())
        if (col.head_pos + term.delta == row.head_pos)
            out += term.gamma * term.head_matrix[row.head_level][col.head_level] *
                   term.qubit_matrix[s_out][s_in];
    return out;
}

inline Complex adjoint_element(const StepOperator& T, const BasisVector& row,
                               const BasisVector& col) {
    return std::conj(element(T, col, row));
}

// All rows the matrix element can be nonzero on for a given column: the
// head moves by at most one site and only the qudit under the (pre-shift)
// head can change.
inline std::vector<BasisVector> candidate_rows(const StepOperator& T, const BasisVector& col) {
    std::vector<BasisVector> rows;
    for (int delta = -1; delta <= 1; ++delta)
        for (int sp = 0; sp < T.qudit_dim(); ++sp) {
            const QuditLattice lat = col.lattice.with_level(col.head_pos, sp);
            for (int lp = 0; lp < T.head_dim(); ++lp)
                rows.emplace_back(lp, col.head_pos + delta, lat);
        }
    return rows;
}

// Candidate rows of T^dag for a given column: the adjoint moves the head
// back and rewrites the qudit at the arrival site.
inline std::vector<BasisVector> adjoint_candidate_rows(const StepOperator& T,
                                                       const BasisVector& col) {
    std::vector<BasisVector> rows;
    for (int delta = -1; delta <= 1; ++delta) {
        const std::int64_t src = col.head_pos - delta;
        for (int s = 0; s < T.qudit_dim(); ++s) {
            const QuditLattice lat = col.lattice.with_level(src, s);
            for (int l = 0; l < T.head_dim(); ++l) rows.emplace_back(l, src, lat);
        }
    }
    return rows;
}

// Every basis vector with head position in [-window+1, window-1] and at
// most max_sites nonzero lattice sites inside the same range.
inline std::vector<BasisVector> window_columns(const StepOperator& T, int window,
                                               int max_sites) {
    const std::int64_t lo = -window + 1, hi = window - 1;
    std::vector<std::int64_t> sites;
    for (std::int64_t s = lo; s <= hi; ++s) sites.push_back(s);

    // lattice configurations: choose up to max_sites sites, each at a
    // nonzero level
    std::vector<QuditLattice> configs{QuditLattice(T.qudit_dim())};
    std::vector<std::pair<QuditLattice, std::size_t>> frontier;
    for (std::size_t i = 0; i < sites.size(); ++i)
        frontier.emplace_back(QuditLattice(T.qudit_dim()), i);
    for (int depth = 0; depth < max_sites; ++depth) {
        std::vector<std::pair<QuditLattice, std::size_t>> next;
        for (const auto& [lat, first] : frontier)
            for (std::size_t i = first; i < sites.size(); ++i)
                for (int lvl = 1; lvl < T.qudit_dim(); ++lvl) {
                    QuditLattice grown = lat.with_level(sites[i], lvl);
                    configs.push_back(grown);
                    if (depth + 1 < max_sites) next.emplace_back(std::move(grown), i + 1);
                }
        frontier = std::move(next);
    }

    std::vector<BasisVector> cols;
    for (const auto& lat : configs)
        for (std::int64_t j = lo; j <= hi; ++j)
            for (int l = 0; l < T.head_dim(); ++l) cols.emplace_back(l, j, lat);
    return cols;
}

struct OracleReport {
    bool ok = true;
    double worst = 0.0;
    std::size_t columns = 0;
    std::string witness;
};

namespace detail {

inline std::string describe(const BasisVector& b) {
    std::ostringstream os;
    os << "(l=" << b.head_level << ", j=" << b.head_pos << ", s={";
    for (const auto& [site, lvl] : b.lattice.entries()) os << ' ' << site << ':' << lvl;
    os << " })";
    return os.str();
}

}  // namespace detail

namespace detail {

// One expected image entry of a column with head level l over qudit level
// s: the head moves to level lp by delta while the site is set to sp.
struct ExpectedEntry {
    int lp;
    int delta;
    int sp;
    Complex amp;
};

// The oracle formula evaluated once per (l, s) input pair.
inline std::vector<std::vector<std::vector<ExpectedEntry>>> expected_table(
    const StepOperator& T) {
    const int L = T.head_dim(), d = T.qudit_dim();
    std::vector table(L, std::vector(d, std::vector<ExpectedEntry>()));
    for (int l = 0; l < L; ++l)
        for (int s = 0; s < d; ++s)
            for (int lp = 0; lp < L; ++lp)
                for (int delta = -1; delta <= 1; ++delta)
                    for (int sp = 0; sp < d; ++sp) {
                        Complex amp(0.0);
                        for (const auto& term : T.terms())
                            if (term.delta == delta)
                                amp += term.gamma * term.head_matrix[lp][l] *
                                       term.qubit_matrix[sp][s];
                        if (amp != Complex(0.0))
                            table[l][s].push_back(ExpectedEntry{lp, delta, sp, amp});
                    }
    return table;
}

}  // namespace detail

// Column-by-column comparison of apply / apply_adjoint against the oracle.
// The fast sweep matches each image against the expected entries of the
// oracle formula; any discrepancy (including a support mismatch, i.e. a
// spurious or missing matrix element) falls back to the per-element check.
inline OracleReport check_against_oracle(const StepOperator& T, int window = 8,
                                         int max_sites = 3, double tol = 1e-13) {
    OracleReport report;
    auto flag = [&](double defect, const BasisVector& row, const BasisVector& col,
                    const char* what) {
        report.worst = std::max(report.worst, defect);
        if (defect > tol && report.ok) {
            report.ok = false;
            report.witness = std::string(what) + " element row " + detail::describe(row) +
                             " col " + detail::describe(col) + " off by " +
                             std::to_string(defect);
        }
    };
    auto slow_check = [&](const BasisVector& col, const WaveState& image, bool adjoint) {
        const char* what = adjoint ? "T^dag" : "T";
        auto value = [&](const BasisVector& row) {
            return adjoint ? adjoint_element(T, row, col) : element(T, row, col);
        };
        for (const auto& [row, amp] : image.terms()) flag(std::abs(amp - value(row)), row, col, what);
        for (const BasisVector& row :
             adjoint ? adjoint_candidate_rows(T, col) : candidate_rows(T, col))
            flag(std::abs(image.amplitude(row) - value(row)), row, col, what);
    };

    const auto table = detail::expected_table(T);
    for (const BasisVector& col : window_columns(T, window, max_sites)) {
        ++report.columns;
        const WaveState unit = WaveState::basis(T.head_dim(), T.qudit_dim(), col);

        // forward
        {
            const WaveState image = apply(T, unit);
            const int s = col.lattice.level_at(col.head_pos);
            const auto& expected = table[col.head_level][s];
            std::size_t live = 0;
            bool mismatch = false;
            for (const auto& e : expected) {
                const BasisVector row(e.lp, col.head_pos + e.delta,
                                      col.lattice.with_level(col.head_pos, e.sp));
                const double defect = std::abs(image.amplitude(row) - e.amp);
                report.worst = std::max(report.worst, defect);
                mismatch = mismatch || defect > tol;
                if (std::abs(e.amp) > unit.prune_eps()) ++live;
            }
            // extra image entries mean a matrix element the oracle holds at 0
            if (mismatch || image.size() != live) slow_check(col, image, false);
        }

        // adjoint
        {
            const WaveState image = apply_adjoint(T, unit);
            std::size_t seen = 0;
            bool mismatch = false;
            for (int delta = -1; delta <= 1; ++delta) {
                const std::int64_t src = col.head_pos - delta;
                const int sp = col.lattice.level_at(src);
                // rows (l, src, site src := s) receive conj of the forward
                // element with input (l, s), output (head_level, delta, sp)
                for (int l = 0; l < T.head_dim(); ++l)
                    for (int si = 0; si < T.qudit_dim(); ++si) {
                        Complex amp(0.0);
                        for (const auto& e : table[l][si])
                            if (e.lp == col.head_level && e.delta == delta && e.sp == sp)
                                amp += std::conj(e.amp);
                        if (amp == Complex(0.0)) continue;
                        const BasisVector row(l, src, col.lattice.with_level(src, si));
                        const double defect = std::abs(image.amplitude(row) - amp);
                        report.worst = std::max(report.worst, defect);
                        mismatch = mismatch || defect > tol;
                        if (std::abs(amp) > unit.prune_eps()) ++seen;
                    }
            }
            if (mismatch || image.size() != seen) slow_check(col, image, true);
        }
    }
    return report;
}

// Random sparse states for property tests.
inline WaveState random_state(int head_dim, int qudit_dim, std::mt19937& rng,
                              int components = 6, int span = 5) {
    std::uniform_int_distribution<int> level(0, head_dim - 1);
    std::uniform_int_distribution<int> qlvl(0, qudit_dim - 1);
    std::uniform_int_distribution<std::int64_t> pos(-span, span);
    std::uniform_int_distribution<int> nsites(0, 3);
    std::uniform_real_distribution<double> re(-1.0, 1.0);
    WaveState out(head_dim, qudit_dim);
    for (int c = 0; c < components; ++c) {
        QuditLattice lat(qudit_dim);
        const int k = nsites(rng);
        for (int i = 0; i < k; ++i) lat = lat.with_level(pos(rng), qlvl(rng));
        out.add(BasisVector(level(rng), pos(rng), lat), Complex(re(rng), re(rng)));
    }
    out.prune();
    if (out.empty()) out.add(BasisVector(0, 0, QuditLattice(qudit_dim)), Complex(1.0));
    return out;
}

// A Haar-ish random 2x2 unitary for interferometer closure tests.
inline Matrix random_unitary2(std::mt19937& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
    const double theta = angle(rng) / 2.0, a = angle(rng), b = angle(rng), g = angle(rng);
    const Complex i(0.0, 1.0);
    const double c = std::cos(theta), s = std::sin(theta);
    return {{std::exp(i * a) * c, std::exp(i * b) * s},
            {-std::exp(i * (g - b)) * s, std::exp(i * (g - a)) * c}};
}

}  // namespace qtm::oracle
