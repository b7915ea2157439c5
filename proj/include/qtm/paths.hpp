// paths.hpp
// Path generation by iterating T forward and T^dag backward from a seed,
// verification that the generated states form a distinct path (pairwise
// orthogonal, back-step consistent), power-partial-isometry probes, and
// classification of the resulting shift type.

#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qtm/step_operator.hpp"

namespace qtm {

constexpr double kEpsOrth = 1e-9;
constexpr double kEpsTerminal = 1e-12;

// Technical lower bound on path weights; violations only warn (finite runs
// cannot violate the infinite-path condition meaningfully).
constexpr double kWeightFloor = 1e-6;

enum class PathClassification {
    finite,             // terminal in both directions
    right_truncated,    // backward terminal, forward hit the iteration bound
    left_truncated,     // forward terminal, backward hit the iteration bound
    two_way_truncated,  // neither direction terminated within bounds
    cyclic,
};

inline std::string to_string(PathClassification c) {
    switch (c) {
        case PathClassification::finite: return "finite";
        case PathClassification::right_truncated: return "right_truncated";
        case PathClassification::left_truncated: return "left_truncated";
        case PathClassification::two_way_truncated: return "two_way_truncated";
        case PathClassification::cyclic: return "cyclic";
    }
    return "?";
}

// Empirically classified shift types per the direct-sum decomposition.
enum class ShiftType { bilateral, unilateral, coisometry, finite, cyclic };

inline std::string to_string(ShiftType t) {
    switch (t) {
        case ShiftType::bilateral: return "bilateral";
        case ShiftType::unilateral: return "unilateral";
        case ShiftType::coisometry: return "coisometry";
        case ShiftType::finite: return "finite";
        case ShiftType::cyclic: return "cyclic";
    }
    return "?";
}

struct PathRecord {
    // normalized states at path indices m_min..m_max, with index 0 the seed
    std::vector<WaveState> states;
    std::int64_t m_min = 0;
    std::int64_t m_max = 0;
    // weights[k] = ||T state_k|| for k = m_min..m_max (the D eigenvalues);
    // the terminal state's outgoing weight is ~0
    std::vector<double> weights;
    bool forward_terminal = false;
    bool backward_terminal = false;
    std::optional<std::int64_t> cyclic_period;
    PathClassification classification = PathClassification::two_way_truncated;
    bool verified = false;  // set by verify_distinct_path on success
    bool weight_floor_warning = false;

    const WaveState& state(std::int64_t k) const {
        return states.at(static_cast<std::size_t>(k - m_min));
    }
    double weight(std::int64_t k) const {
        return weights.at(static_cast<std::size_t>(k - m_min));
    }
    std::int64_t length() const { return m_max - m_min + 1; }
};

// Iterates T forward `fwd` steps and T^dag backward `bwd` steps from a
// normalized seed, recording norm weights, terminal walls, and cycles
// (recurrence of an earlier state up to global phase).
inline PathRecord generate_path(const StepOperator& T, const WaveState& seed, int fwd, int bwd,
                                double eps_terminal = kEpsTerminal,
                                double eps_orth = kEpsOrth) {
    if (fwd < 0 || bwd < 0) throw std::invalid_argument("fwd and bwd must be >= 0");
    if (seed.norm() <= eps_terminal) throw std::invalid_argument("seed has zero norm");

    PathRecord path;
    path.states.push_back(seed.normalized());

    auto find_recurrence = [&](const WaveState& next) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < path.states.size(); ++i)
            if (std::abs(inner_product(path.states[i], next)) > 1.0 - eps_orth) return i;
        return std::nullopt;
    };

    // forward
    for (int n = 0; n < fwd; ++n) {
        WaveState image = apply(T, path.states.back());
        const double w = image.norm();
        if (w < eps_terminal) {
            path.forward_terminal = true;
            break;
        }
        WaveState next = image.scaled(Complex(1.0 / w));
        if (auto hit = find_recurrence(next); hit.has_value()) {
            // only a recurrence of the seed closes a cycle; the seed is
            // index 0 in `states` as long as no backward step ran yet
            if (*hit == 0) {
                path.cyclic_period = static_cast<std::int64_t>(path.states.size());
                path.weights.assign(path.states.size(), 0.0);
                for (std::size_t k = 0; k < path.states.size(); ++k)
                    path.weights[k] = apply(T, path.states[k]).norm();
                path.m_min = 0;
                path.m_max = static_cast<std::int64_t>(path.states.size()) - 1;
                path.classification = PathClassification::cyclic;
                return path;
            }
        }
        path.states.push_back(std::move(next));
        path.m_max += 1;
    }

    // backward
    std::vector<WaveState> back;
    WaveState current = path.states.front();
    for (int m = 0; m < bwd; ++m) {
        WaveState image = apply_adjoint(T, current);
        const double w = image.norm();
        if (w < eps_terminal) {
            path.backward_terminal = true;
            break;
        }
        current = image.scaled(Complex(1.0 / w));
        back.push_back(current);
        path.m_min -= 1;
    }
    path.states.insert(path.states.begin(), back.rbegin(), back.rend());

    path.weights.assign(path.states.size(), 0.0);
    for (std::size_t k = 0; k < path.states.size(); ++k)
        path.weights[k] = apply(T, path.states[k]).norm();
    for (std::size_t k = 0; k + 1 < path.states.size(); ++k)
        if (path.weights[k] < kWeightFloor) path.weight_floor_warning = true;

    if (path.forward_terminal && path.backward_terminal)
        path.classification = PathClassification::finite;
    else if (path.forward_terminal)
        path.classification = PathClassification::left_truncated;
    else if (path.backward_terminal)
        path.classification = PathClassification::right_truncated;
    else
        path.classification = PathClassification::two_way_truncated;
    return path;
}

struct DpgReport {
    bool orthogonal = false;
    double max_cross_overlap = 0.0;
    bool backstep_ok = false;
    bool forwardstep_ok = false;
    double worst_step_defect = 0.0;
    std::string witness;

    bool pass() const { return orthogonal && backstep_ok && forwardstep_ok; }
};

// Checks a generated path against the distinct-path conditions: pairwise
// orthogonality of path states and that one step backward (forward) from
// state k+1 (k-1) regenerates state k with a positive factor.
inline DpgReport verify_distinct_path(const StepOperator& T, PathRecord& path,
                                      double eps_orth = kEpsOrth) {
    DpgReport report;
    const std::int64_t n = path.length();

    report.orthogonal = true;
    for (std::int64_t a = 0; a < n; ++a)
        for (std::int64_t b = a + 1; b < n; ++b) {
            if (path.cyclic_period && (b - a) % *path.cyclic_period == 0) continue;
            const double ov = std::abs(inner_product(path.states[a], path.states[b]));
            if (ov > report.max_cross_overlap) report.max_cross_overlap = ov;
            if (ov >= eps_orth && report.orthogonal) {
                report.orthogonal = false;
                std::ostringstream os;
                os << "states " << (path.m_min + a) << " and " << (path.m_min + b)
                   << " overlap with modulus " << ov;
                report.witness = os.str();
            }
        }

    // proportionality defect of candidate against target with positive factor
    auto step_defect = [&](const WaveState& candidate, const WaveState& target,
                           std::int64_t at, const char* dir) -> double {
        const Complex factor = inner_product(target, candidate);
        WaveState residual = superpose({{Complex(1.0), candidate}, {-factor, target}});
        double defect = residual.norm();
        if (factor.real() <= 0.0 || std::abs(factor.imag()) > eps_orth)
            defect = std::max(defect, 1.0);  // wrong phase counts as full failure
        if (defect >= eps_orth && report.witness.empty()) {
            std::ostringstream os;
            os << dir << " from state " << at << " does not regenerate its neighbor (defect "
               << defect << ")";
            report.witness = os.str();
        }
        return defect;
    };

    report.backstep_ok = true;
    report.forwardstep_ok = true;
    for (std::int64_t k = 0; k + 1 < n; ++k) {
        const std::int64_t idx = path.m_min + k;
        // T^dag state_{k+1} ~ state_k
        WaveState back = apply_adjoint(T, path.states[k + 1]);
        if (back.norm() > kEpsTerminal) {
            const double defect =
                step_defect(back.normalized(), path.states[k], idx + 1, "back-step");
            report.worst_step_defect = std::max(report.worst_step_defect, defect);
            if (defect >= eps_orth) report.backstep_ok = false;
        } else if (!path.cyclic_period) {
            report.backstep_ok = false;
            if (report.witness.empty())
                report.witness = "T^dag annihilates interior state " + std::to_string(idx + 1);
        }
        // T state_k ~ state_{k+1}
        WaveState fwd = apply(T, path.states[k]);
        if (fwd.norm() > kEpsTerminal) {
            const double defect =
                step_defect(fwd.normalized(), path.states[k + 1], idx, "forward-step");
            report.worst_step_defect = std::max(report.worst_step_defect, defect);
            if (defect >= eps_orth) report.forwardstep_ok = false;
        } else {
            report.forwardstep_ok = false;
            if (report.witness.empty())
                report.witness = "T annihilates interior state " + std::to_string(idx);
        }
    }

    path.verified = report.pass();
    return report;
}

struct CrossPathReport {
    bool ok = false;
    double max_overlap = 0.0;
    std::string witness;
    std::vector<PathRecord> paths;
};

// Generates one path per seed and checks every state of each path against
// every state of every other path. Seeds must be pairwise orthogonal.
inline CrossPathReport verify_cross_path(const StepOperator& T,
                                         const std::vector<WaveState>& seeds, int fwd, int bwd,
                                         double eps_orth = kEpsOrth) {
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (std::size_t j = i + 1; j < seeds.size(); ++j)
            if (std::abs(inner_product(seeds[i], seeds[j])) >= eps_orth)
                throw std::invalid_argument("seeds " + std::to_string(i) + " and " +
                                            std::to_string(j) + " are not orthogonal");
    CrossPathReport report;
    report.ok = true;
    for (const auto& seed : seeds) report.paths.push_back(generate_path(T, seed, fwd, bwd));
    for (std::size_t i = 0; i < report.paths.size(); ++i)
        for (std::size_t j = i + 1; j < report.paths.size(); ++j)
            for (std::size_t a = 0; a < report.paths[i].states.size(); ++a)
                for (std::size_t b = 0; b < report.paths[j].states.size(); ++b) {
                    const double ov = std::abs(
                        inner_product(report.paths[i].states[a], report.paths[j].states[b]));
                    report.max_overlap = std::max(report.max_overlap, ov);
                    if (ov >= eps_orth && report.ok) {
                        report.ok = false;
                        std::ostringstream os;
                        os << "path " << i << " state "
                           << (report.paths[i].m_min + static_cast<std::int64_t>(a))
                           << " overlaps path " << j << " state "
                           << (report.paths[j].m_min + static_cast<std::int64_t>(b))
                           << " with modulus " << ov;
                        report.witness = os.str();
                    }
                }
    return report;
}

struct PartialIsometryReport {
    bool ok = true;
    int n_max = 0;
    double worst_idempotency_defect = 0.0;
    double worst_hermiticity_defect = 0.0;
    double worst_commutator_defect = 0.0;
    std::string witness;
};

namespace detail {

// (T^dag)^n T^n psi, computed exactly by sparse application. The support
// guard keeps runaway machines from exploding; hitting it signals that a
// smaller sample or n_max is needed.
inline WaveState apply_AB(const StepOperator& T, const WaveState& psi, int n, bool a_first,
                          std::size_t support_cap) {
    WaveState cur = psi;
    auto guard = [&] {
        if (cur.size() > support_cap)
            throw std::runtime_error(
                "state support exceeded the cap during power-partial-isometry check; "
                "reduce n_max or the sample");
    };
    if (a_first) {  // A_n = (T^dag)^n T^n
        for (int k = 0; k < n; ++k) { cur = apply(T, cur); guard(); }
        for (int k = 0; k < n; ++k) { cur = apply_adjoint(T, cur); guard(); }
    } else {  // B_n = T^n (T^dag)^n
        for (int k = 0; k < n; ++k) { cur = apply_adjoint(T, cur); guard(); }
        for (int k = 0; k < n; ++k) { cur = apply(T, cur); guard(); }
    }
    return cur;
}

inline WaveState diff(const WaveState& a, const WaveState& b) {
    return superpose({{Complex(1.0), a}, {Complex(-1.0), b}});
}

}  // namespace detail

// Probes, on a sample of basis vectors, that A_n = (T^dag)^n T^n and
// B_n = T^n (T^dag)^n are Hermitian idempotents and that [A_n, B_m] ~ 0
// for n, m <= n_max. Applications are exact, so no truncation window is
// needed; a support cap guards against pathological growth.
inline PartialIsometryReport check_power_partial_isometry(
    const StepOperator& T, int n_max, const std::vector<BasisVector>& basis_sample,
    double tol = 1e-10, std::size_t support_cap = 200000) {
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    PartialIsometryReport report;
    report.n_max = n_max;

    std::vector<WaveState> sample;
    for (const auto& b : basis_sample)
        sample.push_back(WaveState::basis(T.head_dim(), T.qudit_dim(), b));

    auto note = [&](double defect, double& slot, const std::string& what) {
        slot = std::max(slot, defect);
        if (defect > tol && report.ok) {
            report.ok = false;
            report.witness = what + " (defect " + std::to_string(defect) + ")";
        }
    };

    for (int n = 1; n <= n_max; ++n) {
        for (bool a_first : {true, false}) {
            const char* name = a_first ? "A" : "B";
            // idempotency on the sample
            for (std::size_t i = 0; i < sample.size(); ++i) {
                WaveState once = detail::apply_AB(T, sample[i], n, a_first, support_cap);
                WaveState twice = detail::apply_AB(T, once, n, a_first, support_cap);
                note(detail::diff(twice, once).norm(), report.worst_idempotency_defect,
                     std::string(name) + "_" + std::to_string(n) +
                         " not idempotent on sample state " + std::to_string(i));
            }
            // hermiticity on sample pairs
            for (std::size_t i = 0; i < sample.size(); ++i)
                for (std::size_t j = i; j < sample.size(); ++j) {
                    const Complex lhs = inner_product(
                        sample[i], detail::apply_AB(T, sample[j], n, a_first, support_cap));
                    const Complex rhs = inner_product(
                        detail::apply_AB(T, sample[i], n, a_first, support_cap), sample[j]);
                    note(std::abs(lhs - rhs), report.worst_hermiticity_defect,
                         std::string(name) + "_" + std::to_string(n) + " not Hermitian on pair (" +
                             std::to_string(i) + "," + std::to_string(j) + ")");
                }
        }
        // [A_n, B_m] on the sample
        for (int m = 1; m <= n_max; ++m)
            for (std::size_t i = 0; i < sample.size(); ++i) {
                WaveState ab = detail::apply_AB(
                    T, detail::apply_AB(T, sample[i], m, false, support_cap), n, true,
                    support_cap);
                WaveState ba = detail::apply_AB(
                    T, detail::apply_AB(T, sample[i], n, true, support_cap), m, false,
                    support_cap);
                note(detail::diff(ab, ba).norm(), report.worst_commutator_defect,
                     "[A_" + std::to_string(n) + ", B_" + std::to_string(m) +
                         "] nonzero on sample state " + std::to_string(i));
            }
    }
    return report;
}

struct ShiftClassification {
    ShiftType type;
    // an un-terminated direction within bounds cannot be proven infinite
    bool lower_bound = false;
};

// Maps the terminal and cycle flags of a verified path onto the shift
// types of the direct-sum decomposition. Truncated directions make the
// result a lower bound, not a theorem.
inline ShiftClassification classify_shift_type(const PathRecord& path) {
    if (!path.verified)
        throw std::invalid_argument("classify_shift_type requires a DPG-verified path");
    if (path.cyclic_period) return {ShiftType::cyclic, false};
    if (path.forward_terminal && path.backward_terminal) return {ShiftType::finite, false};
    if (path.forward_terminal) return {ShiftType::coisometry, true};
    if (path.backward_terminal) return {ShiftType::unilateral, true};
    return {ShiftType::bilateral, true};
}

}  // namespace qtm
