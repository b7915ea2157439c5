// state.hpp
// Sparse computation-basis states for quantum Turing machine simulation.
//
// A machine acts on basis states |l, j, s> where l is the internal head
// level, j the (signed) head position on a two-way infinite lattice, and
// s an assignment of qudit levels to lattice sites. Only finitely many
// sites may differ from level 0 (the 0-tail condition), so a lattice
// configuration is stored as a finite map from site to nonzero level.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qtm {

using Complex = std::complex<double>;

constexpr double kDefaultPruneEps = 1e-12;

// Thrown when states or operators built for different (L, d) are mixed.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// Finite-support assignment site -> level with absent sites at level 0.
// Canonical form: no stored entry has level 0, all levels < d.
class QuditLattice {
public:
    explicit QuditLattice(int qudit_dim = 2) : d_(qudit_dim) {
        if (d_ < 2) throw DimensionError("qudit dimension must be >= 2");
    }

    int qudit_dim() const { return d_; }

    int level_at(std::int64_t site) const {
        auto it = entries_.find(site);
        return it == entries_.end() ? 0 : it->second;
    }

    // Returns a copy with the given site set; level 0 erases the entry.
    QuditLattice with_level(std::int64_t site, int level) const {
        if (level < 0 || level >= d_)
            throw DimensionError("level " + std::to_string(level) + " out of range for d=" +
                                 std::to_string(d_));
        QuditLattice out(*this);
        if (level == 0)
            out.entries_.erase(site);
        else
            out.entries_[site] = level;
        return out;
    }

    QuditLattice translated(std::int64_t shift) const {
        QuditLattice out(d_);
        for (const auto& [site, lvl] : entries_) out.entries_[site + shift] = lvl;
        return out;
    }

    const std::map<std::int64_t, int>& entries() const { return entries_; }

    friend auto operator<=>(const QuditLattice& a, const QuditLattice& b) = default;

private:
    int d_;
    std::map<std::int64_t, int> entries_;
};

// One computation-basis element |l, j, s>.
struct BasisVector {
    int head_level = 0;
    std::int64_t head_pos = 0;
    QuditLattice lattice;

    BasisVector(int level, std::int64_t pos, QuditLattice lat)
        : head_level(level), head_pos(pos), lattice(std::move(lat)) {}

    BasisVector translated(std::int64_t shift) const {
        return BasisVector(head_level, head_pos + shift, lattice.translated(shift));
    }

    friend auto operator<=>(const BasisVector& a, const BasisVector& b) = default;
};

// Sparse complex superposition of BasisVectors, tagged with the machine
// dimensions (L, d) it was built for. Amplitudes with modulus <= prune_eps
// are dropped on canonicalization, so the zero state has an empty map.
class WaveState {
public:
    WaveState(int head_dim, int qudit_dim, double prune_eps = kDefaultPruneEps)
        : L_(head_dim), d_(qudit_dim), prune_eps_(prune_eps) {
        if (L_ < 1) throw DimensionError("head dimension must be >= 1");
        if (d_ < 2) throw DimensionError("qudit dimension must be >= 2");
    }

    // Unit basis state.
    static WaveState basis(int head_dim, int qudit_dim, const BasisVector& b,
                           double prune_eps = kDefaultPruneEps) {
        WaveState s(head_dim, qudit_dim, prune_eps);
        s.check_component(b);
        s.terms_[b] = Complex(1.0, 0.0);
        return s;
    }

    int head_dim() const { return L_; }
    int qudit_dim() const { return d_; }
    double prune_eps() const { return prune_eps_; }
    const std::map<BasisVector, Complex>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    Complex amplitude(const BasisVector& b) const {
        auto it = terms_.find(b);
        return it == terms_.end() ? Complex(0.0) : it->second;
    }

    // Accumulates into a component; call prune() when done.
    void add(const BasisVector& b, Complex amp) {
        check_component(b);
        terms_[b] += amp;
    }

    void prune() {
        for (auto it = terms_.begin(); it != terms_.end();)
            it = std::abs(it->second) <= prune_eps_ ? terms_.erase(it) : std::next(it);
    }

    double norm() const {
        double n2 = 0.0;
        for (const auto& [b, a] : terms_) n2 += std::norm(a);
        return std::sqrt(n2);
    }

    WaveState scaled(Complex factor) const {
        WaveState out(L_, d_, prune_eps_);
        for (const auto& [b, a] : terms_) out.terms_[b] = factor * a;
        out.prune();
        return out;
    }

    WaveState normalized() const {
        double n = norm();
        if (n <= prune_eps_) throw std::runtime_error("cannot normalize a zero state");
        return scaled(Complex(1.0 / n, 0.0));
    }

    WaveState translated(std::int64_t shift) const {
        WaveState out(L_, d_, prune_eps_);
        for (const auto& [b, a] : terms_) out.terms_[b.translated(shift)] = a;
        return out;
    }

    void check_compatible(const WaveState& other) const {
        if (L_ != other.L_ || d_ != other.d_)
            throw DimensionError("states built for different machines: (L=" +
                                 std::to_string(L_) + ",d=" + std::to_string(d_) + ") vs (L=" +
                                 std::to_string(other.L_) + ",d=" + std::to_string(other.d_) + ")");
    }

private:
    void check_component(const BasisVector& b) const {
        if (b.head_level < 0 || b.head_level >= L_)
            throw DimensionError("head level " + std::to_string(b.head_level) +
                                 " out of range for L=" + std::to_string(L_));
        if (b.lattice.qudit_dim() != d_)
            throw DimensionError("lattice qudit dimension mismatch");
    }

    int L_;
    int d_;
    double prune_eps_;
    std::map<BasisVector, Complex> terms_;
};

// <a|b> over the shared components. Conjugate-linear in the first slot.
inline Complex inner_product(const WaveState& a, const WaveState& b) {
    a.check_compatible(b);
    Complex out(0.0);
    // walk the smaller map
    const WaveState& small = a.size() <= b.size() ? a : b;
    const WaveState& large = a.size() <= b.size() ? b : a;
    for (const auto& [bv, amp] : small.terms()) {
        Complex other = large.amplitude(bv);
        if (&small == &a)
            out += std::conj(amp) * other;
        else
            out += std::conj(other) * amp;
    }
    return out;
}

// Componentwise linear combination, pruned to canonical form.
inline WaveState superpose(const std::vector<std::pair<Complex, WaveState>>& parts,
                           double prune_eps = kDefaultPruneEps) {
    if (parts.empty()) throw std::invalid_argument("superpose needs at least one part");
    WaveState out(parts.front().second.head_dim(), parts.front().second.qudit_dim(), prune_eps);
    for (const auto& [coeff, state] : parts) {
        out.check_compatible(state);
        for (const auto& [bv, amp] : state.terms()) out.add(bv, coeff * amp);
    }
    out.prune();
    return out;
}

}  // namespace qtm
