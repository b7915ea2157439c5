#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracle.hpp"
#include "qtm/state.hpp"

using namespace qtm;

TEST_CASE("lattice stores only nonzero levels in canonical form") {
    QuditLattice lat(3);
    CHECK(lat.entries().empty());
    lat = lat.with_level(4, 2).with_level(-1, 1);
    CHECK(lat.level_at(4) == 2);
    CHECK(lat.level_at(-1) == 1);
    CHECK(lat.level_at(0) == 0);
    CHECK(lat.entries().size() == 2);

    SECTION("setting level 0 erases the entry") {
        lat = lat.with_level(4, 0);
        CHECK(lat.level_at(4) == 0);
        CHECK(lat.entries().size() == 1);
    }
    SECTION("out-of-range levels are rejected") {
        CHECK_THROWS_AS(lat.with_level(0, 3), DimensionError);
        CHECK_THROWS_AS(lat.with_level(0, -1), DimensionError);
    }
    SECTION("translation shifts every site") {
        QuditLattice moved = lat.translated(10);
        CHECK(moved.level_at(14) == 2);
        CHECK(moved.level_at(9) == 1);
        CHECK(moved.entries().size() == 2);
    }
}

TEST_CASE("lattice dimension must be at least 2") {
    CHECK_THROWS_AS(QuditLattice(1), DimensionError);
}

TEST_CASE("basis vectors order and translate consistently") {
    QuditLattice lat(2);
    BasisVector a(0, 0, lat);
    BasisVector b(0, 1, lat);
    BasisVector c(1, 0, lat);
    CHECK(a < b);
    CHECK(a < c);
    CHECK(a == BasisVector(0, 0, QuditLattice(2)));
    BasisVector moved = b.translated(-3);
    CHECK(moved.head_pos == -2);
    CHECK(moved.head_level == 0);
}

TEST_CASE("wave states accumulate, prune, and normalize") {
    WaveState psi(2, 2);
    QuditLattice lat(2);
    BasisVector b0(0, 0, lat);
    BasisVector b1(1, 2, lat.with_level(2, 1));

    psi.add(b0, Complex(3.0, 0.0));
    psi.add(b1, Complex(0.0, 4.0));
    psi.add(b0, Complex(-3.0, 0.0));  // cancels below prune_eps
    psi.prune();

    CHECK(psi.size() == 1);
    CHECK(psi.amplitude(b0) == Complex(0.0));
    CHECK(psi.amplitude(b1) == Complex(0.0, 4.0));
    CHECK(psi.norm() == Catch::Approx(4.0));

    WaveState unit = psi.normalized();
    CHECK(unit.norm() == Catch::Approx(1.0));
    CHECK(unit.amplitude(b1) == Complex(0.0, 1.0));

    SECTION("a zero state cannot be normalized") {
        WaveState zero(2, 2);
        CHECK_THROWS(zero.normalized());
    }
    SECTION("scaling is componentwise") {
        WaveState doubled = psi.scaled(Complex(2.0));
        CHECK(doubled.amplitude(b1) == Complex(0.0, 8.0));
    }
    SECTION("translation moves head and lattice together") {
        WaveState moved = psi.translated(5);
        CHECK(moved.amplitude(BasisVector(1, 7, QuditLattice(2).with_level(7, 1))) ==
              Complex(0.0, 4.0));
    }
}

TEST_CASE("components outside the machine dimensions are rejected") {
    WaveState psi(2, 2);
    CHECK_THROWS_AS(psi.add(BasisVector(2, 0, QuditLattice(2)), Complex(1.0)), DimensionError);
    CHECK_THROWS_AS(psi.add(BasisVector(0, 0, QuditLattice(3)), Complex(1.0)), DimensionError);
}

TEST_CASE("inner product is conjugate-symmetric and conjugate-linear in the bra") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        WaveState a = oracle::random_state(3, 2, rng);
        WaveState b = oracle::random_state(3, 2, rng);
        const Complex ab = inner_product(a, b);
        const Complex ba = inner_product(b, a);
        CHECK(std::abs(ab - std::conj(ba)) < 1e-14);

        const Complex z(0.3, -1.1);
        CHECK(std::abs(inner_product(a.scaled(z), b) - std::conj(z) * ab) < 1e-13);
        CHECK(std::abs(inner_product(a, b.scaled(z)) - z * ab) < 1e-13);
    }
}

TEST_CASE("inner product rejects mismatched machines") {
    WaveState a(2, 2), b(2, 3);
    CHECK_THROWS_AS(inner_product(a, b), DimensionError);
}

TEST_CASE("superpose forms pruned linear combinations") {
    QuditLattice lat(2);
    WaveState a = WaveState::basis(1, 2, BasisVector(0, 0, lat));
    WaveState b = WaveState::basis(1, 2, BasisVector(0, 1, lat));
    WaveState sum = superpose({{Complex(0.6), a}, {Complex(0.8), b}});
    CHECK(sum.norm() == Catch::Approx(1.0));

    WaveState cancel = superpose({{Complex(1.0), a}, {Complex(-1.0), a}});
    CHECK(cancel.empty());

    CHECK_THROWS_AS(superpose({}), std::invalid_argument);
    CHECK_THROWS_AS(superpose({{Complex(1.0), a}, {Complex(1.0), WaveState(2, 2)}}),
                    DimensionError);
}
