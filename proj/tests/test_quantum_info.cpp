#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qcap/quantum_info.hpp"
#include "qcap/rng.hpp"

using namespace qcap;

namespace {

DensityMatrix pure2(complex a, complex b) {
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    return PureState({a / n, b / n}).density();
}

DensityMatrix random_density(std::size_t dim, Rng& rng, std::size_t mixture = 3) {
    ComplexMatrix m(dim);
    for (std::size_t t = 0; t < mixture; ++t) {
        const PureState psi = random_pure_state(dim, rng);
        const double w = 1.0 / static_cast<double>(mixture);
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c)
                m(r, c) += w * psi.vec[r] * std::conj(psi.vec[c]);
    }
    return DensityMatrix(std::move(m));
}

}  // namespace

TEST_CASE("binary entropy") {
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(1.0 / 3.0) == doctest::Approx(0.9182958340544896).epsilon(1e-12));
    CHECK_THROWS_AS(binary_entropy(-0.1), std::domain_error);
    CHECK_THROWS_AS(binary_entropy(1.1), std::domain_error);
}

TEST_CASE("von Neumann entropy anchors") {
    CHECK(von_neumann_entropy(pure2(1, 0)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(von_neumann_entropy(DensityMatrix(ComplexMatrix::diag({0.5, 0.5}))) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entropy is additive over tensor products and unitarily invariant") {
    Rng rng(31);
    const DensityMatrix a = random_density(2, rng);
    const DensityMatrix b = random_density(3, rng);
    const DensityMatrix ab(kron(a.matrix, b.matrix), FactoredDims{2, 3});
    CHECK(von_neumann_entropy(ab) ==
          doctest::Approx(von_neumann_entropy(a) + von_neumann_entropy(b)).epsilon(1e-10));

    // A unitary from the eigensolver of an unrelated Hermitian matrix.
    ComplexMatrix h(3);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = r; c < 3; ++c) {
            h(r, c) = complex(rng.gaussian(), r == c ? 0.0 : rng.gaussian());
            h(c, r) = std::conj(h(r, c));
        }
    const ComplexMatrix u = hermitian_eigensystem(h).vectors;
    const DensityMatrix rotated(u * b.matrix * u.adjoint(), b.dims);
    CHECK(von_neumann_entropy(rotated) == doctest::Approx(von_neumann_entropy(b)).epsilon(1e-10));
}

TEST_CASE("quantum divergence anchors and sentinel") {
    Rng rng(17);
    const DensityMatrix rho = random_density(2, rng);
    CHECK(quantum_divergence(rho, rho) == doctest::Approx(0.0).epsilon(1e-10));

    const DensityMatrix zero = pure2(1, 0);
    const DensityMatrix mixed(ComplexMatrix::diag({0.5, 0.5}));
    CHECK(quantum_divergence(zero, mixed) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(quantum_divergence(mixed, zero) == kDivergenceInfinity);
    CHECK(std::isinf(quantum_divergence(mixed, zero)));

    const DensityMatrix big(ComplexMatrix::diag({0.25, 0.25, 0.25, 0.25}), FactoredDims{4});
    CHECK_THROWS_AS(quantum_divergence(rho, big), std::invalid_argument);
}

TEST_CASE("quantum divergence is jointly convex (spot checks)") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const DensityMatrix r1 = random_density(2, rng), r2 = random_density(2, rng);
        const DensityMatrix s1 = random_density(2, rng), s2 = random_density(2, rng);
        const double lam = 0.1 * (1 + trial % 9);
        const DensityMatrix rm(r1.matrix * complex(lam) + r2.matrix * complex(1.0 - lam));
        const DensityMatrix sm(s1.matrix * complex(lam) + s2.matrix * complex(1.0 - lam));
        const double lhs = quantum_divergence(rm, sm);
        const double rhs =
            lam * quantum_divergence(r1, s1) + (1.0 - lam) * quantum_divergence(r2, s2);
        CHECK(lhs <= rhs + 1e-9);
    }
}

TEST_CASE("divergence is asymmetric on a fixed pair") {
    const DensityMatrix rho(ComplexMatrix::diag({0.9, 0.1}));
    const DensityMatrix sig(ComplexMatrix::diag({0.4, 0.6}));
    CHECK(std::abs(quantum_divergence(rho, sig) - quantum_divergence(sig, rho)) > 0.1);
}

TEST_CASE("fidelity and Bures distance") {
    Rng rng(3);
    const DensityMatrix rho = random_density(2, rng);
    const auto self = fidelity_bures(rho, rho);
    CHECK(self.fidelity == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(self.bures == doctest::Approx(0.0).epsilon(1e-5));

    const PureState psi = random_pure_state(2, rng);
    const PureState phi = random_pure_state(2, rng);
    complex overlap = 0.0;
    for (std::size_t i = 0; i < 2; ++i) overlap += std::conj(psi.vec[i]) * phi.vec[i];
    const auto fb = fidelity_bures(psi.density(), phi.density());
    CHECK(fb.fidelity == doctest::Approx(std::abs(overlap)).epsilon(1e-9));
    CHECK(fb.bures == doctest::Approx(2.0 * std::sqrt(1.0 - std::abs(overlap))).epsilon(1e-8));

    const auto half = fidelity_bures(pure2(1, 0), DensityMatrix(ComplexMatrix::diag({0.5, 0.5})));
    CHECK(half.fidelity == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));

    // Symmetry in the arguments.
    const DensityMatrix sig = random_density(2, rng);
    CHECK(fidelity_bures(rho, sig).fidelity ==
          doctest::Approx(fidelity_bures(sig, rho).fidelity).epsilon(1e-10));
}

TEST_CASE("reduced entanglement entropy") {
    const double s = 1.0 / std::sqrt(2.0);
    const PureState bell({s, 0, 0, s}, FactoredDims{2, 2});
    CHECK(reduced_entanglement_entropy(bell, {0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(reduced_entanglement_entropy(bell, {1}) == doctest::Approx(1.0).epsilon(1e-12));

    const PureState prod({1, 0, 0, 0}, FactoredDims{2, 2});
    CHECK(reduced_entanglement_entropy(prod, {0}) == doctest::Approx(0.0).epsilon(1e-12));

    Rng rng(41);
    const PureState psi(random_pure_state(8, rng).vec, FactoredDims{2, 2, 2});
    CHECK(reduced_entanglement_entropy(psi, {0, 1}) ==
          doctest::Approx(reduced_entanglement_entropy(psi, {2})).epsilon(1e-10));
    CHECK_THROWS_AS(reduced_entanglement_entropy(psi, {0, 1, 2}), std::invalid_argument);
}

TEST_CASE("teleportation round trip is exact for every branch") {
    const double s = 1.0 / std::sqrt(2.0);
    const PureState plus({s, s});
    for (const auto& o : teleport_all_outcomes(2, plus)) {
        CHECK(o.fidelity == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(o.probability == doctest::Approx(0.25).epsilon(1e-12));
    }

    for (std::size_t d : {2, 3, 5}) {
        Rng rng(1000 + d);
        const PureState psi = random_pure_state(d, rng);
        const auto outs = teleport_all_outcomes(d, psi);
        CHECK(outs.size() == d * d);
        double total_p = 0.0;
        for (const auto& o : outs) {
            CHECK(std::abs(o.fidelity - 1.0) < 1e-12);
            total_p += o.probability;
        }
        CHECK(total_p == doctest::Approx(1.0).epsilon(1e-12));
    }

    Rng rng(77);
    const PureState psi = random_pure_state(3, rng);
    const TeleportResult res = teleport_roundtrip(3, psi, 12345);
    CHECK(res.outcome.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    const TeleportResult res2 = teleport_roundtrip(3, psi, 12345);
    CHECK(res.outcome.x == res2.outcome.x);
    CHECK(res.outcome.y == res2.outcome.y);

    CHECK_THROWS_AS(teleport_all_outcomes(1, plus), std::invalid_argument);
}
