#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "qcap/entanglement.hpp"
#include "qcap/qubit_channel.hpp"
#include "qcap/rng.hpp"

using namespace qcap;

namespace {

PureState bell_phi_plus() {
    const double s = 1.0 / std::sqrt(2.0);
    return PureState({s, 0, 0, s}, FactoredDims{2, 2});
}

PureState singlet() {
    const double s = 1.0 / std::sqrt(2.0);
    return PureState({0, s, -s, 0}, FactoredDims{2, 2});
}

DensityMatrix werner(double w) {
    ComplexMatrix m = bell_phi_plus().density().matrix * complex(w);
    for (int i = 0; i < 4; ++i) m(i, i) += (1.0 - w) / 4.0;
    return DensityMatrix(m, FactoredDims{2, 2});
}

std::array<double, 4> random_ordered_probs(Rng& rng) {
    while (true) {
        double p[4], s = 0.0;
        for (auto& v : p) s += (v = rng.uniform());
        for (auto& v : p) v /= s;
        if (king_ruskai_ordered(p[0], p[1], p[2], p[3])) return {p[0], p[1], p[2], p[3]};
    }
}

}  // namespace

TEST_CASE("spin flip") {
    // The singlet is invariant under the spin flip.
    const DensityMatrix sing = singlet().density();
    CHECK(spin_flip(sing).max_abs_diff(sing.matrix) < 1e-14);

    // |00><00| flips to |11><11|.
    const DensityMatrix zz(ComplexMatrix::diag({1, 0, 0, 0}), FactoredDims{2, 2});
    ComplexMatrix want(4);
    want(3, 3) = 1.0;
    CHECK(spin_flip(zz).max_abs_diff(want) < 1e-14);
}

TEST_CASE("concurrence and entanglement of formation anchors") {
    CHECK(concurrence(bell_phi_plus().density()) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(concurrence(singlet().density()) == doctest::Approx(1.0).epsilon(1e-10));

    const DensityMatrix prod(ComplexMatrix::diag({0.25, 0.25, 0.25, 0.25}), FactoredDims{2, 2});
    CHECK(concurrence(prod) < 1e-10);

    CHECK(concurrence(werner(1.0)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(concurrence(werner(1.0 / 3.0)) < 1e-9);
    // Werner concurrence is max{0, (3w-1)/2}.
    CHECK(concurrence(werner(0.8)) == doctest::Approx(0.7).epsilon(1e-9));

    CHECK(eof_two_qubit(bell_phi_plus().density()) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(eof_two_qubit(prod) < 1e-9);
}

TEST_CASE("pure-state entanglement of formation equals the reduced entropy") {
    Rng rng(101);
    for (int t = 0; t < 1000; ++t) {
        PureState psi = random_pure_state(4, rng);
        psi.dims = FactoredDims{2, 2};
        const double ef = eof_two_qubit(psi.density());
        const double se = reduced_entanglement_entropy(psi, {0});
        CHECK(std::abs(ef - se) < 1e-8);
    }
}

TEST_CASE("log negativity anchors") {
    CHECK(log_negativity(bell_phi_plus().density()) == doctest::Approx(1.0).epsilon(1e-10));
    const DensityMatrix prod(ComplexMatrix::diag({0.5, 0.5, 0, 0}), FactoredDims{2, 2});
    CHECK(log_negativity(prod) == doctest::Approx(0.0).epsilon(1e-10));
    // Werner trace norm after partial transpose is (3w+1)/2 above w = 1/3.
    CHECK(log_negativity(werner(1.0)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(log_negativity(werner(0.2)) == doctest::Approx(0.0).epsilon(1e-9));

    CHECK_THROWS_AS(log_negativity(DensityMatrix(ComplexMatrix::diag({0.5, 0.5}))),
                    std::invalid_argument);
}

TEST_CASE("gap certificate for the symmetric example") {
    const GapReport r = gap_condition(0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0);
    CHECK(r.e_c == doctest::Approx(0.9182958340544896).epsilon(1e-12));
    CHECK(r.condition_value == doctest::Approx(0.007845507).epsilon(1e-6));
    CHECK(r.gap_holds);
    // t0 is a root of the certificate quartic evaluated at 2t.
    CHECK(std::abs(gap_polynomial(2 * r.t0, 0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0)) < 1e-12);
    CHECK(r.e_n == doctest::Approx(std::log2(1 - 4 * r.t0)).epsilon(1e-12));
    CHECK(r.e_n < r.e_c);
}

TEST_CASE("gap t0 matches the explicit partial-transpose spectrum") {
    Rng rng(31);
    for (int t = 0; t < 100; ++t) {
        const auto p = random_ordered_probs(rng);
        const GapReport r = gap_condition(p[0], p[1], p[2], p[3]);
        const DensityMatrix rho = stinespring_pair_state(p[0], p[1], p[2], p[3], 0.5);
        const double tn =
            trace_norm(partial_transpose(rho.matrix, FactoredDims{2, 4}, 1));
        CHECK(std::abs((1 - 4 * r.t0) - tn) < 1e-9);
        // The gap verdict agrees with the direct comparison E_N < E_C.
        if (r.gap_holds) CHECK(std::log2(tn) < r.e_c + 1e-12);
        if (std::log2(tn) < r.e_c - 1e-9) CHECK(r.gap_holds);
    }
}

TEST_CASE("degenerate Kraus vectors in the gap certificate") {
    // A vanishing probability kills the quartic's constant term; the state
    // can still carry negativity through the cubic term.
    const GapReport r = gap_condition(0.5, 0.2, 0.0, 0.3);
    CHECK(r.t0 < -1e-3);
    CHECK(std::abs(gap_polynomial(2 * r.t0, 0.5, 0.2, 0.0, 0.3)) < 1e-12);
    const DensityMatrix rho = stinespring_pair_state(0.5, 0.2, 0.0, 0.3, 0.5);
    const double tn = trace_norm(partial_transpose(rho.matrix, FactoredDims{2, 4}, 1));
    CHECK(std::abs((1 - 4 * r.t0) - tn) < 1e-9);

    // All weight on one Kraus operator: separable, zero negativity.
    const GapReport pure = gap_condition(1.0, 0.0, 0.0, 0.0);
    CHECK(pure.t0 == 0.0);
    CHECK(pure.e_n == 0.0);
}

TEST_CASE("antisymmetric basis and random states") {
    const auto basis3 = antisym_basis(3);
    REQUIRE(basis3.size() == 3);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) {
            complex ip = 0.0;
            for (std::size_t i = 0; i < 9; ++i) ip += std::conj(basis3[a][i]) * basis3[b][i];
            CHECK(std::abs(ip - (a == b ? complex(1.0) : complex(0.0))) < 1e-14);
        }

    Rng rng(77);
    for (const std::size_t n : {std::size_t{1}, std::size_t{2}}) {
        const PureState psi = random_antisym_state(3, n, rng);
        CHECK(psi.dims.size() == 2 * n);
        double norm = 0.0;
        for (const auto& a : psi.vec) norm += std::norm(a);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
        // Antisymmetry of each pair is verified inside max_reduced_eigenvalue.
        CHECK_NOTHROW(max_reduced_eigenvalue(psi, 3, n));
    }

    // A symmetric state is rejected.
    PureState sym({1, 0, 0, 0, 0, 0, 0, 0, 0}, FactoredDims{3, 3});
    CHECK_THROWS_AS(max_reduced_eigenvalue(sym, 3, 1), std::invalid_argument);
}

TEST_CASE("antisymmetric reduced eigenvalue bounds") {
    CHECK(antisym_lower_bound(3) == doctest::Approx(std::log2(1.5)).epsilon(1e-14));
    CHECK(antisym_lower_bound(2) == doctest::Approx(1.0).epsilon(1e-14));

    Rng rng(78);
    for (const std::size_t n : {std::size_t{1}, std::size_t{2}}) {
        const double bound = std::pow(2.0 / 3.0, static_cast<double>(n));
        for (int t = 0; t < 10; ++t) {
            const PureState psi = random_antisym_state(3, n, rng);
            const double lam = max_reduced_eigenvalue(psi, 3, n);
            CHECK(lam <= bound + 1e-10);
            CHECK(lam > 0.0);
        }
    }

    // A single antisymmetric basis vector reduces to two equal eigenvalues.
    const PureState one(antisym_basis(3)[0], FactoredDims{3, 3});
    CHECK(max_reduced_eigenvalue(one, 3, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("two-pair antisymmetric spectrum") {
    // Symmetric weights: the 3x3 block has eigenvalues {1/3, 1/12, 1/12}.
    const AntisymSpectrum s = antisym_pair_spectrum(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
    REQUIRE(s.block_eigenvalues.size() == 3);
    std::vector<double> blk = s.block_eigenvalues;
    std::sort(blk.rbegin(), blk.rend());
    CHECK(blk[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(blk[1] == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
    CHECK(blk[2] == doctest::Approx(1.0 / 12.0).epsilon(1e-10));

    REQUIRE(s.eigenvalues.size() == 9);
    double sum = 0.0;
    for (double v : s.eigenvalues) {
        CHECK(v >= -1e-12);
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    // Entropy exceeds twice the single-pair lower bound.
    CHECK(s.entropy > 2 * antisym_lower_bound(3));

    // Extreme weights: spectrum {1/4 x4, 0 x5}, entropy exactly 2.
    const AntisymSpectrum e = antisym_pair_spectrum(1.0, 0.0, 0.0);
    CHECK(e.entropy == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(e.eigenvalues[0] == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(e.eigenvalues[3] == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(e.eigenvalues[4] < 1e-10);

    CHECK_THROWS_AS(antisym_pair_spectrum(0.5, 0.2, 0.2), std::invalid_argument);
}

TEST_CASE("block cubic roots") {
    const auto roots = antisym_block_roots(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
    REQUIRE(roots.size() == 3);
    for (double r : roots) {
        const double q = (1.0 / 27.0) / 16.0;
        const double g = r * r * r - r * r / 2.0 + r / 16.0 - q;
        CHECK(std::abs(g) < 1e-10);
    }

    // Against the Jacobi spectrum of the explicit block for random weights.
    Rng rng(12);
    for (int t = 0; t < 50; ++t) {
        double w[3], sum = 0.0;
        for (auto& v : w) sum += (v = rng.uniform());
        for (auto& v : w) v /= sum;
        const AntisymSpectrum spec = antisym_pair_spectrum(w[0], w[1], w[2]);
        auto roots2 = antisym_block_roots(w[2], w[1], w[0]);
        std::sort(roots2.rbegin(), roots2.rend());
        std::vector<double> blk = spec.block_eigenvalues;
        std::sort(blk.rbegin(), blk.rend());
        for (int i = 0; i < 3; ++i) CHECK(std::abs(roots2[i] - blk[i]) < 1e-9);
    }
}
