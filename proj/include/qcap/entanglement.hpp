#ifndef QCAP_ENTANGLEMENT_HPP
#define QCAP_ENTANGLEMENT_HPP

#include <array>
#include <vector>

#include "qcap/quantum_info.hpp"

namespace qcap {

class Rng;

/// (sigma_y (x) sigma_y) rho^T (sigma_y (x) sigma_y) on a two-qubit state.
ComplexMatrix spin_flip(const DensityMatrix& rho);

/// Wootters concurrence max{0, l1-l2-l3-l4}; the l_i are computed from the
/// Hermitian sqrt(rho) rho~ sqrt(rho), which shares its spectrum with rho rho~.
double concurrence(const DensityMatrix& rho);

/// Two-qubit entanglement of formation H2((1 - sqrt(1-C^2))/2).
double eof_two_qubit(const DensityMatrix& rho);

/// log2 of the trace norm of the partial transpose (second factor).
double log_negativity(const DensityMatrix& rho);

struct GapReport {
    std::array<double, 4> p{};  // (p0, px, py, pz)
    double t0 = 0.0;            // negative root of f(2t)
    double e_n = 0.0;           // log negativity of the Stinespring pair state
    double e_c = 0.0;           // entanglement cost H2(p0 + pz)
    double condition_value = 0.0;  // f(-(2^H - 1)/2)
    bool gap_holds = false;
};

/// Quartic certificate polynomial
/// f(t) = t^4 - t^3 + 4 e3 t - 16 p0 px py pz, e3 = sum of triple products.
double gap_polynomial(double t, double p0, double px, double py, double pz);

/// Distillation-vs-cost gap certificate for the generalized depolarizing
/// channel with the given Kraus probabilities (axis-ordered).
GapReport gap_condition(double p0, double px, double py, double pz);

/// log2(d / (d-1)): entanglement-cost lower bound for the antisymmetric pair.
double antisym_lower_bound(std::size_t d);

/// Antisymmetric basis of C^d (x) C^d: vectors (|i>|j> - |j>|i>)/sqrt(2)
/// for i < j, ordered lexicographically.
std::vector<std::vector<complex>> antisym_basis(std::size_t d);

/// Random unit vector in the antisymmetric subspace of (C^d (x) C^d)^{(x) n},
/// returned as a PureState with 2n factors of dimension d each
/// (A1 B1 A2 B2 ... ordering).
PureState random_antisym_state(std::size_t d, std::size_t n, Rng& rng);

/// Largest eigenvalue of the reduction of psi onto the A factors; psi must
/// lie in the antisymmetric subspace of each (A_m, B_m) pair (residual 1e-10).
double max_reduced_eigenvalue(const PureState& psi, std::size_t d, std::size_t n);

struct AntisymSpectrum {
    std::array<double, 3> p{};          // (p1, p2, p3) = (p23, p13, p12) weights
    std::vector<double> eigenvalues;    // 9 values, descending
    std::vector<double> block_eigenvalues;  // the nontrivial 3x3 block
    double entropy = 0.0;
};

/// Spectrum of the A-side reduction Xi of the antisymmetric two-pair state
/// with weights (p1,p2,p3) on the antisymmetric basis, via the direct-sum
/// block form; entropy in bits.
AntisymSpectrum antisym_pair_spectrum(double p1, double p2, double p3);

/// Roots of g(l) = l^3 - l^2/2 + l/16 - p12 p13 p23 / 16 (all real).
std::vector<double> antisym_block_roots(double p12, double p13, double p23);

}  // namespace qcap

#endif
