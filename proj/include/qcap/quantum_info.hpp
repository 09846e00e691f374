#ifndef QCAP_QUANTUM_INFO_HPP
#define QCAP_QUANTUM_INFO_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "qcap/complex_matrix.hpp"

namespace qcap {

class Rng;

/// Divergence value signalling support(rho) outside support(sigma).
inline constexpr double kDivergenceInfinity = std::numeric_limits<double>::infinity();

/// Unit trace, Hermitian, positive semidefinite (small negative eigenvalues
/// from roundoff are tolerated down to -1e-10).
struct DensityMatrix {
    ComplexMatrix matrix;
    FactoredDims dims;

    DensityMatrix() = default;
    DensityMatrix(ComplexMatrix m, FactoredDims d);
    explicit DensityMatrix(ComplexMatrix m);

    std::size_t dim() const { return matrix.dim(); }
};

struct PureState {
    std::vector<complex> vec;
    FactoredDims dims;

    PureState() = default;
    PureState(std::vector<complex> v, FactoredDims d);
    explicit PureState(std::vector<complex> v);

    std::size_t dim() const { return vec.size(); }
    DensityMatrix density() const;
};

/// [0,1] -> bits; 0 log 0 = 0.
double binary_entropy(double z);

/// Shannon entropy (bits) of the eigenvalue list of rho.
double von_neumann_entropy(const DensityMatrix& rho);

/// H(rho||sigma) = Tr(rho log2 rho - rho log2 sigma); kDivergenceInfinity
/// when rho has weight above 1e-12 on a sigma-eigenvector with eigenvalue
/// below 1e-12.
double quantum_divergence(const DensityMatrix& rho, const DensityMatrix& sigma);

struct FidelityBures {
    double fidelity;
    double bures;
};

/// F = Tr sqrt(sqrt(rho) sigma sqrt(rho)), B = 2 sqrt(1 - F).
FidelityBures fidelity_bures(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Reduction of |psi><psi| to the listed factors, computed directly from the
/// amplitudes (no intermediate full-dimension matrix).
DensityMatrix reduced_density(const PureState& psi, const std::vector<std::size_t>& keep);

/// Entropy of either side of a bipartition of a pure state; `left` lists the
/// factor indices of one block (the complement forms the other).
double reduced_entanglement_entropy(const PureState& psi, const std::vector<std::size_t>& left);

struct TeleportOutcome {
    std::size_t x = 0, y = 0;
    double probability = 0.0;
    std::vector<complex> received;  // after Bob's correction, normalized
    double fidelity = 0.0;          // |<received|input>|
};

struct TeleportResult {
    TeleportOutcome outcome;  // the sampled branch
};

/// All d^2 measurement branches of the d-level teleportation protocol,
/// each with Bob's corrected state and its overlap with the input.
std::vector<TeleportOutcome> teleport_all_outcomes(std::size_t d, const PureState& psi);

/// Sample one branch from the protocol distribution using the given seed.
TeleportResult teleport_roundtrip(std::size_t d, const PureState& psi, std::uint64_t seed);

/// Haar-ish random state from i.i.d. complex Gaussian amplitudes.
PureState random_pure_state(std::size_t dim, Rng& rng);

}  // namespace qcap

#endif
