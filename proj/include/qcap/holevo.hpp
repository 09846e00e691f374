#ifndef QCAP_HOLEVO_HPP
#define QCAP_HOLEVO_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "qcap/qubit_channel.hpp"

namespace qcap {

/// Sphere lattice: u = 0..k along the meridian, v = 0..k-1 around the
/// equator, pole duplicates removed (k^2 - k + 2 vertices).
struct Lattice {
    std::size_t k = 0;
    std::vector<BlochPoint> points;
    double delta = 0.0;  // max geodesic distance from the sphere to the lattice
};

struct WeightedInput {
    double probability = 0.0;
    BlochPoint point;  // input on the Bloch sphere
};

struct CapacityResult {
    double value = 0.0;  // bits
    std::vector<WeightedInput> ensemble;
    BlochPoint average_output;
    double certificate_gap = 0.0;  // max lattice divergence minus objective
    double error_bound = 0.0;
    std::size_t k_used = 0;
    bool converged = false;
    std::size_t iterations = 0;
};

/// Entropy of a qubit state with Bloch radius r, in bits.
double bloch_entropy(double r);

/// Closed-form H(rho_r || rho_s) for qubit Bloch vectors (both inside the
/// ball); kDivergenceInfinity when rho_r leaves the support of a pure rho_s.
double bloch_divergence(const BlochPoint& r, const BlochPoint& s);

/// S(sum w_i out_i) - sum w_i S(out_i) for channel outputs of the ensemble.
double ensemble_objective(const QubitChannel& c, const std::vector<WeightedInput>& ensemble);

Lattice build_lattice(std::size_t k);

/// Concave maximization over ensemble weights with inputs fixed at the
/// lattice vertices (multiplicative-weights fixed point). The returned
/// certificate_gap bounds the distance to the restricted optimum.
CapacityResult restricted_capacity(const QubitChannel& c, const Lattice& lat, double tol);

/// max over lattice vertices of H(Lambda rho || sigma).
double certify_radius(const QubitChannel& c, const DensityMatrix& sigma, const Lattice& lat);

/// Damped Newton polish of the engaging inputs (spherical angles + weights)
/// solving the equal-divergence / zero-tangential-gradient stationarity
/// system. Falls back to the seed for degenerate (pure-output) channels.
CapacityResult refine_capacity(const QubitChannel& c, const CapacityResult& seed, double tol);

/// Full pipeline: doubling lattices, restricted solve, refinement, stop when
/// successive refined values agree within target_err.
CapacityResult capacity(const QubitChannel& c, double target_err);

struct SchmidtPoint {
    double p = 0.0;        // weight in [0,1]
    double theta_u = 0.0;  // [0, 2pi]
    double phi_u = 0.0;    // [0, pi/2]
    double theta_v = 0.0;  // [0, 2pi]
    double phi_v = 0.0;    // [0, pi/2]
    double nu = 0.0;       // relative phase, [0, 2pi]
};

/// Two-qubit pure state sqrt(p) |u,v> + e^{i nu} sqrt(1-p) |u_perp, v_perp>.
PureState schmidt_state(const SchmidtPoint& s);

/// Lambda (x) Lambda acting on a two-qubit density matrix via the Pauli-basis
/// superoperator.
DensityMatrix apply_channel_pair(const QubitChannel& c, const DensityMatrix& rho);

struct AdditivityScan {
    double max_divergence = 0.0;
    SchmidtPoint argmax;
    std::size_t evaluated = 0;
    // H(...) along p at the argmax angles, for convexity inspection.
    std::vector<std::pair<double, double>> p_slice;
};

/// Max of H(Lambda^{(x)2} |psi><psi| || (Lambda sigma')^{(x)2}) over the
/// Schmidt-parameter grid; np points in p, na per angle.
AdditivityScan additivity_scan(const QubitChannel& c, const BlochPoint& sigma_prime,
                               std::size_t np = 17, std::size_t na = 9,
                               unsigned threads = 0);

/// S(Lambda^{(x)2} psi_p) for psi_p = sqrt(p)|00> + sqrt(1-p)|11> on an
/// npoints grid over p in [0,1].
std::vector<std::pair<double, double>> pair_output_entropy_slice(const QubitChannel& c,
                                                                 std::size_t npoints);

}  // namespace qcap

#endif
