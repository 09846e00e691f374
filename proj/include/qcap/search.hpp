#ifndef QCAP_SEARCH_HPP
#define QCAP_SEARCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qcap/entanglement.hpp"
#include "qcap/quantum_info.hpp"

namespace qcap {

/// One evaluation of the strong-superadditivity inequality on a 4-qubit pure
/// state (factor order A1 B1 A2 B2): lhs = S(rho_{A1A2}),
/// rhs = E_F(rho_{A1B1}) + E_F(rho_{A2B2}).
struct SuperaddSample {
    std::uint64_t seed_index = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool violated = false;  // lhs < rhs - 1e-9
};

struct SearchReport {
    std::string mode;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double min_margin = 0.0;  // min over samples of lhs - rhs
    std::uint64_t master_seed = 0;
    std::vector<SuperaddSample> records;
};

SuperaddSample superadd_check(const PureState& psi);

/// Draw a 16-amplitude state. Gaussian coefficients by default; the
/// compatibility flag reproduces uniform draws from the complex unit square.
PureState random_four_qubit_state(Rng& rng, bool square_sampling = false);

SearchReport random_search(std::size_t n, std::uint64_t master_seed,
                           bool square_sampling = false, unsigned threads = 0);

/// Separable core (product of two random bipartite states) plus an epsilon
/// perturbation by a random 16-dim state, normalized.
SearchReport zero_neighborhood_search(double epsilon, std::size_t n, std::uint64_t master_seed,
                                      unsigned threads = 0);

struct MinimumSearchStage {
    std::size_t stage = 0;
    double radius = 0.0;
    double margin = 0.0;
};

struct MinimumSearchResult {
    std::vector<MinimumSearchStage> trajectory;
    double final_margin = 0.0;
    /// Largest Schmidt coefficient of the final point across the
    /// A1B1 : A2B2 cut (1 means a separable split).
    double final_schmidt_max = 0.0;
    PureState final_state;
};

/// Shrinking-neighborhood descent on margin = lhs - rhs: candidates per
/// stage on the coefficient sphere, radius halved when no candidate improves,
/// stop when radius < 1e-6.
MinimumSearchResult minimum_search(std::uint64_t master_seed, std::size_t candidates_per_stage = 200,
                                   double initial_radius = 0.3, double stop_radius = 1e-6);

struct GapScanRow {
    double px = 0.0, py = 0.0, pz = 0.0;  // p0 = 1 - px - py - pz
    double condition_value = 0.0;
    bool gap_holds = false;
};

/// Sweep of the Kraus-probability simplex (axis-ordered region only).
std::vector<GapScanRow> gap_region_scan(double grid_step);

/// CSV emission; every file starts with a '#' header embedding seed/config.
std::string scatter_csv(const SearchReport& report);
std::string gap_scan_csv(const std::vector<GapScanRow>& rows, double grid_step);

}  // namespace qcap

#endif
