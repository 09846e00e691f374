#include "qcap/search.hpp"

#include "qcap/qubit_channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qcap/rng.hpp"

namespace qcap {

namespace {

constexpr double kViolationTol = 1e-9;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

PureState normalized_state(std::vector<complex> v, FactoredDims dims) {
    double n = 0.0;
    for (const auto& z : v) n += std::norm(z);
    n = std::sqrt(n);
    if (n < 1e-300) throw std::runtime_error("degenerate zero state draw");
    for (auto& z : v) z /= n;
    return PureState(std::move(v), std::move(dims));
}

SearchReport aggregate(std::string mode, std::uint64_t master_seed,
                       std::vector<SuperaddSample> records) {
    SearchReport rep;
    rep.mode = std::move(mode);
    rep.master_seed = master_seed;
    rep.samples = records.size();
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : records) {
        if (s.violated) ++rep.violations;
        rep.min_margin = std::min(rep.min_margin, s.lhs - s.rhs);
    }
    rep.records = std::move(records);
    return rep;
}

// Evaluate sample factory(i) for i in [0,n) across threads; results land in
// a per-index slot so the outcome is independent of scheduling.
template <typename F>
std::vector<SuperaddSample> parallel_samples(std::size_t n, unsigned threads, F factory) {
    unsigned nt = threads ? threads : std::thread::hardware_concurrency();
    if (nt == 0) nt = 1;
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, n));
    std::vector<SuperaddSample> out(n);
    auto worker = [&](unsigned t) {
        for (std::size_t i = t; i < n; i += nt) out[i] = factory(i);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker, t);
    worker(0);
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace

SuperaddSample superadd_check(const PureState& psi) {
    if (psi.dim() != 16 || psi.dims.size() != 4)
        throw std::invalid_argument("superadd_check: need a 2x2x2x2 pure state");
    SuperaddSample s;
    s.lhs = von_neumann_entropy(reduced_density(psi, {0, 2}));       // A1 A2
    s.rhs = eof_two_qubit(reduced_density(psi, {0, 1})) +            // A1 B1
            eof_two_qubit(reduced_density(psi, {2, 3}));             // A2 B2
    s.violated = s.lhs < s.rhs - kViolationTol;
    return s;
}

PureState random_four_qubit_state(Rng& rng, bool square_sampling) {
    std::vector<complex> v(16);
    if (square_sampling) {
        for (auto& z : v) z = complex(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    } else {
        for (auto& z : v) z = complex(rng.gaussian(), rng.gaussian());
    }
    return normalized_state(std::move(v), FactoredDims{2, 2, 2, 2});
}

SearchReport random_search(std::size_t n, std::uint64_t master_seed, bool square_sampling,
                           unsigned threads) {
    if (n < 1) throw std::invalid_argument("random_search: need n >= 1");
    auto records = parallel_samples(n, threads, [&](std::size_t i) {
        Rng rng = Rng::substream(master_seed, i);
        SuperaddSample s = superadd_check(random_four_qubit_state(rng, square_sampling));
        s.seed_index = i;
        return s;
    });
    return aggregate(square_sampling ? "random_square" : "random", master_seed,
                     std::move(records));
}

SearchReport zero_neighborhood_search(double epsilon, std::size_t n, std::uint64_t master_seed,
                                      unsigned threads) {
    if (epsilon <= 0.0) throw std::invalid_argument("zero_neighborhood_search: epsilon > 0");
    auto records = parallel_samples(n, threads, [&](std::size_t i) {
        Rng rng = Rng::substream(master_seed, i);
        // Separable core across the A1B1 : A2B2 split...
        complex a[4], b[4];
        for (auto& z : a) z = complex(rng.gaussian(), rng.gaussian());
        for (auto& z : b) z = complex(rng.gaussian(), rng.gaussian());
        std::vector<complex> v(16);
        for (std::size_t ij = 0; ij < 4; ++ij)
            for (std::size_t kl = 0; kl < 4; ++kl) {
                // (i j) on A1 B1 (factors 0,1), (k l) on A2 B2 (factors 2,3).
                const std::size_t idx = (ij >> 1) * 8 + (ij & 1) * 4 + (kl >> 1) * 2 + (kl & 1);
                v[idx] = a[ij] * b[kl];
            }
        double n2 = 0.0;
        for (const auto& z : v) n2 += std::norm(z);
        const double core_norm = std::sqrt(n2);
        for (auto& z : v) z /= core_norm;
        // ...plus an epsilon-sized generic perturbation.
        std::vector<complex> pert(16);
        double pn = 0.0;
        for (auto& z : pert) {
            z = complex(rng.gaussian(), rng.gaussian());
            pn += std::norm(z);
        }
        pn = std::sqrt(pn);
        for (std::size_t j = 0; j < 16; ++j) v[j] += epsilon * pert[j] / pn;

        SuperaddSample s = superadd_check(normalized_state(std::move(v), FactoredDims{2, 2, 2, 2}));
        s.seed_index = i;
        return s;
    });
    std::ostringstream mode;
    mode << "zero_neighborhood(" << epsilon << ")";
    return aggregate(mode.str(), master_seed, std::move(records));
}

MinimumSearchResult minimum_search(std::uint64_t master_seed, std::size_t candidates_per_stage,
                                   double initial_radius, double stop_radius) {
    Rng rng = Rng::substream(master_seed, 0);
    std::vector<complex> current(16);
    for (auto& z : current) z = complex(rng.gaussian(), rng.gaussian());
    PureState cur_state = normalized_state(current, FactoredDims{2, 2, 2, 2});
    current = cur_state.vec;
    double cur_margin = [&] {
        const SuperaddSample s = superadd_check(cur_state);
        return s.lhs - s.rhs;
    }();

    MinimumSearchResult res;
    double radius = initial_radius;
    std::size_t stage = 0;
    res.trajectory.push_back({stage, radius, cur_margin});
    while (radius >= stop_radius) {
        ++stage;
        bool improved = false;
        for (std::size_t cand = 0; cand < candidates_per_stage; ++cand) {
            std::vector<complex> trial(16);
            for (std::size_t j = 0; j < 16; ++j)
                trial[j] = current[j] + radius * complex(rng.gaussian(), rng.gaussian());
            PureState ts = normalized_state(std::move(trial), FactoredDims{2, 2, 2, 2});
            const SuperaddSample s = superadd_check(ts);
            const double margin = s.lhs - s.rhs;
            if (margin < cur_margin) {
                cur_margin = margin;
                current = ts.vec;
                cur_state = std::move(ts);
                improved = true;
            }
        }
        if (!improved) radius *= 0.5;
        res.trajectory.push_back({stage, radius, cur_margin});
    }
    res.final_margin = cur_margin;
    res.final_state = cur_state;

    // Schmidt coefficients across the 4:4 cut A1B1 : A2B2.
    const DensityMatrix half = reduced_density(cur_state, {0, 1});
    res.final_schmidt_max = std::sqrt(std::max(0.0, hermitian_eigenvalues(half.matrix).front()));
    return res;
}

std::vector<GapScanRow> gap_region_scan(double grid_step) {
    if (grid_step <= 0.0 || grid_step > 0.1)
        throw std::invalid_argument("gap_region_scan: grid_step must be in (0, 0.1]");
    std::vector<GapScanRow> rows;
    const auto steps = static_cast<std::size_t>(std::floor(1.0 / grid_step)) + 1;
    for (std::size_t ix = 0; ix < steps; ++ix)
        for (std::size_t iy = 0; ix * grid_step + iy * grid_step <= 1.0 + 1e-12 && iy < steps; ++iy)
            for (std::size_t iz = 0;
                 (ix + iy + iz) * grid_step <= 1.0 + 1e-12 && iz < steps; ++iz) {
                const double px = ix * grid_step, py = iy * grid_step, pz = iz * grid_step;
                const double p0 = 1.0 - px - py - pz;
                if (p0 < -1e-12) continue;
                if (!king_ruskai_ordered(std::max(p0, 0.0), px, py, pz)) continue;
                const GapReport rep = gap_condition(std::max(p0, 0.0), px, py, pz);
                rows.push_back({px, py, pz, rep.condition_value, rep.gap_holds});
            }
    return rows;
}

std::string scatter_csv(const SearchReport& report) {
    std::ostringstream os;
    os << "# mode=" << report.mode << " samples=" << report.samples
       << " master_seed=" << report.master_seed << " violations=" << report.violations
       << " min_margin=" << fmt17(report.min_margin) << "\n";
    os << "index,lhs,rhs,violated\n";
    for (const auto& s : report.records)
        os << s.seed_index << ',' << fmt17(s.lhs) << ',' << fmt17(s.rhs) << ','
           << (s.violated ? 1 : 0) << "\n";
    return os.str();
}

std::string gap_scan_csv(const std::vector<GapScanRow>& rows, double grid_step) {
    std::ostringstream os;
    os << "# gap_region_scan grid_step=" << fmt17(grid_step) << " rows=" << rows.size() << "\n";
    os << "px,py,pz,condition_value,gap_holds\n";
    for (const auto& r : rows)
        os << fmt17(r.px) << ',' << fmt17(r.py) << ',' << fmt17(r.pz) << ','
           << fmt17(r.condition_value) << ',' << (r.gap_holds ? 1 : 0) << "\n";
    return os.str();
}

}  // namespace qcap
