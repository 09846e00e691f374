#include "qcap/quantum_info.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qcap/rng.hpp"

namespace qcap {

namespace {

constexpr double kEigClip = 1e-12;      // negative eigenvalues above -kEigClip -> 0
constexpr double kStateTol = 1e-10;
constexpr double kSupportTol = 1e-12;

void validate_density(const ComplexMatrix& m) {
    if (m.dim() == 0) throw std::invalid_argument("density matrix: empty");
    if (!m.is_hermitian(kStateTol))
        throw std::invalid_argument("density matrix: not Hermitian within 1e-10");
    if (std::abs(m.trace() - complex(1.0)) > kStateTol)
        throw std::invalid_argument("density matrix: trace != 1");
}

// Clip tiny negative eigenvalues; anything more negative is a caller error.
double clip_eigenvalue(double lam) {
    if (lam >= 0.0) return lam;
    if (lam > -kStateTol) return 0.0;
    throw std::invalid_argument("density matrix: eigenvalue below -1e-10");
}

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix m, FactoredDims d)
    : matrix(std::move(m)), dims(std::move(d)) {
    validate_density(matrix);
    if (dims.total() != matrix.dim())
        throw std::invalid_argument("density matrix: dims do not match size");
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : matrix(std::move(m)) {
    validate_density(matrix);
    dims = FactoredDims{matrix.dim()};
}

PureState::PureState(std::vector<complex> v, FactoredDims d)
    : vec(std::move(v)), dims(std::move(d)) {
    double n = 0.0;
    for (const auto& z : vec) n += std::norm(z);
    if (std::abs(std::sqrt(n) - 1.0) > kStateTol)
        throw std::invalid_argument("pure state: norm != 1");
    if (dims.total() != vec.size())
        throw std::invalid_argument("pure state: dims do not match size");
}

PureState::PureState(std::vector<complex> v)
    : PureState([](std::vector<complex>&& w) {
          FactoredDims d{w.size()};
          return PureState(std::move(w), std::move(d));
      }(std::move(v))) {}

DensityMatrix PureState::density() const {
    ComplexMatrix m(vec.size());
    for (std::size_t r = 0; r < vec.size(); ++r)
        for (std::size_t c = 0; c < vec.size(); ++c) m(r, c) = vec[r] * std::conj(vec[c]);
    return DensityMatrix(std::move(m), dims);
}

double binary_entropy(double z) {
    if (z < -1e-12 || z > 1.0 + 1e-12)
        throw std::domain_error("binary_entropy: argument outside [0,1]");
    z = std::clamp(z, 0.0, 1.0);
    double s = 0.0;
    if (z > 0.0) s -= z * std::log2(z);
    if (z < 1.0) s -= (1.0 - z) * std::log2(1.0 - z);
    return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
    double s = 0.0;
    for (double lam : hermitian_eigenvalues(rho.matrix)) {
        lam = clip_eigenvalue(lam);
        if (lam > 0.0) s -= lam * std::log2(lam);
    }
    return std::max(s, 0.0);
}

double quantum_divergence(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("quantum_divergence: dimension mismatch");

    double s = 0.0;
    for (double lam : hermitian_eigenvalues(rho.matrix)) {
        lam = clip_eigenvalue(lam);
        if (lam > 0.0) s += lam * std::log2(lam);
    }

    const EigenSystem es = hermitian_eigensystem(sigma.matrix);
    const std::size_t n = sigma.dim();
    for (std::size_t k = 0; k < n; ++k) {
        // weight = <u_k| rho |u_k>
        complex w = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            complex row = 0.0;
            for (std::size_t c = 0; c < n; ++c) row += rho.matrix(r, c) * es.vectors(c, k);
            w += std::conj(es.vectors(r, k)) * row;
        }
        const double weight = std::max(w.real(), 0.0);
        const double mu = clip_eigenvalue(es.values[k]);
        if (mu < kSupportTol) {
            if (weight > kSupportTol) return kDivergenceInfinity;
            continue;
        }
        s -= weight * std::log2(mu);
    }
    return std::max(s, 0.0);
}

namespace {

// Hermitian principal square root via eigendecomposition.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& h) {
    const EigenSystem es = hermitian_eigensystem(h);
    const std::size_t n = h.dim();
    ComplexMatrix out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = clip_eigenvalue(es.values[k]);
        if (lam <= 0.0) continue;
        const double root = std::sqrt(lam);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                out(r, c) += root * es.vectors(r, k) * std::conj(es.vectors(c, k));
    }
    return out;
}

}  // namespace

FidelityBures fidelity_bures(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("fidelity_bures: dimension mismatch");
    const ComplexMatrix sr = hermitian_sqrt(rho.matrix);
    const ComplexMatrix inner = sr * sigma.matrix * sr;
    double f = 0.0;
    for (double lam : hermitian_eigenvalues(inner)) f += std::sqrt(std::max(lam, 0.0));
    f = std::clamp(f, 0.0, 1.0);
    return {f, 2.0 * std::sqrt(1.0 - f)};
}

DensityMatrix reduced_density(const PureState& psi, const std::vector<std::size_t>& keep) {
    const auto& factors = psi.dims.factors;
    if (factors.empty()) throw std::invalid_argument("reduced_density: state has no dims");
    const std::size_t nf = factors.size();
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] >= nf) throw std::invalid_argument("reduced_density: keep out of range");
        if (i > 0 && keep[i] <= keep[i - 1])
            throw std::invalid_argument("reduced_density: keep must be strictly increasing");
    }

    // Strides of each factor in the flat amplitude index.
    std::vector<std::size_t> stride(nf, 1);
    for (std::size_t k = nf - 1; k-- > 0;) stride[k] = stride[k + 1] * factors[k + 1];

    std::vector<std::size_t> keep_dims, trace_idx;
    for (std::size_t f : keep) keep_dims.push_back(factors[f]);
    for (std::size_t f = 0; f < nf; ++f)
        if (std::find(keep.begin(), keep.end(), f) == keep.end()) trace_idx.push_back(f);

    std::size_t dk = 1;
    for (std::size_t d : keep_dims) dk *= d;
    std::size_t dt = psi.dim() / dk;

    // Flat offset of each (kept, traced) digit combination.
    auto offset = [&](std::size_t packed, const std::vector<std::size_t>& which) {
        std::size_t off = 0;
        for (std::size_t k = which.size(); k-- > 0;) {
            const std::size_t d = factors[which[k]];
            off += (packed % d) * stride[which[k]];
            packed /= d;
        }
        return off;
    };

    std::vector<std::size_t> keep_off(dk), trace_off(dt);
    for (std::size_t r = 0; r < dk; ++r) keep_off[r] = offset(r, keep);
    for (std::size_t t = 0; t < dt; ++t) trace_off[t] = offset(t, trace_idx);

    ComplexMatrix out(dk);
    for (std::size_t r = 0; r < dk; ++r)
        for (std::size_t c = 0; c <= r; ++c) {
            complex s = 0.0;
            for (std::size_t t = 0; t < dt; ++t)
                s += psi.vec[keep_off[r] + trace_off[t]] *
                     std::conj(psi.vec[keep_off[c] + trace_off[t]]);
            out(r, c) = s;
            out(c, r) = std::conj(s);
        }
    FactoredDims rd;
    rd.factors = keep_dims;
    return DensityMatrix(std::move(out), std::move(rd));
}

double reduced_entanglement_entropy(const PureState& psi, const std::vector<std::size_t>& left) {
    if (left.empty() || left.size() >= psi.dims.size())
        throw std::invalid_argument("reduced_entanglement_entropy: bipartition is trivial");
    return von_neumann_entropy(reduced_density(psi, left));
}

std::vector<TeleportOutcome> teleport_all_outcomes(std::size_t d, const PureState& psi) {
    if (d < 2) throw std::invalid_argument("teleport: need d >= 2");
    if (psi.dim() != d) throw std::invalid_argument("teleport: state dim != d");
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<TeleportOutcome> out;
    out.reserve(d * d);
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y) {
            // Bob's unnormalized branch: component m is a_{m-y} w^{-(m-y)x}/d.
            std::vector<complex> bob(d);
            double p = 0.0;
            for (std::size_t m = 0; m < d; ++m) {
                const std::size_t src = (m + d - y) % d;
                const double ang = -two_pi * static_cast<double>((src * x) % d) / d;
                bob[m] = psi.vec[src] * std::polar(1.0 / d, ang);
                p += std::norm(bob[m]);
            }
            // Correction u_{i,m} = delta_{m, i+y} w^{ix}: take component i+y,
            // undo the phase, land on index i.
            std::vector<complex> fixed(d);
            for (std::size_t i = 0; i < d; ++i) {
                const double ang = two_pi * static_cast<double>((i * x) % d) / d;
                fixed[i] = bob[(i + y) % d] * std::polar(1.0, ang);
            }
            const double norm = std::sqrt(p);
            for (auto& z : fixed) z /= norm;
            complex overlap = 0.0;
            for (std::size_t i = 0; i < d; ++i) overlap += std::conj(fixed[i]) * psi.vec[i];

            TeleportOutcome o;
            o.x = x;
            o.y = y;
            o.probability = p;
            o.received = std::move(fixed);
            o.fidelity = std::abs(overlap);
            out.push_back(std::move(o));
        }
    return out;
}

TeleportResult teleport_roundtrip(std::size_t d, const PureState& psi, std::uint64_t seed) {
    auto outcomes = teleport_all_outcomes(d, psi);
    Rng rng(seed);
    const double u = rng.uniform();
    double acc = 0.0;
    for (auto& o : outcomes) {
        acc += o.probability;
        if (u < acc) return {std::move(o)};
    }
    return {std::move(outcomes.back())};
}

PureState random_pure_state(std::size_t dim, Rng& rng) {
    std::vector<complex> v(dim);
    double n = 0.0;
    for (auto& z : v) {
        z = complex(rng.gaussian(), rng.gaussian());
        n += std::norm(z);
    }
    n = std::sqrt(n);
    for (auto& z : v) z /= n;
    return PureState(std::move(v), FactoredDims{dim});
}

}  // namespace qcap
