#include "qcap/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qcap/qubit_channel.hpp"
#include "qcap/rng.hpp"

namespace qcap {

namespace {

const complex kI{0.0, 1.0};

ComplexMatrix yy_matrix() {
    const ComplexMatrix y(2, {0, -kI, kI, 0});
    return kron(y, y);
}

void require_two_qubits(const DensityMatrix& rho, const char* where) {
    if (rho.dim() != 4)
        throw std::invalid_argument(std::string(where) + ": need a 4-dimensional (2x2) state");
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& h) {
    const EigenSystem es = hermitian_eigensystem(h);
    ComplexMatrix out(h.dim());
    for (std::size_t k = 0; k < h.dim(); ++k) {
        const double lam = std::max(es.values[k], 0.0);
        if (lam == 0.0) continue;
        const double root = std::sqrt(lam);
        for (std::size_t r = 0; r < h.dim(); ++r)
            for (std::size_t c = 0; c < h.dim(); ++c)
                out(r, c) += root * es.vectors(r, k) * std::conj(es.vectors(c, k));
    }
    return out;
}

}  // namespace

ComplexMatrix spin_flip(const DensityMatrix& rho) {
    require_two_qubits(rho, "spin_flip");
    const ComplexMatrix yy = yy_matrix();
    return yy * rho.matrix.transpose() * yy;
}

double concurrence(const DensityMatrix& rho) {
    require_two_qubits(rho, "concurrence");
    const ComplexMatrix root = hermitian_sqrt(rho.matrix);
    const ComplexMatrix inner = root * spin_flip(rho) * root;
    std::vector<double> lam = hermitian_eigenvalues(inner);
    // The square root amplifies solver noise around zero to ~sqrt(eps);
    // eigenvalues that are zero relative to the top of the spectrum are
    // clamped before the root is taken.
    const double floor = std::max(lam.front(), 0.0) * 1e-13;
    for (auto& l : lam) l = l > floor ? std::sqrt(l) : 0.0;
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return std::clamp(lam[0] - lam[1] - lam[2] - lam[3], 0.0, 1.0);
}

double eof_two_qubit(const DensityMatrix& rho) {
    const double c = concurrence(rho);
    return binary_entropy(0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - c * c))));
}

double log_negativity(const DensityMatrix& rho) {
    if (rho.dims.size() != 2)
        throw std::invalid_argument("log_negativity: state must declare two factors");
    const ComplexMatrix pt = partial_transpose(rho.matrix, rho.dims, 1);
    return std::max(0.0, std::log2(trace_norm(pt)));
}

double gap_polynomial(double t, double p0, double px, double py, double pz) {
    const double e3 = p0 * px * py + p0 * px * pz + p0 * py * pz + px * py * pz;
    const double e4 = p0 * px * py * pz;
    return ((t - 1.0) * t * t) * t + 4.0 * e3 * t - 16.0 * e4;
}

GapReport gap_condition(double p0, double px, double py, double pz) {
    for (double p : {p0, px, py, pz})
        if (p < -1e-12) throw std::invalid_argument("gap_condition: negative probability");
    if (std::abs(p0 + px + py + pz - 1.0) > 1e-12)
        throw std::invalid_argument("gap_condition: probabilities must sum to 1");
    if (!king_ruskai_ordered(p0, px, py, pz))
        throw std::invalid_argument("gap_condition: axis-ordering condition violated");

    GapReport rep;
    rep.p = {p0, px, py, pz};

    const double e3 = p0 * px * py + p0 * px * pz + p0 * py * pz + px * py * pz;
    const double e4 = p0 * px * py * pz;
    if (e3 < 1e-30 && e4 < 1e-30) {
        // f(2t) = 8t^3(2t - 1): no negative root, the partial transpose is
        // PSD and the negativity vanishes.
        rep.t0 = 0.0;
        rep.e_n = 0.0;
    } else {
        auto f2 = [&](double t) { return gap_polynomial(2.0 * t, p0, px, py, pz); };
        double lo = -0.5, hi = -1e-16;
        if (f2(lo) <= 0.0 || f2(hi) >= 0.0)
            throw std::runtime_error("gap_condition: no sign change in the bisection bracket");
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            (f2(mid) > 0.0 ? lo : hi) = mid;
        }
        rep.t0 = 0.5 * (lo + hi);
        rep.e_n = std::log2(1.0 - 4.0 * rep.t0);
    }

    rep.e_c = binary_entropy(p0 + pz);
    rep.condition_value =
        gap_polynomial(-0.5 * (std::exp2(rep.e_c) - 1.0), p0, px, py, pz);
    rep.gap_holds = rep.condition_value > 0.0;
    return rep;
}

double antisym_lower_bound(std::size_t d) {
    if (d < 2) throw std::invalid_argument("antisym_lower_bound: need d >= 2");
    return std::log2(static_cast<double>(d) / static_cast<double>(d - 1));
}

std::vector<std::vector<complex>> antisym_basis(std::size_t d) {
    if (d < 2) throw std::invalid_argument("antisym_basis: need d >= 2");
    std::vector<std::vector<complex>> basis;
    const double inv = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            std::vector<complex> v(d * d);
            v[i * d + j] = inv;
            v[j * d + i] = -inv;
            basis.push_back(std::move(v));
        }
    return basis;
}

PureState random_antisym_state(std::size_t d, std::size_t n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("random_antisym_state: need n >= 1");
    const auto basis = antisym_basis(d);
    const std::size_t m = basis.size();
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= m;

    std::size_t dim = 1;
    for (std::size_t i = 0; i < 2 * n; ++i) dim *= d;
    std::vector<complex> amps(dim);

    for (std::size_t combo = 0; combo < combos; ++combo) {
        const complex coef(rng.gaussian(), rng.gaussian());
        // Tensor the chosen basis vector of each pair into the full register
        // (factor ordering A1 B1 A2 B2 ...).
        std::vector<std::size_t> choice(n);
        std::size_t rest = combo;
        for (std::size_t pair = n; pair-- > 0;) {
            choice[pair] = rest % m;
            rest /= m;
        }
        std::vector<std::pair<std::size_t, complex>> acc{{0, coef}};
        for (std::size_t pair = 0; pair < n; ++pair) {
            std::vector<std::pair<std::size_t, complex>> next;
            for (const auto& [idx, val] : acc)
                for (std::size_t e = 0; e < d * d; ++e) {
                    const complex b = basis[choice[pair]][e];
                    if (b == complex{}) continue;
                    next.emplace_back(idx * d * d + e, val * b);
                }
            acc = std::move(next);
        }
        for (const auto& [idx, val] : acc) amps[idx] += val;
    }

    double norm = 0.0;
    for (const auto& z : amps) norm += std::norm(z);
    norm = std::sqrt(norm);
    if (norm < 1e-300) throw std::runtime_error("random_antisym_state: zero draw");
    for (auto& z : amps) z /= norm;

    FactoredDims dims;
    dims.factors.assign(2 * n, d);
    return PureState(std::move(amps), std::move(dims));
}

namespace {

// ||P_swap(pair) psi + psi|| where the swap exchanges factors 2m and 2m+1.
double antisym_residual(const PureState& psi, std::size_t d, std::size_t n, std::size_t pair) {
    const std::size_t dim = psi.dim();
    std::vector<std::size_t> stride(2 * n, 1);
    for (std::size_t k = 2 * n - 1; k-- > 0;) stride[k] = stride[k + 1] * d;
    const std::size_t sa = stride[2 * pair], sb = stride[2 * pair + 1];
    double r = 0.0;
    for (std::size_t idx = 0; idx < dim; ++idx) {
        const long long a = static_cast<long long>((idx / sa) % d);
        const long long b = static_cast<long long>((idx / sb) % d);
        const std::size_t swapped = static_cast<std::size_t>(
            static_cast<long long>(idx) + (b - a) * static_cast<long long>(sa) +
            (a - b) * static_cast<long long>(sb));
        r += std::norm(psi.vec[swapped] + psi.vec[idx]);
    }
    return std::sqrt(r);
}

}  // namespace

double max_reduced_eigenvalue(const PureState& psi, std::size_t d, std::size_t n) {
    if (psi.dims.size() != 2 * n)
        throw std::invalid_argument("max_reduced_eigenvalue: expected 2n factors");
    for (std::size_t f : psi.dims.factors)
        if (f != d) throw std::invalid_argument("max_reduced_eigenvalue: factor dim mismatch");
    for (std::size_t pair = 0; pair < n; ++pair)
        if (antisym_residual(psi, d, n, pair) > 1e-10)
            throw std::invalid_argument(
                "max_reduced_eigenvalue: state is outside the antisymmetric subspace");

    std::vector<std::size_t> keep;
    for (std::size_t pair = 0; pair < n; ++pair) keep.push_back(2 * pair);
    const DensityMatrix red = reduced_density(psi, keep);
    return hermitian_eigenvalues(red.matrix).front();
}

std::vector<double> antisym_block_roots(double p12, double p13, double p23) {
    // l^3 + A l^2 + B l + C with A = -1/2, B = 1/16, C = -p12 p13 p23/16;
    // all roots real (spectrum of a symmetric matrix): trigonometric form.
    const double A = -0.5, B = 1.0 / 16.0, C = -p12 * p13 * p23 / 16.0;
    const double p = B - A * A / 3.0;
    const double q = 2.0 * A * A * A / 27.0 - A * B / 3.0 + C;
    std::vector<double> roots;
    if (std::abs(p) < 1e-18) {
        roots.assign(3, std::cbrt(-q) - A / 3.0);
    } else {
        const double mag = 2.0 * std::sqrt(-p / 3.0);
        const double arg =
            std::acos(std::clamp(3.0 * q / (p * mag), -1.0, 1.0));
        for (int k = 0; k < 3; ++k)
            roots.push_back(mag * std::cos((arg - 2.0 * std::numbers::pi * k) / 3.0) - A / 3.0);
    }
    std::sort(roots.begin(), roots.end(), std::greater<>());
    return roots;
}

AntisymSpectrum antisym_pair_spectrum(double p1, double p2, double p3) {
    for (double p : {p1, p2, p3})
        if (p < -1e-12) throw std::invalid_argument("antisym_pair_spectrum: negative weight");
    if (std::abs(p1 + p2 + p3 - 1.0) > 1e-12)
        throw std::invalid_argument("antisym_pair_spectrum: weights must sum to 1");

    // Weight labels follow the basis-pair convention p1 = p_{23}, p2 = p_{13},
    // p3 = p_{12}; the block spectrum is symmetric under relabeling.
    const double p23 = p1, p13 = p2, p12 = p3;
    ComplexMatrix block(3);
    block(0, 0) = 0.25 * (p12 + p13);
    block(1, 1) = 0.25 * (p12 + p23);
    block(2, 2) = 0.25 * (p13 + p23);
    block(0, 1) = block(1, 0) = 0.25 * std::sqrt(p13 * p23);
    block(0, 2) = block(2, 0) = 0.25 * std::sqrt(p12 * p23);
    block(1, 2) = block(2, 1) = 0.25 * std::sqrt(p12 * p13);

    AntisymSpectrum sp;
    sp.p = {p1, p2, p3};
    sp.block_eigenvalues = hermitian_eigenvalues(block);
    sp.eigenvalues = sp.block_eigenvalues;
    for (double pij : {p12, p12, p13, p13, p23, p23}) sp.eigenvalues.push_back(0.25 * pij);
    std::sort(sp.eigenvalues.begin(), sp.eigenvalues.end(), std::greater<>());
    double h = 0.0;
    for (double lam : sp.eigenvalues)
        if (lam > 1e-300) h -= lam * std::log2(lam);
    sp.entropy = h;
    return sp;
}

}  // namespace qcap
