#include "qcap/complex_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qcap {

namespace {
constexpr double kHermTol = 1e-10;
}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::initializer_list<complex> entries)
    : dim_(dim), a_(entries) {
    if (a_.size() != dim * dim)
        throw std::invalid_argument("ComplexMatrix: initializer size != dim^2");
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diag(const std::vector<double>& d) {
    ComplexMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix m(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) m(c, r) = (*this)(r, c);
    return m;
}

complex ComplexMatrix::trace() const {
    complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : a_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
    if (other.dim_ != dim_) throw std::invalid_argument("max_abs_diff: dim mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) m = std::max(m, std::abs(a_[i] - other.a_[i]));
    return m;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = r; c < dim_; ++c)
            if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
    return true;
}

bool ComplexMatrix::all_finite() const {
    return std::all_of(a_.begin(), a_.end(), [](const complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
    if (rhs.dim_ != dim_) throw std::invalid_argument("matrix add: dim mismatch");
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] + rhs.a_[i];
    return m;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
    if (rhs.dim_ != dim_) throw std::invalid_argument("matrix sub: dim mismatch");
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] - rhs.a_[i];
    return m;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
    if (rhs.dim_ != dim_) throw std::invalid_argument("matrix mul: dim mismatch");
    ComplexMatrix m(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t k = 0; k < dim_; ++k) {
            const complex x = (*this)(r, k);
            if (x == complex{}) continue;
            for (std::size_t c = 0; c < dim_; ++c) m(r, c) += x * rhs(k, c);
        }
    return m;
}

ComplexMatrix ComplexMatrix::operator*(complex s) const {
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] * s;
    return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
    if (rhs.dim_ != dim_) throw std::invalid_argument("matrix add: dim mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += rhs.a_[i];
    return *this;
}

std::vector<complex> ComplexMatrix::apply(const std::vector<complex>& v) const {
    if (v.size() != dim_) throw std::invalid_argument("matrix apply: dim mismatch");
    std::vector<complex> out(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
        complex s = 0.0;
        for (std::size_t c = 0; c < dim_; ++c) s += (*this)(r, c) * v[c];
        out[r] = s;
    }
    return out;
}

std::size_t FactoredDims::total() const {
    std::size_t n = 1;
    for (std::size_t d : factors) n *= d;
    return n;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t da = a.dim(), db = b.dim();
    ComplexMatrix m(da * db);
    for (std::size_t ra = 0; ra < da; ++ra)
        for (std::size_t ca = 0; ca < da; ++ca) {
            const complex x = a(ra, ca);
            if (x == complex{}) continue;
            for (std::size_t rb = 0; rb < db; ++rb)
                for (std::size_t cb = 0; cb < db; ++cb)
                    m(ra * db + rb, ca * db + cb) = x * b(rb, cb);
        }
    return m;
}

namespace {

// Decompose a flat composite index into per-factor digits (factor 0 slowest).
void unflatten(std::size_t idx, const std::vector<std::size_t>& dims,
               std::vector<std::size_t>& digits) {
    for (std::size_t k = dims.size(); k-- > 0;) {
        digits[k] = idx % dims[k];
        idx /= dims[k];
    }
}

std::size_t flatten(const std::vector<std::size_t>& digits, const std::vector<std::size_t>& dims) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + digits[k];
    return idx;
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& m, const FactoredDims& dims,
                            const std::vector<std::size_t>& keep) {
    if (dims.total() != m.dim()) throw std::invalid_argument("partial_trace: dims mismatch");
    const std::size_t nf = dims.size();
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] >= nf) throw std::invalid_argument("partial_trace: keep index out of range");
        if (i > 0 && keep[i] <= keep[i - 1])
            throw std::invalid_argument("partial_trace: keep must be strictly increasing");
    }

    std::vector<std::size_t> traced;
    for (std::size_t f = 0; f < nf; ++f)
        if (std::find(keep.begin(), keep.end(), f) == keep.end()) traced.push_back(f);

    std::vector<std::size_t> keep_dims, trace_dims;
    for (std::size_t f : keep) keep_dims.push_back(dims.factors[f]);
    for (std::size_t f : traced) trace_dims.push_back(dims.factors[f]);
    const std::size_t dk = std::accumulate(keep_dims.begin(), keep_dims.end(), std::size_t{1},
                                           std::multiplies<>());
    const std::size_t dt = m.dim() / dk;

    ComplexMatrix out(dk);
    std::vector<std::size_t> kr(keep.size()), kc(keep.size()), td(traced.size());
    std::vector<std::size_t> full(nf);
    for (std::size_t r = 0; r < dk; ++r) {
        unflatten(r, keep_dims, kr);
        for (std::size_t c = 0; c < dk; ++c) {
            unflatten(c, keep_dims, kc);
            complex s = 0.0;
            for (std::size_t t = 0; t < dt; ++t) {
                if (!trace_dims.empty()) unflatten(t, trace_dims, td);
                for (std::size_t i = 0; i < keep.size(); ++i) full[keep[i]] = kr[i];
                for (std::size_t i = 0; i < traced.size(); ++i) full[traced[i]] = td[i];
                const std::size_t row = flatten(full, dims.factors);
                for (std::size_t i = 0; i < keep.size(); ++i) full[keep[i]] = kc[i];
                const std::size_t col = flatten(full, dims.factors);
                s += m(row, col);
            }
            out(r, c) = s;
        }
    }
    return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, const FactoredDims& dims,
                                std::size_t which) {
    if (dims.size() != 2) throw std::invalid_argument("partial_transpose: need 2 factors");
    if (which > 1) throw std::invalid_argument("partial_transpose: which must be 0 or 1");
    if (dims.total() != m.dim()) throw std::invalid_argument("partial_transpose: dims mismatch");
    const std::size_t d0 = dims.factors[0], d1 = dims.factors[1];
    ComplexMatrix out(m.dim());
    for (std::size_t r0 = 0; r0 < d0; ++r0)
        for (std::size_t r1 = 0; r1 < d1; ++r1)
            for (std::size_t c0 = 0; c0 < d0; ++c0)
                for (std::size_t c1 = 0; c1 < d1; ++c1) {
                    const std::size_t sr0 = which == 0 ? c0 : r0;
                    const std::size_t sc0 = which == 0 ? r0 : c0;
                    const std::size_t sr1 = which == 1 ? c1 : r1;
                    const std::size_t sc1 = which == 1 ? r1 : c1;
                    out(r0 * d1 + r1, c0 * d1 + c1) = m(sr0 * d1 + sr1, sc0 * d1 + sc1);
                }
    return out;
}

namespace {

double offdiag_frobenius(const ComplexMatrix& a) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < a.dim(); ++c)
            if (r != c) s += std::norm(a(r, c));
    return std::sqrt(s);
}

// One cyclic sweep of complex Jacobi rotations on A, accumulating the
// transformation into V (columns end up as eigenvectors).
void jacobi_sweep(ComplexMatrix& a, ComplexMatrix& v) {
    const std::size_t n = a.dim();
    for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const complex apq = a(p, q);
            const double mag = std::abs(apq);
            if (mag < 1e-300) continue;
            const complex phase = apq / mag;
            const double app = a(p, p).real(), aqq = a(q, q).real();
            const double theta = 0.5 * std::atan2(2.0 * mag, app - aqq);
            const double c = std::cos(theta);
            const complex s = std::sin(theta) * phase;
            // Rows p,q of A (right multiply by rotation adjoint after left).
            for (std::size_t k = 0; k < n; ++k) {
                const complex akp = a(k, p), akq = a(k, q);
                a(k, p) = c * akp + std::conj(s) * akq;
                a(k, q) = -s * akp + c * akq;
            }
            for (std::size_t k = 0; k < n; ++k) {
                const complex apk = a(p, k), aqk = a(q, k);
                a(p, k) = c * apk + s * aqk;
                a(q, k) = -std::conj(s) * apk + c * aqk;
            }
            for (std::size_t k = 0; k < n; ++k) {
                const complex vkp = v(k, p), vkq = v(k, q);
                v(k, p) = c * vkp + std::conj(s) * vkq;
                v(k, q) = -s * vkp + c * vkq;
            }
        }
    }
}

EigenSystem jacobi_core(const ComplexMatrix& h) {
    if (!h.is_hermitian(1e-10))
        throw std::invalid_argument("hermitian eigensolver: matrix is not Hermitian");
    const std::size_t n = h.dim();
    // Symmetrize so residual non-Hermiticity below tolerance cannot leak
    // small imaginary parts into eigenvalues.
    ComplexMatrix a(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            a(r, c) = 0.5 * (h(r, c) + std::conj(h(c, r)));

    ComplexMatrix v = ComplexMatrix::identity(n);
    const double tol = 1e-14 * std::max(1.0, a.frobenius_norm());
    for (int sweep = 0; sweep < 100 && offdiag_frobenius(a) >= tol; ++sweep)
        jacobi_sweep(a, v);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

    EigenSystem es;
    es.values.resize(n);
    es.vectors = ComplexMatrix(n);
    for (std::size_t k = 0; k < n; ++k) {
        es.values[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) es.vectors(r, k) = v(r, order[k]);
    }
    return es;
}

}  // namespace

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
    return jacobi_core(h).values;
}

EigenSystem hermitian_eigensystem(const ComplexMatrix& h) { return jacobi_core(h); }

double trace_norm(const ComplexMatrix& m) {
    double s = 0.0;
    for (double lam : hermitian_eigenvalues(m)) s += std::abs(lam);
    return s;
}

}  // namespace qcap
