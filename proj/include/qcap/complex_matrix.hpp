#ifndef QCAP_COMPLEX_MATRIX_HPP
#define QCAP_COMPLEX_MATRIX_HPP

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace qcap {

using complex = std::complex<double>;

/// Dense square complex matrix, row-major. Sized for small quantum systems
/// (the library never needs more than 16x16).
class ComplexMatrix {
public:
    ComplexMatrix() : dim_(0) {}
    explicit ComplexMatrix(std::size_t dim) : dim_(dim), a_(dim * dim) {}
    ComplexMatrix(std::size_t dim, std::initializer_list<complex> entries);

    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix diag(const std::vector<double>& d);

    std::size_t dim() const { return dim_; }
    complex& operator()(std::size_t r, std::size_t c) { return a_[r * dim_ + c]; }
    const complex& operator()(std::size_t r, std::size_t c) const { return a_[r * dim_ + c]; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    complex trace() const;
    double frobenius_norm() const;
    double max_abs_diff(const ComplexMatrix& other) const;
    bool is_hermitian(double tol = 1e-10) const;
    bool all_finite() const;

    ComplexMatrix operator+(const ComplexMatrix& rhs) const;
    ComplexMatrix operator-(const ComplexMatrix& rhs) const;
    ComplexMatrix operator*(const ComplexMatrix& rhs) const;
    ComplexMatrix operator*(complex s) const;
    ComplexMatrix& operator+=(const ComplexMatrix& rhs);

    std::vector<complex> apply(const std::vector<complex>& v) const;

private:
    std::size_t dim_;
    std::vector<complex> a_;
};

/// Ordered tensor-factor dimensions of a composite system.
struct FactoredDims {
    std::vector<std::size_t> factors;

    FactoredDims() = default;
    FactoredDims(std::initializer_list<std::size_t> f) : factors(f) {}
    explicit FactoredDims(std::vector<std::size_t> f) : factors(std::move(f)) {}

    std::size_t total() const;
    std::size_t size() const { return factors.size(); }
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Trace over every factor not listed in `keep` (indices into dims.factors,
/// strictly increasing). Throws on a dims/matrix size mismatch.
ComplexMatrix partial_trace(const ComplexMatrix& m, const FactoredDims& dims,
                            const std::vector<std::size_t>& keep);

/// Transpose one factor of a bipartite matrix (dims must have exactly 2 factors).
ComplexMatrix partial_transpose(const ComplexMatrix& m, const FactoredDims& dims,
                                std::size_t which);

struct EigenSystem {
    std::vector<double> values;   // descending
    ComplexMatrix vectors;        // column k is the eigenvector of values[k]
};

/// Eigenvalues of a Hermitian matrix, descending. Cyclic complex Jacobi
/// rotations; the input is symmetrized when within the Hermiticity tolerance
/// and rejected otherwise.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h);
EigenSystem hermitian_eigensystem(const ComplexMatrix& h);

/// Sum of |eigenvalue| over the spectrum of a Hermitian matrix.
double trace_norm(const ComplexMatrix& m);

}  // namespace qcap

#endif
