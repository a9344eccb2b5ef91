#pragma once

#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsep {

using cplx = std::complex<double>;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Bad user input: unknown names, malformed grids, unparsable files. CLI exit code 2.
struct usage_error : error {
    using error::error;
};
// Violated precondition or data invariant: dimension mismatch, non-PSD input, ... CLI exit code 3.
struct invariant_error : error {
    using error::error;
};
// A witness construction legitimately failed (PPT input, rejected ratio test, degenerate overlaps).
struct witness_error : error {
    using error::error;
};

/// Dense complex matrix, row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols) {
        if (rows < 0 || cols < 0) throw invariant_error("matrix dimensions must be nonnegative");
    }
    ComplexMatrix(int rows, int cols, std::vector<cplx> entries);

    static ComplexMatrix identity(int n);
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    cplx& operator()(int r, int c) { return a_[std::size_t(r) * cols_ + c]; }
    const cplx& operator()(int r, int c) const { return a_[std::size_t(r) * cols_ + c]; }
    const std::vector<cplx>& entries() const { return a_; }
    std::vector<cplx>& entries() { return a_; }

    cplx trace() const;
    double max_abs() const;
    double frobenius_norm() const;
    bool is_finite() const;

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(cplx s);

private:
    int rows_ = 0, cols_ = 0;
    std::vector<cplx> a_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);

/// Conjugate transpose.
ComplexMatrix dagger(const ComplexMatrix& a);
/// Tensor (Kronecker) product, row-major convention: index i = i_a * rows(b) + i_b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const std::vector<ComplexMatrix>& factors);
/// Integer matrix power by repeated multiplication (n >= 0).
ComplexMatrix matrix_power(const ComplexMatrix& a, int n);
ComplexMatrix conjugate(const ComplexMatrix& a);

/// Ordered list of local dimensions of a multipartite system; party 0 is the
/// leftmost tensor factor, composite index i = sum_k i_k * prod_{l>k} d_l.
class SubsystemShape {
public:
    SubsystemShape() = default;
    explicit SubsystemShape(std::vector<int> local_dims);
    SubsystemShape(std::initializer_list<int> dims) : SubsystemShape(std::vector<int>(dims)) {}

    int parties() const { return int(dims_.size()); }
    int dim() const { return dim_; }
    int local_dim(int party) const;
    const std::vector<int>& local_dims() const { return dims_; }
    /// prod_{l>party} d_l
    int stride(int party) const;
    std::vector<int> digits(int index) const;
    int index(const std::vector<int>& digits) const;
    bool operator==(const SubsystemShape& o) const { return dims_ == o.dims_; }
    std::string str() const;  // "2x2x2"

private:
    std::vector<int> dims_;
    int dim_ = 1;
};

/// Transpose the indices of a single tensor factor.
ComplexMatrix partial_transpose(const ComplexMatrix& rho, const SubsystemShape& shape, int party);
/// Transpose the indices of every factor in `parties`.
ComplexMatrix partial_transpose(const ComplexMatrix& rho, const SubsystemShape& shape,
                                const std::vector<int>& parties);
/// Trace out every party not listed in `keep`; kept factors stay in their original order.
ComplexMatrix partial_trace(const ComplexMatrix& rho, const SubsystemShape& shape,
                            const std::vector<int>& keep);

/// Tr[O rho]
cplx expectation(const ComplexMatrix& rho, const ComplexMatrix& O);
/// <bra| rho |ket>
cplx sandwich(const ComplexMatrix& rho, const std::vector<cplx>& bra, const std::vector<cplx>& ket);

std::vector<cplx> kron_vec(const std::vector<cplx>& a, const std::vector<cplx>& b);
std::vector<cplx> kron_vec(const std::vector<std::vector<cplx>>& factors);

double hermiticity_defect(const ComplexMatrix& a);  // max_ij |a_ij - conj(a_ji)|
bool is_hermitian(const ComplexMatrix& a, double rel_tol = 1e-10);

}  // namespace qsep
