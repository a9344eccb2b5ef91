#include "qsep/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace qsep {

ComplexMatrix::ComplexMatrix(int rows, int cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (rows < 0 || cols < 0 || a_.size() != std::size_t(rows) * std::size_t(cols))
        throw invariant_error("matrix entry count does not match rows x cols");
}

ComplexMatrix ComplexMatrix::identity(int n) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    int r = int(rows.size());
    int c = r == 0 ? 0 : int(rows.begin()->size());
    ComplexMatrix m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        if (int(row.size()) != c) throw invariant_error("ragged initializer");
        int j = 0;
        for (cplx v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

cplx ComplexMatrix::trace() const {
    if (!is_square()) throw invariant_error("trace of non-square matrix");
    cplx t = 0;
    for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::max_abs() const {
    double m = 0;
    for (const cplx& v : a_) m = std::max(m, std::abs(v));
    return m;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0;
    for (const cplx& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

bool ComplexMatrix::is_finite() const {
    for (const cplx& v : a_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw invariant_error("matrix shape mismatch in +");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw invariant_error("matrix shape mismatch in -");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
    for (cplx& v : a_) v *= s;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw invariant_error("matrix shape mismatch in *");
    ComplexMatrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            cplx aik = a(i, k);
            if (aik == cplx(0)) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

ComplexMatrix dagger(const ComplexMatrix& a) {
    ComplexMatrix d(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) d(j, i) = std::conj(a(i, j));
    return d;
}

ComplexMatrix conjugate(const ComplexMatrix& a) {
    ComplexMatrix c(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) = std::conj(a(i, j));
    return c;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i1 = 0; i1 < a.rows(); ++i1)
        for (int j1 = 0; j1 < a.cols(); ++j1) {
            cplx v = a(i1, j1);
            if (v == cplx(0)) continue;
            for (int i2 = 0; i2 < b.rows(); ++i2)
                for (int j2 = 0; j2 < b.cols(); ++j2)
                    c(i1 * b.rows() + i2, j1 * b.cols() + j2) = v * b(i2, j2);
        }
    return c;
}

ComplexMatrix kron(const std::vector<ComplexMatrix>& factors) {
    if (factors.empty()) throw invariant_error("kron of empty factor list");
    ComplexMatrix out = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
    return out;
}

ComplexMatrix matrix_power(const ComplexMatrix& a, int n) {
    if (!a.is_square()) throw invariant_error("matrix_power of non-square matrix");
    if (n < 0) throw invariant_error("matrix_power with negative exponent");
    ComplexMatrix out = ComplexMatrix::identity(a.rows());
    for (int i = 0; i < n; ++i) out = out * a;
    return out;
}

SubsystemShape::SubsystemShape(std::vector<int> local_dims) : dims_(std::move(local_dims)) {
    if (dims_.empty()) throw invariant_error("shape needs at least one party");
    dim_ = 1;
    for (int d : dims_) {
        if (d < 1) throw invariant_error("local dimensions must be positive");
        dim_ *= d;
    }
}

int SubsystemShape::local_dim(int party) const {
    if (party < 0 || party >= parties()) throw invariant_error("party index out of range");
    return dims_[std::size_t(party)];
}

int SubsystemShape::stride(int party) const {
    int s = 1;
    for (int l = party + 1; l < parties(); ++l) s *= dims_[std::size_t(l)];
    return s;
}

std::vector<int> SubsystemShape::digits(int index) const {
    std::vector<int> out(dims_.size());
    for (int k = parties() - 1; k >= 0; --k) {
        out[std::size_t(k)] = index % dims_[std::size_t(k)];
        index /= dims_[std::size_t(k)];
    }
    return out;
}

int SubsystemShape::index(const std::vector<int>& digits) const {
    int idx = 0;
    for (int k = 0; k < parties(); ++k) idx = idx * dims_[std::size_t(k)] + digits[std::size_t(k)];
    return idx;
}

std::string SubsystemShape::str() const {
    std::string s;
    for (int k = 0; k < parties(); ++k) {
        if (k) s += "x";
        s += std::to_string(dims_[std::size_t(k)]);
    }
    return s;
}

static void require_state_shape(const ComplexMatrix& rho, const SubsystemShape& shape) {
    if (!rho.is_square() || rho.rows() != shape.dim())
        throw invariant_error("matrix dimension does not match shape " + shape.str());
}

ComplexMatrix partial_transpose(const ComplexMatrix& rho, const SubsystemShape& shape, int party) {
    require_state_shape(rho, shape);
    if (party < 0 || party >= shape.parties()) throw invariant_error("party index out of range");
    int d = shape.local_dim(party);
    int stride = shape.stride(party);
    ComplexMatrix out(rho.rows(), rho.cols());
    for (int i = 0; i < rho.rows(); ++i) {
        int ip = (i / stride) % d;
        for (int j = 0; j < rho.cols(); ++j) {
            int jp = (j / stride) % d;
            int i2 = i + (jp - ip) * stride;
            int j2 = j + (ip - jp) * stride;
            out(i2, j2) = rho(i, j);
        }
    }
    return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& rho, const SubsystemShape& shape,
                                const std::vector<int>& parties) {
    ComplexMatrix out = rho;
    for (int p : parties) out = partial_transpose(out, shape, p);
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, const SubsystemShape& shape,
                            const std::vector<int>& keep) {
    require_state_shape(rho, shape);
    if (keep.empty()) throw invariant_error("partial_trace with empty keep set");
    std::vector<bool> kept(std::size_t(shape.parties()), false);
    for (int p : keep) {
        if (p < 0 || p >= shape.parties()) throw invariant_error("party index out of range");
        if (kept[std::size_t(p)]) throw invariant_error("duplicate party in keep set");
        kept[std::size_t(p)] = true;
    }
    std::vector<int> kept_parties, traced_parties;
    for (int p = 0; p < shape.parties(); ++p)
        (kept[std::size_t(p)] ? kept_parties : traced_parties).push_back(p);

    int dim_keep = 1;
    for (int p : kept_parties) dim_keep *= shape.local_dim(p);
    int dim_traced = 1;
    for (int p : traced_parties) dim_traced *= shape.local_dim(p);

    SubsystemShape keep_shape = [&] {
        std::vector<int> dims;
        for (int p : kept_parties) dims.push_back(shape.local_dim(p));
        return SubsystemShape(dims);
    }();
    SubsystemShape traced_shape = traced_parties.empty()
                                      ? SubsystemShape({1})
                                      : [&] {
                                            std::vector<int> dims;
                                            for (int p : traced_parties)
                                                dims.push_back(shape.local_dim(p));
                                            return SubsystemShape(dims);
                                        }();

    auto full_index = [&](const std::vector<int>& kd, const std::vector<int>& td) {
        std::vector<int> digits(std::size_t(shape.parties()));
        for (std::size_t a = 0; a < kept_parties.size(); ++a)
            digits[std::size_t(kept_parties[a])] = kd[a];
        for (std::size_t a = 0; a < traced_parties.size(); ++a)
            digits[std::size_t(traced_parties[a])] = td[a];
        return shape.index(digits);
    };

    ComplexMatrix out(dim_keep, dim_keep);
    for (int i = 0; i < dim_keep; ++i) {
        auto id = keep_shape.digits(i);
        for (int j = 0; j < dim_keep; ++j) {
            auto jd = keep_shape.digits(j);
            cplx sum = 0;
            for (int t = 0; t < dim_traced; ++t) {
                auto td = traced_parties.empty() ? std::vector<int>{0} : traced_shape.digits(t);
                sum += rho(full_index(id, td), full_index(jd, td));
            }
            out(i, j) = sum;
        }
    }
    return out;
}

cplx expectation(const ComplexMatrix& rho, const ComplexMatrix& O) {
    if (!rho.is_square() || !O.is_square() || rho.rows() != O.rows())
        throw invariant_error("expectation dimension mismatch");
    cplx t = 0;
    for (int i = 0; i < O.rows(); ++i)
        for (int j = 0; j < O.cols(); ++j) t += O(i, j) * rho(j, i);
    return t;
}

cplx sandwich(const ComplexMatrix& rho, const std::vector<cplx>& bra, const std::vector<cplx>& ket) {
    if (!rho.is_square() || int(bra.size()) != rho.rows() || int(ket.size()) != rho.rows())
        throw invariant_error("sandwich dimension mismatch");
    cplx t = 0;
    for (int i = 0; i < rho.rows(); ++i) {
        if (bra[std::size_t(i)] == cplx(0)) continue;
        cplx row = 0;
        for (int j = 0; j < rho.cols(); ++j) row += rho(i, j) * ket[std::size_t(j)];
        t += std::conj(bra[std::size_t(i)]) * row;
    }
    return t;
}

std::vector<cplx> kron_vec(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<cplx> out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
    return out;
}

std::vector<cplx> kron_vec(const std::vector<std::vector<cplx>>& factors) {
    if (factors.empty()) throw invariant_error("kron_vec of empty factor list");
    std::vector<cplx> out = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) out = kron_vec(out, factors[i]);
    return out;
}

double hermiticity_defect(const ComplexMatrix& a) {
    if (!a.is_square()) throw invariant_error("hermiticity check on non-square matrix");
    double m = 0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
    return m;
}

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
    double scale = std::max(a.max_abs(), 1e-300);
    return hermiticity_defect(a) <= rel_tol * scale;
}

}  // namespace qsep
