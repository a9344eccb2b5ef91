#include "qsep/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qsep/eig.hpp"
#include "qsep/rng.hpp"

namespace qsep {

namespace {

double vec_norm(const std::vector<cplx>& v) {
    double s = 0;
    for (const cplx& a : v) s += std::norm(a);
    return std::sqrt(s);
}

}  // namespace

PureState::PureState(std::vector<cplx> amplitudes, SubsystemShape shape)
    : amps_(std::move(amplitudes)), shape_(std::move(shape)) {
    if (int(amps_.size()) != shape_.dim())
        throw invariant_error("amplitude count does not match shape " + shape_.str());
    for (const cplx& a : amps_)
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw invariant_error("non-finite amplitude");
    if (std::abs(vec_norm(amps_) - 1.0) > 1e-12)
        throw invariant_error("pure state is not normalized");
}

ComplexMatrix PureState::projector() const {
    ComplexMatrix m(dim(), dim());
    for (int i = 0; i < dim(); ++i)
        for (int j = 0; j < dim(); ++j)
            m(i, j) = amps_[std::size_t(i)] * std::conj(amps_[std::size_t(j)]);
    return m;
}

SchmidtVector::SchmidtVector(std::vector<double> coefficients) : s_(std::move(coefficients)) {
    if (s_.empty()) throw invariant_error("empty Schmidt vector");
    double sum2 = 0;
    for (std::size_t j = 0; j < s_.size(); ++j) {
        if (s_[j] < 0) throw invariant_error("Schmidt coefficients must be nonnegative");
        if (j > 0 && s_[j] > s_[j - 1] + 1e-12)
            throw invariant_error("Schmidt coefficients must be descending");
        sum2 += s_[j] * s_[j];
    }
    if (std::abs(sum2 - 1.0) > 1e-12)
        throw invariant_error("Schmidt coefficients must have unit square sum");
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix, SubsystemShape shape)
    : m_(std::move(matrix)), shape_(std::move(shape)) {
    if (!m_.is_square() || m_.rows() != shape_.dim())
        throw invariant_error("density matrix dimension does not match shape " + shape_.str());
    if (!m_.is_finite()) throw invariant_error("density matrix has non-finite entries");
    double scale = std::max(m_.max_abs(), 1e-300);
    if (hermiticity_defect(m_) > 1e-10 * scale)
        throw invariant_error("density matrix is not Hermitian");
    if (std::abs(m_.trace().real() - 1.0) > 1e-10 || std::abs(m_.trace().imag()) > 1e-10)
        throw invariant_error("density matrix trace is not 1");
    if (min_eigenvalue(m_) < -1e-10)
        throw invariant_error("density matrix is not positive semidefinite");
}

std::vector<cplx> qubit_vector(double theta, double phi) {
    return {cplx(std::cos(theta / 2), 0),
            std::exp(cplx(0, phi)) * std::sin(theta / 2)};
}

PureState basis_state(const SubsystemShape& shape, int index) {
    if (index < 0 || index >= shape.dim()) throw invariant_error("basis index out of range");
    std::vector<cplx> amps(std::size_t(shape.dim()));
    amps[std::size_t(index)] = 1.0;
    return PureState(std::move(amps), shape);
}

PureState product_state(const std::vector<PureState>& locals) {
    if (locals.empty()) throw invariant_error("product_state needs at least one factor");
    std::vector<cplx> amps = locals.front().amplitudes();
    std::vector<int> dims = locals.front().shape().local_dims();
    for (std::size_t k = 1; k < locals.size(); ++k) {
        amps = kron_vec(amps, locals[k].amplitudes());
        for (int d : locals[k].shape().local_dims()) dims.push_back(d);
    }
    return PureState(std::move(amps), SubsystemShape(dims));
}

PureState schmidt_pure(const SchmidtVector& s, int local_dim) {
    if (s.size() > local_dim)
        throw invariant_error("more Schmidt coefficients than the local dimension");
    SubsystemShape shape({local_dim, local_dim});
    std::vector<cplx> amps(std::size_t(shape.dim()));
    for (int j = 0; j < s.size(); ++j) amps[std::size_t(j * local_dim + j)] = s[j];
    return PureState(std::move(amps), shape);
}

DensityMatrix white_noise_mix(const PureState& psi, double p) {
    if (p < 0 || p > 1) throw invariant_error("mixing weight must lie in [0,1]");
    int d = psi.dim();
    ComplexMatrix m = psi.projector();
    m *= p;
    double uniform = (1.0 - p) / d;
    for (int i = 0; i < d; ++i) m(i, i) += uniform;
    return DensityMatrix(std::move(m), psi.shape());
}

DensityMatrix rho_abc(double a, double b, double c) {
    if (a <= 0 || b <= 0 || c <= 0) throw invariant_error("rho_abc parameters must be positive");
    double n = 2 + a + b + c + 1 / a + 1 / b + 1 / c;
    ComplexMatrix m(8, 8);
    const double diag[8] = {1, a, b, 1 / c, c, 1 / b, 1 / a, 1};
    for (int i = 0; i < 8; ++i) m(i, i) = diag[i] / n;
    m(0, 7) = 1 / n;
    m(7, 0) = 1 / n;
    return DensityMatrix(std::move(m), SubsystemShape({2, 2, 2}));
}

DensityMatrix rho_alpha(double alpha) {
    if (alpha < 2) throw invariant_error("rho_alpha requires alpha >= 2");
    double n = 8 + 8 * alpha;
    ComplexMatrix m(8, 8);
    for (int i = 0; i < 8; ++i) m(i, i) = alpha / n;
    m(0, 0) = (4 + alpha) / n;
    m(7, 7) = (4 + alpha) / n;
    // standard product basis |000>..|111>, row-major
    m(0, 7) = 2 / n;
    m(7, 0) = 2 / n;
    m(1, 6) = 2 / n;
    m(6, 1) = 2 / n;
    m(2, 5) = -2 / n;
    m(5, 2) = -2 / n;
    m(3, 4) = 2 / n;
    m(4, 3) = 2 / n;
    return DensityMatrix(std::move(m), SubsystemShape({2, 2, 2}));
}

PureState ghz(int n_parties) {
    if (n_parties < 2) throw invariant_error("ghz needs at least two parties");
    SubsystemShape shape(std::vector<int>(std::size_t(n_parties), 2));
    std::vector<cplx> amps(std::size_t(shape.dim()));
    amps.front() = 1 / std::sqrt(2.0);
    amps.back() = 1 / std::sqrt(2.0);
    return PureState(std::move(amps), shape);
}

PureState w_state(int n_parties) {
    if (n_parties < 2) throw invariant_error("w_state needs at least two parties");
    SubsystemShape shape(std::vector<int>(std::size_t(n_parties), 2));
    std::vector<cplx> amps(std::size_t(shape.dim()));
    double w = 1 / std::sqrt(double(n_parties));
    for (int k = 0; k < n_parties; ++k) amps[std::size_t(1 << (n_parties - 1 - k))] = w;
    return PureState(std::move(amps), shape);
}

DensityMatrix werner(double p) {
    return white_noise_mix(bell_psi_minus(), p);
}

PureState bell_phi_plus() {
    double r = 1 / std::sqrt(2.0);
    return PureState({r, 0, 0, r}, SubsystemShape({2, 2}));
}

PureState bell_psi_plus() {
    double r = 1 / std::sqrt(2.0);
    return PureState({0, r, r, 0}, SubsystemShape({2, 2}));
}

PureState bell_psi_minus() {
    double r = 1 / std::sqrt(2.0);
    return PureState({0, r, -r, 0}, SubsystemShape({2, 2}));
}

PureState random_pure(const SubsystemShape& shape, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<cplx> amps(std::size_t(shape.dim()));
    for (cplx& a : amps) a = rng.cgauss();
    double norm = vec_norm(amps);
    for (cplx& a : amps) a /= norm;
    return PureState(std::move(amps), shape);
}

DensityMatrix random_density(int dim, int rank, std::uint64_t seed) {
    if (dim < 1 || rank < 1 || rank > dim) throw invariant_error("invalid rank for random_density");
    Rng rng(seed);
    ComplexMatrix g(dim, rank);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = rng.cgauss();
    ComplexMatrix m = g * dagger(g);
    double tr = m.trace().real();
    m *= 1.0 / tr;
    return DensityMatrix(std::move(m), SubsystemShape({dim}));
}

DensityMatrix random_separable(const SubsystemShape& shape, int n_terms, std::uint64_t seed) {
    if (n_terms < 1) throw invariant_error("random_separable needs at least one term");
    Rng rng(seed);
    std::vector<double> weights(std::size_t(n_terms), 0.0);
    double total = 0;
    for (double& w : weights) {
        w = rng.exponential();
        total += w;
    }
    ComplexMatrix m(shape.dim(), shape.dim());
    for (int t = 0; t < n_terms; ++t) {
        std::vector<PureState> locals;
        locals.reserve(std::size_t(shape.parties()));
        for (int k = 0; k < shape.parties(); ++k) {
            std::vector<cplx> amps(std::size_t(shape.local_dim(k)));
            for (cplx& a : amps) a = rng.cgauss();
            double norm = vec_norm(amps);
            for (cplx& a : amps) a /= norm;
            locals.emplace_back(std::move(amps), SubsystemShape({shape.local_dim(k)}));
        }
        ComplexMatrix proj = product_state(locals).projector();
        proj *= weights[std::size_t(t)] / total;
        m += proj;
    }
    return DensityMatrix(std::move(m), shape);
}

SchmidtVector random_schmidt(int d, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> s(std::size_t(d), 0.0);
    double sum2 = 0;
    for (double& v : s) {
        v = std::abs(rng.gaussian());
        sum2 += v * v;
    }
    for (double& v : s) v /= std::sqrt(sum2);
    std::sort(s.begin(), s.end(), std::greater<double>());
    return SchmidtVector(std::move(s));
}

DensityMatrix mix_pure(const std::vector<std::pair<double, PureState>>& terms,
                       const SubsystemShape& shape) {
    if (terms.empty()) throw invariant_error("mixture needs at least one term");
    ComplexMatrix m(shape.dim(), shape.dim());
    double total = 0;
    for (const auto& [w, psi] : terms) total += w;
    for (const auto& [w, psi] : terms) {
        ComplexMatrix proj = psi.projector();
        proj *= w / total;
        m += proj;
    }
    return DensityMatrix(std::move(m), shape);
}

SchmidtDecomposition schmidt_decompose(const PureState& bipartite) {
    if (bipartite.shape().parties() != 2)
        throw invariant_error("schmidt_decompose needs a bipartite state");
    const int da = bipartite.shape().local_dim(0);
    const int db = bipartite.shape().local_dim(1);
    ComplexMatrix psi(da, db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < db; ++j) psi(i, j) = bipartite.amplitudes()[std::size_t(i * db + j)];

    HermitianEigenSystem ga = hermitian_eig(psi * dagger(psi));
    SchmidtDecomposition out;
    const int r = std::min(da, db);
    out.coefficients.assign(std::size_t(r), 0.0);
    out.basis_a.assign(std::size_t(da), std::vector<cplx>(std::size_t(da)));
    out.basis_b.assign(std::size_t(db), std::vector<cplx>(std::size_t(db)));

    // eigenvalues ascending -> take the top r in descending order
    std::vector<std::vector<cplx>> a_cols;
    for (int k = 0; k < da; ++k) a_cols.push_back(ga.eigenvector(da - 1 - k));
    for (int k = 0; k < da; ++k) out.basis_a[std::size_t(k)] = a_cols[std::size_t(k)];

    // b_k = psi^T conj(a_k) / s_k pairs the right factor with each left vector
    std::vector<std::vector<cplx>> b_cols;
    for (int k = 0; k < r; ++k) {
        double lam = std::max(ga.eigenvalues[std::size_t(da - 1 - k)], 0.0);
        double s = std::sqrt(lam);
        out.coefficients[std::size_t(k)] = s;
        std::vector<cplx> b(std::size_t(db), cplx(0));
        if (s > 1e-12) {
            for (int j = 0; j < db; ++j) {
                cplx v = 0;
                for (int i = 0; i < da; ++i)
                    v += psi(i, j) * std::conj(a_cols[std::size_t(k)][std::size_t(i)]);
                b[std::size_t(j)] = v / s;
            }
        }
        b_cols.push_back(std::move(b));
    }
    // complete basis_b orthonormally where s_k = 0 (or db > r)
    std::vector<std::vector<cplx>> completed;
    for (auto& b : b_cols)
        if (vec_norm(b) > 0.5) completed.push_back(b);
    for (int e = 0; int(completed.size()) < db; ++e) {
        if (e >= db) throw invariant_error("failed to complete Schmidt basis");
        std::vector<cplx> cand(std::size_t(db), cplx(0));
        cand[std::size_t(e)] = 1.0;
        for (const auto& u : completed) {
            cplx ov = 0;
            for (int j = 0; j < db; ++j) ov += std::conj(u[std::size_t(j)]) * cand[std::size_t(j)];
            for (int j = 0; j < db; ++j) cand[std::size_t(j)] -= ov * u[std::size_t(j)];
        }
        double nrm = vec_norm(cand);
        if (nrm < 1e-6) continue;
        for (cplx& v : cand) v /= nrm;
        completed.push_back(std::move(cand));
    }
    std::size_t fill = 0;
    for (int k = 0; k < db; ++k) {
        if (k < r && vec_norm(b_cols[std::size_t(k)]) > 0.5) {
            out.basis_b[std::size_t(k)] = b_cols[std::size_t(k)];
        } else {
            while (fill < completed.size()) {
                bool used = false;
                for (int kk = 0; kk < r; ++kk)
                    if (vec_norm(b_cols[std::size_t(kk)]) > 0.5 &&
                        completed[fill] == b_cols[std::size_t(kk)])
                        used = true;
                if (!used) break;
                ++fill;
            }
            out.basis_b[std::size_t(k)] = completed[fill++];
        }
    }
    return out;
}

DensityMatrix reorder_parties(const DensityMatrix& rho, const std::vector<int>& order) {
    const SubsystemShape& shape = rho.shape();
    if (int(order.size()) != shape.parties())
        throw invariant_error("party permutation has wrong length");
    std::vector<bool> seen(std::size_t(shape.parties()), false);
    std::vector<int> new_dims;
    for (int p : order) {
        if (p < 0 || p >= shape.parties() || seen[std::size_t(p)])
            throw invariant_error("invalid party permutation");
        seen[std::size_t(p)] = true;
        new_dims.push_back(shape.local_dim(p));
    }
    SubsystemShape new_shape(new_dims);
    std::vector<int> new_index(std::size_t(shape.dim()));
    for (int i = 0; i < shape.dim(); ++i) {
        auto digits = shape.digits(i);
        std::vector<int> nd(std::size_t(shape.parties()));
        for (int k = 0; k < shape.parties(); ++k) nd[std::size_t(k)] = digits[std::size_t(order[std::size_t(k)])];
        new_index[std::size_t(i)] = new_shape.index(nd);
    }
    ComplexMatrix m(shape.dim(), shape.dim());
    for (int i = 0; i < shape.dim(); ++i)
        for (int j = 0; j < shape.dim(); ++j)
            m(new_index[std::size_t(i)], new_index[std::size_t(j)]) = rho.matrix()(i, j);
    return DensityMatrix(std::move(m), new_shape);
}

DensityMatrix merge_bipartition(const DensityMatrix& rho, const std::vector<int>& side_a) {
    const SubsystemShape& shape = rho.shape();
    if (side_a.empty() || int(side_a.size()) >= shape.parties())
        throw invariant_error("bipartition must be a proper nonempty party subset");
    std::vector<bool> in_a(std::size_t(shape.parties()), false);
    for (int p : side_a) {
        if (p < 0 || p >= shape.parties() || in_a[std::size_t(p)])
            throw invariant_error("invalid bipartition");
        in_a[std::size_t(p)] = true;
    }
    std::vector<int> order;
    int dim_a = 1, dim_b = 1;
    for (int p = 0; p < shape.parties(); ++p)
        if (in_a[std::size_t(p)]) {
            order.push_back(p);
            dim_a *= shape.local_dim(p);
        }
    for (int p = 0; p < shape.parties(); ++p)
        if (!in_a[std::size_t(p)]) {
            order.push_back(p);
            dim_b *= shape.local_dim(p);
        }
    DensityMatrix permuted = reorder_parties(rho, order);
    return DensityMatrix(permuted.matrix(), SubsystemShape({dim_a, dim_b}));
}

}  // namespace qsep
