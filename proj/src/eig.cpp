#include "qsep/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qsep {

std::vector<cplx> HermitianEigenSystem::eigenvector(int j) const {
    std::vector<cplx> v(std::size_t(eigenvectors.rows()));
    for (int i = 0; i < eigenvectors.rows(); ++i) v[std::size_t(i)] = eigenvectors(i, j);
    return v;
}

namespace {

double offdiagonal_norm(const ComplexMatrix& a) {
    double s = 0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace

HermitianEigenSystem hermitian_eig(const ComplexMatrix& H) {
    if (!H.is_square()) throw invariant_error("hermitian_eig needs a square matrix");
    const int n = H.rows();
    double scale = H.max_abs();
    if (scale > 0 && hermiticity_defect(H) > 1e-10 * scale)
        throw invariant_error("hermitian_eig input is not Hermitian within tolerance");

    // Symmetrize, then annihilate off-diagonal entries with two-sided unitary
    // rotations G = [[c, s*phase], [-s*conj(phase), c]] chosen per pivot so that
    // (G^dag A G)_{pq} = 0.
    ComplexMatrix A = cplx(0.5) * (H + dagger(H));
    ComplexMatrix V = ComplexMatrix::identity(n);
    const double frob = std::max(A.frobenius_norm(), 1e-300);
    const int max_sweeps = 100;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (offdiagonal_norm(A) <= 1e-14 * frob) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                cplx apq = A(p, q);
                double r = std::abs(apq);
                if (r == 0.0) continue;
                cplx phase = apq / r;
                double app = A(p, p).real();
                double aqq = A(q, q).real();
                double tau = (aqq - app) / (2.0 * r);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;

                for (int k = 0; k < n; ++k) {  // A <- A G
                    cplx akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * std::conj(phase) * akq;
                    A(k, q) = s * phase * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {  // A <- G^dag A
                    cplx apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * phase * aqk;
                    A(q, k) = s * std::conj(phase) * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {  // V <- V G
                    cplx vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * std::conj(phase) * vkq;
                    V(k, q) = s * phase * vkp + c * vkq;
                }
                A(p, q) = 0;
                A(q, p) = 0;
            }
        }
    }
    if (offdiagonal_norm(A) > 1e-12 * frob)
        throw invariant_error("Jacobi eigensolver failed to converge");

    std::vector<int> order(std::size_t(n), 0);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return A(a, a).real() < A(b, b).real(); });

    HermitianEigenSystem out;
    out.eigenvalues.resize(std::size_t(n));
    out.eigenvectors = ComplexMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.eigenvalues[std::size_t(j)] = A(order[std::size_t(j)], order[std::size_t(j)]).real();
        for (int i = 0; i < n; ++i) out.eigenvectors(i, j) = V(i, order[std::size_t(j)]);
    }
    return out;
}

ComplexMatrix psd_power(const ComplexMatrix& O, double x) {
    if (x < 0) throw invariant_error("psd_power needs a nonnegative exponent");
    HermitianEigenSystem es = hermitian_eig(O);
    const int n = O.rows();
    // eigenvalues below the solver's noise floor are indistinguishable from 0;
    // flushing them keeps fractional powers from amplifying 1e-17 noise to 1e-9
    double scale = 0;
    for (double lam : es.eigenvalues) scale = std::max(scale, std::abs(lam));
    const double zero_floor = 1e-14 * scale;
    std::vector<double> powered(std::size_t(n), 0.0);
    for (int j = 0; j < n; ++j) {
        double lam = es.eigenvalues[std::size_t(j)];
        if (lam < -1e-10)
            throw invariant_error("psd_power input has eigenvalue " + std::to_string(lam) +
                                  " below the PSD clamp window");
        if (lam < zero_floor) lam = 0;
        powered[std::size_t(j)] = std::pow(lam, x);
    }
    ComplexMatrix out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx v = 0;
            for (int k = 0; k < n; ++k)
                v += es.eigenvectors(i, k) * powered[std::size_t(k)] *
                     std::conj(es.eigenvectors(j, k));
            out(i, j) = v;
        }
    return out;
}

double min_eigenvalue(const ComplexMatrix& H) {
    return hermitian_eig(H).eigenvalues.front();
}

}  // namespace qsep
