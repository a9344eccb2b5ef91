#pragma once

#include "qsep/matrix.hpp"

namespace qsep {

struct HermitianEigenSystem {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // orthonormal columns, column j pairs with eigenvalues[j]

    std::vector<cplx> eigenvector(int j) const;
};

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Input must be Hermitian within 1e-10 relative to its largest
/// entry; it is symmetrized as (H + H^dagger)/2 before solving. Converges when
/// the off-diagonal Frobenius mass drops below 1e-14 * ||H||_F.
HermitianEigenSystem hermitian_eig(const ComplexMatrix& H);

/// O^x = V diag(lambda^x) V^dagger for PSD O and x >= 0. Eigenvalues in
/// [-1e-10, 0) are clamped to 0; anything below -1e-10 is an error.
ComplexMatrix psd_power(const ComplexMatrix& O, double x);

double min_eigenvalue(const ComplexMatrix& H);

}  // namespace qsep
