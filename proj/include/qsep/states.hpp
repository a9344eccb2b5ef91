#pragma once

#include <cstdint>
#include <utility>

#include "qsep/matrix.hpp"

namespace qsep {

/// Unit vector over a SubsystemShape. Norm is checked to 1e-12 on construction.
class PureState {
public:
    PureState(std::vector<cplx> amplitudes, SubsystemShape shape);

    const std::vector<cplx>& amplitudes() const { return amps_; }
    const SubsystemShape& shape() const { return shape_; }
    int dim() const { return shape_.dim(); }

    ComplexMatrix projector() const;  // |psi><psi|

private:
    std::vector<cplx> amps_;
    SubsystemShape shape_;
};

/// Nonnegative descending Schmidt coefficients with sum of squares 1 (to 1e-12).
class SchmidtVector {
public:
    explicit SchmidtVector(std::vector<double> coefficients);

    const std::vector<double>& coefficients() const { return s_; }
    int size() const { return int(s_.size()); }
    double operator[](int j) const { return s_[std::size_t(j)]; }

private:
    std::vector<double> s_;
};

/// Hermitian, PSD, unit-trace matrix over a SubsystemShape. All three
/// invariants are verified on construction (Hermitian to 1e-10 relative,
/// trace 1 to 1e-10, min eigenvalue >= -1e-10).
class DensityMatrix {
public:
    DensityMatrix(ComplexMatrix matrix, SubsystemShape shape);

    const ComplexMatrix& matrix() const { return m_; }
    const SubsystemShape& shape() const { return shape_; }
    int dim() const { return shape_.dim(); }

private:
    ComplexMatrix m_;
    SubsystemShape shape_;
};

/// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, global phase fixed.
std::vector<cplx> qubit_vector(double theta, double phi);
PureState basis_state(const SubsystemShape& shape, int index);

PureState product_state(const std::vector<PureState>& locals);
/// Bipartite local_dim x local_dim state sum_j s_j |jj>.
PureState schmidt_pure(const SchmidtVector& s, int local_dim);
/// p |psi><psi| + (1-p)/D * identity, D the total dimension.
DensityMatrix white_noise_mix(const PureState& psi, double p);
/// The three-qubit bound entangled family with diagonal
/// (1, a, b, 1/c, c, 1/b, 1/a, 1)/n and corners 1/n, n = 2+a+b+c+1/a+1/b+1/c.
DensityMatrix rho_abc(double a, double b, double c);
/// The three-qubit bound entangled family normalized by 1/(8+8*alpha); valid
/// for alpha >= 2, PPT for every bipartition.
DensityMatrix rho_alpha(double alpha);
PureState ghz(int n_parties);
PureState w_state(int n_parties);
/// p |psi-><psi-| + (1-p)/4 * identity.
DensityMatrix werner(double p);
PureState bell_phi_plus();
PureState bell_psi_plus();
PureState bell_psi_minus();

PureState random_pure(const SubsystemShape& shape, std::uint64_t seed);
/// G G^dagger / Tr(G G^dagger) with G a dim x rank complex Gaussian matrix.
DensityMatrix random_density(int dim, int rank, std::uint64_t seed);
/// Convex mixture (flat-Dirichlet weights via normalized exponentials) of
/// n_terms random pure product states.
DensityMatrix random_separable(const SubsystemShape& shape, int n_terms, std::uint64_t seed);
SchmidtVector random_schmidt(int d, std::uint64_t seed);

DensityMatrix mix_pure(const std::vector<std::pair<double, PureState>>& terms,
                       const SubsystemShape& shape);

struct SchmidtDecomposition {
    std::vector<double> coefficients;             // descending, length min(dA, dB)
    std::vector<std::vector<cplx>> basis_a;       // orthonormal, length dA
    std::vector<std::vector<cplx>> basis_b;       // orthonormal, length dB
};

/// psi = sum_k s_k |a_k>|b_k| with real nonnegative s_k. Computed from the
/// Hermitian eigendecompositions of the two Gram matrices; phases are aligned
/// into basis_b so the coefficients come out real.
SchmidtDecomposition schmidt_decompose(const PureState& bipartite);

/// Permute tensor factors: new party k is old party order[k].
DensityMatrix reorder_parties(const DensityMatrix& rho, const std::vector<int>& order);
/// View rho as a bipartite system (parties in `side_a` merged, in order, on the
/// left; the remaining parties merged on the right).
DensityMatrix merge_bipartition(const DensityMatrix& rho, const std::vector<int>& side_a);

}  // namespace qsep
