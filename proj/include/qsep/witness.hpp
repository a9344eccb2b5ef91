#pragma once

#include <optional>

#include "qsep/criteria.hpp"
#include "qsep/eig.hpp"

namespace qsep {

/// Full eigensystem of the partial transpose across a bipartition, with
/// eigenvectors classified by eigenvalue sign at threshold 1e-10.
struct PTDiagnostics {
    std::vector<int> bipartition;  // parties transposed (side A)
    double min_eigenvalue = 0;
    std::vector<double> negative_eigenvalues;
    std::vector<PureState> negative_eigenvectors;
    std::vector<double> positive_eigenvalues;
    std::vector<PureState> positive_eigenvectors;

    bool npt() const { return min_eigenvalue < -1e-10; }
};

PTDiagnostics ppt_diagnostics(const DensityMatrix& rho, const std::vector<int>& bipartition);

/// Operators that violate the cauchy2 bound on a bipartite view of the state,
/// together with the overlap-ratio constants that produced them. The operators
/// act on the merged two-party view given by `bipartition`.
struct WitnessCandidate {
    std::vector<int> bipartition;
    LocalOperatorSet operators;  // two pairs, on the merged A / B sides
    std::optional<cplx> c_plus;
    std::optional<cplx> c_minus;
    double predicted_margin = 0;  // lhs - rhs on the cauchy2 (s=2) scale
};

/// Builds a violating operator quadruple from product vectors whose overlaps
/// with the positive/negative eigenvectors of rho^{T_A} have constant ratios
/// c+ and c- with c+ c- < 0. The vectors a1, a2 live on the merged A side,
/// b1, b2 on the merged B side; alpha/beta default to a1/b1.
WitnessCandidate lemma4_construct(const DensityMatrix& rho, const std::vector<int>& bipartition,
                                  const PureState& a1, const PureState& a2, const PureState& b1,
                                  const PureState& b2,
                                  const std::optional<PureState>& alpha = std::nullopt,
                                  const std::optional<PureState>& beta = std::nullopt);

/// Closed-form witness for an NPT two-qubit state: Schmidt-decomposes the
/// unique negative eigenvector of rho^{T_A} and applies the ratio construction
/// in that basis. Throws witness_error on PPT input.
WitnessCandidate two_qubit_witness(const DensityMatrix& rho);

/// Closed-form witness for p|psi><psi| + (1-p)/D identity: picks the largest
/// Schmidt pair (j0,k0) of psi and uses |j0,k0> / |k0,j0> as test vectors.
/// Throws witness_error when the mixture is PPT (p below threshold).
WitnessCandidate white_noise_witness(const PureState& psi, double p);

/// Predicted partial-transpose spectrum of white_noise_mix(psi, p) from psi's
/// Schmidt coefficients: {(1-p)/D + p s_j^2} and {(1-p)/D +- p s_j s_k}.
std::vector<double> white_noise_pt_spectrum(const SchmidtVector& s, int local_dim, double p);

/// Evaluate a witness candidate: cauchy2 margin of its operators on the merged
/// bipartite view of rho.
EvaluationResult evaluate_witness(const DensityMatrix& rho, const WitnessCandidate& witness,
                                  double tol = kDefaultTolerance);

/// Per party, two qubit vectors parametrized as cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
/// Layout: party-major, (theta1, phi1, theta2, phi2).
struct BasisPoint {
    std::array<double, 12> angles{};

    MeasurementBasis to_basis() const;
};

/// Maximize evaluate_E over the 12 basis angles by Nelder-Mead with
/// n_restarts seeded random starting simplices. Deterministic given seed;
/// restart i draws from derive_seed(seed, i), so enlarging n_restarts can only
/// improve the result for a fixed seed.
std::pair<BasisPoint, double> optimize_E(const DensityMatrix& rho, int n_restarts,
                                         std::uint64_t seed);

/// Gauge-invariant summary of a basis point: whether all six vectors are
/// equatorial, and the per-party phase estimate phi_k recovered from the
/// intra-party relative phase (|delta chi| - pi/2)/2.
struct PhaseFamily {
    bool equatorial = false;
    std::array<double, 3> phi{};
};
PhaseFamily basis_phase_family(const BasisPoint& point, double equatorial_tol = 0.05);

struct SweepRow {
    double param = 0;
    double lhs = 0;
    double rhs = 0;
    double margin = 0;
    bool detected = false;
};

struct SweepRequest {
    std::string family;     // rho-alpha | rho-abc | werner | white-noise
    double start = 0, stop = 0, step = 0;  // inclusive grid
    std::string method;     // optimize-E | two-qubit-witness | white-noise-witness | criterion name
    std::uint64_t seed = 0;
    double tol = kDefaultTolerance;
    int restarts = 32;
};

std::vector<double> grid_points(double start, double stop, double step);
DensityMatrix sweep_state(const std::string& family, double param);
std::vector<SweepRow> sweep(const SweepRequest& request);

}  // namespace qsep
