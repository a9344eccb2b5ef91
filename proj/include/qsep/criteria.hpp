#pragma once

#include <array>
#include <optional>
#include <string>

#include "qsep/rational.hpp"
#include "qsep/states.hpp"

namespace qsep {

enum class Slot { P, Q };

/// Per-party operator pair. Slot P is the first operator of the party's pair
/// (it enters bounds as P P^dagger), slot Q the second (enters as Q^dagger Q).
struct OperatorPair {
    ComplexMatrix p, q;
};

struct LocalOperatorSet {
    std::vector<OperatorPair> pairs;

    int parties() const { return int(pairs.size()); }
    void require_compatible(const SubsystemShape& shape) const;
};

struct SpecFactor {
    int party = 0;
    Slot slot = Slot::P;
    Rational inner_exponent{1};
};

struct SpecTerm {
    Rational weight{1};
    std::vector<SpecFactor> factors;
};

/// Machine form of an inequality |<prod_k P_k Q_k>|^s <= prod_t <...>^{w_t}:
/// each term is one expectation value of a tensor product of powered factors
/// (P_k P_k^dagger)^e or (Q_k^dagger Q_k)^e with identity on absent parties.
struct CriterionSpec {
    int n_parties = 0;
    Rational lhs_power{2};  // s
    std::vector<SpecTerm> terms;
};

struct PairTotal {
    int party;
    Slot slot;
    Rational total;   // sum over terms of weight * inner_exponent
    bool covered;
};

struct SoundnessReport {
    bool sound = false;
    std::vector<PairTotal> totals;  // one entry per (party, slot)
    std::vector<std::string> problems;
    std::string str() const;        // printable exponent ledger
};

/// A spec is sound iff it is well formed and, for every (party, slot) pair,
/// the exponent total sum_t w_t * e_t equals lhs_power/2 exactly in rational
/// arithmetic, with every pair covered. Sound specs hold for all fully
/// separable states by the Cauchy-Schwarz + Hoelder construction.
SoundnessReport check_soundness(const CriterionSpec& spec);

struct EvaluationResult {
    double lhs = 0;
    double rhs = 0;
    double margin = 0;  // lhs - rhs; margin > tolerance certifies entanglement
    bool detected = false;
    double tolerance = 0;
};

EvaluationResult make_result(double lhs, double rhs, double tol);

constexpr double kDefaultTolerance = 1e-8;

EvaluationResult evaluate_spec(const CriterionSpec& spec, const LocalOperatorSet& ops,
                               const DensityMatrix& rho, double tol = kDefaultTolerance);

/// Built-in specs: "cauchy2" (2 parties, s=2), "cauchy4"/"cauchy4-mirror"
/// (3 parties, s=1, four terms of weight 1/4), "cauchy6" (3 parties, s=1, six
/// terms of weight 1/6), "step5" (3 parties, s=1, three terms of weight 1/3
/// with inner exponent 3/2).
CriterionSpec builtin_spec(const std::string& name);
/// Swap the P/Q slot roles in every term; turns e.g. cauchy4 into its mirror.
CriterionSpec mirror_spec(CriterionSpec spec);
const std::vector<std::string>& builtin_spec_names();

/// |<alpha,beta| rho |a,b>| <= sqrt(<a,beta|rho|a,beta> <alpha,b|rho|alpha,b>),
/// the rank-one optimal form of the two-operator bound.
EvaluationResult evaluate_rank_one(const DensityMatrix& rho, const PureState& a,
                                   const PureState& alpha, const PureState& b,
                                   const PureState& beta, double tol = kDefaultTolerance);

/// Two (not necessarily orthogonal) unit vectors per party.
struct MeasurementBasis {
    std::vector<std::array<std::vector<cplx>, 2>> vectors;
};

/// E = |<a1 b1 c1| rho |a2 b2 c2>| - (prod of the four cross populations)^{1/4}
/// for a three-qubit state; E > 0 certifies entanglement.
double evaluate_E(const DensityMatrix& rho, const MeasurementBasis& basis);

enum class HzMode { Product, Correlated };

/// Hillery-Zubairy bipartite criteria:
/// Correlated: |<A^dag (x) B>|^2 <= <A^dag A (x) B^dag B>.
/// Product:    |<A (x) B>|^2 <= <A^dag A> <B^dag B>.
EvaluationResult hillery_zubairy(const DensityMatrix& rho, const ComplexMatrix& A,
                                 const ComplexMatrix& B, HzMode mode,
                                 double tol = kDefaultTolerance);

/// |<prod_k A_k>|^2 <= <prod_{k<=j} A_k^dag A_k prod_{k>j} A_k A_k^dag>, a
/// biseparability test for the split {1..j | j+1..N} (j is 1-based).
EvaluationResult hz_bipartition(const DensityMatrix& rho, const std::vector<ComplexMatrix>& ops,
                                int split_j, double tol = kDefaultTolerance);

enum class HilleryVariant { Geometric, Arithmetic };

/// Hillery et al. multipartite criteria with one operator per subsystem:
/// Geometric:  |<prod A_k>| <= prod_k <(A_k^dag A_k)^{n/2}>^{1/n}.
/// Arithmetic: |<prod A_k>| <= <((1/n) sum_k A_k^dag A_k)^{n/2}>.
EvaluationResult hillery_multi(const DensityMatrix& rho, const std::vector<ComplexMatrix>& ops,
                               HilleryVariant variant, double tol = kDefaultTolerance);

struct FockPowers {
    int m = 0, n = 0, p = 0, q = 0;  // mode a: A1 = (a^dag)^m a^n, A2 = (a^dag)^p a^q
    int r = 0, s = 0, k = 0, l = 0;  // mode b: B1 = (b^dag)^s b^r, B2 = (b^dag)^k b^l
};

/// Truncated annihilation matrix, a|n> = sqrt(n)|n-1>.
ComplexMatrix annihilation_op(int cutoff);

/// Shchukin-Vogel moment criterion on a truncated two-mode Fock space,
/// evaluated through the cauchy2 spec. The state must vanish on photon
/// numbers >= cutoff - max power so the truncation is exact.
EvaluationResult shchukin_vogel(const DensityMatrix& rho_fock, const FockPowers& powers,
                                double tol = kDefaultTolerance);

/// |rho_{i,j}| <= prod rho_{d,d}^{exponent}; exponents must sum to 1 exactly.
EvaluationResult entry_criterion(const DensityMatrix& rho, int i, int j,
                                 const std::vector<std::pair<int, Rational>>& rhs_terms,
                                 double tol = kDefaultTolerance);

/// Named diagonal patterns for the |rho_{0,7}| three-qubit entry criteria:
/// guehne1..3, seefinck-sep, guehne-abc, woelk-abc.
std::pair<std::pair<int, int>, std::vector<std::pair<int, Rational>>> entry_pattern(
    const std::string& name);

/// |rho_{0,7}| <= sqrt(r11 r66) + sqrt(r22 r55) + sqrt(r33 r44); holds for all
/// biseparable three-qubit states, so violation certifies genuine multipartite
/// entanglement.
EvaluationResult biseparable_sum(const DensityMatrix& rho, double tol = kDefaultTolerance);

/// |<prod X_k Y_k>| <= sum over bipartitions of sqrt(<prod_A XX^dag prod_B Y^dag Y>)
/// * sqrt(<prod_A Y^dag Y prod_B X X^dag>). With every bipartition supplied this
/// is a genuine-multipartite-entanglement witness.
EvaluationResult gme_criterion(const DensityMatrix& rho, const std::vector<ComplexMatrix>& X,
                               const std::vector<ComplexMatrix>& Y,
                               const std::vector<std::vector<int>>& bipartitions,
                               double tol = kDefaultTolerance);

/// Two-copy permutation form: evaluates
///   sqrt(Re <Phi|(1 (x) Pi_B)^dag rho(x)rho (Pi_A (x) 1)|Phi>)  and
///   sqrt(<Phi| rho (x) rho |Phi>)
/// with Phi = |a,beta>(x)|alpha,b> built on the doubled space. Serves as an
/// independent oracle for evaluate_rank_one.
std::pair<double, double> permutation_m2(const DensityMatrix& rho, const PureState& a,
                                         const PureState& alpha, const PureState& b,
                                         const PureState& beta);

/// Determinant of the D x D matrix M_{uv} = <a_u b_v| rho |a_v b_u> over
/// orthonormal bases of the two sides; nonnegative for every PPT state.
double determinant_extension(const DensityMatrix& rho, const std::vector<std::vector<cplx>>& basis_a,
                             const std::vector<std::vector<cplx>>& basis_b);

}  // namespace qsep
