#include "qsep/witness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qsep/neldermead.hpp"
#include "qsep/rng.hpp"

namespace qsep {

PTDiagnostics ppt_diagnostics(const DensityMatrix& rho, const std::vector<int>& bipartition) {
    const SubsystemShape& shape = rho.shape();
    if (bipartition.empty() || int(bipartition.size()) >= shape.parties())
        throw invariant_error("bipartition must be a proper nonempty party subset");
    std::vector<bool> seen(std::size_t(shape.parties()), false);
    for (int p : bipartition) {
        if (p < 0 || p >= shape.parties() || seen[std::size_t(p)])
            throw invariant_error("invalid bipartition");
        seen[std::size_t(p)] = true;
    }

    ComplexMatrix pt = partial_transpose(rho.matrix(), shape, bipartition);
    HermitianEigenSystem es = hermitian_eig(pt);

    PTDiagnostics diag;
    diag.bipartition = bipartition;
    diag.min_eigenvalue = es.eigenvalues.front();
    for (int j = 0; j < int(es.eigenvalues.size()); ++j) {
        double lam = es.eigenvalues[std::size_t(j)];
        if (std::abs(lam) <= 1e-10) continue;
        PureState vec(es.eigenvector(j), shape);
        if (lam < 0) {
            diag.negative_eigenvalues.push_back(lam);
            diag.negative_eigenvectors.push_back(std::move(vec));
        } else {
            diag.positive_eigenvalues.push_back(lam);
            diag.positive_eigenvectors.push_back(std::move(vec));
        }
    }
    return diag;
}

namespace {

cplx inner(const std::vector<cplx>& bra, const std::vector<cplx>& ket) {
    cplx s = 0;
    for (std::size_t i = 0; i < bra.size(); ++i) s += std::conj(bra[i]) * ket[i];
    return s;
}

std::vector<cplx> conj_vec(std::vector<cplx> v) {
    for (cplx& a : v) a = std::conj(a);
    return v;
}

ComplexMatrix ketbra(const std::vector<cplx>& ket, const std::vector<cplx>& bra) {
    ComplexMatrix m(int(ket.size()), int(bra.size()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            m(i, j) = ket[std::size_t(i)] * std::conj(bra[std::size_t(j)]);
    return m;
}

/// Overlap ratio <a2,b1|v> / <a1,b2|v> over a set of eigenvectors; must be the
/// same complex constant for every vector not orthogonal to both test vectors.
std::optional<cplx> constant_ratio(const std::vector<std::vector<cplx>>& eigvecs,
                                   const std::vector<cplx>& left, const std::vector<cplx>& right,
                                   bool& any_support) {
    std::vector<std::pair<cplx, cplx>> pairs;  // (x, y) = (<left|v>, <right|v>)
    for (const auto& v : eigvecs) {
        cplx x = inner(left, v);
        cplx y = inner(right, v);
        if (std::max(std::abs(x), std::abs(y)) <= 1e-10) continue;  // orthogonal to both
        pairs.emplace_back(x, y);
    }
    any_support = !pairs.empty();
    if (pairs.empty()) return std::nullopt;

    std::size_t ref = 0;
    for (std::size_t i = 1; i < pairs.size(); ++i)
        if (std::abs(pairs[i].second) > std::abs(pairs[ref].second)) ref = i;
    if (std::abs(pairs[ref].second) <= 1e-10) return std::nullopt;  // ratio would be infinite

    cplx c = pairs[ref].first / pairs[ref].second;
    for (const auto& [x, y] : pairs)
        if (std::abs(x * pairs[ref].second - pairs[ref].first * y) > 1e-8) return std::nullopt;
    return c;
}

}  // namespace

WitnessCandidate lemma4_construct(const DensityMatrix& rho, const std::vector<int>& bipartition,
                                  const PureState& a1, const PureState& a2, const PureState& b1,
                                  const PureState& b2, const std::optional<PureState>& alpha,
                                  const std::optional<PureState>& beta) {
    DensityMatrix merged = merge_bipartition(rho, bipartition);
    const int da = merged.shape().local_dim(0), db = merged.shape().local_dim(1);
    if (a1.dim() != da || a2.dim() != da || b1.dim() != db || b2.dim() != db)
        throw invariant_error("test vectors do not match the bipartition dimensions");

    ComplexMatrix pt = partial_transpose(merged.matrix(), merged.shape(), 0);
    HermitianEigenSystem es = hermitian_eig(pt);

    std::vector<std::vector<cplx>> pos, neg;
    for (int j = 0; j < int(es.eigenvalues.size()); ++j) {
        double lam = es.eigenvalues[std::size_t(j)];
        if (lam > 1e-10)
            pos.push_back(es.eigenvector(j));
        else if (lam < -1e-10)
            neg.push_back(es.eigenvector(j));
    }
    if (neg.empty()) throw witness_error("state is PPT across this bipartition; no witness exists");

    std::vector<cplx> a2b1 = kron_vec(a2.amplitudes(), b1.amplitudes());
    std::vector<cplx> a1b2 = kron_vec(a1.amplitudes(), b2.amplitudes());

    bool pos_support = false, neg_support = false;
    std::optional<cplx> c_plus = constant_ratio(pos, a2b1, a1b2, pos_support);
    std::optional<cplx> c_minus = constant_ratio(neg, a2b1, a1b2, neg_support);
    if (!pos_support && !neg_support)
        throw witness_error("test vectors are orthogonal to every eigenvector with nonzero eigenvalue");
    if (pos_support && !c_plus) throw witness_error("positive-eigenspace overlap ratio is not constant");
    if (neg_support && !c_minus) throw witness_error("negative-eigenspace overlap ratio is not constant");
    if (!pos_support || !neg_support)
        throw witness_error("test vectors miss one of the eigenvalue classes");

    cplx prod = *c_plus * std::conj(*c_minus);
    // the construction needs real c+ c- of opposite sign
    if (std::abs(prod.imag()) > 1e-8 * (1 + std::abs(prod)) || prod.real() >= 0)
        throw witness_error("overlap ratios do not satisfy c+ c- < 0");

    std::vector<cplx> alpha_amp = alpha ? alpha->amplitudes() : a1.amplitudes();
    std::vector<cplx> beta_amp = beta ? beta->amplitudes() : b1.amplitudes();

    WitnessCandidate w;
    w.bipartition = bipartition;
    w.c_plus = *c_plus;
    w.c_minus = *c_minus;
    // A1 = |a1*><alpha|, A2 = |alpha><a2*|, B1 = |b1><beta|, B2 = |beta><b2|
    w.operators.pairs.push_back(
        {ketbra(conj_vec(a1.amplitudes()), alpha_amp), ketbra(alpha_amp, conj_vec(a2.amplitudes()))});
    w.operators.pairs.push_back({ketbra(b1.amplitudes(), beta_amp), ketbra(beta_amp, b2.amplitudes())});

    // predicted cauchy2 margin from the partial-transpose quadratic forms
    double ls = std::abs(sandwich(pt, a1b2, a2b1));
    double t1 = std::max(sandwich(pt, a1b2, a1b2).real(), 0.0);
    double t2 = std::max(sandwich(pt, a2b1, a2b1).real(), 0.0);
    w.predicted_margin = ls * ls - t1 * t2;
    return w;
}

EvaluationResult evaluate_witness(const DensityMatrix& rho, const WitnessCandidate& witness,
                                  double tol) {
    DensityMatrix merged = merge_bipartition(rho, witness.bipartition);
    return evaluate_spec(builtin_spec("cauchy2"), witness.operators, merged, tol);
}

WitnessCandidate two_qubit_witness(const DensityMatrix& rho) {
    if (rho.shape().parties() != 2 || rho.shape().local_dim(0) != 2 ||
        rho.shape().local_dim(1) != 2)
        throw invariant_error("two_qubit_witness needs a 2x2 state");
    PTDiagnostics diag = ppt_diagnostics(rho, {0});
    if (!diag.npt()) throw witness_error("state is PPT, hence separable for two qubits");
    if (diag.negative_eigenvectors.size() != 1)
        throw invariant_error("a two-qubit partial transpose cannot have " +
                              std::to_string(diag.negative_eigenvectors.size()) +
                              " negative eigenvalues");

    SchmidtDecomposition sd = schmidt_decompose(diag.negative_eigenvectors.front());
    if (sd.coefficients[1] < 1e-12)
        throw invariant_error("negative eigenvector is a product vector; numerical breakdown");

    SubsystemShape local({2});
    // Schmidt-basis labels: a2 b1 = |00>, a1 b2 = |11>
    PureState a2(sd.basis_a[0], local), a1(sd.basis_a[1], local);
    PureState b1(sd.basis_b[0], local), b2(sd.basis_b[1], local);
    return lemma4_construct(rho, {0}, a1, a2, b1, b2);
}

std::vector<double> white_noise_pt_spectrum(const SchmidtVector& s, int local_dim, double p) {
    if (s.size() > local_dim) throw invariant_error("Schmidt vector larger than local dimension");
    const int d = local_dim;
    const double uniform = (1.0 - p) / (double(d) * d);
    auto coeff = [&](int j) { return j < s.size() ? s[j] : 0.0; };
    std::vector<double> spec;
    for (int j = 0; j < d; ++j) spec.push_back(uniform + p * coeff(j) * coeff(j));
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            spec.push_back(uniform + p * coeff(j) * coeff(k));
            spec.push_back(uniform - p * coeff(j) * coeff(k));
        }
    std::sort(spec.begin(), spec.end());
    return spec;
}

WitnessCandidate white_noise_witness(const PureState& psi, double p) {
    if (psi.shape().parties() != 2 || psi.shape().local_dim(0) != psi.shape().local_dim(1))
        throw invariant_error("white_noise_witness needs a D x D bipartite pure state");
    if (p < 0 || p > 1) throw invariant_error("mixing weight must lie in [0,1]");
    const int d = psi.shape().local_dim(0);

    SchmidtDecomposition sd = schmidt_decompose(psi);
    // largest Schmidt pair: coefficients are descending, so (0, 1)
    double s0 = sd.coefficients[0];
    double s1 = sd.coefficients.size() > 1 ? sd.coefficients[1] : 0.0;
    double min_pred = (1.0 - p) / (double(d) * d) - p * s0 * s1;
    if (min_pred >= -1e-10)
        throw witness_error("white-noise mixture is PPT at this p; no witness exists");

    DensityMatrix rho = white_noise_mix(psi, p);
    SubsystemShape local({d});
    PureState a2(sd.basis_a[0], local), a1(sd.basis_a[1], local);
    PureState b1(sd.basis_b[1], local), b2(sd.basis_b[0], local);
    // |a2,b1> = |j0,k0>, |a1,b2> = |k0,j0> in the Schmidt basis
    return lemma4_construct(rho, {0}, a1, a2, b1, b2);
}

MeasurementBasis BasisPoint::to_basis() const {
    MeasurementBasis basis;
    for (int party = 0; party < 3; ++party) {
        std::array<std::vector<cplx>, 2> pair;
        for (int v = 0; v < 2; ++v) {
            double theta = angles[std::size_t(party * 4 + v * 2)];
            double phi = angles[std::size_t(party * 4 + v * 2 + 1)];
            pair[std::size_t(v)] = qubit_vector(theta, phi);
        }
        basis.vectors.push_back(pair);
    }
    return basis;
}

std::pair<BasisPoint, double> optimize_E(const DensityMatrix& rho, int n_restarts,
                                         std::uint64_t seed) {
    if (rho.dim() != 8) throw invariant_error("optimize_E needs a three-qubit state");
    if (n_restarts < 1) throw invariant_error("need at least one restart");

    auto objective = [&](const std::vector<double>& x) {
        BasisPoint pt;
        std::copy(x.begin(), x.end(), pt.angles.begin());
        return -evaluate_E(rho, pt.to_basis());
    };

    NelderMeadOptions options;
    options.max_evals = 2000;
    options.diameter_tol = 1e-7;

    BasisPoint best;
    double best_value = -1e300;
    for (int r = 0; r < n_restarts; ++r) {
        Rng rng(derive_seed(seed, std::uint64_t(r)));
        std::vector<double> x0(12);
        for (int i = 0; i < 12; ++i)
            x0[std::size_t(i)] = (i % 2 == 0) ? rng.uniform(0, std::numbers::pi)
                                              : rng.uniform(-std::numbers::pi, std::numbers::pi);
        std::vector<std::vector<double>> simplex{x0};
        for (int i = 0; i < 12; ++i) {
            std::vector<double> v = x0;
            v[std::size_t(i)] += 0.5;
            simplex.push_back(std::move(v));
        }
        NelderMeadResult res = nelder_mead(objective, std::move(simplex), options);
        if (-res.fx > best_value) {
            best_value = -res.fx;
            std::copy(res.x.begin(), res.x.end(), best.angles.begin());
        }
    }
    return {best, best_value};
}

PhaseFamily basis_phase_family(const BasisPoint& point, double equatorial_tol) {
    MeasurementBasis basis = point.to_basis();
    PhaseFamily out;
    out.equatorial = true;
    const double r = 1.0 / std::sqrt(2.0);
    for (int party = 0; party < 3; ++party) {
        double chi[2];
        for (int v = 0; v < 2; ++v) {
            const auto& vec = basis.vectors[std::size_t(party)][std::size_t(v)];
            if (std::abs(std::abs(vec[0]) - r) > equatorial_tol ||
                std::abs(std::abs(vec[1]) - r) > equatorial_tol)
                out.equatorial = false;
            chi[v] = std::arg(vec[1] / vec[0]);
        }
        double delta = chi[1] - chi[0];
        while (delta > std::numbers::pi) delta -= 2 * std::numbers::pi;
        while (delta <= -std::numbers::pi) delta += 2 * std::numbers::pi;
        // the optimal family has intra-party relative phase +-(2 phi + pi/2)
        out.phi[std::size_t(party)] = (std::abs(delta) - std::numbers::pi / 2) / 2;
    }
    return out;
}

std::vector<double> grid_points(double start, double stop, double step) {
    if (step <= 0 || stop < start) throw usage_error("empty or malformed grid");
    std::vector<double> pts;
    for (int i = 0;; ++i) {
        double v = start + i * step;
        if (v > stop + step * 1e-9) break;
        pts.push_back(v);
    }
    if (pts.empty()) throw usage_error("empty grid");
    return pts;
}

DensityMatrix sweep_state(const std::string& family, double param) {
    if (family == "rho-alpha") return rho_alpha(param);
    if (family == "rho-abc") return rho_abc(param, param, param);
    if (family == "werner") return werner(param);
    if (family == "white-noise") return white_noise_mix(bell_phi_plus(), param);
    throw usage_error("unknown sweep family: " + family);
}

namespace {

SweepRow witness_row(const DensityMatrix& rho, double param, double tol,
                     const std::function<WitnessCandidate()>& make) {
    SweepRow row;
    row.param = param;
    try {
        WitnessCandidate w = make();
        EvaluationResult r = evaluate_witness(rho, w, tol);
        row.lhs = r.lhs;
        row.rhs = r.rhs;
        row.margin = r.margin;
        row.detected = r.detected;
    } catch (const witness_error&) {
        // PPT point: nothing to report beyond non-detection
    }
    return row;
}

/// Bipartite catalog criteria on a sweep row, with the closed-form witness
/// supplying the operators/vectors on NPT 2x2 points and computational
/// defaults elsewhere.
SweepRow bipartite_criterion_row(const DensityMatrix& rho, double param,
                                 const std::string& method, double tol) {
    bool two_qubit = rho.shape().local_dim(0) == 2 && rho.shape().local_dim(1) == 2;
    std::optional<WitnessCandidate> witness;
    if (two_qubit) {
        try {
            witness = two_qubit_witness(rho);
        } catch (const witness_error&) {
        }
    }

    if (method == "cauchy2") {
        LocalOperatorSet ops;
        if (witness) {
            ops = witness->operators;
        } else {
            for (int k = 0; k < 2; ++k) {
                int d = rho.shape().local_dim(k);
                ComplexMatrix p(d, d), q(d, d);
                p(1, 0) = 1;
                q(0, 0) = 1;
                ops.pairs.push_back({std::move(p), std::move(q)});
            }
        }
        EvaluationResult r = evaluate_spec(builtin_spec("cauchy2"), ops, rho, tol);
        return {param, r.lhs, r.rhs, r.margin, r.detected};
    }

    // vector-based criteria share the same quadruple
    SubsystemShape la({rho.shape().local_dim(0)}), lb({rho.shape().local_dim(1)});
    PureState a = basis_state(la, 0), alpha = basis_state(la, la.dim() - 1);
    PureState b = basis_state(lb, 0), beta = basis_state(lb, lb.dim() - 1);
    std::vector<std::vector<cplx>> basis_a, basis_b;
    if (witness) {
        PTDiagnostics diag = ppt_diagnostics(rho, {0});
        SchmidtDecomposition sd = schmidt_decompose(diag.negative_eigenvectors.front());
        std::vector<cplx> a1c = sd.basis_a[1], a2c = sd.basis_a[0];
        for (cplx& v : a1c) v = std::conj(v);
        for (cplx& v : a2c) v = std::conj(v);
        a = PureState(a1c, la);
        alpha = PureState(a2c, la);
        b = PureState(sd.basis_b[0], lb);
        beta = PureState(sd.basis_b[1], lb);
        for (auto vec : sd.basis_a) {
            for (cplx& v : vec) v = std::conj(v);
            basis_a.push_back(vec);
        }
        basis_b = sd.basis_b;
    } else {
        for (int i = 0; i < la.dim(); ++i) {
            std::vector<cplx> e(std::size_t(la.dim()), cplx(0));
            e[std::size_t(i)] = 1;
            basis_a.push_back(e);
        }
        for (int i = 0; i < lb.dim(); ++i) {
            std::vector<cplx> e(std::size_t(lb.dim()), cplx(0));
            e[std::size_t(i)] = 1;
            basis_b.push_back(e);
        }
    }

    if (method == "rank-one") {
        EvaluationResult r = evaluate_rank_one(rho, a, alpha, b, beta, tol);
        return {param, r.lhs, r.rhs, r.margin, r.detected};
    }
    if (method == "perm-m2") {
        auto [lhs, rhs] = permutation_m2(rho, a, alpha, b, beta);
        EvaluationResult r = make_result(lhs, rhs, tol);
        return {param, r.lhs, r.rhs, r.margin, r.detected};
    }
    // det-ext
    if (rho.shape().local_dim(0) != rho.shape().local_dim(1))
        throw usage_error("det-ext needs equal local dimensions");
    double det = determinant_extension(rho, basis_a, basis_b);
    EvaluationResult r = make_result(std::max(-det, 0.0), std::max(det, 0.0), tol);
    return {param, r.lhs, r.rhs, r.margin, r.detected};
}

}  // namespace

std::vector<SweepRow> sweep(const SweepRequest& request) {
    std::vector<double> pts = grid_points(request.start, request.stop, request.step);
    std::vector<SweepRow> rows;
    rows.reserve(pts.size());

    for (std::size_t i = 0; i < pts.size(); ++i) {
        double param = pts[i];
        DensityMatrix rho = sweep_state(request.family, param);
        std::uint64_t row_seed = derive_seed(request.seed, i);

        if (request.method == "optimize-E") {
            auto [basis, e_best] = optimize_E(rho, request.restarts, row_seed);
            MeasurementBasis mb = basis.to_basis();
            auto prod = [&](int a, int b, int c) {
                return kron_vec({mb.vectors[0][std::size_t(a)], mb.vectors[1][std::size_t(b)],
                                 mb.vectors[2][std::size_t(c)]});
            };
            // split E into its coherence and geometric-mean sides for the csv
            double coherence = std::abs(sandwich(rho.matrix(), prod(0, 0, 0), prod(1, 1, 1)));
            SweepRow row;
            row.param = param;
            row.lhs = coherence;
            row.rhs = coherence - e_best;
            row.margin = e_best;
            row.detected = e_best > request.tol;
            rows.push_back(row);
        } else if (request.method == "two-qubit-witness") {
            if (rho.shape().parties() != 2) throw usage_error("two-qubit-witness needs a 2x2 family");
            rows.push_back(
                witness_row(rho, param, request.tol, [&] { return two_qubit_witness(rho); }));
        } else if (request.method == "white-noise-witness") {
            if (request.family != "white-noise")
                throw usage_error("white-noise-witness only applies to the white-noise family");
            rows.push_back(witness_row(rho, param, request.tol, [&] {
                return white_noise_witness(bell_phi_plus(), param);
            }));
        } else if (request.method == "cauchy4" || request.method == "cauchy4-mirror" ||
                   request.method == "cauchy6" || request.method == "step5") {
            if (rho.shape().parties() != 3) throw usage_error(request.method + " needs three parties");
            LocalOperatorSet ops;
            for (int k = 0; k < 3; ++k)
                ops.pairs.push_back({ComplexMatrix::from_rows({{0, 0}, {1, 0}}),
                                     ComplexMatrix::from_rows({{1, 0}, {0, 0}})});
            EvaluationResult r = evaluate_spec(builtin_spec(request.method), ops, rho, request.tol);
            rows.push_back({param, r.lhs, r.rhs, r.margin, r.detected});
        } else if (request.method == "cauchy2" || request.method == "rank-one" ||
                   request.method == "perm-m2" || request.method == "det-ext") {
            if (rho.shape().parties() != 2)
                throw usage_error(request.method + " needs a bipartite family");
            rows.push_back(bipartite_criterion_row(rho, param, request.method, request.tol));
        } else if (request.method == "hz-correlated" || request.method == "hz-product") {
            if (rho.shape().parties() != 2)
                throw usage_error(request.method + " needs a bipartite family");
            ComplexMatrix a = annihilation_op(rho.shape().local_dim(0));
            ComplexMatrix b = annihilation_op(rho.shape().local_dim(1));
            EvaluationResult r = hillery_zubairy(rho, a, b,
                                                 request.method == "hz-correlated"
                                                     ? HzMode::Correlated
                                                     : HzMode::Product,
                                                 request.tol);
            rows.push_back({param, r.lhs, r.rhs, r.margin, r.detected});
        } else if (request.method == "hillery-geom" || request.method == "hillery-arith") {
            std::vector<ComplexMatrix> ops;
            for (int k = 0; k < rho.shape().parties(); ++k)
                ops.push_back(annihilation_op(rho.shape().local_dim(k)));
            EvaluationResult r = hillery_multi(rho, ops,
                                               request.method == "hillery-geom"
                                                   ? HilleryVariant::Geometric
                                                   : HilleryVariant::Arithmetic,
                                               request.tol);
            rows.push_back({param, r.lhs, r.rhs, r.margin, r.detected});
        } else if (request.method == "bisep-sum") {
            EvaluationResult r = biseparable_sum(rho, request.tol);
            rows.push_back({param, r.lhs, r.rhs, r.margin, r.detected});
        } else {
            // entry-pattern criteria by name
            try {
                auto [offdiag, terms] = entry_pattern(request.method);
                EvaluationResult r =
                    entry_criterion(rho, offdiag.first, offdiag.second, terms, request.tol);
                rows.push_back({param, r.lhs, r.rhs, r.margin, r.detected});
            } catch (const usage_error&) {
                throw usage_error("unknown sweep method: " + request.method);
            }
        }
    }
    return rows;
}

}  // namespace qsep
