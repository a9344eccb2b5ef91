#include "qsep/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qsep/eig.hpp"

namespace qsep {

void LocalOperatorSet::require_compatible(const SubsystemShape& shape) const {
    if (parties() != shape.parties())
        throw invariant_error("operator set covers " + std::to_string(parties()) +
                              " parties, state has " + std::to_string(shape.parties()));
    for (int k = 0; k < parties(); ++k) {
        const OperatorPair& pr = pairs[std::size_t(k)];
        int d = shape.local_dim(k);
        if (!pr.p.is_square() || !pr.q.is_square() || pr.p.rows() != d || pr.q.rows() != d)
            throw invariant_error("operator pair on party " + std::to_string(k) +
                                  " does not match local dimension " + std::to_string(d));
    }
}

std::string SoundnessReport::str() const {
    std::string out;
    for (const PairTotal& t : totals) {
        out += "party " + std::to_string(t.party) + " slot " + (t.slot == Slot::P ? "P" : "Q") +
               ": total " + t.total.str() + (t.covered ? "" : " (uncovered)") + "\n";
    }
    for (const std::string& p : problems) out += "problem: " + p + "\n";
    out += sound ? "sound\n" : "unsound\n";
    return out;
}

SoundnessReport check_soundness(const CriterionSpec& spec) {
    SoundnessReport report;
    if (spec.n_parties < 1) report.problems.push_back("spec needs at least one party");
    if (!spec.lhs_power.positive()) report.problems.push_back("lhs power must be positive");
    if (spec.terms.empty()) report.problems.push_back("spec has no terms");

    std::map<std::pair<int, int>, Rational> totals;
    for (std::size_t t = 0; t < spec.terms.size(); ++t) {
        const SpecTerm& term = spec.terms[t];
        if (!term.weight.positive())
            report.problems.push_back("term " + std::to_string(t) + " has nonpositive weight");
        if (term.factors.empty())
            report.problems.push_back("term " + std::to_string(t) + " has no factors");
        std::vector<int> parties_seen;
        for (const SpecFactor& f : term.factors) {
            if (f.party < 0 || f.party >= spec.n_parties) {
                report.problems.push_back("term " + std::to_string(t) + " references party " +
                                          std::to_string(f.party));
                continue;
            }
            if (f.inner_exponent < Rational(1))
                report.problems.push_back("term " + std::to_string(t) +
                                          " has inner exponent below 1");
            // products of two local PSD factors need not be PSD, so a term may
            // touch each party through one slot only
            if (std::find(parties_seen.begin(), parties_seen.end(), f.party) != parties_seen.end())
                report.problems.push_back("term " + std::to_string(t) + " uses party " +
                                          std::to_string(f.party) + " twice");
            parties_seen.push_back(f.party);
            totals[{f.party, f.slot == Slot::P ? 0 : 1}] =
                totals[{f.party, f.slot == Slot::P ? 0 : 1}] + term.weight * f.inner_exponent;
        }
    }

    Rational target = spec.lhs_power / Rational(2);
    bool totals_ok = true;
    for (int party = 0; party < spec.n_parties; ++party) {
        for (int slot = 0; slot < 2; ++slot) {
            auto it = totals.find({party, slot});
            PairTotal pt;
            pt.party = party;
            pt.slot = slot == 0 ? Slot::P : Slot::Q;
            pt.covered = it != totals.end();
            pt.total = pt.covered ? it->second : Rational(0);
            if (!pt.covered || pt.total != target) totals_ok = false;
            report.totals.push_back(pt);
        }
    }
    report.sound = totals_ok && report.problems.empty();
    if (!totals_ok)
        report.problems.push_back("exponent totals must all equal lhs_power/2 = " + target.str());
    return report;
}

EvaluationResult make_result(double lhs, double rhs, double tol) {
    EvaluationResult r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = lhs - rhs;
    r.tolerance = tol;
    r.detected = r.margin > tol;
    return r;
}

namespace {

double real_expectation(const ComplexMatrix& rho, const ComplexMatrix& O, double tol,
                        const char* what) {
    cplx v = expectation(rho, O);
    if (std::abs(v.imag()) > 1e-8)
        throw invariant_error(std::string(what) + " expectation has imaginary residue " +
                              std::to_string(v.imag()));
    double x = v.real();
    if (x < -tol)
        throw invariant_error(std::string(what) + " expectation is negative (" +
                              std::to_string(x) + "), input state is broken");
    return std::max(x, 0.0);
}

double clamp_population(double x, const char* what) {
    if (x < -1e-8)
        throw invariant_error(std::string(what) + " population is negative: " + std::to_string(x));
    return std::max(x, 0.0);
}

}  // namespace

EvaluationResult evaluate_spec(const CriterionSpec& spec, const LocalOperatorSet& ops,
                               const DensityMatrix& rho, double tol) {
    SoundnessReport soundness = check_soundness(spec);
    if (!soundness.sound)
        throw invariant_error("refusing to evaluate an unsound spec:\n" + soundness.str());
    const SubsystemShape& shape = rho.shape();
    if (spec.n_parties != shape.parties())
        throw invariant_error("spec party count does not match the state");
    ops.require_compatible(shape);

    std::vector<ComplexMatrix> lhs_factors;
    for (int k = 0; k < spec.n_parties; ++k)
        lhs_factors.push_back(ops.pairs[std::size_t(k)].p * ops.pairs[std::size_t(k)].q);
    cplx lhs_val = expectation(rho.matrix(), kron(lhs_factors));
    double lhs = std::pow(std::abs(lhs_val), spec.lhs_power.to_double());

    double rhs = 1.0;
    for (const SpecTerm& term : spec.terms) {
        std::vector<ComplexMatrix> factors;
        for (int k = 0; k < spec.n_parties; ++k) {
            const SpecFactor* found = nullptr;
            for (const SpecFactor& f : term.factors)
                if (f.party == k) found = &f;
            if (!found) {
                factors.push_back(ComplexMatrix::identity(shape.local_dim(k)));
                continue;
            }
            const OperatorPair& pr = ops.pairs[std::size_t(k)];
            ComplexMatrix m = found->slot == Slot::P ? pr.p * dagger(pr.p) : dagger(pr.q) * pr.q;
            if (found->inner_exponent == Rational(1))
                factors.push_back(std::move(m));
            else
                factors.push_back(psd_power(m, found->inner_exponent.to_double()));
        }
        double ev = real_expectation(rho.matrix(), kron(factors), tol, "criterion term");
        rhs *= std::pow(ev, term.weight.to_double());
    }
    return make_result(lhs, rhs, tol);
}

namespace {

SpecTerm term(Rational weight, std::vector<SpecFactor> factors) {
    SpecTerm t;
    t.weight = weight;
    t.factors = std::move(factors);
    return t;
}

SpecFactor fac(int party, Slot slot, Rational e = Rational(1)) { return {party, slot, e}; }

}  // namespace

CriterionSpec builtin_spec(const std::string& name) {
    const Rational w4(1, 4), w6(1, 6), w3(1, 3), e32(3, 2);
    if (name == "cauchy2") {
        CriterionSpec s;
        s.n_parties = 2;
        s.lhs_power = Rational(2);
        s.terms = {term(1, {fac(0, Slot::P), fac(1, Slot::Q)}),
                   term(1, {fac(0, Slot::Q), fac(1, Slot::P)})};
        return s;
    }
    if (name == "cauchy4") {
        // orientation fixed so that with P_k = |1><0|, Q_k = |0><0| the bound
        // reads |rho_07| <= (rho_11 rho_22 rho_44 rho_77)^{1/4}
        CriterionSpec s;
        s.n_parties = 3;
        s.lhs_power = Rational(1);
        s.terms = {term(w4, {fac(0, Slot::Q), fac(1, Slot::Q), fac(2, Slot::P)}),
                   term(w4, {fac(0, Slot::Q), fac(1, Slot::P), fac(2, Slot::Q)}),
                   term(w4, {fac(0, Slot::P), fac(1, Slot::Q), fac(2, Slot::Q)}),
                   term(w4, {fac(0, Slot::P), fac(1, Slot::P), fac(2, Slot::P)})};
        return s;
    }
    if (name == "cauchy4-mirror") return mirror_spec(builtin_spec("cauchy4"));
    if (name == "cauchy6") {
        CriterionSpec s;
        s.n_parties = 3;
        s.lhs_power = Rational(1);
        s.terms = {term(w6, {fac(0, Slot::Q), fac(1, Slot::Q), fac(2, Slot::P)}),
                   term(w6, {fac(0, Slot::Q), fac(1, Slot::P), fac(2, Slot::Q)}),
                   term(w6, {fac(0, Slot::P), fac(1, Slot::Q), fac(2, Slot::P)}),
                   term(w6, {fac(0, Slot::P), fac(1, Slot::Q), fac(2, Slot::Q)}),
                   term(w6, {fac(0, Slot::Q), fac(1, Slot::P), fac(2, Slot::P)}),
                   term(w6, {fac(0, Slot::P), fac(1, Slot::P), fac(2, Slot::Q)})};
        return s;
    }
    if (name == "step5") {
        // the derivation chain (Cauchy-Schwarz, Hoelder with weights 1/3,
        // positive-operator power 3/2) supports lhs power 1; the squared form
        // fails the exponent ledger and is rejected as unsound
        CriterionSpec s;
        s.n_parties = 3;
        s.lhs_power = Rational(1);
        s.terms = {term(w3, {fac(0, Slot::P, e32), fac(1, Slot::Q, e32)}),
                   term(w3, {fac(1, Slot::P, e32), fac(2, Slot::Q, e32)}),
                   term(w3, {fac(2, Slot::P, e32), fac(0, Slot::Q, e32)})};
        return s;
    }
    throw usage_error("unknown builtin spec: " + name);
}

CriterionSpec mirror_spec(CriterionSpec spec) {
    for (SpecTerm& t : spec.terms)
        for (SpecFactor& f : t.factors) f.slot = f.slot == Slot::P ? Slot::Q : Slot::P;
    return spec;
}

const std::vector<std::string>& builtin_spec_names() {
    static const std::vector<std::string> names = {"cauchy2", "cauchy4", "cauchy4-mirror",
                                                   "cauchy6", "step5"};
    return names;
}

namespace {

void require_local_vector(const PureState& v, int dim, const char* what) {
    if (v.shape().parties() != 1 || v.dim() != dim)
        throw invariant_error(std::string(what) + " must be a single-party vector of dimension " +
                              std::to_string(dim));
}

}  // namespace

EvaluationResult evaluate_rank_one(const DensityMatrix& rho, const PureState& a,
                                   const PureState& alpha, const PureState& b,
                                   const PureState& beta, double tol) {
    if (rho.shape().parties() != 2) throw invariant_error("rank-one bound needs a bipartite state");
    int da = rho.shape().local_dim(0), db = rho.shape().local_dim(1);
    require_local_vector(a, da, "a");
    require_local_vector(alpha, da, "alpha");
    require_local_vector(b, db, "b");
    require_local_vector(beta, db, "beta");

    auto ab = kron_vec(a.amplitudes(), b.amplitudes());
    auto alpha_beta = kron_vec(alpha.amplitudes(), beta.amplitudes());
    auto a_beta = kron_vec(a.amplitudes(), beta.amplitudes());
    auto alpha_b = kron_vec(alpha.amplitudes(), b.amplitudes());

    double lhs = std::abs(sandwich(rho.matrix(), alpha_beta, ab));
    double t1 = clamp_population(sandwich(rho.matrix(), a_beta, a_beta).real(), "rank-one");
    double t2 = clamp_population(sandwich(rho.matrix(), alpha_b, alpha_b).real(), "rank-one");
    return make_result(lhs, std::sqrt(t1 * t2), tol);
}

double evaluate_E(const DensityMatrix& rho, const MeasurementBasis& basis) {
    if (rho.shape().parties() != 3 || rho.dim() != 8)
        throw invariant_error("E-quantity needs a three-qubit state");
    if (basis.vectors.size() != 3) throw invariant_error("E-quantity needs three vector pairs");
    for (const auto& pair : basis.vectors)
        if (pair[0].size() != 2 || pair[1].size() != 2)
            throw invariant_error("E-quantity basis vectors must be qubit vectors");

    auto product = [&](int i, int j, int k) {
        return kron_vec({basis.vectors[0][std::size_t(i)], basis.vectors[1][std::size_t(j)],
                         basis.vectors[2][std::size_t(k)]});
    };
    auto population = [&](int i, int j, int k) {
        auto v = product(i, j, k);
        return clamp_population(sandwich(rho.matrix(), v, v).real(), "E-quantity");
    };

    double coherence = std::abs(sandwich(rho.matrix(), product(0, 0, 0), product(1, 1, 1)));
    double prod = population(0, 0, 1) * population(0, 1, 0) * population(1, 0, 0) *
                  population(1, 1, 1);
    return coherence - std::pow(prod, 0.25);
}

EvaluationResult hillery_zubairy(const DensityMatrix& rho, const ComplexMatrix& A,
                                 const ComplexMatrix& B, HzMode mode, double tol) {
    if (rho.shape().parties() != 2)
        throw invariant_error("Hillery-Zubairy criteria need a bipartite state");
    int da = rho.shape().local_dim(0), db = rho.shape().local_dim(1);
    if (A.rows() != da || !A.is_square() || B.rows() != db || !B.is_square())
        throw invariant_error("operator dimensions do not match the state");

    if (mode == HzMode::Correlated) {
        cplx v = expectation(rho.matrix(), kron(dagger(A), B));
        double rhs = real_expectation(rho.matrix(), kron(dagger(A) * A, dagger(B) * B), tol,
                                      "hz-correlated");
        return make_result(std::norm(v), rhs, tol);
    }
    cplx v = expectation(rho.matrix(), kron(A, B));
    double ea = real_expectation(rho.matrix(), kron(dagger(A) * A, ComplexMatrix::identity(db)),
                                 tol, "hz-product");
    double eb = real_expectation(rho.matrix(), kron(ComplexMatrix::identity(da), dagger(B) * B),
                                 tol, "hz-product");
    return make_result(std::norm(v), ea * eb, tol);
}

EvaluationResult hz_bipartition(const DensityMatrix& rho, const std::vector<ComplexMatrix>& ops,
                                int split_j, double tol) {
    const SubsystemShape& shape = rho.shape();
    int n = shape.parties();
    if (int(ops.size()) != n) throw invariant_error("need one operator per party");
    if (split_j < 1 || split_j >= n) throw invariant_error("split must satisfy 1 <= j < N");
    for (int k = 0; k < n; ++k)
        if (!ops[std::size_t(k)].is_square() || ops[std::size_t(k)].rows() != shape.local_dim(k))
            throw invariant_error("operator dimension mismatch on party " + std::to_string(k));

    cplx v = expectation(rho.matrix(), kron(ops));
    std::vector<ComplexMatrix> rhs_factors;
    for (int k = 0; k < n; ++k) {
        const ComplexMatrix& A = ops[std::size_t(k)];
        rhs_factors.push_back(k < split_j ? dagger(A) * A : A * dagger(A));
    }
    double rhs = real_expectation(rho.matrix(), kron(rhs_factors), tol, "hz-bipartition");
    return make_result(std::norm(v), rhs, tol);
}

EvaluationResult hillery_multi(const DensityMatrix& rho, const std::vector<ComplexMatrix>& ops,
                               HilleryVariant variant, double tol) {
    const SubsystemShape& shape = rho.shape();
    int n = shape.parties();
    if (n < 2) throw invariant_error("multipartite criterion needs at least two parties");
    if (int(ops.size()) != n) throw invariant_error("need one operator per party");
    for (int k = 0; k < n; ++k)
        if (!ops[std::size_t(k)].is_square() || ops[std::size_t(k)].rows() != shape.local_dim(k))
            throw invariant_error("operator dimension mismatch on party " + std::to_string(k));

    double lhs = std::abs(expectation(rho.matrix(), kron(ops)));

    auto embed = [&](const ComplexMatrix& local, int party) {
        std::vector<ComplexMatrix> factors;
        for (int k = 0; k < n; ++k)
            factors.push_back(k == party ? local : ComplexMatrix::identity(shape.local_dim(k)));
        return kron(factors);
    };

    if (variant == HilleryVariant::Geometric) {
        double rhs = 1.0;
        for (int k = 0; k < n; ++k) {
            ComplexMatrix powered = psd_power(dagger(ops[std::size_t(k)]) * ops[std::size_t(k)],
                                              double(n) / 2.0);
            double ev = real_expectation(rho.matrix(), embed(powered, k), tol, "hillery-geom");
            rhs *= std::pow(ev, 1.0 / n);
        }
        return make_result(lhs, rhs, tol);
    }
    ComplexMatrix mean(shape.dim(), shape.dim());
    for (int k = 0; k < n; ++k)
        mean += embed(dagger(ops[std::size_t(k)]) * ops[std::size_t(k)], k);
    mean *= cplx(1.0 / n);
    double rhs = real_expectation(rho.matrix(), psd_power(mean, double(n) / 2.0), tol,
                                  "hillery-arith");
    return make_result(lhs, rhs, tol);
}

ComplexMatrix annihilation_op(int cutoff) {
    if (cutoff < 1) throw invariant_error("Fock cutoff must be positive");
    ComplexMatrix a(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

EvaluationResult shchukin_vogel(const DensityMatrix& rho_fock, const FockPowers& powers,
                                double tol) {
    if (rho_fock.shape().parties() != 2)
        throw invariant_error("Shchukin-Vogel criterion needs a two-mode state");
    const int ca = rho_fock.shape().local_dim(0);
    const int cb = rho_fock.shape().local_dim(1);
    for (int v : {powers.m, powers.n, powers.p, powers.q, powers.r, powers.s, powers.k, powers.l})
        if (v < 0) throw invariant_error("Fock powers must be nonnegative");

    int max_a = std::max({powers.m, powers.n, powers.p, powers.q});
    int max_b = std::max({powers.r, powers.s, powers.k, powers.l});
    ComplexMatrix red_a = partial_trace(rho_fock.matrix(), rho_fock.shape(), {0});
    ComplexMatrix red_b = partial_trace(rho_fock.matrix(), rho_fock.shape(), {1});
    for (int n = 0; n < ca; ++n)
        if (red_a(n, n).real() > 1e-12 && n + max_a >= ca)
            throw invariant_error("mode-a support is too close to the Fock cutoff");
    for (int n = 0; n < cb; ++n)
        if (red_b(n, n).real() > 1e-12 && n + max_b >= cb)
            throw invariant_error("mode-b support is too close to the Fock cutoff");

    ComplexMatrix a = annihilation_op(ca), ad = dagger(a);
    ComplexMatrix b = annihilation_op(cb), bd = dagger(b);
    LocalOperatorSet ops;
    ops.pairs.push_back({matrix_power(ad, powers.m) * matrix_power(a, powers.n),
                         matrix_power(ad, powers.p) * matrix_power(a, powers.q)});
    ops.pairs.push_back({matrix_power(bd, powers.s) * matrix_power(b, powers.r),
                         matrix_power(bd, powers.k) * matrix_power(b, powers.l)});
    return evaluate_spec(builtin_spec("cauchy2"), ops, rho_fock, tol);
}

EvaluationResult entry_criterion(const DensityMatrix& rho, int i, int j,
                                 const std::vector<std::pair<int, Rational>>& rhs_terms,
                                 double tol) {
    int d = rho.dim();
    if (i < 0 || i >= d || j < 0 || j >= d) throw invariant_error("entry index out of range");
    Rational total(0);
    for (const auto& [idx, e] : rhs_terms) {
        if (idx < 0 || idx >= d) throw invariant_error("diagonal index out of range");
        total = total + e;
    }
    if (total != Rational(1)) throw invariant_error("entry-criterion exponents must sum to 1");

    double lhs = std::abs(rho.matrix()(i, j));
    double rhs = 1.0;
    for (const auto& [idx, e] : rhs_terms) {
        double pop = clamp_population(rho.matrix()(idx, idx).real(), "entry-criterion");
        rhs *= std::pow(pop, e.to_double());
    }
    return make_result(lhs, rhs, tol);
}

std::pair<std::pair<int, int>, std::vector<std::pair<int, Rational>>> entry_pattern(
    const std::string& name) {
    using Terms = std::vector<std::pair<int, Rational>>;
    const Rational h(1, 2), s6(1, 6), q(1, 4);
    if (name == "guehne1") return {{0, 7}, Terms{{1, h}, {6, h}}};
    if (name == "guehne2") return {{0, 7}, Terms{{2, h}, {5, h}}};
    if (name == "guehne3") return {{0, 7}, Terms{{3, h}, {4, h}}};
    if (name == "seefinck-sep")
        return {{0, 7}, Terms{{1, s6}, {2, s6}, {3, s6}, {4, s6}, {5, s6}, {6, s6}}};
    if (name == "guehne-abc")
        return {{0, 7}, Terms{{0, s6}, {3, Rational(2, 6)}, {4, s6}, {5, s6}, {6, s6}}};
    if (name == "woelk-abc") return {{0, 7}, Terms{{0, q}, {3, q}, {5, q}, {6, q}}};
    throw usage_error("unknown entry pattern: " + name);
}

EvaluationResult biseparable_sum(const DensityMatrix& rho, double tol) {
    if (rho.dim() != 8) throw invariant_error("biseparable_sum needs a three-qubit state");
    const ComplexMatrix& m = rho.matrix();
    auto pop = [&](int i) { return clamp_population(m(i, i).real(), "biseparable_sum"); };
    double rhs = std::sqrt(pop(1) * pop(6)) + std::sqrt(pop(2) * pop(5)) +
                 std::sqrt(pop(3) * pop(4));
    return make_result(std::abs(m(0, 7)), rhs, tol);
}

EvaluationResult gme_criterion(const DensityMatrix& rho, const std::vector<ComplexMatrix>& X,
                               const std::vector<ComplexMatrix>& Y,
                               const std::vector<std::vector<int>>& bipartitions, double tol) {
    const SubsystemShape& shape = rho.shape();
    int n = shape.parties();
    if (int(X.size()) != n || int(Y.size()) != n)
        throw invariant_error("need X_k and Y_k for every party");
    if (bipartitions.empty()) throw invariant_error("need at least one bipartition");
    for (int k = 0; k < n; ++k)
        if (X[std::size_t(k)].rows() != shape.local_dim(k) ||
            Y[std::size_t(k)].rows() != shape.local_dim(k))
            throw invariant_error("operator dimension mismatch on party " + std::to_string(k));

    std::vector<ComplexMatrix> lhs_factors;
    for (int k = 0; k < n; ++k) lhs_factors.push_back(X[std::size_t(k)] * Y[std::size_t(k)]);
    double lhs = std::abs(expectation(rho.matrix(), kron(lhs_factors)));

    double rhs = 0;
    for (const std::vector<int>& side_a : bipartitions) {
        if (side_a.empty() || int(side_a.size()) >= n)
            throw invariant_error("each bipartition must be a proper nonempty subset");
        std::vector<bool> in_a(std::size_t(n), false);
        for (int p : side_a) {
            if (p < 0 || p >= n || in_a[std::size_t(p)])
                throw invariant_error("invalid bipartition");
            in_a[std::size_t(p)] = true;
        }
        std::vector<ComplexMatrix> f1, f2;
        for (int k = 0; k < n; ++k) {
            ComplexMatrix xx = X[std::size_t(k)] * dagger(X[std::size_t(k)]);
            ComplexMatrix yy = dagger(Y[std::size_t(k)]) * Y[std::size_t(k)];
            f1.push_back(in_a[std::size_t(k)] ? xx : yy);
            f2.push_back(in_a[std::size_t(k)] ? yy : xx);
        }
        double t1 = real_expectation(rho.matrix(), kron(f1), tol, "gme");
        double t2 = real_expectation(rho.matrix(), kron(f2), tol, "gme");
        rhs += std::sqrt(t1 * t2);
    }
    return make_result(lhs, rhs, tol);
}

std::pair<double, double> permutation_m2(const DensityMatrix& rho, const PureState& a,
                                         const PureState& alpha, const PureState& b,
                                         const PureState& beta) {
    if (rho.shape().parties() != 2) throw invariant_error("permutation_m2 needs a bipartite state");
    const int da = rho.shape().local_dim(0), db = rho.shape().local_dim(1);
    require_local_vector(a, da, "a");
    require_local_vector(alpha, da, "alpha");
    require_local_vector(b, db, "b");
    require_local_vector(beta, db, "beta");

    // doubled space (A1, B1, A2, B2)
    SubsystemShape doubled({da, db, da, db});
    ComplexMatrix big = kron(rho.matrix(), rho.matrix());

    auto permutation = [&](int first, int second) {
        ComplexMatrix P(doubled.dim(), doubled.dim());
        for (int i = 0; i < doubled.dim(); ++i) {
            auto dg = doubled.digits(i);
            std::swap(dg[std::size_t(first)], dg[std::size_t(second)]);
            P(doubled.index(dg), i) = 1.0;
        }
        return P;
    };
    ComplexMatrix pa = permutation(0, 2);
    ComplexMatrix pb = permutation(1, 3);

    std::vector<cplx> phi = kron_vec(
        {a.amplitudes(), beta.amplitudes(), alpha.amplitudes(), b.amplitudes()});
    auto apply = [&](const ComplexMatrix& P, const std::vector<cplx>& v) {
        std::vector<cplx> out(v.size());
        for (int i = 0; i < int(v.size()); ++i) {
            cplx s = 0;
            for (int j = 0; j < int(v.size()); ++j) s += P(i, j) * v[std::size_t(j)];
            out[std::size_t(i)] = s;
        }
        return out;
    };

    double lhs2 = sandwich(big, apply(pb, phi), apply(pa, phi)).real();
    double rhs2 = sandwich(big, phi, phi).real();
    return {std::sqrt(std::max(lhs2, 0.0)), std::sqrt(std::max(rhs2, 0.0))};
}

double determinant_extension(const DensityMatrix& rho, const std::vector<std::vector<cplx>>& basis_a,
                             const std::vector<std::vector<cplx>>& basis_b) {
    if (rho.shape().parties() != 2)
        throw invariant_error("determinant extension needs a bipartite state");
    const int da = rho.shape().local_dim(0), db = rho.shape().local_dim(1);
    if (da != db) throw invariant_error("determinant extension needs equal local dimensions");
    const int d = da;
    if (int(basis_a.size()) != d || int(basis_b.size()) != d)
        throw invariant_error("need one basis vector per local dimension");

    auto check_orthonormal = [&](const std::vector<std::vector<cplx>>& basis, const char* side) {
        for (int u = 0; u < d; ++u) {
            if (int(basis[std::size_t(u)].size()) != d)
                throw invariant_error("basis vector length mismatch");
            for (int v = 0; v < d; ++v) {
                cplx g = 0;
                for (int i = 0; i < d; ++i)
                    g += std::conj(basis[std::size_t(u)][std::size_t(i)]) *
                         basis[std::size_t(v)][std::size_t(i)];
                if (std::abs(g - (u == v ? cplx(1) : cplx(0))) > 1e-10)
                    throw invariant_error(std::string(side) + "-side basis is not orthonormal");
            }
        }
    };
    check_orthonormal(basis_a, "A");
    check_orthonormal(basis_b, "B");

    ComplexMatrix m(d, d);
    for (int u = 0; u < d; ++u)
        for (int v = 0; v < d; ++v) {
            auto bra = kron_vec(basis_a[std::size_t(u)], basis_b[std::size_t(v)]);
            auto ket = kron_vec(basis_a[std::size_t(v)], basis_b[std::size_t(u)]);
            m(u, v) = sandwich(rho.matrix(), bra, ket);
        }
    // m is Hermitian by construction; determinant = product of its eigenvalues
    HermitianEigenSystem es = hermitian_eig(m);
    double det = 1;
    for (double lam : es.eigenvalues) det *= lam;
    return det;
}

}  // namespace qsep
