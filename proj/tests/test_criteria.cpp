#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qsep/criteria.hpp"
#include "qsep/eig.hpp"
#include "qsep/rng.hpp"
#include "qsep/witness.hpp"

using namespace qsep;

namespace {

ComplexMatrix op(std::initializer_list<std::initializer_list<cplx>> rows) {
    return ComplexMatrix::from_rows(rows);
}

const ComplexMatrix raise10 = op({{0, 0}, {1, 0}});   // |1><0|
const ComplexMatrix proj0 = op({{1, 0}, {0, 0}});     // |0><0|
const ComplexMatrix lower01 = op({{0, 1}, {0, 0}});   // |0><1|

LocalOperatorSet flip_ops(int parties) {
    LocalOperatorSet ops;
    for (int k = 0; k < parties; ++k) ops.pairs.push_back({raise10, proj0});
    return ops;
}

LocalOperatorSet random_ops(const SubsystemShape& shape, Rng& rng) {
    LocalOperatorSet ops;
    for (int k = 0; k < shape.parties(); ++k) {
        int d = shape.local_dim(k);
        ComplexMatrix p(d, d), q(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                p(i, j) = rng.cgauss();
                q(i, j) = rng.cgauss();
            }
        ops.pairs.push_back({std::move(p), std::move(q)});
    }
    return ops;
}

ComplexMatrix random_unitary(int d, Rng& rng) {
    // Gram-Schmidt on Gaussian columns
    std::vector<std::vector<cplx>> cols;
    for (int c = 0; c < d; ++c) {
        std::vector<cplx> v(std::size_t(d), cplx(0));
        for (int i = 0; i < d; ++i) v[std::size_t(i)] = rng.cgauss();
        for (const auto& u : cols) {
            cplx ov = 0;
            for (int i = 0; i < d; ++i) ov += std::conj(u[std::size_t(i)]) * v[std::size_t(i)];
            for (int i = 0; i < d; ++i) v[std::size_t(i)] -= ov * u[std::size_t(i)];
        }
        double nrm = 0;
        for (const cplx& x : v) nrm += std::norm(x);
        nrm = std::sqrt(nrm);
        for (cplx& x : v) x /= nrm;
        cols.push_back(std::move(v));
    }
    ComplexMatrix u(d, d);
    for (int c = 0; c < d; ++c)
        for (int i = 0; i < d; ++i) u(i, c) = cols[std::size_t(c)][std::size_t(i)];
    return u;
}

PureState local_state(std::vector<cplx> amps) {
    double n = 0;
    for (const cplx& a : amps) n += std::norm(a);
    n = std::sqrt(n);
    for (cplx& a : amps) a /= n;
    int d = int(amps.size());
    return PureState(std::move(amps), SubsystemShape({d}));
}

}  // namespace

TEST_CASE("check_soundness accepts every builtin") {
    for (const std::string& name : builtin_spec_names()) {
        SoundnessReport report = check_soundness(builtin_spec(name));
        INFO(name, "\n", report.str());
        CHECK(report.sound);
    }
    // structure spot checks
    CriterionSpec c4 = builtin_spec("cauchy4");
    CHECK(c4.lhs_power == Rational(1));
    CHECK(c4.terms.size() == 4);
    CriterionSpec c6 = builtin_spec("cauchy6");
    CHECK(c6.terms.size() == 6);
    int appearances = 0;
    for (const SpecTerm& t : c6.terms)
        for (const SpecFactor& f : t.factors)
            if (f.party == 0 && f.slot == Slot::P) ++appearances;
    CHECK(appearances == 3);
}

TEST_CASE("check_soundness rejects malformed and perturbed specs") {
    CriterionSpec bad = builtin_spec("cauchy4");
    bad.terms[0].weight = Rational(1, 3);
    CHECK_FALSE(check_soundness(bad).sound);

    CriterionSpec squared = builtin_spec("step5");
    squared.lhs_power = Rational(2);  // the squared display fails the exponent ledger
    CHECK_FALSE(check_soundness(squared).sound);

    CriterionSpec both_slots = builtin_spec("cauchy2");
    both_slots.terms[0].factors = {SpecFactor{0, Slot::P, Rational(1)},
                                   SpecFactor{0, Slot::Q, Rational(1)}};
    CHECK_FALSE(check_soundness(both_slots).sound);

    CriterionSpec small_exponent = builtin_spec("cauchy2");
    small_exponent.terms[0].factors[0].inner_exponent = Rational(1, 2);
    CHECK_FALSE(check_soundness(small_exponent).sound);

    CriterionSpec uncovered = builtin_spec("cauchy2");
    uncovered.terms.pop_back();
    SoundnessReport report = check_soundness(uncovered);
    CHECK_FALSE(report.sound);
    CHECK(report.str().find("uncovered") != std::string::npos);
}

TEST_CASE("cauchy2 on the Bell state with the flip quadruple") {
    DensityMatrix bell = white_noise_mix(bell_phi_plus(), 1.0);
    EvaluationResult r = evaluate_spec(builtin_spec("cauchy2"), flip_ops(2), bell);
    // matrix-entry oracle: |rho_{00,11}|^2 vs rho_{01,01} rho_{10,10}
    const ComplexMatrix& m = bell.matrix();
    double lhs_oracle = std::norm(m(0, 3));
    double rhs_oracle = m(1, 1).real() * m(2, 2).real();
    CHECK(r.lhs == doctest::Approx(lhs_oracle).epsilon(1e-12));
    CHECK(r.lhs == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(rhs_oracle).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(0.0));
    CHECK(r.detected);
}

TEST_CASE("cauchy2 never fires on separable or PPT two-qubit states") {
    Rng seeds(101);
    for (int i = 0; i < 25; ++i) {
        DensityMatrix sep = random_separable(SubsystemShape({2, 2}), 1 + i % 5, seeds.next());
        Rng op_rng(seeds.next());
        for (int o = 0; o < 8; ++o) {
            EvaluationResult r =
                evaluate_spec(builtin_spec("cauchy2"), random_ops(sep.shape(), op_rng), sep);
            CHECK(r.margin <= 1e-9);
        }
    }
    // PPT blindness
    Rng seeds2(103);
    int tested = 0;
    std::uint64_t i = 0;
    while (tested < 20) {
        DensityMatrix rho = random_density(4, 4, derive_seed(900, i++));
        DensityMatrix as_pair(rho.matrix(), SubsystemShape({2, 2}));
        if (min_eigenvalue(partial_transpose(as_pair.matrix(), as_pair.shape(), 0)) < -1e-10)
            continue;
        ++tested;
        Rng op_rng(seeds2.next());
        for (int o = 0; o < 8; ++o) {
            EvaluationResult r =
                evaluate_spec(builtin_spec("cauchy2"), random_ops(as_pair.shape(), op_rng), as_pair);
            CHECK(r.margin <= 1e-9);
        }
    }
}

TEST_CASE("cauchy4 and its mirror split the rho_abc family at abc = 1") {
    DensityMatrix below = rho_abc(0.5, 0.5, 0.5);  // abc = 1/8
    EvaluationResult r1 = evaluate_spec(builtin_spec("cauchy4"), flip_ops(3), below);
    double n = 2 + 1.5 + 6.0;  // 2 + a+b+c + 1/a+1/b+1/c
    CHECK(r1.lhs == doctest::Approx(1.0 / n).epsilon(1e-12));
    CHECK(r1.rhs == doctest::Approx(std::pow(0.125, 0.25) / n).epsilon(1e-12));
    CHECK(r1.detected);
    EvaluationResult r2 = evaluate_spec(builtin_spec("cauchy4-mirror"), flip_ops(3), below);
    CHECK_FALSE(r2.detected);

    DensityMatrix above = rho_abc(2, 2, 2);  // abc = 8
    CHECK_FALSE(evaluate_spec(builtin_spec("cauchy4"), flip_ops(3), above).detected);
    CHECK(evaluate_spec(builtin_spec("cauchy4-mirror"), flip_ops(3), above).detected);

    DensityMatrix at_one = rho_abc(1, 1, 1);
    CHECK(std::abs(evaluate_spec(builtin_spec("cauchy4"), flip_ops(3), at_one).margin) <= 1e-9);
    CHECK(std::abs(evaluate_spec(builtin_spec("cauchy4-mirror"), flip_ops(3), at_one).margin) <=
          1e-9);
}

TEST_CASE("cauchy6 with the flip quadruple sits at the boundary on rho_abc") {
    DensityMatrix rho = rho_abc(0.5, 2.0, 1.5);
    EvaluationResult r = evaluate_spec(builtin_spec("cauchy6"), flip_ops(3), rho);
    CHECK(std::abs(r.margin) <= 1e-12);  // product of the six diagonals is scale-free
}

TEST_CASE("step5 evaluates and holds on separable states") {
    Rng seeds(107);
    DensityMatrix ghz3 = white_noise_mix(ghz(3), 1.0);
    EvaluationResult on_ghz = evaluate_spec(builtin_spec("step5"), flip_ops(3), ghz3);
    CHECK(on_ghz.lhs == doctest::Approx(0.5).epsilon(1e-12));
    for (int i = 0; i < 15; ++i) {
        DensityMatrix sep = random_separable(SubsystemShape({2, 2, 2}), 1 + i % 4, seeds.next());
        Rng op_rng(seeds.next());
        for (int o = 0; o < 5; ++o) {
            EvaluationResult r =
                evaluate_spec(builtin_spec("step5"), random_ops(sep.shape(), op_rng), sep);
            CHECK(r.margin <= 1e-9);
        }
    }
}

TEST_CASE("evaluate_spec is invariant under local unitaries") {
    Rng rng(109);
    DensityMatrix rho = random_density(8, 5, rng.next());
    DensityMatrix rho3(rho.matrix(), SubsystemShape({2, 2, 2}));
    LocalOperatorSet ops = random_ops(rho3.shape(), rng);
    EvaluationResult base = evaluate_spec(builtin_spec("cauchy4"), ops, rho3);

    std::vector<ComplexMatrix> us;
    for (int k = 0; k < 3; ++k) us.push_back(random_unitary(2, rng));
    ComplexMatrix big_u = kron(us);
    DensityMatrix rotated(big_u * rho3.matrix() * dagger(big_u), rho3.shape());
    LocalOperatorSet rotated_ops;
    for (int k = 0; k < 3; ++k)
        rotated_ops.pairs.push_back(
            {us[std::size_t(k)] * ops.pairs[std::size_t(k)].p * dagger(us[std::size_t(k)]),
             us[std::size_t(k)] * ops.pairs[std::size_t(k)].q * dagger(us[std::size_t(k)])});
    EvaluationResult rot = evaluate_spec(builtin_spec("cauchy4"), rotated_ops, rotated);
    CHECK(rot.lhs == doctest::Approx(base.lhs).epsilon(1e-9));
    CHECK(rot.rhs == doctest::Approx(base.rhs).epsilon(1e-9));
}

TEST_CASE("evaluate_spec rejects unsound specs and bad dimensions") {
    CriterionSpec broken = builtin_spec("cauchy2");
    broken.terms[0].weight = Rational(2);
    DensityMatrix bell = white_noise_mix(bell_phi_plus(), 1.0);
    CHECK_THROWS_AS(evaluate_spec(broken, flip_ops(2), bell), invariant_error);
    CHECK_THROWS_AS(evaluate_spec(builtin_spec("cauchy4"), flip_ops(3), bell), invariant_error);
    CHECK_THROWS_AS(builtin_spec("nope"), usage_error);
}

TEST_CASE("rank-one bound") {
    DensityMatrix bell = white_noise_mix(bell_phi_plus(), 1.0);
    PureState zero = local_state({1, 0}), one = local_state({0, 1});
    EvaluationResult r = evaluate_rank_one(bell, zero, one, zero, one);
    CHECK(r.lhs == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(0.0));
    CHECK(r.detected);

    Rng seeds(113);
    for (int i = 0; i < 20; ++i) {
        DensityMatrix prod = random_separable(SubsystemShape({2, 2}), 1, seeds.next());
        Rng vr(seeds.next());
        PureState a = local_state({vr.cgauss(), vr.cgauss()});
        PureState alpha = local_state({vr.cgauss(), vr.cgauss()});
        PureState b = local_state({vr.cgauss(), vr.cgauss()});
        PureState beta = local_state({vr.cgauss(), vr.cgauss()});
        CHECK(evaluate_rank_one(prod, a, alpha, b, beta).margin <= 1e-9);
        // degenerate equality
        EvaluationResult eq = evaluate_rank_one(prod, a, a, b, b);
        CHECK(std::abs(eq.margin) < 1e-12);
    }
}

TEST_CASE("E-quantity") {
    DensityMatrix ghz3 = white_noise_mix(ghz(3), 1.0);
    MeasurementBasis computational;
    for (int k = 0; k < 3; ++k)
        computational.vectors.push_back({std::vector<cplx>{1, 0}, std::vector<cplx>{0, 1}});
    CHECK(evaluate_E(ghz3, computational) == doctest::Approx(0.5).epsilon(1e-12));

    Rng seeds(127);
    for (int i = 0; i < 15; ++i) {
        DensityMatrix sep = random_separable(SubsystemShape({2, 2, 2}), 1 + i % 4, seeds.next());
        Rng vr(seeds.next());
        MeasurementBasis basis;
        for (int k = 0; k < 3; ++k) {
            auto v1 = local_state({vr.cgauss(), vr.cgauss()});
            auto v2 = local_state({vr.cgauss(), vr.cgauss()});
            basis.vectors.push_back({v1.amplitudes(), v2.amplitudes()});
        }
        CHECK(evaluate_E(sep, basis) <= 1e-9);
    }
}

TEST_CASE("Hillery-Zubairy bipartite criteria") {
    DensityMatrix psi_plus = white_noise_mix(bell_psi_plus(), 1.0);
    EvaluationResult corr = hillery_zubairy(psi_plus, lower01, lower01, HzMode::Correlated);
    CHECK(corr.lhs == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(corr.rhs == doctest::Approx(0.0));
    CHECK(corr.detected);

    DensityMatrix phi_plus = white_noise_mix(bell_phi_plus(), 1.0);
    EvaluationResult prod = hillery_zubairy(phi_plus, lower01, lower01, HzMode::Product);
    CHECK(prod.lhs == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(prod.rhs == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_FALSE(prod.detected);

    Rng seeds(131);
    for (int i = 0; i < 15; ++i) {
        DensityMatrix sep = random_separable(SubsystemShape({2, 2}), 1, seeds.next());
        Rng vr(seeds.next());
        ComplexMatrix a(2, 2), b(2, 2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                a(r, c) = vr.cgauss();
                b(r, c) = vr.cgauss();
            }
        CHECK(hillery_zubairy(sep, a, b, HzMode::Correlated).margin <= 1e-9);
        CHECK(hillery_zubairy(sep, a, b, HzMode::Product).margin <= 1e-9);
    }
}

TEST_CASE("Hillery-Zubairy bipartition criterion") {
    DensityMatrix ghz3 = white_noise_mix(ghz(3), 1.0);
    std::vector<ComplexMatrix> ops = {lower01, lower01, lower01};
    EvaluationResult r = hz_bipartition(ghz3, ops, 1);
    CHECK(r.lhs == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(0.0));
    CHECK(r.detected);

    // product state: valid for every split
    DensityMatrix prod = random_separable(SubsystemShape({2, 2, 2}), 1, 7);
    for (int j = 1; j < 3; ++j) CHECK(hz_bipartition(prod, ops, j).margin <= 1e-9);

    // |0> (x) Bell is biseparable for the 1|23 split
    PureState zero_bell = product_state({basis_state(SubsystemShape({2}), 0), bell_phi_plus()});
    DensityMatrix zb = white_noise_mix(zero_bell, 1.0);
    CHECK(hz_bipartition(zb, ops, 1).margin <= 1e-9);

    CHECK_THROWS_AS(hz_bipartition(ghz3, ops, 0), invariant_error);
    CHECK_THROWS_AS(hz_bipartition(ghz3, ops, 3), invariant_error);
}

TEST_CASE("Hillery et al. multipartite criteria") {
    DensityMatrix ghz3 = white_noise_mix(ghz(3), 1.0);
    std::vector<ComplexMatrix> ops = {lower01, lower01, lower01};
    EvaluationResult geom = hillery_multi(ghz3, ops, HilleryVariant::Geometric);
    CHECK(geom.lhs == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(geom.rhs == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_FALSE(geom.detected);

    Rng seeds(137);
    for (int i = 0; i < 10; ++i) {
        DensityMatrix sep = random_separable(SubsystemShape({2, 2, 2}), 1 + i % 4, seeds.next());
        Rng vr(seeds.next());
        std::vector<ComplexMatrix> random;
        for (int k = 0; k < 3; ++k) {
            ComplexMatrix a(2, 2);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) a(r, c) = vr.cgauss();
            random.push_back(std::move(a));
        }
        CHECK(hillery_multi(sep, random, HilleryVariant::Geometric).margin <= 1e-9);
        CHECK(hillery_multi(sep, random, HilleryVariant::Arithmetic).margin <= 1e-9);
    }

    // never detects the rho_abc family with the flip operators
    for (double t : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        DensityMatrix rho = rho_abc(t, t, t);
        std::vector<ComplexMatrix> flips = {raise10, raise10, raise10};
        CHECK(hillery_multi(rho, flips, HilleryVariant::Geometric).margin <= 1e-9);
    }
}

TEST_CASE("Shchukin-Vogel moment criterion on a truncated Fock space") {
    // two-mode single-photon (|01> + |10>)/sqrt(2) at cutoff 3
    std::vector<cplx> amps(9, cplx(0));
    amps[1] = 1 / std::sqrt(2.0);
    amps[3] = 1 / std::sqrt(2.0);
    DensityMatrix psi = white_noise_mix(PureState(amps, SubsystemShape({3, 3})), 1.0);

    FockPowers hz;  // A2 = a, B1 = b^dag: reduces to |<a b^dag>|^2 <= <a^dag a b^dag b>
    hz.q = 1;
    hz.s = 1;
    EvaluationResult r = shchukin_vogel(psi, hz);
    CHECK(r.lhs == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(0.0));
    CHECK(r.detected);

    // vacuum: any powers hold
    std::vector<cplx> vac(9, cplx(0));
    vac[0] = 1;
    DensityMatrix vacuum = white_noise_mix(PureState(vac, SubsystemShape({3, 3})), 1.0);
    FockPowers some{1, 0, 0, 1, 1, 0, 0, 1};
    CHECK(shchukin_vogel(vacuum, some).margin <= 1e-9);

    // all powers zero: identity on both sides
    FockPowers zero;
    EvaluationResult triv = shchukin_vogel(vacuum, zero);
    CHECK(triv.lhs == doctest::Approx(1.0));
    CHECK(triv.rhs == doctest::Approx(1.0));
    CHECK(std::abs(triv.margin) < 1e-12);

    // support too close to the cutoff
    DensityMatrix bell = white_noise_mix(bell_phi_plus(), 1.0);
    CHECK_THROWS_AS(shchukin_vogel(bell, hz), invariant_error);

    // annihilation matrix structure
    ComplexMatrix a = annihilation_op(4);
    CHECK(a(0, 1).real() == doctest::Approx(1.0));
    CHECK(a(2, 3).real() == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("entry criteria") {
    DensityMatrix ghz3 = white_noise_mix(ghz(3), 1.0);
    auto [off, terms] = entry_pattern("guehne1");
    EvaluationResult r = entry_criterion(ghz3, off.first, off.second, terms);
    CHECK(r.lhs == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(0.0));
    CHECK(r.detected);

    // the woelk-abc pattern detects the abc > 1 side of the family
    DensityMatrix above = rho_abc(2, 2, 2);
    auto [off_w, terms_w] = entry_pattern("woelk-abc");
    double n = 2 + 6 + 1.5;
    EvaluationResult rw = entry_criterion(above, off_w.first, off_w.second, terms_w);
    CHECK(rw.lhs == doctest::Approx(1.0 / n).epsilon(1e-12));
    CHECK(rw.rhs == doctest::Approx(std::pow(1.0 / 8, 0.25) / n).epsilon(1e-12));
    CHECK(rw.detected);
    CHECK_FALSE(entry_criterion(rho_abc(0.5, 0.5, 0.5), off_w.first, off_w.second, terms_w).detected);

    // guehne-abc rhs is the weighted geometric mean of woelk-abc and guehne3
    Rng seeds(139);
    for (int i = 0; i < 30; ++i) {
        DensityMatrix rho(random_density(8, 2 + i % 7, seeds.next()).matrix(),
                          SubsystemShape({2, 2, 2}));
        auto [o1, t1] = entry_pattern("guehne-abc");
        auto [o2, t2] = entry_pattern("guehne3");
        double r_abc = entry_criterion(rho, o1.first, o1.second, t1).rhs;
        double r_w = entry_criterion(rho, off_w.first, off_w.second, terms_w).rhs;
        double r_3 = entry_criterion(rho, o2.first, o2.second, t2).rhs;
        CHECK(r_abc == doctest::Approx(std::pow(r_w, 2.0 / 3) * std::pow(r_3, 1.0 / 3))
                           .epsilon(1e-9));
    }

    // fully separable states obey the seefinck pattern
    auto [off_s, terms_s] = entry_pattern("seefinck-sep");
    Rng sep_seeds(141);
    for (int i = 0; i < 20; ++i) {
        DensityMatrix sep = random_separable(SubsystemShape({2, 2, 2}), 1 + i % 5, sep_seeds.next());
        CHECK(entry_criterion(sep, off_s.first, off_s.second, terms_s).margin <= 1e-9);
    }

    CHECK_THROWS_AS(entry_criterion(ghz3, 0, 7, {{1, Rational(1, 2)}}), invariant_error);
    CHECK_THROWS_AS(entry_pattern("bogus"), usage_error);
}

TEST_CASE("biseparable three-qubit sum") {
    DensityMatrix ghz3 = white_noise_mix(ghz(3), 1.0);
    EvaluationResult r = biseparable_sum(ghz3);
    CHECK(r.lhs == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(0.0));
    CHECK(r.detected);

    DensityMatrix w3 = white_noise_mix(w_state(3), 1.0);
    EvaluationResult rw = biseparable_sum(w3);
    CHECK(rw.lhs == doctest::Approx(0.0));
    CHECK_FALSE(rw.detected);

    // random biseparable mixtures across all three partition classes
    Rng seeds(149);
    SubsystemShape q3({2, 2, 2});
    for (int i = 0; i < 30; ++i) {
        Rng rng(seeds.next());
        int terms = rng.uniform_int(1, 5);
        std::vector<std::pair<double, PureState>> mixture;
        for (int t = 0; t < terms; ++t) {
            int cls = rng.uniform_int(0, 2);
            PureState single = random_pure(SubsystemShape({2}), rng.next());
            PureState pair = random_pure(SubsystemShape({2, 2}), rng.next());
            std::vector<cplx> amps(8, cplx(0));
            for (int s = 0; s < 2; ++s)
                for (int p1 = 0; p1 < 2; ++p1)
                    for (int p2 = 0; p2 < 2; ++p2) {
                        cplx v = single.amplitudes()[std::size_t(s)] *
                                 pair.amplitudes()[std::size_t(p1 * 2 + p2)];
                        int idx = cls == 0   ? (s << 2) | (p1 << 1) | p2    // A | BC
                                  : cls == 1 ? (p1 << 2) | (s << 1) | p2   // B | AC
                                             : (p1 << 2) | (p2 << 1) | s;  // C | AB
                        amps[std::size_t(idx)] += v;
                    }
            mixture.emplace_back(rng.exponential(), PureState(amps, q3));
        }
        DensityMatrix bisep = mix_pure(mixture, q3);
        CHECK(biseparable_sum(bisep).margin <= 1e-9);
    }

    CHECK_THROWS_AS(biseparable_sum(white_noise_mix(bell_phi_plus(), 1.0)), invariant_error);
}

TEST_CASE("genuine multipartite entanglement criterion") {
    DensityMatrix ghz3 = white_noise_mix(ghz(3), 1.0);
    double r = 1 / std::sqrt(2.0);
    ComplexMatrix x(2, 2), y(2, 2);  // X = |0><+|, Y = |+><1|
    x(0, 0) = r;
    x(0, 1) = r;
    y(0, 1) = r;
    y(1, 1) = r;
    std::vector<ComplexMatrix> xs = {x, x, x}, ys = {y, y, y};
    std::vector<std::vector<int>> splits = {{0}, {1}, {2}};
    EvaluationResult res = gme_criterion(ghz3, xs, ys, splits);
    CHECK(res.lhs == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.rhs == doctest::Approx(0.0));
    CHECK(res.detected);

    PureState zero_bell = product_state({basis_state(SubsystemShape({2}), 0), bell_phi_plus()});
    DensityMatrix zb = white_noise_mix(zero_bell, 1.0);
    CHECK(gme_criterion(zb, xs, ys, splits).margin <= 1e-9);

    // one split reproduces the two-operator bound (squared) exactly
    Rng rng(151);
    DensityMatrix rho(random_density(4, 3, rng.next()).matrix(), SubsystemShape({2, 2}));
    LocalOperatorSet pair_ops = random_ops(rho.shape(), rng);
    std::vector<ComplexMatrix> x2 = {pair_ops.pairs[0].p, pair_ops.pairs[1].p};
    std::vector<ComplexMatrix> y2 = {pair_ops.pairs[0].q, pair_ops.pairs[1].q};
    EvaluationResult gme2 = gme_criterion(rho, x2, y2, {{0}});
    EvaluationResult c2 = evaluate_spec(builtin_spec("cauchy2"), pair_ops, rho);
    CHECK(gme2.lhs * gme2.lhs == doctest::Approx(c2.lhs).epsilon(1e-12));
    CHECK(gme2.rhs * gme2.rhs == doctest::Approx(c2.rhs).epsilon(1e-12));

    CHECK_THROWS_AS(gme_criterion(ghz3, xs, ys, {}), invariant_error);
    CHECK_THROWS_AS(gme_criterion(ghz3, xs, ys, {{0, 1, 2}}), invariant_error);
}

TEST_CASE("two-copy permutation form matches the rank-one bound") {
    Rng seeds(157);
    for (const std::vector<int>& dims : {std::vector<int>{2, 2}, {2, 3}}) {
        SubsystemShape shape(dims);
        for (int i = 0; i < 12; ++i) {
            DensityMatrix rho(random_density(shape.dim(), 1 + i % shape.dim(), seeds.next()).matrix(),
                              shape);
            Rng vr(seeds.next());
            auto rand_local = [&](int d) {
                std::vector<cplx> v;
                for (int k = 0; k < d; ++k) v.push_back(vr.cgauss());
                return local_state(std::move(v));
            };
            PureState a = rand_local(dims[0]), alpha = rand_local(dims[0]);
            PureState b = rand_local(dims[1]), beta = rand_local(dims[1]);
            auto [lhs, rhs] = permutation_m2(rho, a, alpha, b, beta);
            EvaluationResult direct = evaluate_rank_one(rho, a, alpha, b, beta);
            CHECK(std::abs(lhs - direct.lhs) < 1e-10);
            CHECK(std::abs(rhs - direct.rhs) < 1e-10);

            // a = alpha, b = beta makes the permutation a fixed point
            auto [l2, r2] = permutation_m2(rho, a, a, b, b);
            CHECK(std::abs(l2 - r2) < 1e-12);
        }
    }
    DensityMatrix prod = random_separable(SubsystemShape({2, 2}), 1, 31);
    PureState z = local_state({1, 0}), o = local_state({0, 1});
    auto [lp, rp] = permutation_m2(prod, z, o, z, o);
    CHECK(lp <= rp + 1e-10);
}

TEST_CASE("determinant extension") {
    DensityMatrix psi_plus = white_noise_mix(bell_psi_plus(), 1.0);
    std::vector<std::vector<cplx>> comp = {{1, 0}, {0, 1}};
    double det = determinant_extension(psi_plus, comp, comp);
    CHECK(det == doctest::Approx(-0.25).epsilon(1e-12));

    DensityMatrix mixed = white_noise_mix(bell_phi_plus(), 0.0);  // identity / 4
    CHECK(determinant_extension(mixed, comp, comp) == doctest::Approx(1.0 / 16).epsilon(1e-12));

    // diagonal separable states keep the determinant nonnegative
    Rng rng(163);
    for (int i = 0; i < 10; ++i) {
        double p0 = rng.uniform(), p1 = rng.uniform(), p2 = rng.uniform(), p3 = rng.uniform();
        double z = p0 + p1 + p2 + p3;
        ComplexMatrix diag(4, 4);
        diag(0, 0) = p0 / z;
        diag(1, 1) = p1 / z;
        diag(2, 2) = p2 / z;
        diag(3, 3) = p3 / z;
        DensityMatrix rho(diag, SubsystemShape({2, 2}));
        CHECK(determinant_extension(rho, comp, comp) >= -1e-12);
    }

    std::vector<std::vector<cplx>> skewed = {{1, 0}, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}};
    CHECK_THROWS_AS(determinant_extension(psi_plus, skewed, comp), invariant_error);
}
