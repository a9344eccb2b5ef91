#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "qsep/eig.hpp"
#include "qsep/rng.hpp"
#include "qsep/states.hpp"
#include "qsep/witness.hpp"

using namespace qsep;

namespace {

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double m = 0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

}  // namespace

TEST_CASE("product_state") {
    SubsystemShape qubit({2});
    PureState zero = basis_state(qubit, 0);
    PureState one = basis_state(qubit, 1);

    PureState zz = product_state({zero, zero});
    CHECK(zz.amplitudes()[0] == cplx(1));
    CHECK(zz.shape().parties() == 2);

    double r = 1 / std::sqrt(2.0);
    PureState plus({r, r}, qubit);
    PureState mixed = product_state({plus, one});  // (|01> + |11>)/sqrt(2)
    CHECK(std::abs(mixed.amplitudes()[1] - r) < 1e-15);
    CHECK(std::abs(mixed.amplitudes()[3] - r) < 1e-15);
    CHECK(std::abs(mixed.amplitudes()[0]) == 0.0);

    PureState zzz = product_state({zero, zero, zero});
    CHECK(zzz.dim() == 8);
    CHECK(zzz.amplitudes()[0] == cplx(1));
}

TEST_CASE("schmidt_pure") {
    PureState prod = schmidt_pure(SchmidtVector({1.0}), 2);
    CHECK(prod.amplitudes()[0] == cplx(1));

    double r = 1 / std::sqrt(2.0);
    PureState bell = schmidt_pure(SchmidtVector({r, r}), 2);
    CHECK(std::abs(bell.amplitudes()[0] - r) < 1e-15);
    CHECK(std::abs(bell.amplitudes()[3] - r) < 1e-15);

    PureState skew = schmidt_pure(SchmidtVector({std::sqrt(0.8), std::sqrt(0.2)}), 3);
    ComplexMatrix reduced = partial_trace(skew.projector(), skew.shape(), {0});
    CHECK(reduced(0, 0).real() == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(reduced(1, 1).real() == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(std::abs(reduced(2, 2)) < 1e-15);
}

TEST_CASE("white_noise_mix") {
    PureState bell = bell_phi_plus();
    DensityMatrix maximally_mixed = white_noise_mix(bell, 0.0);
    CHECK(max_abs_diff(maximally_mixed.matrix(), cplx(0.25) * ComplexMatrix::identity(4)) < 1e-15);

    DensityMatrix pure = white_noise_mix(bell, 1.0);
    CHECK(max_abs_diff(pure.matrix(), bell.projector()) < 1e-15);

    DensityMatrix half = white_noise_mix(bell, 0.5);
    double min_eig = min_eigenvalue(partial_transpose(half.matrix(), half.shape(), 0));
    CHECK(min_eig == doctest::Approx(-0.125).epsilon(1e-12));

    CHECK_THROWS_AS(white_noise_mix(bell, 1.5), invariant_error);
}

TEST_CASE("rho_abc values and PPT across bipartitions") {
    // at a = b = c = 1 the normalizer 2 + a+b+c + 1/a+1/b+1/c equals the
    // diagonal sum 8, so every nonzero entry is 1/8
    DensityMatrix uniform = rho_abc(1, 1, 1);
    CHECK(uniform.matrix()(0, 0).real() == doctest::Approx(1.0 / 8));
    CHECK(uniform.matrix()(0, 7).real() == doctest::Approx(1.0 / 8));

    Rng rng(7);
    for (int trial = 0; trial < 8; ++trial) {
        double a = std::exp(rng.uniform(-1.2, 1.2));
        double b = std::exp(rng.uniform(-1.2, 1.2));
        double c = std::exp(rng.uniform(-1.2, 1.2));
        DensityMatrix rho = rho_abc(a, b, c);
        CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-14);
        for (int party = 0; party < 3; ++party) {
            double min_eig = min_eigenvalue(partial_transpose(rho.matrix(), rho.shape(), party));
            CHECK(min_eig >= -1e-10);
        }
    }
    DensityMatrix skewed = rho_abc(2, 0.5, 1);
    for (int party = 0; party < 3; ++party)
        CHECK(min_eigenvalue(partial_transpose(skewed.matrix(), skewed.shape(), party)) >= -1e-10);

    CHECK_THROWS_AS(rho_abc(0, 1, 1), invariant_error);
    CHECK_THROWS_AS(rho_abc(1, -2, 1), invariant_error);
}

TEST_CASE("rho_alpha values, validity and PPT") {
    DensityMatrix rho2 = rho_alpha(2.0);
    CHECK(rho2.matrix()(0, 0).real() == doctest::Approx(0.25));
    CHECK(rho2.matrix()(0, 7).real() == doctest::Approx(1.0 / 12));
    CHECK(rho2.matrix()(2, 5).real() == doctest::Approx(-1.0 / 12));

    for (double alpha : {2.0, 2.4, 2.83, 4.0}) {
        DensityMatrix rho = rho_alpha(alpha);
        CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-14);
        CHECK(min_eigenvalue(rho.matrix()) >= -1e-12);
        for (int party = 0; party < 3; ++party)
            CHECK(min_eigenvalue(partial_transpose(rho.matrix(), rho.shape(), party)) >= -1e-10);
    }
    CHECK_THROWS_AS(rho_alpha(1.99), invariant_error);
}

TEST_CASE("ghz and w") {
    PureState bell = ghz(2);
    CHECK(max_abs_diff(bell.projector(), bell_phi_plus().projector()) < 1e-15);

    PureState g3 = ghz(3);
    double r = 1 / std::sqrt(2.0);
    CHECK(std::abs(g3.amplitudes()[0] - r) < 1e-15);
    CHECK(std::abs(g3.amplitudes()[7] - r) < 1e-15);
    CHECK(g3.projector()(0, 7).real() == doctest::Approx(0.5));

    PureState w3 = w_state(3);
    double w = 1 / std::sqrt(3.0);
    for (int idx : {1, 2, 4}) CHECK(std::abs(w3.amplitudes()[std::size_t(idx)] - w) < 1e-15);
    CHECK(std::abs(w3.amplitudes()[7]) == 0.0);
}

TEST_CASE("werner partial transpose eigenvalue") {
    for (double p : {0.1, 0.3, 0.5, 0.9}) {
        DensityMatrix rho = werner(p);
        double min_eig = min_eigenvalue(partial_transpose(rho.matrix(), rho.shape(), 0));
        CHECK(min_eig == doctest::Approx((1 - 3 * p) / 4).epsilon(1e-10));
    }
}

TEST_CASE("random constructors: determinism and invariants") {
    SubsystemShape qq({2, 2});
    PureState p1 = random_pure(qq, 123);
    PureState p2 = random_pure(qq, 123);
    CHECK(std::memcmp(p1.amplitudes().data(), p2.amplitudes().data(),
                      p1.amplitudes().size() * sizeof(cplx)) == 0);
    PureState p3 = random_pure(qq, 124);
    CHECK(std::memcmp(p1.amplitudes().data(), p3.amplitudes().data(),
                      p1.amplitudes().size() * sizeof(cplx)) != 0);

    DensityMatrix d1 = random_density(4, 4, 1);
    CHECK(std::abs(d1.matrix().trace().real() - 1.0) < 1e-12);
    CHECK(min_eigenvalue(d1.matrix()) >= -1e-12);

    DensityMatrix d2 = random_density(4, 2, 9);
    HermitianEigenSystem es = hermitian_eig(d2.matrix());
    int nonzero = 0;
    for (double lam : es.eigenvalues)
        if (lam > 1e-10) ++nonzero;
    CHECK(nonzero == 2);

    for (std::uint64_t seed : {7ull, 8ull, 9ull}) {
        DensityMatrix sep = random_separable(qq, 10, seed);
        CHECK(min_eigenvalue(partial_transpose(sep.matrix(), sep.shape(), 0)) >= -1e-10);
    }
    DensityMatrix s1 = random_separable(qq, 5, 42);
    DensityMatrix s2 = random_separable(qq, 5, 42);
    CHECK(std::memcmp(s1.matrix().entries().data(), s2.matrix().entries().data(),
                      s1.matrix().entries().size() * sizeof(cplx)) == 0);

    CHECK_THROWS_AS(random_density(4, 5, 0), invariant_error);
    CHECK_THROWS_AS(random_separable(qq, 0, 0), invariant_error);
}

TEST_CASE("white-noise partial-transpose spectrum matches the closed form") {
    for (int d : {2, 3, 4}) {
        for (int trial = 0; trial < 6; ++trial) {
            SchmidtVector s = random_schmidt(d, derive_seed(55, std::uint64_t(d * 10 + trial)));
            for (double p : {0.15, 0.5, 0.85}) {
                DensityMatrix rho = white_noise_mix(schmidt_pure(s, d), p);
                HermitianEigenSystem es =
                    hermitian_eig(partial_transpose(rho.matrix(), rho.shape(), 0));
                std::vector<double> predicted = white_noise_pt_spectrum(s, d, p);
                REQUIRE(predicted.size() == es.eigenvalues.size());
                for (std::size_t j = 0; j < predicted.size(); ++j)
                    CHECK(std::abs(predicted[j] - es.eigenvalues[j]) < 1e-10);
            }
        }
    }
}

TEST_CASE("schmidt_decompose reconstructs and is orthonormal") {
    Rng seeds(77);
    for (const std::vector<int>& dims : {std::vector<int>{2, 2}, {2, 3}, {3, 3}}) {
        SubsystemShape shape(dims);
        for (int trial = 0; trial < 6; ++trial) {
            PureState psi = random_pure(shape, seeds.next());
            SchmidtDecomposition sd = schmidt_decompose(psi);
            const int da = dims[0], db = dims[1];

            for (std::size_t k = 1; k < sd.coefficients.size(); ++k)
                CHECK(sd.coefficients[k] <= sd.coefficients[k - 1] + 1e-12);

            std::vector<cplx> rebuilt(std::size_t(da * db), cplx(0));
            for (std::size_t k = 0; k < sd.coefficients.size(); ++k)
                for (int i = 0; i < da; ++i)
                    for (int j = 0; j < db; ++j)
                        rebuilt[std::size_t(i * db + j)] += sd.coefficients[k] *
                                                            sd.basis_a[k][std::size_t(i)] *
                                                            sd.basis_b[k][std::size_t(j)];
            for (int i = 0; i < da * db; ++i)
                CHECK(std::abs(rebuilt[std::size_t(i)] - psi.amplitudes()[std::size_t(i)]) < 1e-10);

            auto check_orthonormal = [](const std::vector<std::vector<cplx>>& basis) {
                for (std::size_t u = 0; u < basis.size(); ++u)
                    for (std::size_t v = 0; v < basis.size(); ++v) {
                        cplx g = 0;
                        for (std::size_t i = 0; i < basis[u].size(); ++i)
                            g += std::conj(basis[u][i]) * basis[v][i];
                        CHECK(std::abs(g - (u == v ? cplx(1) : cplx(0))) < 1e-10);
                    }
            };
            check_orthonormal(sd.basis_a);
            check_orthonormal(sd.basis_b);
        }
    }
}

TEST_CASE("reorder_parties and merge_bipartition") {
    Rng rng(91);
    DensityMatrix rho = random_separable(SubsystemShape({2, 3, 2}), 4, rng.next());
    DensityMatrix swapped = reorder_parties(rho, {1, 0, 2});
    CHECK(swapped.shape().local_dim(0) == 3);

    // expectation of B (x) A (x) C on the reordered state matches A (x) B (x) C
    ComplexMatrix a(2, 2), b(3, 3), c(2, 2);
    Rng g(5);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            a(i, j) = g.cgauss();
            c(i, j) = g.cgauss();
        }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b(i, j) = g.cgauss();
    cplx before = expectation(rho.matrix(), kron({a, b, c}));
    cplx after = expectation(swapped.matrix(), kron({b, a, c}));
    CHECK(std::abs(before - after) < 1e-12);

    DensityMatrix merged = merge_bipartition(rho, {1});
    CHECK(merged.shape().parties() == 2);
    CHECK(merged.shape().local_dim(0) == 3);
    CHECK(merged.shape().local_dim(1) == 4);
    cplx merged_val = expectation(merged.matrix(), kron(b, kron(a, c)));
    CHECK(std::abs(before - merged_val) < 1e-12);

    CHECK_THROWS_AS(merge_bipartition(rho, {0, 1, 2}), invariant_error);
    CHECK_THROWS_AS(merge_bipartition(rho, {}), invariant_error);
}

TEST_CASE("density matrix invariants are enforced") {
    ComplexMatrix bad(2, 2);
    bad(0, 0) = 0.6;
    bad(1, 1) = 0.6;
    CHECK_THROWS_AS(DensityMatrix(bad, SubsystemShape({2})), invariant_error);  // trace 1.2

    ComplexMatrix non_psd(2, 2);
    non_psd(0, 0) = 1.5;
    non_psd(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix(non_psd, SubsystemShape({2})), invariant_error);

    ComplexMatrix non_herm(2, 2);
    non_herm(0, 0) = 0.5;
    non_herm(1, 1) = 0.5;
    non_herm(0, 1) = 0.3;
    CHECK_THROWS_AS(DensityMatrix(non_herm, SubsystemShape({2})), invariant_error);

    CHECK_THROWS_AS(PureState({1.0, 0.1}, SubsystemShape({2})), invariant_error);
    CHECK_THROWS_AS(SchmidtVector({0.5, 0.5}), invariant_error);           // not unit
    CHECK_THROWS_AS(SchmidtVector({0.2, std::sqrt(0.96)}), invariant_error);  // ascending
}
