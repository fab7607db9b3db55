#include "matmart/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "matmart/errors.hpp"
#include "matmart/rng.hpp"

using namespace matmart;

namespace {

// Reference reconstruction error max|Q L Q^T - A|.
double reconstruction_error(const SymMatrix& a, const EigenDecomposition& eig) {
    const int d = a.dim();
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k)
                s += eig.eigenvectors(i, k) * eig.eigenvalues[k] * eig.eigenvectors(j, k);
            worst = std::max(worst, std::abs(s - a(i, j)));
        }
    }
    return worst;
}

double orthogonality_error(const EigenDecomposition& eig) {
    const int d = eig.eigenvectors.rows();
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += eig.eigenvectors(k, i) * eig.eigenvectors(k, j);
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

SymMatrix random_entries_symmetric(Rng& rng, int dim, double bound) {
    std::vector<double> e(static_cast<size_t>(dim) * dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            const double v = rng.next_range(-bound, bound);
            e[static_cast<size_t>(i) * dim + j] = v;
            e[static_cast<size_t>(j) * dim + i] = v;
        }
    return SymMatrix(dim, e);
}

}  // namespace

TEST_CASE("SymMatrix construction symmetrizes and validates") {
    const std::vector<double> slightly_off = {1.0, 2.0 + 4e-9, 2.0, 3.0};
    const SymMatrix m(2, slightly_off);
    CHECK(m(0, 1) == m(1, 0));
    CHECK(m(0, 1) == doctest::Approx(2.0 + 2e-9).epsilon(1e-12));

    const std::vector<double> too_asymmetric = {1.0, 2.1, 2.0, 3.0};
    CHECK_THROWS_AS(SymMatrix(2, too_asymmetric), std::invalid_argument);

    const std::vector<double> with_nan = {0.0, std::nan(""), std::nan(""), 0.0};
    CHECK_THROWS_AS(SymMatrix(2, with_nan), std::invalid_argument);

    CHECK_THROWS_AS(SymMatrix(0), std::invalid_argument);
}

TEST_CASE("eigh on closed-form inputs") {
    SUBCASE("diagonal") {
        const auto eig = eigh(SymMatrix::diagonal({3.0, 1.0, 2.0}));
        REQUIRE(eig.eigenvalues.size() == 3);
        CHECK(eig.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(eig.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(eig.eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-14));
    }
    SUBCASE("zero matrix") {
        const SymMatrix z(4);
        const auto eig = eigh(z);
        for (double v : eig.eigenvalues) CHECK(v == 0.0);
        CHECK(orthogonality_error(eig) <= 1e-10);
        CHECK(reconstruction_error(z, eig) == 0.0);
    }
    SUBCASE("2x2 flip") {
        const auto eig = eigh(SymMatrix{{0.0, 1.0}, {1.0, 0.0}});
        CHECK(eig.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(eig.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("eigh invariants on random matrices") {
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const int d = 1 + rng.next_below(8);
        const SymMatrix a = random_entries_symmetric(rng, d, 1.0);
        const auto eig = eigh(a);
        CHECK(std::is_sorted(eig.eigenvalues.begin(), eig.eigenvalues.end()));
        CHECK(reconstruction_error(a, eig) <= 1e-10 * std::max(1.0, a.max_abs()));
        CHECK(orthogonality_error(eig) <= 1e-10);
    }
}

TEST_CASE("eigh at the top of the supported size range") {
    Rng rng(808);
    const SymMatrix a = random_entries_symmetric(rng, 200, 1.0);
    const auto eig = eigh(a);
    CHECK(reconstruction_error(a, eig) <= 1e-10 * std::max(1.0, a.max_abs()));
    CHECK(orthogonality_error(eig) <= 1e-10);
}

TEST_CASE("matrix_exp closed forms") {
    SUBCASE("exp(0) = I") {
        const SymMatrix e = matrix_exp(SymMatrix(3));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(e(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
    }
    SUBCASE("diagonal spectral mapping") {
        const SymMatrix e = matrix_exp(SymMatrix::diagonal({std::log(2.0), 0.0}));
        CHECK(e(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(e(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(e(0, 1)) <= 1e-14);
    }
    SUBCASE("flip matrix gives cosh/sinh") {
        // eigenvalues +-1: exp = [[cosh 1, sinh 1], [sinh 1, cosh 1]]
        const double cosh1 = 1.5430806348152437;
        const double sinh1 = 1.1752011936438014;
        const SymMatrix e = matrix_exp(SymMatrix{{0.0, 1.0}, {1.0, 0.0}});
        CHECK(e(0, 0) == doctest::Approx(cosh1).epsilon(1e-13));
        CHECK(e(1, 1) == doctest::Approx(cosh1).epsilon(1e-13));
        CHECK(e(0, 1) == doctest::Approx(sinh1).epsilon(1e-13));
    }
}

TEST_CASE("spectral mapping property: eigenvalues of exp(A) are exp of eigenvalues") {
    Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const int d = 1 + rng.next_below(8);
        const SymMatrix a = random_entries_symmetric(rng, d, 1.0);
        const auto before = eigh(a).eigenvalues;
        const auto after = eigh(matrix_exp(a)).eigenvalues;
        for (int k = 0; k < d; ++k) {
            CHECK(after[k] == doctest::Approx(std::exp(before[k])).epsilon(1e-9));
        }
    }
}

TEST_CASE("matrix_log") {
    SUBCASE("log I = 0") {
        const SymMatrix l = matrix_log(SymMatrix::identity(5));
        CHECK(l.max_abs() <= 1e-14);
    }
    SUBCASE("diagonal") {
        const double e1 = std::exp(1.0);
        const SymMatrix l = matrix_log(SymMatrix::diagonal({e1, e1 * e1}));
        CHECK(l(0, 0) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(l(1, 1) == doctest::Approx(2.0).epsilon(1e-13));
    }
    SUBCASE("rejects non-positive-definite input") {
        CHECK_THROWS_AS(matrix_log(SymMatrix::diagonal({1.0, 0.0})), std::domain_error);
        CHECK_THROWS_AS(matrix_log(SymMatrix::diagonal({1.0, -2.0})), std::domain_error);
    }
    SUBCASE("round trip log(exp(A)) = A") {
        Rng rng(11);
        for (int trial = 0; trial < 30; ++trial) {
            const int d = 1 + rng.next_below(6);
            const SymMatrix a = random_entries_symmetric(rng, d, 1.5);  // ||A|| <= 10 easily
            const SymMatrix back = matrix_log(matrix_exp(a));
            const double tol = 1e-8 * std::max(1.0, spectral_norm(a));
            CHECK((back - a).max_abs() <= tol);
        }
    }
    SUBCASE("exp(log(A)) reconstructs A in spectral norm") {
        Rng rng(12);
        for (int trial = 0; trial < 20; ++trial) {
            const int d = 1 + rng.next_below(5);
            const SymMatrix base = random_entries_symmetric(rng, d, 1.0);
            const SymMatrix spd = base.square() + SymMatrix::identity(d);  // strictly PD
            const SymMatrix back = matrix_exp(matrix_log(spd));
            CHECK(spectral_norm(back - spd) <= 1e-9 * spectral_norm(spd));
        }
    }
}

TEST_CASE("lambda_max") {
    CHECK(lambda_max(SymMatrix::diagonal({-5.0, -1.0})) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(lambda_max(SymMatrix{{0.0, 1.0}, {1.0, 0.0}}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lambda_max(SymMatrix(3)) == 0.0);
}

TEST_CASE("spectral_norm") {
    CHECK(spectral_norm(RectMatrix{{-4.0}}) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(spectral_norm(RectMatrix{{2.0, 0.0}, {0.0, -3.0}}) == doctest::Approx(3.0).epsilon(1e-13));
    // column vector (3, 4)^T has Gram matrix [25]
    CHECK(spectral_norm(RectMatrix{{3.0}, {4.0}}) == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("dilation") {
    SUBCASE("1x1 examples") {
        const SymMatrix d1 = dilation(RectMatrix{{1.0}});
        CHECK(d1.dim() == 2);
        CHECK(d1(0, 0) == 0.0);
        CHECK(d1(0, 1) == 1.0);
        CHECK(d1(1, 0) == 1.0);
        CHECK(lambda_max(d1) == doctest::Approx(1.0).epsilon(1e-14));

        const SymMatrix d0 = dilation(RectMatrix{{0.0}});
        CHECK(d0.max_abs() == 0.0);
    }
    SUBCASE("row vector") {
        const SymMatrix d = dilation(RectMatrix{{1.0, 1.0}});
        CHECK(d.dim() == 3);
        CHECK(lambda_max(d) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    }
    SUBCASE("isometry and paired spectrum on random rectangles") {
        Rng rng(99);
        for (int trial = 0; trial < 60; ++trial) {
            const int d1 = 1 + rng.next_below(6);
            const int d2 = 1 + rng.next_below(6);
            RectMatrix b(d1, d2);
            for (int i = 0; i < d1; ++i)
                for (int j = 0; j < d2; ++j) b(i, j) = rng.next_range(-1.0, 1.0);

            const SymMatrix dil = dilation(b);
            const double via_dilation = lambda_max(dil);
            const double via_gram = std::sqrt(std::max(0.0, lambda_max(b.gram())));
            CHECK(std::abs(via_dilation - via_gram) <= 1e-9);

            // Spectrum is symmetric about zero: ev[i] + ev[d-1-i] = 0.
            const auto ev = eigh(dil).eigenvalues;
            const int n = static_cast<int>(ev.size());
            for (int i = 0; i < n / 2; ++i) CHECK(std::abs(ev[i] + ev[n - 1 - i]) <= 1e-9);
        }
    }
}

TEST_CASE("psd_order_leq") {
    const SymMatrix zero2(2);
    const SymMatrix id2 = SymMatrix::identity(2);
    const SymMatrix flip{{0.0, 1.0}, {1.0, 0.0}};

    SUBCASE("examples") {
        const auto c1 = psd_order_leq(zero2, id2, 0.0);
        CHECK(c1.leq);
        CHECK(c1.margin == doctest::Approx(1.0).epsilon(1e-14));

        const auto c2 = psd_order_leq(id2, zero2);
        CHECK_FALSE(c2.leq);
        CHECK(c2.margin == doctest::Approx(-1.0).epsilon(1e-14));

        // I - flip has eigenvalues 0 and 2.
        const auto c3 = psd_order_leq(flip, id2);
        CHECK(c3.leq);
        CHECK(std::abs(c3.margin) <= 1e-12);
    }
    SUBCASE("reflexive and antisymmetric up to tol") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const int d = 1 + rng.next_below(5);
            const SymMatrix a = random_entries_symmetric(rng, d, 2.0);
            const auto self = psd_order_leq(a, a);
            CHECK(self.leq);
            CHECK(self.margin == 0.0);

            const SymMatrix b = random_entries_symmetric(rng, d, 2.0);
            const auto fwd = psd_order_leq(a, b);
            const auto rev = psd_order_leq(b, a);
            if (fwd.leq && rev.leq) {
                // both margins within tolerance of zero => A == B up to tol
                CHECK((a - b).max_abs() <=
                      10 * d * std::max(default_psd_tol(a, b), std::abs(fwd.margin) + std::abs(rev.margin)));
            }
        }
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(psd_order_leq(SymMatrix(2), SymMatrix(3), 0.0), std::invalid_argument);
    }
}

TEST_CASE("trace_exp") {
    CHECK(trace_exp(SymMatrix(4)) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(trace_exp(SymMatrix::diagonal({0.0, std::log(3.0)})) == doctest::Approx(4.0).epsilon(1e-14));
    // eigenvalues +-1 -> e + 1/e
    CHECK(trace_exp(SymMatrix{{0.0, 1.0}, {1.0, 0.0}}) ==
          doctest::Approx(3.0861612696304876).epsilon(1e-13));
    // shifted evaluation keeps widely spread spectra finite
    CHECK(trace_exp(SymMatrix::diagonal({700.0, -700.0})) ==
          doctest::Approx(std::exp(700.0)).epsilon(1e-13));

    SUBCASE("dominates exp(lambda_max)") {
        Rng rng(31);
        for (int trial = 0; trial < 40; ++trial) {
            const int d = 1 + rng.next_below(6);
            const SymMatrix a = random_entries_symmetric(rng, d, 2.0);
            CHECK(trace_exp(a) >= std::exp(lambda_max(a)) * (1.0 - 1e-12));
        }
    }
}
