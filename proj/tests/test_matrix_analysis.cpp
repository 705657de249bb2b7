/// @file test_matrix_analysis.cpp
/// @brief Spectra, stability predicates, and diagonal Lyapunov certificates.

#include <cmath>

#include "catch_amalgamated.hpp"
#include "lvig/matrix_analysis.hpp"
#include "support/oracles.hpp"
#include "support/random_systems.hpp"

using lvig::Community;
using lvig::Matrix;
using lvig::Vector;

TEST_CASE("principal submatrix extraction") {
    const Matrix A = oracle::flagship_A();
    const Matrix S = lvig::principal_submatrix(A, Community::of({0, 2}));
    REQUIRE(S.rows() == 2);
    CHECK(S(0, 0) == A(0, 0));
    CHECK(S(0, 1) == A(0, 2));
    CHECK(S(1, 0) == A(2, 0));
    CHECK(S(1, 1) == A(2, 2));
    CHECK_THROWS_AS(lvig::principal_submatrix(A, Community::empty()),
                    lvig::InvalidCommunity);
    CHECK_THROWS_AS(lvig::principal_submatrix(A, Community::of({3})),
                    lvig::InvalidCommunity);
}

TEST_CASE("spectrum is sorted by real part, then imaginary part") {
    const auto eig = lvig::spectrum(oracle::stable_not_dstable());
    REQUIRE(eig.size() == 2);
    CHECK(eig[0].real() == Catch::Approx(-0.5).margin(1e-12));
    CHECK(eig[0].imag() ==
          Catch::Approx(std::sqrt(3.0) / 2.0).margin(1e-12));
    CHECK(eig[1].imag() ==
          Catch::Approx(-std::sqrt(3.0) / 2.0).margin(1e-12));
    CHECK(eig[0].imag() >= eig[1].imag());
}

TEST_CASE("stability predicate and spectral radius") {
    CHECK(lvig::is_stable(oracle::stable_not_dstable()));
    Matrix rot(2, 2);
    rot << 0, 1, -1, 0;
    CHECK_FALSE(lvig::is_stable(rot));  // purely imaginary pair
    Matrix M(2, 2);
    M << 0.0, 0.5, 0.5, 0.0;
    CHECK(lvig::spectral_radius(M) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("quasidominance weights on the flagship matrix") {
    const auto w = lvig::quasidominance_weights(oracle::flagship_A());
    REQUIRE(w.has_value());
    const Vector expected = oracle::flagship_pi();
    for (int i = 0; i < 3; ++i)
        CHECK((*w)[i] == Catch::Approx(expected[i]).margin(1e-12));
}

TEST_CASE("quasidominance follows the comparison-matrix criterion") {
    // Strong asymmetric damping: the comparison matrix is still an M-matrix,
    // so weights exist even though the matrix looks lopsided.
    Matrix A(2, 2);
    A << -1.0, 50.0, 0.0, -1.0;
    const auto w = lvig::quasidominance_weights(A);
    REQUIRE(w.has_value());
    CHECK((*w)[0] == Catch::Approx(51.0).margin(1e-9));
    CHECK((*w)[1] == Catch::Approx(1.0).margin(1e-9));

    // Comparison matrix with a negative determinant: no weights.
    CHECK_FALSE(lvig::quasidominance_weights(oracle::dstable_not_vl()));
}

TEST_CASE("weighted symmetrized eigenvalue bound") {
    const double lam = lvig::weighted_symmetric_lambda_max(
        oracle::flagship_A(), oracle::flagship_pi());
    CHECK(lam == Catch::Approx(oracle::kFlagshipLambdaMax).margin(1e-10));
}

TEST_CASE("certification: quasidominant matrices certify at stage one") {
    const auto cert = lvig::certify_vl_stability(oracle::flagship_A());
    CHECK(cert.verdict == lvig::VLVerdict::CertifiedVL);
    CHECK(cert.method == lvig::VLMethod::Quasidominance);
    REQUIRE(cert.h.has_value());
    CHECK(cert.h->size() == 3);
    REQUIRE(cert.lambda_max.has_value());
    CHECK(*cert.lambda_max < 0.0);
    CHECK(cert.certified_vl());
}

TEST_CASE("certification: identity-like damping certifies") {
    const auto cert = lvig::certify_vl_stability(-Matrix::Identity(4, 4));
    CHECK(cert.verdict == lvig::VLVerdict::CertifiedVL);
}

TEST_CASE("certification: spectral instability is refuted") {
    Matrix rot(2, 2);
    rot << 0, 1, -1, 0;
    const auto cert = lvig::certify_vl_stability(rot);
    CHECK(cert.verdict == lvig::VLVerdict::CertifiedNotStable);
    CHECK_FALSE(cert.certified_vl());
}

TEST_CASE("certification: stable matrix without a diagonal certificate") {
    // D-stable yet no positive diagonal H makes HA + A^T H negative definite;
    // the search must end Unknown, never a false certificate.
    const auto cert = lvig::certify_vl_stability(oracle::dstable_not_vl());
    CHECK(cert.verdict == lvig::VLVerdict::Unknown);
    CHECK_FALSE(cert.certified_vl());
}

TEST_CASE("certification: search rescues a failed quasidominance witness") {
    // Quasidominance weights exist (pi = (1, 3.75, 1.375)) but do not witness
    // VL-stability: diag(pi)A + A^T diag(pi) is indefinite. The search stage
    // must still find a certificate (H = diag(1, 1, 10) is one).
    Matrix A(3, 3);
    A << -1.0, 0.0, 0.0,
          0.0, -1.0, -2.0,
          0.0, -0.1, -1.0;
    const auto pi = lvig::quasidominance_weights(A);
    REQUIRE(pi.has_value());
    CHECK(lvig::weighted_symmetric_lambda_max(A, *pi) > 0.0);
    const auto cert = lvig::certify_vl_stability(A);
    REQUIRE(cert.verdict == lvig::VLVerdict::CertifiedVL);
    CHECK(cert.method == lvig::VLMethod::ConvexSearch);
    REQUIRE(cert.h.has_value());
    CHECK(lvig::weighted_symmetric_lambda_max(A, *cert.h) < 0.0);
}

TEST_CASE("d-stability falsifier finds the classic scaling witness") {
    const auto witness =
        lvig::d_stability_falsifier(oracle::stable_not_dstable(), 1000, 99);
    REQUIRE(witness.has_value());
    const Matrix scaled = (*witness) * oracle::stable_not_dstable();
    CHECK_FALSE(lvig::is_stable(scaled));
}

TEST_CASE("d-stability falsifier accepts genuinely D-stable matrices") {
    CHECK_FALSE(lvig::d_stability_falsifier(-Matrix::Identity(3, 3), 300, 7));
}

TEST_CASE("random quasidominant matrices always certify at stage one") {
    for (int trial = 0; trial < 100; ++trial) {
        lvig::Rng rng = lvig::Rng::substream(555, 1, trial);
        const int n = 2 + static_cast<int>(rng.uniform01() * 5);  // 2..6
        const Matrix A = testgen::quasidominant_matrix(rng, n);
        const auto cert = lvig::certify_vl_stability(A);
        REQUIRE(cert.verdict == lvig::VLVerdict::CertifiedVL);
        CHECK(cert.method == lvig::VLMethod::Quasidominance);
    }
}
