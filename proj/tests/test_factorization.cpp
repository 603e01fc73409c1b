#include <cmath>
#include <fstream>
#include <limits>

#include "cumfolio/cumulants.hpp"
#include "cumfolio/errors.hpp"
#include "cumfolio/factorization.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cumfolio;

namespace {

SymmetricTensor covariance_tensor(const Matrix& cov) {
    SymmetricTensor t(2, static_cast<int>(cov.rows()));
    for (int i = 0; i < cov.rows(); ++i)
        for (int j = i; j < cov.cols(); ++j) t.set(std::vector<int>{i, j}, cov(i, j));
    return t;
}

/// Family with a prescribed covariance and all higher tensors zero.
CumulantFamily degenerate_family(const Matrix& cov, int n_max) {
    CumulantFamily family;
    family.n_max = n_max;
    family.dim = static_cast<int>(cov.rows());
    family.sample_size = 1;
    family.tensors.push_back(covariance_tensor(cov));
    for (int n = 3; n <= n_max; ++n) family.tensors.emplace_back(n, family.dim);
    return family;
}

}  // namespace

TEST_CASE("method names round-trip") {
    for (Method m : {Method::Evd, Method::Phi4, Method::Phi6, Method::ZeroV})
        CHECK(method_from_name(method_name(m)) == m);
    CHECK(method_name(Method::Phi6) == "PHI6");
    CHECK_THROWS_AS(method_from_name("evd"), Error);
    CHECK_THROWS_AS(method_from_name(""), Error);
}

TEST_CASE("factorial weights") {
    const auto w4 = factorial_weights(4);
    REQUIRE(w4.size() == 3);
    CHECK(w4[0] == 0.5);
    CHECK(w4[1] == doctest::Approx(1.0 / 6.0));
    CHECK(w4[2] == doctest::Approx(1.0 / 24.0));
    CHECK(factorial_weights(6).size() == 5);
    CHECK(factorial_weights(6)[4] == doctest::Approx(1.0 / 720.0));
}

TEST_CASE("sign convention makes the largest-magnitude entry positive") {
    Matrix v(3, 3);
    v << 0.5, -0.1, -0.5,
         -0.2, -0.8, 0.5,
         0.1, 0.3, -0.5;
    apply_sign_convention(v);
    CHECK(v(0, 0) == 0.5);    // already positive, untouched
    CHECK(v(1, 1) == 0.8);    // column flipped around its lead entry
    CHECK(v(0, 1) == 0.1);
    CHECK(v(0, 2) == 0.5);    // tie: first of the equal-magnitude entries wins
    CHECK(v(1, 2) == -0.5);

    // Idempotent: a second pass changes nothing.
    Matrix again = v;
    apply_sign_convention(again);
    CHECK((again - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("is_orthonormal") {
    Rng rng(17);
    CHECK(is_orthonormal(Matrix::Identity(4, 4)));
    CHECK(is_orthonormal(testhelp::random_orthogonal(rng, 5)));
    CHECK_FALSE(is_orthonormal(2.0 * Matrix::Identity(3, 3)));
    CHECK_FALSE(is_orthonormal(Matrix::Zero(3, 3)));
}

TEST_CASE("left singular vectors agree with the Jacobi oracle") {
    Rng rng(21);
    const Matrix a = testhelp::normal_matrix(rng, 4, 9);

    Vector got_s, want_s;
    Matrix got = left_singular_vectors(a, &got_s);
    const Matrix want = oracles::jacobi_left_singular_vectors(a, &want_s);
    apply_sign_convention(got);

    REQUIRE(got.cols() == 4);
    CHECK(is_orthonormal(got));
    for (Eigen::Index j = 0; j < 4; ++j) {
        CHECK(got_s[j] == doctest::Approx(want_s[j]).epsilon(1e-10));
        if (j > 0) CHECK(got_s[j] <= got_s[j - 1]);
        CHECK((got.col(j) - want.col(j)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("evd_factor on a diagonal covariance recovers sorted axes") {
    Matrix cov = Matrix::Zero(3, 3);
    cov(0, 0) = 3.0;
    cov(1, 1) = 1.0;
    cov(2, 2) = 2.0;
    const FactorMatrix fm = evd_factor(covariance_tensor(cov));

    CHECK(fm.method == Method::Evd);
    CHECK(fm.column_scores[0] == doctest::Approx(3.0));
    CHECK(fm.column_scores[1] == doctest::Approx(2.0));
    CHECK(fm.column_scores[2] == doctest::Approx(1.0));
    // Eigenvectors are coordinate axes with the positive sign forced.
    CHECK(fm.columns(0, 0) == doctest::Approx(1.0));
    CHECK(fm.columns(2, 1) == doctest::Approx(1.0));
    CHECK(fm.columns(1, 2) == doctest::Approx(1.0));
    CHECK(is_orthonormal(fm.columns));
}

TEST_CASE("evd_factor reconstructs the covariance and minimizes variance last") {
    Rng rng(23);
    const ReturnPanel panel = testhelp::return_panel(testhelp::normal_matrix(rng, 120, 5));
    const SymmetricTensor c2 = cumulant_tensor(panel, 2);
    const FactorMatrix fm = evd_factor(c2);

    const Matrix cov = unfold_mode1(c2);
    const Matrix recon = fm.columns * fm.column_scores.asDiagonal() * fm.columns.transpose();
    CHECK((recon - cov).cwiseAbs().maxCoeff() < 1e-9 * cov.cwiseAbs().maxCoeff());

    // Portfolio variance along column j is exactly the j-th eigenvalue, so the
    // rear column is the minimum-variance direction.
    for (Eigen::Index j = 0; j < 5; ++j) {
        CHECK(contract_all_modes(c2, fm.columns.col(j)) ==
              doctest::Approx(fm.column_scores[j]).epsilon(1e-10));
    }
    const double min_score = fm.column_scores[4];
    for (int trial = 0; trial < 20; ++trial) {
        Vector w = testhelp::normal_matrix(rng, 5, 1);
        w.normalize();
        CHECK(contract_all_modes(c2, w) >= min_score - 1e-12);
    }

    SUBCASE("input validation") {
        CHECK_THROWS_AS(evd_factor(SymmetricTensor(3, 3)), UnsupportedOrderError);
        SymmetricTensor bad(2, 2);
        bad.set(std::vector<int>{0, 1}, std::numeric_limits<double>::quiet_NaN());
        CHECK_THROWS_AS(evd_factor(bad), NotFiniteError);
    }
}

TEST_CASE("phi is invariant across orthogonal factor matrices") {
    Rng rng(29);
    const ReturnPanel panel = testhelp::return_panel(testhelp::normal_matrix(rng, 90, 4));
    for (int n_max : {4, 6}) {
        const CumulantFamily family = cumulant_family(panel, n_max);
        const double at_identity = phi(family, Matrix::Identity(4, 4));

        // At the identity the cores are the tensors themselves.
        double direct = 0.0;
        for (int n = 2; n <= n_max; ++n) {
            double fact = 1.0;
            for (int k = 2; k <= n; ++k) fact *= k;
            direct += frobenius_norm_sq(family.order(n)) / fact;
        }
        CHECK(at_identity == doctest::Approx(direct).epsilon(1e-12));

        for (int trial = 0; trial < 5; ++trial) {
            const Matrix q = testhelp::random_orthogonal(rng, 4);
            CHECK(phi(family, q) == doctest::Approx(at_identity).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(phi(cumulant_family(panel, 4), Matrix::Identity(3, 3)), DimMismatchError);
}

TEST_CASE("als_init matches an independently computed SVD of the stacked unfoldings") {
    Rng rng(37);
    const ReturnPanel panel = testhelp::return_panel(testhelp::normal_matrix(rng, 60, 3));
    const CumulantFamily family = cumulant_family(panel, 4);

    const FactorMatrix init = als_init(family);
    CHECK(init.method == Method::Phi4);
    CHECK(is_orthonormal(init.columns));

    const Matrix concat = scaled_concat(
        {unfold_mode1(family.order(2)), unfold_mode1(family.order(3)),
         unfold_mode1(family.order(4))},
        factorial_weights(4));
    Vector want_s;
    const Matrix want = oracles::jacobi_left_singular_vectors(concat, &want_s);
    for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK((init.columns.col(j) - want.col(j)).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(init.column_scores[j] == doctest::Approx(want_s[j]).epsilon(1e-9));
    }
}

TEST_CASE("als on a family with zero higher cumulants reduces to the covariance EVD") {
    Rng rng(43);
    // Well-separated spectrum keeps every eigenvector numerically stable.
    const Matrix q = testhelp::random_orthogonal(rng, 5);
    Vector evals(5);
    evals << 10.0, 8.0, 6.0, 4.0, 2.0;
    const Matrix cov = q * evals.asDiagonal() * q.transpose();
    const CumulantFamily family = degenerate_family(cov, 6);

    AlsConfig cfg;
    cfg.n_max = 6;
    const AlsResult res = als_factor(family, cfg);
    CHECK(res.converged);
    CHECK(res.iterations <= 2);

    const FactorMatrix evd = evd_factor(family.order(2));
    for (Eigen::Index j = 0; j < 5; ++j) {
        // Principal-angle sine via the residual orthogonal to the EVD column;
        // sqrt(1 - cos^2) would bottom out near sqrt(ulp) for aligned vectors.
        const Vector a = res.factors.columns.col(j);
        const Vector e = evd.columns.col(j);
        CHECK((a - a.dot(e) * e).norm() < 1e-8);
    }
}

TEST_CASE("als_step matches the brute-force oracle") {
    Rng rng(47);
    const ReturnPanel panel = testhelp::return_panel(testhelp::normal_matrix(rng, 60, 3));
    const CumulantFamily family = cumulant_family(panel, 4);
    const FactorMatrix prev = als_init(family);

    const FactorMatrix got = als_step(family, prev);
    CHECK(got.method == Method::Phi4);
    CHECK(is_orthonormal(got.columns));

    std::vector<Matrix> blocks;
    for (int n = 2; n <= 4; ++n)
        blocks.push_back(
            unfold_mode1(oracles::direct_partial_contraction(family.order(n), prev.columns)));
    const Matrix want =
        oracles::jacobi_left_singular_vectors(scaled_concat(blocks, factorial_weights(4)));
    CHECK((got.columns - want).cwiseAbs().maxCoeff() < 1e-9);

    FactorMatrix wrong_dim = prev;
    wrong_dim.columns = Matrix::Identity(4, 4);
    CHECK_THROWS_AS(als_step(family, wrong_dim), DimMismatchError);
}

TEST_CASE("als_factor control flow") {
    Rng rng(53);
    const ReturnPanel panel = testhelp::return_panel(testhelp::normal_matrix(rng, 80, 4));
    const CumulantFamily family = cumulant_family(panel, 4);

    SUBCASE("infinite tolerance keeps the initial guess without stepping") {
        AlsConfig cfg;
        cfg.rel_tol = std::numeric_limits<double>::infinity();
        const AlsResult res = als_factor(family, cfg);
        CHECK(res.converged);
        CHECK(res.iterations == 0);
        REQUIRE(res.phi_trace.size() == 1);
        const FactorMatrix init = als_init(family);
        CHECK((res.factors.columns - init.columns).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("default tolerance converges and the monitor stays flat") {
        const AlsResult res = als_factor(family, AlsConfig{});
        CHECK(res.converged);
        CHECK(res.iterations >= 1);
        CHECK(is_orthonormal(res.factors.columns));
        REQUIRE(res.phi_trace.size() == static_cast<std::size_t>(res.iterations) + 1);
        for (double v : res.phi_trace)
            CHECK(v == doctest::Approx(res.phi_trace.front()).epsilon(1e-9));
    }
    SUBCASE("an unreachable tolerance hits the iteration cap") {
        // Beyond the first step the iterate can land on a bitwise fixed
        // point (the monitor is analytically constant), so cap the run at
        // one step, where the recomputed phi still differs in its last bits.
        AlsConfig cfg;
        cfg.rel_tol = 1e-300;
        cfg.max_iters = 1;
        const AlsResult res = als_factor(family, cfg);
        REQUIRE(res.phi_trace.size() == 2);
        CHECK(res.phi_trace[1] != res.phi_trace[0]);
        CHECK_FALSE(res.converged);
        CHECK(res.iterations == 1);
        CHECK(is_orthonormal(res.factors.columns));
    }
    SUBCASE("config validation") {
        AlsConfig cfg;
        cfg.n_max = 6;
        CHECK_THROWS_AS(als_factor(family, cfg), DimMismatchError);
        cfg.n_max = 4;
        cfg.max_iters = 0;
        CHECK_THROWS_AS(als_factor(family, cfg), OutOfRangeError);
        cfg.max_iters = 10;
        cfg.rel_tol = 0.0;
        CHECK_THROWS_AS(als_factor(family, cfg), OutOfRangeError);
    }
}

TEST_CASE("identical input produces bit-identical factors") {
    Rng rng(59);
    const ReturnPanel panel = testhelp::return_panel(testhelp::normal_matrix(rng, 70, 4));
    for (int n_max : {4, 6}) {
        const CumulantFamily family = cumulant_family(panel, n_max);
        AlsConfig cfg;
        cfg.n_max = n_max;
        const AlsResult a = als_factor(family, cfg);
        const AlsResult b = als_factor(family, cfg);
        CHECK((a.factors.columns - b.factors.columns).cwiseAbs().maxCoeff() == 0.0);
        CHECK(a.phi_trace == b.phi_trace);
    }
}

TEST_CASE("factor csv round-trip") {
    Rng rng(61);
    const ReturnPanel panel = testhelp::return_panel(testhelp::normal_matrix(rng, 50, 4));
    const FactorMatrix fm = evd_factor(cumulant_tensor(panel, 2));

    testhelp::TempDir dir;
    const std::string path = dir.file("factors.csv");
    write_factor_csv(path, fm);
    const FactorMatrix back = read_factor_csv(path);
    CHECK(back.method == Method::Evd);
    CHECK((back.columns - fm.columns).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.column_scores - fm.column_scores).cwiseAbs().maxCoeff() == 0.0);

    std::ofstream(path) << "NOPE,1\n0.5\n";
    CHECK_THROWS_AS(read_factor_csv(path), Error);
}
