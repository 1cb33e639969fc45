#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fkdet/numerics.hpp"
#include "test_util.hpp"

using namespace fkdet;
using testutil::det_laplace;
using testutil::dft_direct;
using testutil::random_hpd_matrix;
using testutil::random_matrix;

TEST_CASE("lu_logabsdet on fixed matrices", "[numerics]") {
  CHECK(lu_logabsdet(Matrix::identity(5)).log_abs == Catch::Approx(0.0).margin(0));
  Matrix d(2);
  d(0, 0) = 2.0;
  d(1, 1) = 3.0;
  CHECK(lu_logabsdet(d).log_abs == Catch::Approx(std::log(6.0)).epsilon(1e-14));

  Matrix z(2);
  z(0, 0) = 1.0;  // second row zero
  const LogDet ld = lu_logabsdet(z);
  CHECK(ld.zero_pivot);
  CHECK(std::isinf(ld.log_abs));

  Matrix bad(1);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(lu_logabsdet(bad), precondition_error);
}

TEST_CASE("lu_logabsdet against the Laplace-expansion oracle", "[numerics]") {
  std::mt19937 rng(7101);
  for (int trial = 0; trial < 20; ++trial) {
    for (std::int64_t n : {2, 3, 4, 8}) {
      const Matrix m = random_matrix(rng, n);
      const double expected = std::log(std::abs(det_laplace(m)));
      const double got = lu_logabsdet(m).log_abs;
      CHECK(std::abs(got - expected) <= 1e-10 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("lu_logabsdet multiplicativity and adjoint invariance", "[numerics]") {
  std::mt19937 rng(7102);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix a = random_matrix(rng, 32);
    const Matrix b = random_matrix(rng, 32);
    const double lhs = lu_logabsdet(a * b).log_abs;
    const double rhs = lu_logabsdet(a).log_abs + lu_logabsdet(b).log_abs;
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(rhs)));
    CHECK(lu_logabsdet(a.adjoint()).log_abs ==
          Catch::Approx(lu_logabsdet(a).log_abs).margin(1e-9));
  }
}

TEST_CASE("cholesky_logdet on fixed matrices", "[numerics]") {
  Matrix d(2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  CHECK(cholesky_logdet(d).log_abs == Catch::Approx(std::log(36.0)).epsilon(1e-14));

  Matrix t(2);
  t(0, 0) = 2.0;
  t(0, 1) = 1.0;
  t(1, 0) = 1.0;
  t(1, 1) = 2.0;
  CHECK(cholesky_logdet(t).log_abs == Catch::Approx(std::log(3.0)).epsilon(1e-14));

  Matrix nh(2);
  nh(0, 1) = 1.0;
  nh(1, 0) = 2.0;
  CHECK_THROWS_AS(cholesky_logdet(nh), precondition_error);

  Matrix npd(2);
  npd(0, 0) = 1.0;
  npd(0, 1) = 2.0;
  npd(1, 0) = 2.0;
  npd(1, 1) = 1.0;
  try {
    cholesky_logdet(npd);
    FAIL("expected not_positive_definite");
  } catch (const not_positive_definite& e) {
    CHECK(e.index == 2);
  }
}

TEST_CASE("cholesky agrees with LU on random HPD matrices", "[numerics]") {
  std::mt19937 rng(7103);
  for (int trial = 0; trial < 8; ++trial) {
    const Matrix m = random_hpd_matrix(rng, 24);
    const double lu = lu_logabsdet(m).log_abs;
    const double ch = cholesky_logdet(m).log_abs;
    CHECK(std::abs(lu - ch) <= 1e-9 * std::max(1.0, std::abs(lu)));
  }
}

TEST_CASE("cholesky_solve solves HPD systems", "[numerics]") {
  std::mt19937 rng(7104);
  const Matrix m = random_hpd_matrix(rng, 12);
  std::vector<cplx> b(12);
  for (auto& v : b) v = testutil::random_coeff(rng);
  const CholFactors f = cholesky_factor(m);
  const std::vector<cplx> x = cholesky_solve(f, b);
  for (std::int64_t i = 0; i < 12; ++i) {
    cplx acc = 0.0;
    for (std::int64_t j = 0; j < 12; ++j) acc += m(i, j) * x[static_cast<std::size_t>(j)];
    CHECK(std::abs(acc - b[static_cast<std::size_t>(i)]) <= 1e-10);
  }
}

TEST_CASE("Levinson closed forms", "[numerics]") {
  SECTION("diagonal: log D_k = k log c") {
    const std::vector<cplx> mom{cplx(3.0), cplx(0.0), cplx(0.0), cplx(0.0)};
    const std::vector<double> ld = toeplitz_logdet_sequence(mom);
    for (std::size_t k = 0; k < ld.size(); ++k)
      CHECK(ld[k] == Catch::Approx(static_cast<double>(k + 1) * std::log(3.0)).epsilon(1e-13));
  }
  SECTION("c = (2,1): D_k = k + 1") {
    std::vector<cplx> mom(65, cplx(0.0));
    mom[0] = 2.0;
    mom[1] = 1.0;
    const std::vector<double> ld = toeplitz_logdet_sequence(mom);
    for (std::size_t k = 0; k < ld.size(); ++k)
      CHECK(std::llround(std::exp(ld[k])) == static_cast<long long>(k + 2));
  }
  SECTION("c = (5,-2): D_k = (4^{k+1} - 1)/3") {
    std::vector<cplx> mom(24, cplx(0.0));
    mom[0] = 5.0;
    mom[1] = -2.0;
    const std::vector<double> ld = toeplitz_logdet_sequence(mom);
    for (std::size_t k = 0; k < ld.size(); ++k) {
      const long double dk = (std::pow(4.0L, static_cast<long double>(k + 2)) - 1.0L) / 3.0L;
      CHECK(ld[k] == Catch::Approx(static_cast<double>(std::log(dk))).epsilon(1e-12));
    }
  }
  SECTION("breakdown carries the failing dimension") {
    try {
      toeplitz_logdet_sequence({cplx(1.0), cplx(2.0), cplx(0.0)});
      FAIL("expected not_positive_definite");
    } catch (const not_positive_definite& e) {
      CHECK(e.index == 2);
    }
  }
}

TEST_CASE("Levinson equals Cholesky on Toeplitz leading minors", "[numerics]") {
  // The module's central cross-oracle: the O(n^2) recursion against the
  // explicit k x k factorizations, complex Hermitian moments included.
  std::mt19937 rng(7105);
  std::vector<cplx> q(5);
  for (auto& v : q) v = testutil::random_coeff(rng);
  // moments of |Q|^2: c_k = sum_j conj(q_j) q_{j+k}
  std::vector<cplx> mom(257, cplx(0.0));
  for (std::size_t k = 0; k < mom.size(); ++k)
    for (std::size_t j = 0; j + k < q.size(); ++j) mom[k] += std::conj(q[j]) * q[j + k];
  mom[0] += 0.5;  // keep the measure comfortably nontrivial

  const std::vector<double> ld = toeplitz_logdet_sequence(mom);
  std::vector<std::int64_t> sample;
  for (std::int64_t k = 1; k <= 64; ++k) sample.push_back(k);
  sample.insert(sample.end(), {128, 192, 256});
  for (std::int64_t k : sample) {
    Matrix t(k);
    for (std::int64_t i = 0; i < k; ++i)
      for (std::int64_t j = 0; j < k; ++j) {
        const std::int64_t lag = j - i;
        t(i, j) = lag >= 0 ? mom[static_cast<std::size_t>(lag)]
                           : std::conj(mom[static_cast<std::size_t>(-lag)]);
      }
    const double direct = cholesky_logdet(t).log_abs;
    CHECK(std::abs(ld[static_cast<std::size_t>(k - 1)] - direct) <=
          1e-8 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("poly_roots on fixed polynomials", "[numerics]") {
  SECTION("x^2 - 1") {
    const RootSet rs = poly_roots({cplx(-1.0), cplx(0.0), cplx(1.0)});
    REQUIRE(rs.roots.size() == 2);
    CHECK(std::abs(rs.roots[0] - cplx(-1.0)) <= 1e-12);
    CHECK(std::abs(rs.roots[1] - cplx(1.0)) <= 1e-12);
  }
  SECTION("2x - 1") {
    const RootSet rs = poly_roots({cplx(-1.0), cplx(2.0)});
    REQUIRE(rs.roots.size() == 1);
    CHECK(std::abs(rs.roots[0] - cplx(0.5)) <= 1e-15);
  }
  SECTION("x^2 - x - 1 against the quadratic formula") {
    const RootSet rs = poly_roots({cplx(-1.0), cplx(-1.0), cplx(1.0)});
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    REQUIRE(rs.roots.size() == 2);
    CHECK(std::abs(rs.roots[0] - cplx(1.0 - golden)) <= 1e-12);
    CHECK(std::abs(rs.roots[1] - cplx(golden)) <= 1e-12);
  }
  SECTION("roots at the origin are stripped exactly") {
    const RootSet rs = poly_roots({cplx(0.0), cplx(0.0), cplx(1.0), cplx(1.0)});
    REQUIRE(rs.roots.size() == 3);
    CHECK(rs.roots[0] == cplx(-1.0));
    CHECK(rs.roots[1] == cplx(0.0));
    CHECK(rs.roots[2] == cplx(0.0));
    // multiplicity by clustering
    bool found_double_zero = false;
    for (const auto& [rep, count] : rs.clusters)
      if (std::abs(rep) <= 1e-7 && count == 2) found_double_zero = true;
    CHECK(found_double_zero);
  }
  SECTION("constant input is rejected") {
    CHECK_THROWS_AS(poly_roots({cplx(3.0)}), precondition_error);
    CHECK_THROWS_AS(poly_roots({cplx(3.0), cplx(0.0)}), precondition_error);
  }
}

TEST_CASE("poly_roots Vieta identities on random polynomials", "[numerics]") {
  std::mt19937 rng(7106);
  for (int trial = 0; trial < 10; ++trial) {
    for (int deg : {3, 5, 8}) {
      std::vector<cplx> c(static_cast<std::size_t>(deg + 1));
      for (auto& v : c) v = testutil::random_coeff(rng);
      if (std::abs(c.back()) < 0.2) c.back() += cplx(1.0);
      if (std::abs(c.front()) < 0.2) c.front() += cplx(1.0);
      const RootSet rs = poly_roots(c);
      cplx sum = 0.0, prod = 1.0;
      for (const cplx& r : rs.roots) {
        sum += r;
        prod *= r;
      }
      const cplx vieta_sum = -c[static_cast<std::size_t>(deg - 1)] / c.back();
      const cplx vieta_prod = (deg % 2 == 0 ? 1.0 : -1.0) * c.front() / c.back();
      CHECK(std::abs(sum - vieta_sum) <= 1e-9 * std::max(1.0, std::abs(vieta_sum)));
      CHECK(std::abs(prod - vieta_prod) <= 1e-9 * std::max(1.0, std::abs(vieta_prod)));
    }
  }
}

TEST_CASE("fft fixed vectors", "[numerics]") {
  SECTION("delta transforms to all ones") {
    std::vector<cplx> x(8, cplx(0.0));
    x[0] = 1.0;
    for (const cplx& v : fft(x)) CHECK(std::abs(v - cplx(1.0)) <= 1e-14);
  }
  SECTION("all-ones of length 4") {
    const std::vector<cplx> y = fft(std::vector<cplx>(4, cplx(1.0)));
    CHECK(std::abs(y[0] - cplx(4.0)) <= 1e-14);
    for (int k = 1; k < 4; ++k) CHECK(std::abs(y[static_cast<std::size_t>(k)]) <= 1e-14);
  }
  SECTION("length one is the identity") {
    const std::vector<cplx> y = fft({cplx(2.5, -1.0)});
    CHECK(y[0] == cplx(2.5, -1.0));
  }
}

TEST_CASE("fft matches the direct DFT", "[numerics]") {
  std::mt19937 rng(7107);
  for (std::size_t n : {12u, 384u, 64u, 100u}) {
    std::vector<cplx> x(n);
    for (auto& v : x) v = testutil::random_coeff(rng);
    const std::vector<cplx> fast = fft(x);
    const std::vector<cplx> slow = dft_direct(x, -1);
    double scale = 0.0;
    for (const cplx& v : slow) scale = std::max(scale, std::abs(v));
    const double tol = (n <= 64 ? 1e-12 : 1e-10) * std::max(1.0, scale);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(fast[k] - slow[k]) <= tol);
  }
}

TEST_CASE("fft round trip is tight for large sizes", "[numerics]") {
  std::mt19937 rng(7108);
  for (std::size_t n : {std::size_t(1) << 16, std::size_t(1) << 18, std::size_t(768)}) {
    std::vector<cplx> x(n);
    for (auto& v : x) v = testutil::random_coeff(rng);
    const std::vector<cplx> back = ifft(fft(x));
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      err = std::max(err, std::abs(back[k] - x[k]));
      scale = std::max(scale, std::abs(x[k]));
    }
    CHECK(err <= 1e-12 * std::max(1.0, scale));
  }
}
