#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>

#include "fkdet/estimators.hpp"
#include "test_util.hpp"

using namespace fkdet;
using testutil::random_laurent;

namespace {

const double kLog2 = std::log(2.0);
const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

GroupRingElement ring_of(const std::string& text, const Group& model) {
  return parse_group_ring(text, model);
}

// Q with prescribed root moduli (kept away from the unit circle), expanded to
// coefficients; the test-side generator for well-conditioned squares.
GroupRingElement random_offcircle_poly(std::mt19937& rng, const Group& z, int deg) {
  std::uniform_real_distribution<double> angle(0.0, 1.0);
  std::uniform_real_distribution<double> inner(0.2, 0.8);
  std::uniform_real_distribution<double> outer(1.25, 3.0);
  std::uniform_int_distribution<int> which(0, 1);
  std::vector<cplx> coeffs{cplx(1.0)};
  for (int k = 0; k < deg; ++k) {
    const double rho = which(rng) ? inner(rng) : outer(rng);
    const cplx root = std::polar(rho, 2.0 * std::numbers::pi * angle(rng));
    std::vector<cplx> next(coeffs.size() + 1, cplx(0.0));
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      next[j] -= root * coeffs[j];
      next[j + 1] += coeffs[j];
    }
    coeffs = std::move(next);
  }
  GroupRingElement q(z);
  for (std::size_t j = 0; j < coeffs.size(); ++j)
    q.set({static_cast<std::int64_t>(j)}, coeffs[j]);
  return q;
}

}  // namespace

TEST_CASE("quadrature Mahler measures", "[estimators]") {
  SECTION("constants are exact") {
    const DetEstimate est = mahler_quadrature(parse_laurent("3", 2), 8);
    CHECK(est.log_value == Catch::Approx(std::log(3.0)).margin(1e-14));
    CHECK(est.excluded == 0);
  }
  SECTION("2 - x at N = 2^16") {
    const DetEstimate est = mahler_quadrature(parse_laurent("2 - x"), 1 << 16);
    CHECK(std::abs(est.log_value - kLog2) <= 1e-4);
  }
  SECTION("x^2 - x - 1 lands on the golden ratio") {
    const DetEstimate est = mahler_quadrature(parse_laurent("x^2 - x - 1"), 1 << 16);
    CHECK(std::abs(est.log_value - std::log(kGolden)) <= 1e-3);
  }
  SECTION("preconditions") {
    CHECK_THROWS_AS(mahler_quadrature(LaurentPolynomial(1), 16), precondition_error);
    CHECK_THROWS_AS(mahler_quadrature(parse_laurent("2 - x"), 1), precondition_error);
  }
}

TEST_CASE("Jensen Mahler measures", "[estimators]") {
  CHECK(std::abs(std::exp(mahler_jensen(parse_laurent("2*x - 1")).log_value) - 2.0) <= 1e-12);
  CHECK(std::abs(std::exp(mahler_jensen(parse_laurent("x - 1")).log_value) - 1.0) <= 1e-12);
  CHECK(std::abs(std::exp(mahler_jensen(parse_laurent("x^2 - x - 1")).log_value) - kGolden) <=
        1e-10);
  SECTION("monomials and constants") {
    CHECK(mahler_jensen(parse_laurent("3*x^-4")).log_value ==
          Catch::Approx(std::log(3.0)).margin(1e-14));
  }
  SECTION("Lehmer's polynomial") {
    const DetEstimate est =
        mahler_jensen(parse_laurent("x^10 + x^9 - x^7 - x^6 - x^5 - x^4 - x^3 + x + 1"));
    CHECK(std::exp(est.log_value) == Catch::Approx(1.17628).margin(2e-5));
    const DetEstimate quad =
        mahler_quadrature(parse_laurent("x^10 + x^9 - x^7 - x^6 - x^5 - x^4 - x^3 + x + 1"),
                          1 << 16);
    CHECK(std::abs(quad.log_value - est.log_value) <= 2e-3);
  }
  SECTION("multi-variable input is rejected") {
    CHECK_THROWS_AS(mahler_jensen(parse_laurent("x + y")), precondition_error);
  }
}

TEST_CASE("Szego sequences", "[estimators]") {
  SECTION("constant symbol: D_n^{1/n} = c") {
    const SzegoResult seq = szego_sequence(parse_laurent("2", 1), 16);
    for (const SzegoRow& row : seq.rows) {
      CHECK(row.nth_root == Catch::Approx(kLog2).epsilon(1e-12));
      CHECK(row.ratio == Catch::Approx(kLog2).epsilon(1e-12));
    }
  }
  SECTION("|1 + z|^2: D_n = n + 1") {
    const SzegoResult seq = szego_sequence(parse_laurent("2 + x + x^-1"), 65);
    for (const SzegoRow& row : seq.rows)
      CHECK(std::llround(std::exp(row.log_det)) == row.n + 1);
    CHECK(std::abs(std::exp(seq.rows[64].ratio) - 1.0) <= 2e-2);
  }
  SECTION("|2 - z|^2: ratios converge to 4 fast") {
    const SzegoResult seq = szego_sequence(parse_laurent("5 - 2*x - 2*x^-1"), 32);
    for (const SzegoRow& row : seq.rows) {
      const long double dn = (std::pow(4.0L, static_cast<long double>(row.n + 1)) - 1.0L) / 3.0L;
      CHECK(row.log_det == Catch::Approx(static_cast<double>(std::log(dn))).epsilon(1e-11));
    }
    CHECK(std::abs(std::exp(seq.rows[31].ratio) - 4.0) <= 1e-6);
  }
  SECTION("positive squares skip the grid check") {
    const PositiveElement pe =
        PositiveElement::square_of(ring_of("2 - x", Group::lattice(1)));
    const SzegoResult seq = szego_sequence(pe, 8);
    CHECK(std::llround(std::exp(seq.rows[0].log_det)) == 5);
  }
  SECTION("sign-changing and non-self-adjoint symbols are rejected") {
    CHECK_THROWS_AS(szego_sequence(parse_laurent("x + x^-1"), 8), precondition_error);
    CHECK_THROWS_AS(szego_sequence(parse_laurent("1 + x"), 8), precondition_error);
  }
}

TEST_CASE("Folner matrices", "[estimators]") {
  const Group z = Group::lattice(1);
  SECTION("|2 - x|^2 over {0,1,2} is the expected tridiagonal matrix") {
    const GroupRingElement f = ring_of("5 - 2*x - 2*x^-1", z);
    const TruncationMatrix tm = folner_matrix(z, f, folner_set(z, 3));
    const double expect[3][3] = {{5, -2, 0}, {-2, 5, -2}, {0, -2, 5}};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(tm.mat(i, j) == cplx(expect[i][j]));
  }
  SECTION("the unit compresses to the identity") {
    const TruncationMatrix tm = folner_matrix(z, ring_unit(z), folner_set(z, 5));
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) CHECK(tm.mat(i, j) == cplx(i == j ? 1.0 : 0.0));
  }
  SECTION("Toeplitz coincidence: entries equal the moments exactly") {
    std::mt19937 rng(661);
    const GroupRingElement q = testutil::random_ring_element(rng, z, 4);
    const GroupRingElement f = positive_square(q);
    const TruncationMatrix tm = folner_matrix(z, f, folner_set(z, 12));
    for (std::int64_t i = 0; i < 12; ++i)
      for (std::int64_t j = 0; j < 12; ++j)
        REQUIRE(tm.mat(i, j) == f.at({j - i}));
  }
  SECTION("Heisenberg square is Hermitian positive definite") {
    const Group h = Group::heisenberg();
    const GroupRingElement g = ring_of("2 + x + i*y", h);
    const TruncationMatrix tm =
        folner_matrix(h, positive_square(g), folner_set(h, 2));
    CHECK_NOTHROW(cholesky_logdet(tm.mat));
  }
}

TEST_CASE("Folner determinant sequences", "[estimators]") {
  const Group z = Group::lattice(1);
  SECTION("|2 - x|^2 matches the closed form") {
    const PositiveElement pe = PositiveElement::square_of(ring_of("2 - x", z));
    const std::vector<DetEstimate> seq = folner_det_sequence(z, pe, {4, 16, 64});
    for (const DetEstimate& est : seq) {
      const long double dn =
          (std::pow(4.0L, static_cast<long double>(est.size + 1)) - 1.0L) / 3.0L;
      const double expect = static_cast<double>(std::log(dn)) / static_cast<double>(est.size);
      CHECK(est.log_value == Catch::Approx(expect).epsilon(1e-10));
      CHECK(est.certificate == "square");
    }
  }
  SECTION("the unit gives zero at every size") {
    const PositiveElement pe = PositiveElement::square_of(ring_unit(z));
    for (const DetEstimate& est : folner_det_sequence(z, pe, {1, 3, 9}))
      CHECK(est.log_value == Catch::Approx(0.0).margin(1e-13));
  }
  SECTION("|1 - x|^2: log(n+1)/n from above, one-sided against the record") {
    const PositiveElement pe = PositiveElement::square_of(ring_of("1 - x", z));
    const std::vector<DetEstimate> seq = folner_det_sequence(z, pe, {16, 64, 256});
    for (const DetEstimate& est : seq)
      CHECK(est.log_value ==
            Catch::Approx(std::log(static_cast<double>(est.size + 1)) /
                          static_cast<double>(est.size))
                .epsilon(1e-10));
    const double record = 0.0;  // Jensen value for |1 - x|^2
    CHECK(seq.back().log_value <= record + 0.03);
    CHECK(seq.back().log_value >= record - 1e-9);
  }
  SECTION("Heisenberg size cap") {
    const Group h = Group::heisenberg();
    const PositiveElement pe = PositiveElement::square_of(ring_unit(h));
    CHECK_THROWS_AS(folner_det_sequence(h, pe, {7}), resource_error);
  }
}

TEST_CASE("quotient determinants", "[estimators]") {
  const Group z = Group::lattice(1);
  const GroupRingElement f = ring_of("2 - x", z);
  SECTION("Z -> Z/n with 2 - x: log(2^n - 1)/n") {
    for (std::int64_t n : {1, 2, 3, 5, 8, 16, 32}) {
      const DetEstimate est = quotient_det(quotient_hom(z, Group::lattice_mod({n})), f);
      const long double expect =
          std::log(std::pow(2.0L, static_cast<long double>(n)) - 1.0L) /
          static_cast<long double>(n);
      CHECK(est.log_value == Catch::Approx(static_cast<double>(expect)).epsilon(1e-12));
    }
  }
  SECTION("the unit maps to zero") {
    const DetEstimate est =
        quotient_det(quotient_hom(z, Group::lattice_mod({6})), ring_unit(z));
    CHECK(est.log_value == Catch::Approx(0.0).margin(1e-13));
  }
  SECTION("1 - x vanishes on every finite cyclic quotient") {
    const GroupRingElement g = ring_of("1 - x", z);
    for (std::int64_t n : {2, 5, 9}) {
      const DetEstimate est = quotient_det(quotient_hom(z, Group::lattice_mod({n})), g);
      CHECK(est.minus_infinity);
    }
  }
  SECTION("FFT fast path equals dense LU over Z^2 for N <= 16") {
    std::mt19937 rng(662);
    const Group z2 = Group::lattice(2);
    for (std::int64_t n : {2, 3, 4, 8, 16}) {
      const Homomorphism phi = quotient_hom(z2, Group::lattice_mod({n, n}));
      GroupRingElement g = testutil::random_ring_element(rng, z2, 5, 2);
      g.add_to(z2.identity(), 8.0);  // keep the symbol away from zero
      const DetEstimate dense = quotient_det_dense(phi, g);
      const DetEstimate fast = quotient_det_fft(phi, g);
      REQUIRE(std::abs(dense.log_value - fast.log_value) <= 1e-8);
    }
    // mixed moduli exercise the non-uniform evaluation path
    const Homomorphism phi = quotient_hom(z2, Group::lattice_mod({3, 5}));
    GroupRingElement g = testutil::random_ring_element(rng, z2, 4, 2);
    g.add_to(z2.identity(), 8.0);
    CHECK(std::abs(quotient_det_dense(phi, g).log_value -
                   quotient_det_fft(phi, g).log_value) <= 1e-8);
  }
  SECTION("multiplicativity in log scale") {
    std::mt19937 rng(663);
    const Homomorphism phi = quotient_hom(z, Group::lattice_mod({8}));
    for (int t = 0; t < 10; ++t) {
      GroupRingElement a = testutil::random_ring_element(rng, z, 4, 2);
      GroupRingElement b = testutil::random_ring_element(rng, z, 4, 2);
      a.add_to({0}, 6.0);
      b.add_to({0}, 6.0);
      const double lhs = quotient_det(phi, a * b).log_value;
      const double rhs = quotient_det(phi, a).log_value + quotient_det(phi, b).log_value;
      CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(rhs)));
    }
  }
  SECTION("cyclic-image targets go through the one-variable Mahler measure") {
    const Group z2 = Group::lattice(2);
    const Homomorphism phi = quotient_hom(z2, Group::cyclic_image({1, 3}));
    const DetEstimate est = quotient_det(phi, ring_of("4 + x + y", z2));
    CHECK(est.log_value == Catch::Approx(std::log(4.0)).margin(1e-12));
  }
  SECTION("Heisenberg quotient against a hand-rolled matrix") {
    // independent oracle: mod-2 triple arithmetic written out inline
    const Group h = Group::heisenberg();
    const GroupRingElement g = ring_of("5 + x + x^-1 + y + y^-1", h);
    const Homomorphism phi = quotient_hom(h, Group::heisenberg_mod(2));
    const DetEstimate est = quotient_det(phi, g);

    const auto mul2 = [](std::array<std::int64_t, 3> a, std::array<std::int64_t, 3> b) {
      return std::array<std::int64_t, 3>{(a[0] + b[0]) % 2, (a[1] + b[1]) % 2,
                                         (a[2] + b[2] + a[0] * b[1]) % 2};
    };
    const auto inv2 = [&](std::array<std::int64_t, 3> a) {
      return std::array<std::int64_t, 3>{(2 - a[0]) % 2, (2 - a[1]) % 2,
                                         (a[0] * a[1] - a[2] + 4) % 2};
    };
    std::vector<std::array<std::int64_t, 3>> elems;
    for (std::int64_t a = 0; a < 2; ++a)
      for (std::int64_t b = 0; b < 2; ++b)
        for (std::int64_t c = 0; c < 2; ++c) elems.push_back({a, b, c});
    // pushforward of g mod 2: x and x^{-1} fold onto (1,0,0), y likewise
    const auto coeff = [](std::array<std::int64_t, 3> v) {
      if (v == std::array<std::int64_t, 3>{0, 0, 0}) return 5.0;
      if (v == std::array<std::int64_t, 3>{1, 0, 0}) return 2.0;
      if (v == std::array<std::int64_t, 3>{0, 1, 0}) return 2.0;
      return 0.0;
    };
    Matrix m(8);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j)
        m(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)) =
            coeff(mul2(inv2(elems[i]), elems[j]));
    const double oracle = lu_logabsdet(m).log_abs / 8.0;
    CHECK(est.log_value == Catch::Approx(oracle).epsilon(1e-12));
  }
  SECTION("sequence annotation reflects certification") {
    std::vector<Homomorphism> homs;
    std::vector<std::int64_t> labels;
    for (std::int64_t n : {2, 4, 8}) {
      homs.push_back(quotient_hom(z, Group::lattice_mod({n})));
      labels.push_back(n);
    }
    const auto cert = neumann_certificate(f);
    REQUIRE(cert.has_value());
    const QuotientSequence with = quotient_det_sequence(homs, f, cert, labels);
    CHECK(with.certified);
    CHECK(with.note.find("certified") != std::string::npos);
    CHECK(with.estimates[0].certificate == "neumann");
    CHECK(with.estimates[2].size == 8);
    const QuotientSequence without = quotient_det_sequence(homs, f);
    CHECK_FALSE(without.certified);
    CHECK(without.note.find("limsup") != std::string::npos);
  }
}

TEST_CASE("orthogonal chains", "[estimators]") {
  const Group z = Group::lattice(1);
  SECTION("scalar element: every step norm is c") {
    const PositiveElement pe =
        PositiveElement::diagonally_dominant(3.0 * ring_unit(z));
    std::vector<GroupElt> chain{{0}, {5}, {-2}, {9}};
    const auto steps = orthogonal_chain(z, pe, chain);
    double logdet = 0.0;
    for (const auto& step : steps) {
      CHECK(step.phi_norm_sq == Catch::Approx(3.0).epsilon(1e-13));
      logdet += std::log(3.0);
      CHECK(step.running_logdet == Catch::Approx(logdet).epsilon(1e-12));
      CHECK(step.phi_coeffs.back() == cplx(1.0));
    }
  }
  SECTION("|2 - x|^2 norms are the determinant ratios") {
    const PositiveElement pe = PositiveElement::square_of(ring_of("2 - x", z));
    std::vector<GroupElt> chain;
    for (std::int64_t j = 0; j <= 10; ++j) chain.push_back({j});
    const auto steps = orthogonal_chain(z, pe, chain);
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const long double num = std::pow(4.0L, static_cast<long double>(k + 2)) - 1.0L;
      const long double den = std::pow(4.0L, static_cast<long double>(k + 1)) - 1.0L;
      CHECK(steps[k].phi_norm_sq ==
            Catch::Approx(static_cast<double>(num / den)).epsilon(1e-12));
    }
  }
  SECTION("orthogonal-already elements keep the full trace") {
    const PositiveElement pe = PositiveElement::square_of(ring_of("2 + x^3", z));
    const auto steps = orthogonal_chain(z, pe, {{0}, {1}, {2}});
    for (const auto& step : steps)
      CHECK(step.phi_norm_sq == Catch::Approx(5.0).epsilon(1e-13));
  }
  SECTION("incremental determinant equals direct Cholesky at every step") {
    std::mt19937 rng(664);
    const Group z2 = Group::lattice(2);
    {
      const Group h = Group::heisenberg();
      GroupRingElement q = testutil::random_ring_element(rng, h, 4, 2);
      q.add_to(h.identity(), 1.5);
      const PositiveElement pe = PositiveElement::square_of(q);
      const FolnerSet box = folner_set(h, 2);
      std::vector<GroupElt> chain(box.elems.begin(), box.elems.end());
      const auto steps = orthogonal_chain(h, pe, chain);
      for (std::size_t k = 0; k < steps.size(); ++k) {
        std::vector<GroupElt> prefix(chain.begin(), chain.begin() + static_cast<long>(k + 1));
        const double direct =
            cholesky_logdet(folner_matrix(h, pe.element(),
                                          make_folner(prefix, static_cast<std::int64_t>(k + 1)))
                                .mat)
                .log_abs;
        REQUIRE(std::abs(steps[k].running_logdet - direct) <=
                1e-9 * std::max(1.0, std::abs(direct)));
      }
    }
    for (const Group& model : {z, z2}) {
      GroupRingElement q = testutil::random_ring_element(rng, model, 4, 2);
      q.add_to(model.identity(), 1.0);
      const PositiveElement pe = PositiveElement::square_of(q);
      std::vector<GroupElt> chain;
      const FolnerSet box = folner_set(model, model.rank() == 1 ? 60 : 8);
      for (std::size_t i = 0; i < 60 && i < box.elems.size(); ++i)
        chain.push_back(box.elems[i]);
      const auto steps = orthogonal_chain(model, pe, chain);
      for (std::size_t k = 0; k < steps.size(); ++k) {
        std::vector<GroupElt> prefix(chain.begin(), chain.begin() + static_cast<long>(k + 1));
        const Matrix m = folner_matrix(model, pe.element(),
                                       make_folner(prefix, static_cast<std::int64_t>(k + 1)))
                             .mat;
        const double direct = cholesky_logdet(m).log_abs;
        REQUIRE(std::abs(steps[k].running_logdet - direct) <=
                1e-9 * std::max(1.0, std::abs(direct)));
      }
    }
  }
  SECTION("repeated chain elements are rejected") {
    const PositiveElement pe = PositiveElement::square_of(ring_of("2 - x", z));
    CHECK_THROWS_AS(orthogonal_chain(z, pe, {{0}, {0}}), precondition_error);
  }
}

TEST_CASE("Schur determinant identity", "[estimators]") {
  std::mt19937 rng(665);
  SECTION("block diagonal") {
    Matrix m(5);
    for (int i = 0; i < 5; ++i) m(i, i) = cplx(static_cast<double>(i + 2));
    const SchurCheck check = schur_det_check(m, 2);
    CHECK(check.ok);
    CHECK(check.logdet_direct ==
          Catch::Approx(std::log(2.0 * 3 * 4 * 5 * 6)).epsilon(1e-12));
  }
  SECTION("scalar blocks recover ad - bc") {
    Matrix m(2);
    m(0, 0) = cplx(3.0, 1.0);
    m(0, 1) = cplx(-1.0, 0.5);
    m(1, 0) = cplx(2.0);
    m(1, 1) = cplx(0.0, 2.0);
    const SchurCheck check = schur_det_check(m, 1);
    const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    CHECK(check.logdet_formula == Catch::Approx(std::log(std::abs(det))).epsilon(1e-12));
    CHECK(check.ok);
  }
  SECTION("random 6+4 splits agree with the direct 10x10 determinant") {
    for (int t = 0; t < 25; ++t) {
      const Matrix m = testutil::random_matrix(rng, 10);
      const SchurCheck check = schur_det_check(m, 6);
      REQUIRE(check.rel_err <= 1e-10);
    }
  }
  SECTION("singular top-left block is rejected") {
    Matrix m = testutil::random_matrix(rng, 4);
    m(0, 0) = m(0, 1) = m(1, 0) = m(1, 1) = 0.0;
    CHECK_THROWS_AS(schur_det_check(m, 2), precondition_error);
  }
}

TEST_CASE("L2 bound on the determinant", "[estimators]") {
  const Group z = Group::lattice(1);
  SECTION("scalars meet the bound with equality") {
    const L2BoundReport rep = check_l2_bound(cplx(-2.5, 0.0) * ring_unit(z));
    CHECK(rep.holds);
    CHECK(rep.estimate.log_value == Catch::Approx(rep.log_l2).margin(1e-12));
  }
  SECTION("1 + x: M = 1 <= sqrt 2") {
    const L2BoundReport rep = check_l2_bound(ring_of("1 + x", z));
    CHECK(rep.holds);
    CHECK(rep.estimate.log_value == Catch::Approx(0.0).margin(1e-12));
    CHECK(rep.log_l2 == Catch::Approx(0.5 * kLog2).epsilon(1e-12));
  }
  SECTION("random integer elements over Z^2") {
    std::mt19937 rng(666);
    std::uniform_int_distribution<int> coeff(-5, 5);
    std::uniform_int_distribution<std::int64_t> expo(-3, 3);
    for (int t = 0; t < 100; ++t) {
      GroupRingElement f(Group::lattice(2));
      for (int k = 0; k < 5; ++k)
        f.add_to({expo(rng), expo(rng)}, cplx(static_cast<double>(coeff(rng))));
      if (f.empty()) continue;
      REQUIRE(check_l2_bound(f, 128).holds);
    }
  }
}

TEST_CASE("orthogonal-polynomial facts over Z", "[estimators]") {
  const Group z = Group::lattice(1);
  SECTION("scalar element is the equality case") {
    const PositiveElement pe = PositiveElement::diagonally_dominant(4.0 * ring_unit(z));
    const OrthoPolyReport rep = check_cor12(pe, 6);
    CHECK(rep.mahler_one_ok);
    CHECK(rep.roots_ok);
    CHECK(rep.inequality_ok);
    CHECK(rep.log_ratio == Catch::Approx(rep.log_mahler_p).margin(1e-10));
  }
  SECTION("|2 - x|^2 at n = 8") {
    const PositiveElement pe = PositiveElement::square_of(ring_of("2 - x", z));
    const OrthoPolyReport rep = check_cor12(pe, 8);
    CHECK(rep.mahler_one_ok);
    CHECK(rep.roots_ok);
    CHECK(rep.inequality_ok);
    CHECK(std::exp(rep.log_ratio) >= std::exp(rep.log_mahler_p) - 1e-9);
    CHECK(std::exp(rep.log_mahler_p) == Catch::Approx(4.0).epsilon(1e-10));
  }
  SECTION("|1 + x|^2 at n = 8: ratio (n+2)/(n+1) above M = 1") {
    const PositiveElement pe = PositiveElement::square_of(ring_of("1 + x", z));
    const OrthoPolyReport rep = check_cor12(pe, 8);
    CHECK(rep.mahler_one_ok);
    CHECK(rep.roots_ok);
    CHECK(rep.inequality_ok);
    CHECK(std::exp(rep.log_ratio) == Catch::Approx(10.0 / 9.0).epsilon(1e-10));
  }
}

TEST_CASE("trace convergence under kernel escape", "[estimators]") {
  const Group z = Group::lattice(1);
  SECTION("identity polynomial, f = 2 - x") {
    std::vector<Homomorphism> homs;
    std::vector<std::int64_t> labels;
    for (std::int64_t n = 1; n <= 4; ++n) {
      homs.push_back(quotient_hom(z, Group::lattice_mod({n})));
      labels.push_back(n);
    }
    const TraceConvergenceReport rep =
        trace_poly_convergence(ring_of("2 - x", z), {cplx(0.0), cplx(1.0)}, homs, labels);
    CHECK(rep.trace_exact == cplx(2.0));
    CHECK(rep.rows[0].trace_quotient == cplx(1.0));  // everything folds to e
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
      CHECK(rep.rows[i].trace_quotient == cplx(2.0));
    for (const auto& row : rep.rows) CHECK(row.dominated);
  }
  SECTION("constant polynomials never deviate") {
    std::vector<Homomorphism> homs{quotient_hom(z, Group::lattice_mod({3}))};
    const TraceConvergenceReport rep =
        trace_poly_convergence(ring_of("2 - x", z), {cplx(7.0)}, homs);
    CHECK(rep.rows[0].deviation == 0.0);
  }
  SECTION("X^2 with f = 1 + x against Z/2: deviation exactly the kernel mass") {
    std::vector<Homomorphism> homs{quotient_hom(z, Group::lattice_mod({2}))};
    const TraceConvergenceReport rep = trace_poly_convergence(
        ring_of("1 + x", z), {cplx(0.0), cplx(0.0), cplx(1.0)}, homs);
    CHECK(rep.trace_exact == cplx(1.0));
    CHECK(rep.rows[0].trace_quotient == cplx(2.0));
    CHECK(rep.rows[0].deviation == Catch::Approx(1.0));
    CHECK(rep.rows[0].kernel_mass_bound == Catch::Approx(1.0));
    CHECK(rep.rows[0].dominated);
  }
  SECTION("degree cap") {
    CHECK_THROWS_AS(trace_poly_convergence(ring_of("2 - x", z), std::vector<cplx>(10, cplx(1.0)),
                                           {quotient_hom(z, Group::lattice_mod({2}))}),
                    precondition_error);
  }
}

TEST_CASE("Boyd continuity scans", "[estimators]") {
  SECTION("constant polynomial: m(z) = log|z| on [1,2]") {
    const BoydScan scan =
        boyd_scan(LaurentPolynomial(1), cplx(1.0), cplx(2.0), {1.0 / 8, 1.0 / 32});
    CHECK(scan.non_increasing);
    CHECK(scan.samples[0][0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(scan.samples[0].back() == Catch::Approx(kLog2).margin(1e-12));
  }
  SECTION("x + x^-1 over [0,3] with refining meshes") {
    const BoydScan scan = boyd_scan(parse_laurent("x + x^-1"), cplx(0.0), cplx(3.0),
                                    {1.0 / 16, 1.0 / 64, 1.0 / 256});
    CHECK(scan.non_increasing);
    CHECK(scan.max_jumps[2] < scan.max_jumps[0]);
  }
  SECTION("far outside the coefficient ball the measure is log|z|") {
    const LaurentPolynomial p = parse_laurent("x + x^-1");
    const LaurentPolynomial shifted = laurent_constant(1, cplx(2000.0)) - p;
    const double m = mahler_quadrature(shifted, 4096).log_value;
    CHECK(std::abs(m - std::log(2000.0)) <= 1e-6);
    // Neumann-regime envelope: |m - log|z|| <= -log(1 - |P|_1/|z|)
    CHECK(std::abs(m - std::log(2000.0)) <= -std::log(1.0 - 2.0 / 2000.0));
  }
  SECTION("mesh lists must decrease") {
    CHECK_THROWS_AS(
        boyd_scan(parse_laurent("x"), cplx(0.0), cplx(1.0), {1.0 / 4, 1.0 / 4}),
        precondition_error);
  }
}

TEST_CASE("probes log without asserting", "[estimators]") {
  SECTION("non-invertible quotient divergence is labeled") {
    const DivergenceProbe probe = probe_noninvertible_quotients({1, 2, 3, 4});
    CHECK(probe.record.log_value == Catch::Approx(0.0).margin(1e-12));
    for (std::size_t i = 1; i < probe.quotients.size(); ++i)
      CHECK(probe.quotients[i].minus_infinity);
    CHECK(probe.discrepancy_flagged);
    CHECK(probe.label.find("probe") != std::string::npos);
  }
  SECTION("Folner shape probe runs both shapes") {
    const Group z2 = Group::lattice(2);
    const PositiveElement pe = PositiveElement::square_of(ring_of("1 - x", z2));
    const FolnerShapeProbe probe = probe_folner_shapes(pe, {4, 8});
    CHECK(probe.square_boxes.size() == 2);
    CHECK(probe.rectangles.size() == 2);
    CHECK(probe.label.find("probe") != std::string::npos);
  }
}

TEST_CASE("scheme agreement across the four estimators", "[estimators][agreement]") {
  // Master property: quadrature, Jensen, Szego ratio, and Folner estimates of
  // the same positive square agree within 0.03 on the log scale; Jensen is
  // the value of record.
  const Group z = Group::lattice(1);
  std::mt19937 rng(667);
  std::vector<GroupRingElement> roots = {
      ring_of("2 - x", z),
      ring_of("1 + x", z),
      ring_of("2 - x", z) * ring_of("1 + x", z),
  };
  for (int t = 0; t < 3; ++t) roots.push_back(random_offcircle_poly(rng, z, 3));

  for (const GroupRingElement& q : roots) {
    const PositiveElement pe = PositiveElement::square_of(q);
    const double jensen = 2.0 * mahler_jensen(from_groupring(q)).log_value;
    const double quad =
        mahler_quadrature(from_groupring(pe.element()), 1 << 16).log_value;
    const double szego = szego_sequence(pe, 256).rows[255].ratio;
    const double folner = folner_det_sequence(z, pe, {256})[0].log_value;
    CAPTURE(jensen, quad, szego, folner);
    CHECK(std::abs(quad - jensen) <= 0.03);
    CHECK(std::abs(szego - jensen) <= 0.03);
    CHECK(std::abs(folner - jensen) <= 0.03);
    CHECK(std::abs(quad - szego) <= 0.03);
    CHECK(std::abs(quad - folner) <= 0.03);
    CHECK(std::abs(szego - folner) <= 0.03);
    // one-sided: the Folner estimate sits above the record and within 3%
    CHECK(folner >= jensen - 1e-9);
    CHECK(folner <= jensen + 0.03);
  }
}
