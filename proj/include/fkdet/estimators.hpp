#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fkdet/errors.hpp"
#include "fkdet/group.hpp"
#include "fkdet/group_ring.hpp"
#include "fkdet/laurent.hpp"
#include "fkdet/numerics.hpp"

namespace fkdet {

inline constexpr std::int64_t kDenseDimCap = 2048;
inline constexpr std::int64_t kHeisenbergFolnerCap = 6;

enum class Scheme { quadrature, jensen, toeplitz, folner, quotient };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::quadrature: return "quadrature";
    case Scheme::jensen: return "jensen";
    case Scheme::toeplitz: return "toeplitz";
    case Scheme::folner: return "folner";
    case Scheme::quotient: return "quotient";
  }
  return "?";
}

// A log-scale estimate of log det (equivalently m(P)), tagged with the scheme
// that produced it, its size parameter, and certificate metadata.
struct DetEstimate {
  Scheme scheme = Scheme::quadrature;
  std::int64_t size = 0;
  double log_value = 0.0;
  bool minus_infinity = false;
  std::string certificate;
  std::int64_t excluded = 0;  // grid points skipped by the singularity policy
};

// ---------------------------------------------------------------------------
// Mahler measure by offset-grid quadrature: m = N^{-d} sum log|P(theta_k)|.
// Values below 1e-300 are excluded and counted (log|P| is integrable, so the
// excluded mass is asymptotically negligible, but a large count flags trouble).
// ---------------------------------------------------------------------------

inline DetEstimate mahler_quadrature(const LaurentPolynomial& p, std::int64_t n) {
  if (p.zero()) throw precondition_error("Mahler measure of the zero polynomial");
  if (n < 2) throw precondition_error("quadrature grid needs N >= 2");
  const GridValues g = grid_eval(p, n, true);
  long double acc = 0.0;
  std::int64_t excluded = 0;
  for (const cplx& v : g.values) {
    const double a = std::abs(v);
    if (a < 1e-300)
      ++excluded;
    else
      acc += std::log(a);
  }
  const std::int64_t total = static_cast<std::int64_t>(g.values.size());
  if (excluded == total) throw numeric_error("every grid value vanished");
  DetEstimate est;
  est.scheme = Scheme::quadrature;
  est.size = n;
  est.log_value = static_cast<double>(acc / static_cast<long double>(total));
  est.excluded = excluded;
  return est;
}

// ---------------------------------------------------------------------------
// One-variable Mahler measure via Jensen's formula: factor out the monomial
// X^k, find the roots, m = log|lead| + sum log max(1, |root|).
// ---------------------------------------------------------------------------

inline DetEstimate mahler_jensen(const LaurentPolynomial& p) {
  if (p.dim() != 1) throw precondition_error("Jensen evaluation needs one variable");
  if (p.zero()) throw precondition_error("Mahler measure of the zero polynomial");
  std::int64_t kmin = 0, kmax = 0;
  bool first = true;
  for (const auto& [e, c] : p.coeffs()) {
    if (first || e[0] < kmin) kmin = e[0];
    if (first || e[0] > kmax) kmax = e[0];
    first = false;
  }
  DetEstimate est;
  est.scheme = Scheme::jensen;
  est.size = kmax - kmin;
  if (kmin == kmax) {
    est.log_value = std::log(std::abs(p.at({kmin})));
    return est;
  }
  std::vector<cplx> coeffs(static_cast<std::size_t>(kmax - kmin + 1), cplx(0.0));
  for (const auto& [e, c] : p.coeffs()) coeffs[static_cast<std::size_t>(e[0] - kmin)] = c;
  const RootSet roots = poly_roots(coeffs);
  double m = std::log(std::abs(coeffs.back()));
  for (const cplx& r : roots.roots) {
    const double a = std::abs(r);
    if (a > 1.0) m += std::log(a);
  }
  est.log_value = m;
  return est;
}

// ---------------------------------------------------------------------------
// Szego / Toeplitz determinant sequence. The input must be real and >= 0 on
// the circle, either structurally (a positive square) or verified on a
// 4096-point offset grid. Moments are read off as the Fourier coefficients.
// ---------------------------------------------------------------------------

struct SzegoRow {
  std::int64_t n = 0;
  double log_det = 0.0;   // log D_n
  double nth_root = 0.0;  // log D_n / n
  double ratio = 0.0;     // log D_{n+1} - log D_n
};

struct SzegoResult {
  std::vector<SzegoRow> rows;
};

namespace szego_detail {

inline SzegoResult from_moments(const LaurentPolynomial& p, std::int64_t nmax) {
  std::vector<cplx> moments(static_cast<std::size_t>(nmax + 1), cplx(0.0));
  for (std::int64_t k = 0; k <= nmax; ++k) moments[static_cast<std::size_t>(k)] = p.at({k});
  const std::vector<double> logdets = toeplitz_logdet_sequence(moments);
  SzegoResult out;
  out.rows.reserve(static_cast<std::size_t>(nmax));
  for (std::int64_t k = 1; k <= nmax; ++k) {
    SzegoRow row;
    row.n = k;
    row.log_det = logdets[static_cast<std::size_t>(k - 1)];
    row.nth_root = row.log_det / static_cast<double>(k);
    row.ratio = logdets[static_cast<std::size_t>(k)] - row.log_det;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace szego_detail

inline SzegoResult szego_sequence(const LaurentPolynomial& p, std::int64_t nmax) {
  if (p.dim() != 1) throw precondition_error("Szego sequence needs one variable");
  if (p.zero()) throw precondition_error("the symbol must not vanish identically");
  if (nmax < 1) throw precondition_error("nmax must be >= 1");
  const double scale = [&] {
    double s = 0.0;
    for (const auto& [e, c] : p.coeffs()) s += std::abs(c);
    return s + 1.0;
  }();
  for (const auto& [e, c] : p.coeffs())
    if (std::abs(std::conj(p.at({-e[0]})) - c) > 1e-12 * scale)
      throw precondition_error("symbol is not real-valued on the circle");
  const GridValues g = grid_eval(p, 4096, true);
  for (const cplx& v : g.values)
    if (v.real() < -1e-9 * scale || std::abs(v.imag()) > 1e-9 * scale)
      throw precondition_error("negativity detected on the verification grid");
  return szego_detail::from_moments(p, nmax);
}

inline SzegoResult szego_sequence(const PositiveElement& f, std::int64_t nmax) {
  if (f.element().model().kind() != GroupKind::lattice || f.element().model().rank() != 1)
    throw precondition_error("Szego sequence needs an element over Z");
  if (nmax < 1) throw precondition_error("nmax must be >= 1");
  return szego_detail::from_moments(from_groupring(f.element()), nmax);
}

// ---------------------------------------------------------------------------
// Folner compression: the matrix of A on CF has entry (g, h) = f(g^{-1} h).
// Over Z with F = {0..n-1} this is exactly the moment Toeplitz matrix.
// ---------------------------------------------------------------------------

struct TruncationMatrix {
  FolnerSet domain;
  Matrix mat;
};

namespace compress_detail {

inline Matrix compression(const GroupRingElement& f, const std::vector<GroupElt>& elems,
                          const std::map<GroupElt, std::int64_t>& index) {
  const std::int64_t dim = static_cast<std::int64_t>(elems.size());
  if (dim > kDenseDimCap)
    throw resource_error("dense compression limited to dimension 2048", dim);
  Matrix m(dim);
  const Group& model = f.model();
  for (std::int64_t i = 0; i < dim; ++i)
    for (const auto& [g, c] : f.coeffs()) {
      auto it = index.find(model.mul(elems[static_cast<std::size_t>(i)], g));
      if (it != index.end()) m(i, it->second) = c;
    }
  return m;
}

}  // namespace compress_detail

inline TruncationMatrix folner_matrix(const Group& model, const GroupRingElement& f,
                                      const FolnerSet& domain) {
  if (f.model() != model)
    throw precondition_error("element does not live over the given model");
  Matrix m = compress_detail::compression(f, domain.elems, domain.index);
  return {domain, std::move(m)};
}

// Per size n: log estimate = log det A_{F_n} / |F_n|. Positivity failures are
// recorded as -infinity and the sequence continues. The finite terms approach
// the limit from below in the limsup sense, so the largest-n entry is the one
// to compare against a value of record.
inline std::vector<DetEstimate> folner_det_sequence(const Group& model,
                                                    const PositiveElement& f,
                                                    const std::vector<std::int64_t>& sizes) {
  std::vector<DetEstimate> out;
  for (std::int64_t n : sizes) {
    if (model.kind() == GroupKind::heisenberg && n > kHeisenbergFolnerCap)
      throw resource_error("Heisenberg Folner sizes limited to n <= 6", n);
    const FolnerSet domain = folner_set(model, n);
    const TruncationMatrix tm = folner_matrix(model, f.element(), domain);
    DetEstimate est;
    est.scheme = Scheme::folner;
    est.size = n;
    est.certificate = f.certificate();
    try {
      const LogDet ld = cholesky_logdet(tm.mat);
      est.log_value = ld.log_abs / static_cast<double>(domain.elems.size());
    } catch (const not_positive_definite&) {
      est.log_value = -std::numeric_limits<double>::infinity();
      est.minus_infinity = true;
    }
    out.push_back(std::move(est));
  }
  return out;
}

// Same estimate over an explicitly given box (alternate Folner shapes).
inline DetEstimate folner_det_box(const Group& model, const PositiveElement& f,
                                  const std::vector<std::int64_t>& sizes) {
  const FolnerSet domain = folner_box(model, sizes);
  const TruncationMatrix tm = folner_matrix(model, f.element(), domain);
  DetEstimate est;
  est.scheme = Scheme::folner;
  est.size = static_cast<std::int64_t>(domain.elems.size());
  est.certificate = f.certificate();
  try {
    const LogDet ld = cholesky_logdet(tm.mat);
    est.log_value = ld.log_abs / static_cast<double>(domain.elems.size());
  } catch (const not_positive_definite&) {
    est.log_value = -std::numeric_limits<double>::infinity();
    est.minus_infinity = true;
  }
  return est;
}

// ---------------------------------------------------------------------------
// Finite-quotient determinants: |det r(f_n)|^{1/|G|} in log scale. For
// Z^d -> (Z/N)^d the spectrum is the exact root-of-unity grid, giving an FFT
// fast path that must agree with the dense LU path.
// ---------------------------------------------------------------------------

inline DetEstimate quotient_det_dense(const Homomorphism& phi, const GroupRingElement& f) {
  if (!phi.target().finite())
    throw precondition_error("dense quotient determinant needs a finite target");
  const GroupRingElement fn = pushforward(phi, f);
  const std::vector<GroupElt> elems = phi.target().elements();
  std::map<GroupElt, std::int64_t> index;
  for (std::size_t i = 0; i < elems.size(); ++i)
    index.emplace(elems[i], static_cast<std::int64_t>(i));
  const Matrix m = compress_detail::compression(fn, elems, index);
  const LogDet ld = lu_logabsdet(m);
  DetEstimate est;
  est.scheme = Scheme::quotient;
  est.size = static_cast<std::int64_t>(elems.size());
  est.log_value = ld.log_abs / static_cast<double>(elems.size());
  est.minus_infinity = ld.zero_pivot;
  return est;
}

inline DetEstimate quotient_det_fft(const Homomorphism& phi, const GroupRingElement& f) {
  if (phi.source().kind() != GroupKind::lattice ||
      phi.target().kind() != GroupKind::lattice_mod)
    throw precondition_error("the FFT quotient path needs Z^d -> (Z/n_1)x...x(Z/n_d)");
  const std::vector<std::int64_t>& mods = phi.target().moduli();
  const LaurentPolynomial p = from_groupring(f);
  const std::int64_t d = p.dim();

  bool uniform = true;
  for (std::int64_t m : mods) uniform = uniform && m == mods[0];

  long double acc = 0.0;
  bool vanished = false;
  std::int64_t total = 1;
  for (std::int64_t m : mods) total *= m;

  const auto absorb = [&](cplx v) {
    const double a = std::abs(v);
    if (a < 1e-300)
      vanished = true;
    else
      acc += std::log(a);
  };

  if (total > kGridPointBudget)
    throw resource_error("quotient grid exceeds the point budget", total);
  if (uniform) {
    const GridValues g = grid_eval(p, mods[0], false);
    for (const cplx& v : g.values) absorb(v);
  } else {
    std::vector<std::int64_t> k(static_cast<std::size_t>(d), 0);
    for (std::int64_t idx = 0; idx < total; ++idx) {
      double phase = 0.0;
      cplx v = 0.0;
      for (const auto& [e, c] : p.coeffs()) {
        phase = 0.0;
        for (std::int64_t j = 0; j < d; ++j)
          phase += static_cast<double>(e[static_cast<std::size_t>(j)]) *
                   static_cast<double>(k[static_cast<std::size_t>(j)]) /
                   static_cast<double>(mods[static_cast<std::size_t>(j)]);
        v += c * std::polar(1.0, 2.0 * std::numbers::pi * phase);
      }
      absorb(v);
      std::int64_t axis = d - 1;
      while (axis >= 0) {
        if (++k[static_cast<std::size_t>(axis)] < mods[static_cast<std::size_t>(axis)]) break;
        k[static_cast<std::size_t>(axis)] = 0;
        --axis;
      }
    }
  }

  DetEstimate est;
  est.scheme = Scheme::quotient;
  est.size = total;
  if (vanished) {
    est.log_value = -std::numeric_limits<double>::infinity();
    est.minus_infinity = true;
  } else {
    est.log_value = static_cast<double>(acc / static_cast<long double>(total));
  }
  return est;
}

// General entry point. Finite targets use the dense path (FFT beyond the
// dense budget); a cyclic-image target D(r)Z is handled through the one-
// variable Mahler measure of the pushforward.
inline DetEstimate quotient_det(const Homomorphism& phi, const GroupRingElement& f) {
  if (phi.target().kind() == GroupKind::cyclic_image && !phi.target().finite()) {
    const GroupRingElement fn = pushforward(phi, f);
    DetEstimate est;
    est.scheme = Scheme::quotient;
    if (fn.empty()) {
      est.log_value = -std::numeric_limits<double>::infinity();
      est.minus_infinity = true;
      return est;
    }
    LaurentPolynomial p(1);
    for (const auto& [g, c] : fn.coeffs()) p.set({g[0]}, c);
    const DetEstimate j = mahler_jensen(p);
    est.size = j.size;
    est.log_value = j.log_value;
    return est;
  }
  if (!phi.target().finite())
    throw precondition_error("quotient determinant needs a finite or cyclic-image target");
  if (phi.target().kind() == GroupKind::lattice_mod && phi.target().order() > 1024)
    return quotient_det_fft(phi, f);
  return quotient_det_dense(phi, f);
}

struct QuotientSequence {
  std::vector<DetEstimate> estimates;
  bool certified = false;
  std::string note;
};

// Without a certificate the finite estimates are only guaranteed to stay
// below the limit in the limsup sense; with one, the sequence converges to
// the determinant itself. Works unchanged for correspondences: pass the maps
// out of the common source and the pushforward element.
inline QuotientSequence quotient_det_sequence(
    const std::vector<Homomorphism>& homs, const GroupRingElement& f,
    const std::optional<InvertibilityCertificate>& cert = std::nullopt,
    const std::vector<std::int64_t>& labels = {}) {
  if (!labels.empty() && labels.size() != homs.size())
    throw precondition_error("one label per homomorphism");
  QuotientSequence out;
  out.certified = cert.has_value();
  out.note = out.certified
                 ? std::string("invertibility certified (") + certificate_name(cert->kind) +
                       "); the sequence converges to the determinant"
                 : "no invertibility certificate; finite estimates only bound the "
                   "determinant from below in the limsup sense";
  for (std::size_t i = 0; i < homs.size(); ++i) {
    DetEstimate est = quotient_det(homs[i], f);
    if (out.certified) est.certificate = certificate_name(cert->kind);
    if (!labels.empty()) est.size = labels[i];
    out.estimates.push_back(std::move(est));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Incremental orthogonalization along a chain gamma_1, gamma_2, ... with the
// A-twisted inner product. Each step yields the component Phi of the new
// element orthogonal to the span of the previous ones; its squared norm is
// trace(f) - (A_F^{-1} s, s) and multiplies onto the running determinant.
// ---------------------------------------------------------------------------

struct OrthogonalStep {
  GroupElt gamma;
  std::vector<cplx> phi_coeffs;  // over F_k + {gamma}; the gamma slot is exactly 1
  double phi_norm_sq = 0.0;      // in (0, trace(f)]
  double running_logdet = 0.0;   // log det A_{F_{k+1}}
};

inline std::vector<OrthogonalStep> orthogonal_chain(const Group& model,
                                                    const PositiveElement& f,
                                                    const std::vector<GroupElt>& chain) {
  const GroupRingElement& elt = f.element();
  if (elt.model() != model)
    throw precondition_error("element does not live over the given model");
  if (chain.empty()) throw precondition_error("chain must be nonempty");
  if (static_cast<std::int64_t>(chain.size()) > kDenseDimCap)
    throw resource_error("chain limited to length 2048",
                         static_cast<std::int64_t>(chain.size()));
  {
    std::map<GroupElt, int> seen;
    for (const GroupElt& g : chain)
      if (++seen[g] > 1) throw precondition_error("chain elements must be distinct");
  }
  const cplx tau_c = trace(elt);
  if (std::abs(tau_c.imag()) > 1e-9 * (1.0 + std::abs(tau_c)))
    throw precondition_error("trace of a positive element must be real");
  const double tau = tau_c.real();

  std::vector<OrthogonalStep> steps;
  steps.reserve(chain.size());
  double logdet = 0.0;
  const std::int64_t total = static_cast<std::int64_t>(chain.size());
  Matrix gram(total);
  for (std::int64_t i = 0; i < total; ++i)
    for (std::int64_t j = 0; j < total; ++j)
      gram(i, j) = elt.at(model.mul(model.inv(chain[static_cast<std::size_t>(i)]),
                                    chain[static_cast<std::size_t>(j)]));

  for (std::int64_t k = 0; k < total; ++k) {
    OrthogonalStep step;
    step.gamma = chain[static_cast<std::size_t>(k)];
    if (k == 0) {
      step.phi_norm_sq = tau;
      step.phi_coeffs = {cplx(1.0)};
    } else {
      Matrix mk(k);
      for (std::int64_t i = 0; i < k; ++i)
        for (std::int64_t j = 0; j < k; ++j) mk(i, j) = gram(i, j);
      CholFactors chol = [&] {
        try {
          return cholesky_factor(mk);
        } catch (const not_positive_definite&) {
          throw not_positive_definite("chain compression lost positivity", k);
        }
      }();
      std::vector<cplx> v(static_cast<std::size_t>(k));
      for (std::int64_t i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] = gram(i, k);
      const std::vector<cplx> u = cholesky_solve(chol, v);
      cplx quad = 0.0;
      for (std::int64_t i = 0; i < k; ++i)
        quad += std::conj(v[static_cast<std::size_t>(i)]) * u[static_cast<std::size_t>(i)];
      step.phi_norm_sq = tau - quad.real();
      step.phi_coeffs.resize(static_cast<std::size_t>(k + 1));
      for (std::int64_t i = 0; i < k; ++i)
        step.phi_coeffs[static_cast<std::size_t>(i)] = -std::conj(u[static_cast<std::size_t>(i)]);
      step.phi_coeffs[static_cast<std::size_t>(k)] = 1.0;
    }
    if (!(step.phi_norm_sq > 0.0))
      throw not_positive_definite("orthogonal step norm is not positive", k + 1);
    if (step.phi_norm_sq > tau + 1e-9)
      throw numeric_error("orthogonal step norm exceeds the trace");
    logdet += std::log(step.phi_norm_sq);
    step.running_logdet = logdet;
    steps.push_back(std::move(step));
  }
  return steps;
}

// ---------------------------------------------------------------------------
// Block determinant identity det [A B; C D] = det(D - C A^{-1} B) det A,
// checked against the direct LU determinant. Also the validator for the
// incremental chain update.
// ---------------------------------------------------------------------------

struct SchurCheck {
  double logdet_formula = 0.0;
  double logdet_direct = 0.0;
  double rel_err = 0.0;
  bool ok = false;
};

inline SchurCheck schur_det_check(const Matrix& m, std::int64_t split) {
  const std::int64_t n = m.dim();
  if (split < 1 || split >= n) throw precondition_error("split must cut a proper block");
  Matrix a(split);
  for (std::int64_t i = 0; i < split; ++i)
    for (std::int64_t j = 0; j < split; ++j) a(i, j) = m(i, j);
  const LuFactors fa = lu_factor(a);
  if (fa.zero_pivot) throw precondition_error("top-left block is singular");

  const std::int64_t rest = n - split;
  Matrix schur(rest);
  // columns of A^{-1} B
  for (std::int64_t j = 0; j < rest; ++j) {
    std::vector<cplx> col(static_cast<std::size_t>(split));
    for (std::int64_t i = 0; i < split; ++i)
      col[static_cast<std::size_t>(i)] = m(i, split + j);
    const std::vector<cplx> x = lu_solve(fa, col);
    for (std::int64_t i = 0; i < rest; ++i) {
      cplx acc = m(split + i, split + j);
      for (std::int64_t k = 0; k < split; ++k)
        acc -= m(split + i, k) * x[static_cast<std::size_t>(k)];
      schur(i, j) = acc;
    }
  }
  const LogDet ls = lu_logabsdet(schur);
  const LogDet ld = lu_logabsdet(m);
  SchurCheck out;
  out.logdet_formula = fa.log_abs + ls.log_abs;
  out.logdet_direct = ld.log_abs;
  out.rel_err = std::abs(out.logdet_formula - out.logdet_direct) /
                std::max(1.0, std::abs(out.logdet_direct));
  out.ok = out.rel_err <= 1e-9;
  return out;
}

// ---------------------------------------------------------------------------
// det <= |f|_2: the L^2-norm bound on the determinant, checked with the
// quadrature margin documented in the report.
// ---------------------------------------------------------------------------

struct L2BoundReport {
  DetEstimate estimate;
  double log_l2 = 0.0;
  bool holds = false;
};

inline L2BoundReport check_l2_bound(const GroupRingElement& f, std::int64_t grid_n = 0) {
  if (f.model().kind() != GroupKind::lattice)
    throw precondition_error("the L2 bound check needs a Z^d model");
  if (f.empty()) throw precondition_error("the zero element has no determinant bound");
  const std::int64_t d = f.model().rank();
  const LaurentPolynomial p = from_groupring(f);
  L2BoundReport out;
  if (d == 1)
    out.estimate = mahler_jensen(p);
  else
    out.estimate = mahler_quadrature(p, grid_n > 0 ? grid_n : (d == 2 ? 256 : 64));
  out.log_l2 = std::log(l2_norm(f));
  out.holds = out.estimate.log_value <= out.log_l2 + 1e-3;
  return out;
}

// ---------------------------------------------------------------------------
// Orthogonal-polynomial facts over Z for f = |Q|^2, F = {0..n-1}, gamma = n:
// the reflected orthogonal element has Mahler measure 1 and no zeros inside
// the open unit disc, and det(A) M(reflected)^2 <= D_{n+1} / D_n.
// ---------------------------------------------------------------------------

struct OrthoPolyReport {
  std::int64_t n = 0;
  double mahler_phi_tilde = 0.0;
  double min_reversed_root_modulus = 0.0;
  double log_mahler_p = 0.0;
  double log_ratio = 0.0;  // log(D_{n+1}/D_n)
  double slack = 0.0;      // log_ratio - log_mahler_p - 2 log mahler_phi_tilde
  bool mahler_one_ok = false;
  bool roots_ok = false;
  bool inequality_ok = false;
};

inline OrthoPolyReport check_cor12(const PositiveElement& f, std::int64_t n) {
  const Group& model = f.element().model();
  if (model.kind() != GroupKind::lattice || model.rank() != 1)
    throw precondition_error("the orthogonal-polynomial check runs over Z");
  if (n < 1) throw precondition_error("n must be >= 1");
  std::vector<GroupElt> chain;
  for (std::int64_t j = 0; j <= n; ++j) chain.push_back({j});
  const std::vector<OrthogonalStep> steps = orthogonal_chain(model, f, chain);
  const OrthogonalStep& last = steps.back();

  // The reflected element z^n Phi(1/z) has the reciprocal roots of the monic
  // Phi, so Jensen's formula runs on the well-conditioned monic side:
  // M(reflected) = prod max(1, |alpha_i|) and the smallest reflected-root
  // modulus is 1/max|alpha_i|.
  const RootSet phi_roots = poly_roots(last.phi_coeffs);
  double log_mahler_phi = 0.0;
  double max_mod = 0.0;
  for (const cplx& r : phi_roots.roots) {
    const double a = std::abs(r);
    if (a > 1.0) log_mahler_phi += std::log(a);
    max_mod = std::max(max_mod, a);
  }
  const double min_mod = max_mod == 0.0 ? std::numeric_limits<double>::infinity()
                                        : 1.0 / max_mod;

  OrthoPolyReport out;
  out.n = n;
  out.mahler_phi_tilde = std::exp(log_mahler_phi);
  out.min_reversed_root_modulus = min_mod;
  out.log_mahler_p = mahler_jensen(from_groupring(f.element())).log_value;
  out.log_ratio = std::log(last.phi_norm_sq);
  out.slack = out.log_ratio - out.log_mahler_p - 2.0 * log_mahler_phi;
  out.mahler_one_ok = std::abs(out.mahler_phi_tilde - 1.0) <= 1e-6;
  out.roots_ok = min_mod >= 1.0 - 1e-8;
  out.inequality_ok = out.slack >= -1e-8;
  return out;
}

// ---------------------------------------------------------------------------
// Trace convergence under kernel escape: trace(p(f)) is computed exactly via
// convolution powers and compared with trace(p(f_n)); the deviation is
// dominated by the kernel mass of p(f) outside the identity.
// ---------------------------------------------------------------------------

struct TraceConvergenceRow {
  std::int64_t label = 0;
  cplx trace_quotient;
  double deviation = 0.0;
  double kernel_mass_bound = 0.0;
  bool dominated = false;
};

struct TraceConvergenceReport {
  cplx trace_exact;
  std::vector<TraceConvergenceRow> rows;
};

inline TraceConvergenceReport trace_poly_convergence(
    const GroupRingElement& f, const std::vector<cplx>& poly,
    const std::vector<Homomorphism>& homs, const std::vector<std::int64_t>& labels = {},
    const Homomorphism* reference = nullptr) {
  if (poly.empty() || poly.size() > 9)
    throw precondition_error("polynomial degree must be between 0 and 8");
  if (!labels.empty() && labels.size() != homs.size())
    throw precondition_error("one label per homomorphism");

  const auto apply_poly = [&](const GroupRingElement& x) {
    GroupRingElement acc = poly[0] * ring_unit(x.model());
    GroupRingElement power = ring_unit(x.model());
    for (std::size_t k = 1; k < poly.size(); ++k) {
      power = power * x;
      acc = acc + poly[k] * power;
    }
    return acc;
  };

  const GroupRingElement pf = apply_poly(f);
  TraceConvergenceReport out;
  out.trace_exact = reference ? trace(pushforward(*reference, pf)) : trace(pf);
  for (std::size_t i = 0; i < homs.size(); ++i) {
    const Homomorphism& h = homs[i];
    TraceConvergenceRow row;
    row.label = labels.empty() ? static_cast<std::int64_t>(i + 1) : labels[i];
    row.trace_quotient = trace(apply_poly(pushforward(h, f)));
    row.deviation = std::abs(out.trace_exact - row.trace_quotient);
    const GroupElt id = f.model().identity();
    double mass = 0.0;
    for (const auto& [g, c] : pf.coeffs()) {
      const bool in_n = h.in_kernel(g);
      const bool in_ref = reference ? reference->in_kernel(g) : (g == id);
      if (in_n != in_ref) mass += std::abs(c);
    }
    row.kernel_mass_bound = mass;
    row.dominated = row.deviation <= mass + 1e-12 * (1.0 + std::abs(out.trace_exact));
    out.rows.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Continuity probe for z -> M(z - P): sample along a segment at a list of
// refining meshes and report the largest adjacent jump per mesh. An empirical
// probe, not a proof; the acceptance property is that refining the mesh never
// increases the largest jump.
// ---------------------------------------------------------------------------

struct BoydScan {
  std::vector<double> meshes;
  std::vector<double> max_jumps;
  std::vector<std::vector<double>> samples;
  bool non_increasing = false;
};

inline BoydScan boyd_scan(const LaurentPolynomial& p, cplx z0, cplx z1,
                          const std::vector<double>& meshes, std::int64_t grid_n = 0) {
  if (meshes.empty()) throw precondition_error("need at least one mesh");
  for (std::size_t i = 0; i + 1 < meshes.size(); ++i)
    if (!(meshes[i + 1] < meshes[i]))
      throw precondition_error("mesh sizes must be strictly decreasing");
  const std::int64_t n = grid_n > 0 ? grid_n : (p.dim() == 1 ? 4096 : 256);

  BoydScan out;
  out.meshes = meshes;
  for (double h : meshes) {
    if (!(h > 0.0) || h > 1.0) throw precondition_error("mesh sizes must lie in (0, 1]");
    const std::int64_t segments = std::max<std::int64_t>(1, std::llround(1.0 / h));
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(segments + 1));
    for (std::int64_t t = 0; t <= segments; ++t) {
      const cplx z = z0 + (z1 - z0) * (static_cast<double>(t) / static_cast<double>(segments));
      const LaurentPolynomial shifted = laurent_constant(p.dim(), z) - p;
      double m = -std::numeric_limits<double>::infinity();
      if (!shifted.zero()) {
        try {
          m = mahler_quadrature(shifted, n).log_value;
        } catch (const numeric_error&) {
        }
      }
      vals.push_back(m);
    }
    double jump = 0.0;
    for (std::size_t t = 0; t + 1 < vals.size(); ++t)
      if (std::isfinite(vals[t]) && std::isfinite(vals[t + 1]))
        jump = std::max(jump, std::abs(vals[t + 1] - vals[t]));
    out.max_jumps.push_back(jump);
    out.samples.push_back(std::move(vals));
  }
  out.non_increasing = true;
  for (std::size_t i = 0; i + 1 < out.max_jumps.size(); ++i)
    out.non_increasing = out.non_increasing && out.max_jumps[i + 1] <= out.max_jumps[i] + 1e-12;
  return out;
}

// ---------------------------------------------------------------------------
// Logged probes. These report, they never assert: the underlying questions
// are open and the runs are labeled as such.
// ---------------------------------------------------------------------------

struct DivergenceProbe {
  DetEstimate record;                   // torus value of record (Jensen)
  std::vector<DetEstimate> quotients;   // finite-quotient estimates
  bool discrepancy_flagged = false;
  std::string label;
};

// f = 1 - x over Z: the Mahler measure is 0 while every finite cyclic
// quotient determinant vanishes. Logs the divergence for a non-invertible
// input without asserting anything about the limit.
inline DivergenceProbe probe_noninvertible_quotients(const std::vector<std::int64_t>& ns) {
  const Group z = Group::lattice(1);
  GroupRingElement f(z);
  f.set({0}, 1.0);
  f.set({1}, -1.0);
  DivergenceProbe out;
  out.record = mahler_jensen(from_groupring(f));
  for (std::int64_t n : ns) {
    if (n < 1) throw precondition_error("quotient indices must be >= 1");
    out.quotients.push_back(quotient_det(quotient_hom(z, Group::lattice_mod({n})), f));
  }
  bool any_minus_inf = false;
  for (const DetEstimate& e : out.quotients) any_minus_inf = any_minus_inf || e.minus_infinity;
  out.discrepancy_flagged = any_minus_inf && std::isfinite(out.record.log_value);
  out.label =
      "probe, not assertion: finite-quotient estimates diverge from the torus value "
      "for a non-invertible input";
  return out;
}

struct FolnerShapeProbe {
  std::vector<DetEstimate> square_boxes;
  std::vector<DetEstimate> rectangles;  // n x 2n boxes
  std::string label;
};

// Squares vs. stretched rectangles over Z^2 for the same positive element;
// whether every Folner sequence gives the same limit is open, so the two runs
// are only logged side by side.
inline FolnerShapeProbe probe_folner_shapes(const PositiveElement& f,
                                            const std::vector<std::int64_t>& sizes) {
  const Group z2 = Group::lattice(2);
  if (f.element().model() != z2)
    throw precondition_error("the Folner shape probe runs over Z^2");
  FolnerShapeProbe out;
  out.square_boxes = folner_det_sequence(z2, f, sizes);
  for (std::int64_t n : sizes) out.rectangles.push_back(folner_det_box(z2, f, {n, 2 * n}));
  out.label = "probe, not assertion: alternate Folner shapes logged side by side";
  return out;
}

}  // namespace fkdet
