#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "fkdet/errors.hpp"

namespace fkdet {

using cplx = std::complex<double>;

// Pivots below this are treated as exact zeros; the determinant is -inf.
inline constexpr double kPivotFloor = 1e-300;

// ---------------------------------------------------------------------------
// Dense square complex matrix, row-major.
// ---------------------------------------------------------------------------

class Matrix {
 public:
  Matrix() : n_(0) {}
  explicit Matrix(std::int64_t n)
      : n_(n), a_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    if (n < 0) throw precondition_error("matrix dimension must be nonnegative");
  }

  static Matrix identity(std::int64_t n) {
    Matrix m(n);
    for (std::int64_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::int64_t dim() const { return n_; }

  cplx& operator()(std::int64_t i, std::int64_t j) {
    return a_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)];
  }
  const cplx& operator()(std::int64_t i, std::int64_t j) const {
    return a_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)];
  }

  bool all_finite() const {
    for (const cplx& v : a_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  Matrix adjoint() const {
    Matrix r(n_);
    for (std::int64_t i = 0; i < n_; ++i)
      for (std::int64_t j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    if (x.n_ != y.n_) throw precondition_error("matrix dimensions differ");
    Matrix r(x.n_);
    for (std::int64_t i = 0; i < x.n_; ++i)
      for (std::int64_t k = 0; k < x.n_; ++k) {
        const cplx xv = x(i, k);
        if (xv == cplx(0.0)) continue;
        for (std::int64_t j = 0; j < x.n_; ++j) r(i, j) += xv * y(k, j);
      }
    return r;
  }

 private:
  std::int64_t n_;
  std::vector<cplx> a_;
};

struct LogDet {
  double log_abs;   // log |det|, -inf when a pivot vanished
  bool zero_pivot;  // set when some pivot fell below kPivotFloor
};

// ---------------------------------------------------------------------------
// LU with partial pivoting (largest modulus, lowest index on ties).
// ---------------------------------------------------------------------------

struct LuFactors {
  Matrix lu;
  std::vector<std::int64_t> perm;
  bool zero_pivot = false;
  double log_abs = 0.0;
};

inline LuFactors lu_factor(Matrix m) {
  if (!m.all_finite()) throw precondition_error("matrix has non-finite entries");
  const std::int64_t n = m.dim();
  LuFactors f{std::move(m), {}, false, 0.0};
  f.perm.resize(n);
  for (std::int64_t i = 0; i < n; ++i) f.perm[i] = i;
  Matrix& a = f.lu;
  for (std::int64_t k = 0; k < n; ++k) {
    std::int64_t p = k;
    double best = std::abs(a(k, k));
    for (std::int64_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (p != k) {
      for (std::int64_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(f.perm[k], f.perm[p]);
    }
    const cplx piv = a(k, k);
    if (std::abs(piv) < kPivotFloor) {
      f.zero_pivot = true;
      f.log_abs = -std::numeric_limits<double>::infinity();
      return f;
    }
    f.log_abs += std::log(std::abs(piv));
    for (std::int64_t i = k + 1; i < n; ++i) {
      const cplx mult = a(i, k) / piv;
      a(i, k) = mult;
      if (mult == cplx(0.0)) continue;
      for (std::int64_t j = k + 1; j < n; ++j) a(i, j) -= mult * a(k, j);
    }
  }
  return f;
}

inline LogDet lu_logabsdet(const Matrix& m) {
  if (m.dim() < 1) throw precondition_error("matrix must have dimension >= 1");
  LuFactors f = lu_factor(m);
  return {f.log_abs, f.zero_pivot};
}

inline std::vector<cplx> lu_solve(const LuFactors& f, const std::vector<cplx>& b) {
  const std::int64_t n = f.lu.dim();
  if (f.zero_pivot) throw numeric_error("singular system in lu_solve");
  if (static_cast<std::int64_t>(b.size()) != n)
    throw precondition_error("right-hand side size mismatch");
  std::vector<cplx> x(n);
  for (std::int64_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::int64_t i = 1; i < n; ++i)
    for (std::int64_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (std::int64_t i = n - 1; i >= 0; --i) {
    for (std::int64_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Cholesky for Hermitian positive definite matrices. Non-Hermitian input is a
// contract violation; a nonpositive pivot is reported as not_positive_definite
// (carrying the failing leading dimension), distinct from mere near-singularity.
// ---------------------------------------------------------------------------

struct CholFactors {
  Matrix l;           // lower triangular, M = L L^*
  double log_det;     // log det M (real, M positive definite)
};

inline void require_hermitian(const Matrix& m, double tol = 1e-10) {
  const std::int64_t n = m.dim();
  const double scale = std::max(1.0, m.max_abs());
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i; j < n; ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol * scale)
        throw precondition_error("matrix is not Hermitian");
}

inline CholFactors cholesky_factor(const Matrix& m) {
  if (m.dim() < 1) throw precondition_error("matrix must have dimension >= 1");
  if (!m.all_finite()) throw precondition_error("matrix has non-finite entries");
  require_hermitian(m);
  const std::int64_t n = m.dim();
  CholFactors f{Matrix(n), 0.0};
  Matrix& l = f.l;
  for (std::int64_t j = 0; j < n; ++j) {
    double d = m(j, j).real();
    for (std::int64_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0) || !std::isfinite(d))
      throw not_positive_definite("nonpositive Cholesky pivot", j + 1);
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    f.log_det += 2.0 * std::log(ljj);
    for (std::int64_t i = j + 1; i < n; ++i) {
      cplx s = m(i, j);
      for (std::int64_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return f;
}

inline LogDet cholesky_logdet(const Matrix& m) {
  CholFactors f = cholesky_factor(m);
  return {f.log_det, false};
}

inline std::vector<cplx> cholesky_solve(const CholFactors& f, const std::vector<cplx>& b) {
  const std::int64_t n = f.l.dim();
  if (static_cast<std::int64_t>(b.size()) != n)
    throw precondition_error("right-hand side size mismatch");
  std::vector<cplx> x = b;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < i; ++j) x[i] -= f.l(i, j) * x[j];
    x[i] /= f.l(i, i);
  }
  for (std::int64_t i = n - 1; i >= 0; --i) {
    for (std::int64_t j = i + 1; j < n; ++j) x[i] -= std::conj(f.l(j, i)) * x[j];
    x[i] /= f.l(i, i);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Levinson-Durbin recursion for Hermitian Toeplitz moment matrices.
//
// Input: moments c_0 .. c_{m-1} (negative lags implied by c_{-k} = conj c_k).
// Output: log D_k for k = 1..m, where D_k is the k-th leading principal
// determinant. O(m^2) total. A nonpositive prediction error means the matrix
// is not positive definite; the exception carries the failing k.
// ---------------------------------------------------------------------------

inline std::vector<double> toeplitz_logdet_sequence(const std::vector<cplx>& c) {
  if (c.empty()) throw precondition_error("need at least one moment");
  const double c0 = c[0].real();
  if (std::abs(c[0].imag()) > 1e-12 * std::max(1.0, std::abs(c0)))
    throw precondition_error("zeroth moment must be real");
  if (!(c0 > 0.0))
    throw not_positive_definite("zeroth moment must be positive", 1);

  const std::int64_t m = static_cast<std::int64_t>(c.size());
  std::vector<double> out;
  out.reserve(m);
  double err = c0;  // prediction error E_k = D_{k+1} / D_k
  double log_det = std::log(c0);
  out.push_back(log_det);
  std::vector<cplx> a;  // forward predictor coefficients a_1..a_k
  for (std::int64_t k = 1; k < m; ++k) {
    cplx acc = c[k];
    for (std::int64_t j = 1; j < k; ++j) acc -= a[j - 1] * c[k - j];
    const cplx kappa = acc / err;
    std::vector<cplx> next(k);
    for (std::int64_t j = 1; j < k; ++j)
      next[j - 1] = a[j - 1] - kappa * std::conj(a[k - j - 1]);
    next[k - 1] = kappa;
    a = std::move(next);
    err *= 1.0 - std::norm(kappa);
    if (!(err > 0.0) || !std::isfinite(err))
      throw not_positive_definite("Toeplitz prediction error vanished", k + 1);
    log_det += std::log(err);
    out.push_back(log_det);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polynomial roots by the Aberth-Ehrlich simultaneous iteration.
// Coefficients are ascending; the leading coefficient must be nonzero.
// ---------------------------------------------------------------------------

inline cplx poly_eval(const std::vector<cplx>& c, cplx z) {
  cplx y = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) y = y * z + c[i];
  return y;
}

struct RootSet {
  std::vector<cplx> roots;                     // repeated according to multiplicity
  std::vector<std::pair<cplx, int>> clusters;  // representative + count, radius 1e-7
};

inline RootSet poly_roots(std::vector<cplx> coeffs) {
  while (coeffs.size() > 1 && coeffs.back() == cplx(0.0)) coeffs.pop_back();
  if (coeffs.size() < 2)
    throw precondition_error("polynomial degree must be at least 1");

  // Factor out roots at the origin.
  std::size_t low = 0;
  while (low + 1 < coeffs.size() && coeffs[low] == cplx(0.0)) ++low;
  std::vector<cplx> zero_roots(low, cplx(0.0));
  std::vector<cplx> c(coeffs.begin() + static_cast<std::ptrdiff_t>(low), coeffs.end());

  const std::int64_t deg = static_cast<std::int64_t>(c.size()) - 1;
  std::vector<cplx> roots;
  if (deg == 1) {
    roots.push_back(-c[0] / c[1]);
  } else {
    double mx = 0.0;
    for (const cplx& v : c) mx = std::max(mx, std::abs(v));
    for (cplx& v : c) v /= mx;
    std::vector<cplx> dc(deg);
    for (std::int64_t i = 1; i <= deg; ++i) dc[i - 1] = c[i] * static_cast<double>(i);

    double bound = 0.0;
    for (std::int64_t i = 0; i < deg; ++i)
      bound = std::max(bound, std::abs(c[i] / c[deg]));
    bound += 1.0;

    // Perturbed circle of starting points; golden-ratio stagger breaks the
    // symmetric stalls of even polynomials.
    std::vector<cplx> z(deg);
    for (std::int64_t i = 0; i < deg; ++i) {
      const double frac = std::fmod(0.6180339887498949 * static_cast<double>(i + 1), 1.0);
      const double radius = 0.5 * bound * (0.6 + 0.5 * frac);
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / deg + 0.376999;
      z[i] = std::polar(radius, angle);
    }

    std::vector<char> frozen(deg, 0);
    for (int sweep = 0; sweep < 500; ++sweep) {
      bool all_frozen = true;
      for (std::int64_t i = 0; i < deg; ++i) {
        if (frozen[i]) continue;
        const cplx pv = poly_eval(c, z[i]);
        if (pv == cplx(0.0)) {
          frozen[i] = 1;
          continue;
        }
        const cplx dv = poly_eval(dc, z[i]);
        if (dv == cplx(0.0)) {
          z[i] += cplx(1e-6 * (1.0 + std::abs(z[i])), 1e-6);
          all_frozen = false;
          continue;
        }
        const cplx w = pv / dv;
        cplx repel = 0.0;
        for (std::int64_t j = 0; j < deg; ++j) {
          if (j == i) continue;
          cplx diff = z[i] - z[j];
          if (std::abs(diff) < 1e-30) diff = cplx(1e-12, 1e-12);
          repel += 1.0 / diff;
        }
        const cplx denom = cplx(1.0) - w * repel;
        const cplx step = std::abs(denom) < 1e-30 ? w : w / denom;
        z[i] -= step;
        if (std::abs(step) <= 1e-13 * (1.0 + std::abs(z[i])))
          frozen[i] = 1;
        else
          all_frozen = false;
      }
      if (all_frozen) break;
    }

    // The residual, not the stopping rule, is the actual gate.
    for (std::int64_t i = 0; i < deg; ++i) {
      const double res = std::abs(poly_eval(c, z[i]));
      if (!(res <= 1e-8) || !std::isfinite(std::abs(z[i])))
        throw numeric_error("root finder failed to converge (residual " +
                            std::to_string(res) + " at root " + std::to_string(i) + ")");
    }
    roots = std::move(z);
  }

  roots.insert(roots.end(), zero_roots.begin(), zero_roots.end());
  std::sort(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  RootSet out;
  out.roots = roots;
  for (const cplx& r : roots) {
    if (!out.clusters.empty() && std::abs(out.clusters.back().first - r) <= 1e-7)
      ++out.clusters.back().second;
    else
      out.clusters.emplace_back(r, 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// FFT: radix-2 for powers of two, Bluestein otherwise. fft_any computes the
// unnormalized transform sum_j x_j e^{sign 2 pi i jk / n}.
// ---------------------------------------------------------------------------

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void fft_pow2(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<cplx> table(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k)
    table[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                                   static_cast<double>(n));
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const cplx u = a[i + j];
        const cplx v = a[i + j + len / 2] * table[j * stride];
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
}

inline void fft_any(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  if (is_pow2(n)) {
    fft_pow2(a, sign);
    return;
  }
  // Bluestein: phases via j^2 mod 2n to keep the chirp exact for large j.
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<cplx> u(m, cplx(0.0)), v(m, cplx(0.0));
  const double base = std::numbers::pi / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::int64_t t = static_cast<std::int64_t>((j * j) % (2 * n));
    u[j] = a[j] * std::polar(1.0, sign * base * static_cast<double>(t));
  }
  for (std::size_t j = 0; j < n; ++j) {
    const std::int64_t t = static_cast<std::int64_t>((j * j) % (2 * n));
    v[j] = std::polar(1.0, -sign * base * static_cast<double>(t));
    if (j > 0) v[m - j] = v[j];
  }
  fft_pow2(u, -1);
  fft_pow2(v, -1);
  for (std::size_t k = 0; k < m; ++k) u[k] *= v[k];
  fft_pow2(u, +1);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) {
    const std::int64_t t = static_cast<std::int64_t>((k * k) % (2 * n));
    a[k] = u[k] * scale * std::polar(1.0, sign * base * static_cast<double>(t));
  }
}

inline std::vector<cplx> fft(std::vector<cplx> a) {
  fft_any(a, -1);
  return a;
}

inline std::vector<cplx> ifft(std::vector<cplx> a) {
  fft_any(a, +1);
  const double scale = a.empty() ? 1.0 : 1.0 / static_cast<double>(a.size());
  for (cplx& v : a) v *= scale;
  return a;
}

}  // namespace fkdet
