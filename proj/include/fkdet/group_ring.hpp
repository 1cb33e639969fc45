#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fkdet/errors.hpp"
#include "fkdet/group.hpp"
#include "fkdet/numerics.hpp"

namespace fkdet {

// ---------------------------------------------------------------------------
// Finitely supported elements f = sum_g f_g g of the complex group ring,
// viewed inside L^1. Exact sparsity: coefficients equal to zero are dropped,
// so ring identities hold up to floating-point rounding only.
// ---------------------------------------------------------------------------

class GroupRingElement {
 public:
  explicit GroupRingElement(Group model) : model_(std::move(model)) {}

  const Group& model() const { return model_; }
  const std::map<GroupElt, cplx>& coeffs() const { return c_; }
  bool empty() const { return c_.empty(); }

  cplx at(const GroupElt& g) const {
    auto it = c_.find(g);
    return it == c_.end() ? cplx(0.0) : it->second;
  }

  void set(const GroupElt& g, cplx v) {
    if (!model_.valid_form(g))
      throw precondition_error("support element is not in canonical form");
    if (v == cplx(0.0))
      c_.erase(g);
    else
      c_[g] = v;
  }

  void add_to(const GroupElt& g, cplx v) {
    if (!model_.valid_form(g))
      throw precondition_error("support element is not in canonical form");
    auto it = c_.find(g);
    if (it == c_.end()) {
      if (v != cplx(0.0)) c_.emplace(g, v);
      return;
    }
    it->second += v;
    if (it->second == cplx(0.0)) c_.erase(it);
  }

  bool operator==(const GroupRingElement& o) const {
    return model_ == o.model_ && c_ == o.c_;
  }
  bool operator!=(const GroupRingElement& o) const { return !(*this == o); }

 private:
  Group model_;
  std::map<GroupElt, cplx> c_;
};

inline GroupRingElement ring_unit(const Group& model) {
  GroupRingElement f(model);
  f.set(model.identity(), 1.0);
  return f;
}

inline GroupRingElement ring_monomial(const Group& model, const GroupElt& g, cplx c = 1.0) {
  GroupRingElement f(model);
  f.set(g, c);
  return f;
}

inline void require_same_model(const GroupRingElement& f, const GroupRingElement& g) {
  if (f.model() != g.model())
    throw precondition_error("group-ring elements live over different models");
}

inline GroupRingElement operator+(const GroupRingElement& f, const GroupRingElement& g) {
  require_same_model(f, g);
  GroupRingElement out = f;
  for (const auto& [k, v] : g.coeffs()) out.add_to(k, v);
  return out;
}

inline GroupRingElement operator-(const GroupRingElement& f, const GroupRingElement& g) {
  require_same_model(f, g);
  GroupRingElement out = f;
  for (const auto& [k, v] : g.coeffs()) out.add_to(k, -v);
  return out;
}

inline GroupRingElement operator*(cplx s, const GroupRingElement& f) {
  GroupRingElement out(f.model());
  if (s == cplx(0.0)) return out;
  for (const auto& [k, v] : f.coeffs()) out.set(k, s * v);
  return out;
}

// Convolution (f g)_c = sum_{ab = c} f_a g_b with exact support bookkeeping.
inline GroupRingElement operator*(const GroupRingElement& f, const GroupRingElement& g) {
  require_same_model(f, g);
  GroupRingElement out(f.model());
  const Group& model = f.model();
  for (const auto& [a, fa] : f.coeffs())
    for (const auto& [b, gb] : g.coeffs()) out.add_to(model.mul(a, b), fa * gb);
  return out;
}

// f* = sum conj(f_g) g^{-1}
inline GroupRingElement star(const GroupRingElement& f) {
  GroupRingElement out(f.model());
  for (const auto& [g, v] : f.coeffs()) out.add_to(f.model().inv(g), std::conj(v));
  return out;
}

inline double l1_norm(const GroupRingElement& f) {
  double s = 0.0;
  for (const auto& [g, v] : f.coeffs()) s += std::abs(v);
  return s;
}

inline double l2_norm(const GroupRingElement& f) {
  double s = 0.0;
  for (const auto& [g, v] : f.coeffs()) s += std::norm(v);
  return std::sqrt(s);
}

// tau(f) = coefficient of the identity.
inline cplx trace(const GroupRingElement& f) { return f.at(f.model().identity()); }

namespace ring_detail {

// Exact self-adjoint symmetrization: pair each gamma with its inverse and
// average; the pair is processed at its smaller present key.
inline GroupRingElement symmetrize(const GroupRingElement& f) {
  GroupRingElement sym(f.model());
  for (const auto& [g, v] : f.coeffs()) {
    const GroupElt gi = f.model().inv(g);
    if (gi < g && f.coeffs().count(gi)) continue;
    if (gi == g) {
      sym.set(g, cplx(v.real(), 0.0));
    } else {
      const cplx avg = 0.5 * (v + std::conj(f.at(gi)));
      sym.set(g, avg);
      sym.set(gi, std::conj(avg));
    }
  }
  return sym;
}

}  // namespace ring_detail

// f* f, symmetrized so the self-adjointness is exact coefficient-wise.
inline GroupRingElement positive_square(const GroupRingElement& f) {
  return ring_detail::symmetrize(star(f) * f);
}

// (phi_* f)_{g'} = sum over the fiber phi(g) = g' of f_g.
inline GroupRingElement pushforward(const Homomorphism& phi, const GroupRingElement& f) {
  if (f.model() != phi.source())
    throw precondition_error("element does not live on the source of the homomorphism");
  GroupRingElement out(phi.target());
  for (const auto& [g, v] : f.coeffs()) out.add_to(phi.apply(g), v);
  return out;
}

// ---------------------------------------------------------------------------
// Invertibility certificates.
// ---------------------------------------------------------------------------

struct InvertibilityCertificate {
  enum class Kind { neumann, wiener_grid };
  Kind kind;
  // neumann: certified upper bound on |f^{-1}|_1
  // wiener_grid: certified positive lower bound on min_{T^d} |P|
  double bound = 0.0;
  std::int64_t grid_n = 0;
  std::vector<double> lipschitz;
};

inline const char* certificate_name(InvertibilityCertificate::Kind k) {
  return k == InvertibilityCertificate::Kind::neumann ? "neumann" : "wiener-grid";
}

// Writes f = c e + g with c = f_e and certifies invertibility in L^1 when
// |g|_1 < |c|, with |f^{-1}|_1 <= 1 / (|c| - |g|_1). Rejection (nullopt) is
// not a proof of non-invertibility.
inline std::optional<InvertibilityCertificate> neumann_certificate(const GroupRingElement& f) {
  const cplx c = trace(f);
  const double tail = l1_norm(f) - std::abs(c);
  if (!(tail < std::abs(c))) return std::nullopt;
  InvertibilityCertificate cert;
  cert.kind = InvertibilityCertificate::Kind::neumann;
  cert.bound = 1.0 / (std::abs(c) - tail);
  return cert;
}

// Truncated geometric-series inverse of f = c e + g, valid under the Neumann
// certificate. Truncation depth k satisfies (|g|_1/|c|)^k < tol, capped at
// 10^4 terms.
inline GroupRingElement neumann_inverse(const GroupRingElement& f, double tol = 1e-12,
                                        std::int64_t max_terms = 10000) {
  if (!neumann_certificate(f))
    throw precondition_error("no Neumann certificate: |f - f_e e|_1 >= |f_e|");
  const cplx c = trace(f);
  GroupRingElement g = f;
  g.add_to(f.model().identity(), -c);
  const double rho = l1_norm(g) / std::abs(c);

  std::int64_t terms = 1;
  double p = 1.0;
  while (p >= tol && terms < max_terms) {
    p *= rho;
    ++terms;
  }
  GroupRingElement acc = (1.0 / c) * ring_unit(f.model());
  GroupRingElement power = acc;
  for (std::int64_t k = 1; k < terms; ++k) {
    power = (-1.0 / c) * (power * g);
    acc = acc + power;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Positivity is certified structurally: either f = q* q, or f is self-adjoint
// and diagonally dominant (which pins the spectrum inside
// [f_e - |f - f_e e|_1, f_e + |f - f_e e|_1] away from zero).
// ---------------------------------------------------------------------------

class PositiveElement {
 public:
  static PositiveElement square_of(const GroupRingElement& q) {
    if (q.empty()) throw precondition_error("cannot square the zero element");
    return PositiveElement(positive_square(q), true);
  }

  static PositiveElement diagonally_dominant(const GroupRingElement& f) {
    const double scale = l1_norm(f) + 1.0;
    const GroupRingElement diff = f - star(f);
    if (l1_norm(diff) > 1e-12 * scale)
      throw precondition_error("element is not self-adjoint");
    const cplx c = trace(f);
    if (std::abs(c.imag()) > 1e-12 * scale || !(c.real() > 0.0))
      throw precondition_error("identity coefficient must be real and positive");
    GroupRingElement g = f;
    g.add_to(f.model().identity(), -c);
    if (!(l1_norm(g) < c.real()))
      throw precondition_error("element is not diagonally dominant");
    return PositiveElement(ring_detail::symmetrize(f), false);
  }

  const GroupRingElement& element() const { return f_; }
  const char* certificate() const {
    return from_square_ ? "square" : "neumann-dominant";
  }

 private:
  PositiveElement(GroupRingElement f, bool from_square)
      : f_(std::move(f)), from_square_(from_square) {}

  GroupRingElement f_;
  bool from_square_;
};

}  // namespace fkdet
