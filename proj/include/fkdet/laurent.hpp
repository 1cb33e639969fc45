#pragma once

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fkdet/errors.hpp"
#include "fkdet/group.hpp"
#include "fkdet/group_ring.hpp"
#include "fkdet/numerics.hpp"

namespace fkdet {

// ---------------------------------------------------------------------------
// Sparse Laurent polynomials on the d-torus: exponent vector -> coefficient.
// ---------------------------------------------------------------------------

class LaurentPolynomial {
 public:
  explicit LaurentPolynomial(std::int64_t d) : d_(d) {
    if (d < 1) throw precondition_error("dimension must be >= 1");
  }

  std::int64_t dim() const { return d_; }
  const std::map<std::vector<std::int64_t>, cplx>& coeffs() const { return c_; }
  bool zero() const { return c_.empty(); }

  cplx at(const std::vector<std::int64_t>& e) const {
    auto it = c_.find(e);
    return it == c_.end() ? cplx(0.0) : it->second;
  }

  void set(const std::vector<std::int64_t>& e, cplx v) {
    check_key(e);
    if (v == cplx(0.0))
      c_.erase(e);
    else
      c_[e] = v;
  }

  void add_to(const std::vector<std::int64_t>& e, cplx v) {
    check_key(e);
    auto it = c_.find(e);
    if (it == c_.end()) {
      if (v != cplx(0.0)) c_.emplace(e, v);
      return;
    }
    it->second += v;
    if (it->second == cplx(0.0)) c_.erase(it);
  }

  bool operator==(const LaurentPolynomial& o) const { return d_ == o.d_ && c_ == o.c_; }
  bool operator!=(const LaurentPolynomial& o) const { return !(*this == o); }

  friend LaurentPolynomial operator+(const LaurentPolynomial& p, const LaurentPolynomial& q) {
    if (p.d_ != q.d_) throw precondition_error("dimension mismatch");
    LaurentPolynomial out = p;
    for (const auto& [e, v] : q.c_) out.add_to(e, v);
    return out;
  }
  friend LaurentPolynomial operator-(const LaurentPolynomial& p, const LaurentPolynomial& q) {
    if (p.d_ != q.d_) throw precondition_error("dimension mismatch");
    LaurentPolynomial out = p;
    for (const auto& [e, v] : q.c_) out.add_to(e, -v);
    return out;
  }
  friend LaurentPolynomial operator*(cplx s, const LaurentPolynomial& p) {
    LaurentPolynomial out(p.d_);
    if (s == cplx(0.0)) return out;
    for (const auto& [e, v] : p.c_) out.set(e, s * v);
    return out;
  }
  friend LaurentPolynomial operator*(const LaurentPolynomial& p, const LaurentPolynomial& q) {
    if (p.d_ != q.d_) throw precondition_error("dimension mismatch");
    LaurentPolynomial out(p.d_);
    for (const auto& [e, v] : p.c_)
      for (const auto& [f, w] : q.c_) {
        std::vector<std::int64_t> g(e);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += f[i];
        out.add_to(g, v * w);
      }
    return out;
  }

 private:
  void check_key(const std::vector<std::int64_t>& e) const {
    if (static_cast<std::int64_t>(e.size()) != d_)
      throw precondition_error("exponent vector has wrong length");
  }

  std::int64_t d_;
  std::map<std::vector<std::int64_t>, cplx> c_;
};

inline LaurentPolynomial laurent_constant(std::int64_t d, cplx c) {
  LaurentPolynomial p(d);
  p.set(std::vector<std::int64_t>(static_cast<std::size_t>(d), 0), c);
  return p;
}

// Angle coordinates in [0,1)^d; the evaluation point is (e^{2 pi i t_1}, ...).
struct TorusPoint {
  std::vector<double> theta;
  explicit TorusPoint(std::vector<double> t) : theta(std::move(t)) {
    for (double v : theta)
      if (!(v >= 0.0 && v < 1.0)) throw precondition_error("torus angles must lie in [0,1)");
  }
};

inline cplx eval(const LaurentPolynomial& p, const TorusPoint& t) {
  if (static_cast<std::int64_t>(t.theta.size()) != p.dim())
    throw precondition_error("torus point dimension mismatch");
  cplx acc = 0.0;
  for (const auto& [e, v] : p.coeffs()) {
    double phase = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) phase += static_cast<double>(e[i]) * t.theta[i];
    acc += v * std::polar(1.0, 2.0 * std::numbers::pi * phase);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Expression parser, shared between Laurent polynomials and group-ring words.
//
// Grammar: terms joined by + and -; term = [complex coefficient *] monomial;
// monomial = product of var^int factors; vars x1..xd with aliases x,y,z for
// d <= 3; coefficient literals support decimals and i.
// ---------------------------------------------------------------------------

namespace expr_detail {

struct Token {
  enum class Type { number, imag, var, plus, minus, star, caret, end };
  Type type = Type::end;
  double value = 0.0;
  int var_index = 0;   // 1-based
  bool alias = false;  // bare x/y/z rather than xN
  std::size_t pos = 0;
};

inline std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t p = 0;
  while (p < text.size()) {
    const char ch = text[p];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++p;
      continue;
    }
    Token tok;
    tok.pos = p;
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      const char* begin = text.c_str() + p;
      char* end = nullptr;
      tok.type = Token::Type::number;
      tok.value = std::strtod(begin, &end);
      if (end == begin) throw parse_error("malformed number", p);
      p += static_cast<std::size_t>(end - begin);
      out.push_back(tok);
      continue;
    }
    if (ch == 'i') {
      tok.type = Token::Type::imag;
      ++p;
      out.push_back(tok);
      continue;
    }
    if (ch == 'x' || ch == 'y' || ch == 'z') {
      tok.type = Token::Type::var;
      if (ch == 'x' && p + 1 < text.size() &&
          std::isdigit(static_cast<unsigned char>(text[p + 1]))) {
        std::size_t q = p + 1;
        std::int64_t idx = 0;
        while (q < text.size() && std::isdigit(static_cast<unsigned char>(text[q]))) {
          idx = idx * 10 + (text[q] - '0');
          if (idx > 64) throw parse_error("variable index too large", p);
          ++q;
        }
        if (idx < 1) throw parse_error("variable index must be >= 1", p);
        tok.var_index = static_cast<int>(idx);
        tok.alias = false;
        p = q;
      } else {
        tok.var_index = ch == 'x' ? 1 : ch == 'y' ? 2 : 3;
        tok.alias = true;
        ++p;
      }
      out.push_back(tok);
      continue;
    }
    switch (ch) {
      case '+': tok.type = Token::Type::plus; break;
      case '-': tok.type = Token::Type::minus; break;
      case '*': tok.type = Token::Type::star; break;
      case '^': tok.type = Token::Type::caret; break;
      default:
        throw parse_error(std::string("unexpected character '") + ch + "'", p);
    }
    ++p;
    out.push_back(tok);
  }
  Token end_tok;
  end_tok.type = Token::Type::end;
  end_tok.pos = text.size();
  out.push_back(end_tok);
  return out;
}

struct Factor {
  int var = 0;  // 1-based
  std::int64_t exp = 1;
};

struct Term {
  cplx coeff{1.0, 0.0};
  std::vector<Factor> factors;
};

struct Parsed {
  std::vector<Term> terms;
  int max_var = 0;
  bool alias_used = false;
};

inline Parsed parse_terms(const std::string& text) {
  const std::vector<Token> toks = tokenize(text);
  Parsed out;
  std::size_t p = 0;
  const auto peek = [&]() -> const Token& { return toks[p]; };

  if (peek().type == Token::Type::end) throw parse_error("empty expression", 0);

  while (peek().type != Token::Type::end) {
    double sign = 1.0;
    bool saw_sign = false;
    while (peek().type == Token::Type::plus || peek().type == Token::Type::minus) {
      if (peek().type == Token::Type::minus) sign = -sign;
      saw_sign = true;
      ++p;
    }
    if (!out.terms.empty() && !saw_sign)
      throw parse_error("expected '+' or '-' between terms", peek().pos);

    Term term;
    bool have_any = false;
    if (peek().type == Token::Type::number) {
      term.coeff = cplx(peek().value, 0.0);
      have_any = true;
      ++p;
      if (peek().type == Token::Type::imag) {
        term.coeff *= cplx(0.0, 1.0);
        ++p;
      }
    } else if (peek().type == Token::Type::imag) {
      term.coeff = cplx(0.0, 1.0);
      have_any = true;
      ++p;
    }

    bool expect_factor = false;
    if (have_any && peek().type == Token::Type::star) {
      ++p;
      expect_factor = true;
    }
    bool first_factor = true;
    while (true) {
      if (peek().type != Token::Type::var) {
        if (expect_factor) throw parse_error("expected a variable", peek().pos);
        break;
      }
      if (!first_factor && !expect_factor) break;  // "x y" ends the term at the gap
      Factor f;
      f.var = peek().var_index;
      if (peek().alias) out.alias_used = true;
      out.max_var = std::max(out.max_var, f.var);
      ++p;
      if (peek().type == Token::Type::caret) {
        ++p;
        std::int64_t esign = 1;
        if (peek().type == Token::Type::minus) {
          esign = -1;
          ++p;
        } else if (peek().type == Token::Type::plus) {
          ++p;
        }
        if (peek().type != Token::Type::number)
          throw parse_error("expected an integer exponent", peek().pos);
        const double v = peek().value;
        if (v != std::floor(v) || v > 1e6)
          throw parse_error("exponent must be a small integer", peek().pos);
        f.exp = esign * static_cast<std::int64_t>(v);
        ++p;
      }
      term.factors.push_back(f);
      have_any = true;
      first_factor = false;
      expect_factor = false;
      if (peek().type == Token::Type::star) {
        ++p;
        expect_factor = true;
      }
    }
    if (!have_any) throw parse_error("expected a term", peek().pos);
    term.coeff *= sign;
    out.terms.push_back(std::move(term));
  }
  return out;
}

inline std::int64_t resolve_dimension(const Parsed& parsed, std::int64_t expected_d,
                                      const std::string& text) {
  std::int64_t d = expected_d > 0 ? expected_d : std::max<std::int64_t>(1, parsed.max_var);
  if (parsed.max_var > d)
    throw parse_error("variable index exceeds the dimension " + std::to_string(d),
                      text.size());
  if (parsed.alias_used && d > 3)
    throw parse_error("aliases x/y/z are only valid for dimension <= 3", text.size());
  return d;
}

}  // namespace expr_detail

inline LaurentPolynomial parse_laurent(const std::string& text, std::int64_t expected_d = 0) {
  const expr_detail::Parsed parsed = expr_detail::parse_terms(text);
  const std::int64_t d = expr_detail::resolve_dimension(parsed, expected_d, text);
  LaurentPolynomial p(d);
  for (const auto& term : parsed.terms) {
    std::vector<std::int64_t> e(static_cast<std::size_t>(d), 0);
    for (const auto& f : term.factors) e[static_cast<std::size_t>(f.var - 1)] += f.exp;
    p.add_to(e, term.coeff);
  }
  return p;
}

// Same grammar, but a monomial is an ordered word in the model's generators.
inline GroupRingElement parse_group_ring(const std::string& text, const Group& model) {
  const expr_detail::Parsed parsed = expr_detail::parse_terms(text);
  if (parsed.max_var > model.rank())
    throw parse_error("variable index exceeds the generator count", text.size());
  if (parsed.alias_used && model.rank() > 3)
    throw parse_error("aliases x/y/z are only valid for rank <= 3", text.size());
  const std::vector<GroupElt> gens = model.generators();
  GroupRingElement f(model);
  for (const auto& term : parsed.terms) {
    GroupElt g = model.identity();
    for (const auto& fac : term.factors)
      g = model.mul(g, model.pow(gens[static_cast<std::size_t>(fac.var - 1)], fac.exp));
    f.add_to(g, term.coeff);
  }
  return f;
}

namespace expr_detail {

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace expr_detail

// Canonical text form. parse(print(p), p.dim()) == p exactly: coefficients are
// printed with 17 significant digits and complex coefficients are split into a
// real and an imaginary term so no parentheses are needed.
inline std::string print(const LaurentPolynomial& p) {
  const std::int64_t d = p.dim();
  std::string out;
  const auto monomial = [&](const std::vector<std::int64_t>& e) {
    std::string m;
    for (std::int64_t j = 0; j < d; ++j) {
      const std::int64_t ex = e[static_cast<std::size_t>(j)];
      if (ex == 0) continue;
      if (!m.empty()) m += "*";
      if (d <= 3)
        m += (j == 0 ? "x" : j == 1 ? "y" : "z");
      else
        m += "x" + std::to_string(j + 1);
      if (ex != 1) m += "^" + std::to_string(ex);
    }
    return m;
  };
  const auto emit = [&](double mag, bool negative, const std::string& body) {
    if (out.empty())
      out += negative ? "-" : "";
    else
      out += negative ? " - " : " + ";
    out += body;
    (void)mag;
  };
  const auto part = [&](double v, bool imag, const std::string& mono) {
    if (v == 0.0) return;
    const bool neg = std::signbit(v);
    const double mag = std::abs(v);
    std::string body;
    if (imag) {
      body = mag == 1.0 ? "i" : expr_detail::format_number(mag) + "i";
    } else {
      body = expr_detail::format_number(mag);
    }
    if (!mono.empty()) {
      if (!imag && mag == 1.0)
        body = mono;
      else
        body += "*" + mono;
    }
    emit(mag, neg, body);
  };
  for (const auto& [e, c] : p.coeffs()) {
    const std::string mono = monomial(e);
    part(c.real(), false, mono);
    part(c.imag(), true, mono);
  }
  if (out.empty()) out = "0";
  return out;
}

// ---------------------------------------------------------------------------
// Grid evaluation at theta_k = (k + sigma)/N per axis, sigma = 1/2 when
// offset. Zero-padded FFT per axis when the exponent spread fits below N,
// direct evaluation otherwise. The offset grid avoids the roots of unity, so
// integer polynomials vanishing only there never produce spurious -inf.
// ---------------------------------------------------------------------------

struct GridValues {
  std::int64_t d = 0;
  std::int64_t n = 0;
  std::vector<cplx> values;  // row-major over [0,N)^d

  std::size_t index(const std::vector<std::int64_t>& k) const {
    std::size_t idx = 0;
    for (std::int64_t j = 0; j < d; ++j)
      idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(k[static_cast<std::size_t>(j)]);
    return idx;
  }
};

inline constexpr std::int64_t kGridPointBudget = std::int64_t(1) << 24;

namespace grid_detail {

inline std::int64_t checked_total(std::int64_t n, std::int64_t d) {
  std::int64_t total = 1;
  for (std::int64_t j = 0; j < d; ++j) {
    if (total > kGridPointBudget / n)
      throw resource_error("grid exceeds the point budget", total);
    total *= n;
  }
  return total;
}

// Unnormalized transform with e^{+2 pi i m k / N} along each axis.
inline void inverse_dft_axes(std::vector<cplx>& a, std::int64_t n, std::int64_t d) {
  std::vector<cplx> line(static_cast<std::size_t>(n));
  std::int64_t stride = 1;
  for (std::int64_t axis = d - 1; axis >= 0; --axis) {
    const std::int64_t lines = static_cast<std::int64_t>(a.size()) / n;
    for (std::int64_t l = 0; l < lines; ++l) {
      const std::int64_t block = l / stride;
      const std::int64_t offset = l % stride;
      const std::int64_t base = block * stride * n + offset;
      for (std::int64_t k = 0; k < n; ++k)
        line[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(base + k * stride)];
      fft_any(line, +1);
      for (std::int64_t k = 0; k < n; ++k)
        a[static_cast<std::size_t>(base + k * stride)] = line[static_cast<std::size_t>(k)];
    }
    stride *= n;
  }
}

}  // namespace grid_detail

inline GridValues grid_eval(const LaurentPolynomial& p, std::int64_t n, bool offset) {
  if (n < 1) throw precondition_error("grid size must be >= 1");
  const std::int64_t d = p.dim();
  const std::int64_t total = grid_detail::checked_total(n, d);
  GridValues out;
  out.d = d;
  out.n = n;
  out.values.assign(static_cast<std::size_t>(total), cplx(0.0));
  if (p.zero()) return out;

  std::vector<std::int64_t> lo(static_cast<std::size_t>(d), 0);
  std::vector<std::int64_t> hi(static_cast<std::size_t>(d), 0);
  bool first = true;
  for (const auto& [e, c] : p.coeffs()) {
    for (std::int64_t j = 0; j < d; ++j) {
      const std::int64_t v = e[static_cast<std::size_t>(j)];
      if (first || v < lo[static_cast<std::size_t>(j)]) lo[static_cast<std::size_t>(j)] = v;
      if (first || v > hi[static_cast<std::size_t>(j)]) hi[static_cast<std::size_t>(j)] = v;
    }
    first = false;
  }
  bool fits = d <= 3;
  for (std::int64_t j = 0; j < d && fits; ++j)
    fits = hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)] < n;

  const double sigma = offset ? 0.5 : 0.0;
  if (!fits) {
    // Direct evaluation with per-axis power tables.
    std::vector<std::int64_t> k(static_cast<std::size_t>(d), 0);
    for (std::int64_t idx = 0; idx < total; ++idx) {
      cplx acc = 0.0;
      for (const auto& [e, c] : p.coeffs()) {
        double phase = 0.0;
        for (std::int64_t j = 0; j < d; ++j)
          phase += static_cast<double>(e[static_cast<std::size_t>(j)]) *
                   ((static_cast<double>(k[static_cast<std::size_t>(j)]) + sigma) / static_cast<double>(n));
        acc += c * std::polar(1.0, 2.0 * std::numbers::pi * phase);
      }
      out.values[static_cast<std::size_t>(idx)] = acc;
      std::int64_t axis = d - 1;
      while (axis >= 0) {
        if (++k[static_cast<std::size_t>(axis)] < n) break;
        k[static_cast<std::size_t>(axis)] = 0;
        --axis;
      }
    }
    return out;
  }

  // FFT path: fold the offset phase into the coefficients, shift exponents
  // into [0,N) per axis, inverse-transform, then undo the shift per point.
  for (const auto& [e, c] : p.coeffs()) {
    double off_phase = 0.0;
    std::size_t idx = 0;
    for (std::int64_t j = 0; j < d; ++j) {
      const std::int64_t ev = e[static_cast<std::size_t>(j)];
      off_phase += static_cast<double>(ev) * sigma / static_cast<double>(n);
      idx = idx * static_cast<std::size_t>(n) +
            static_cast<std::size_t>(ev - lo[static_cast<std::size_t>(j)]);
    }
    out.values[idx] += c * std::polar(1.0, 2.0 * std::numbers::pi * off_phase);
  }
  grid_detail::inverse_dft_axes(out.values, n, d);
  std::vector<std::int64_t> k(static_cast<std::size_t>(d), 0);
  for (std::int64_t idx = 0; idx < total; ++idx) {
    double shift_phase = 0.0;
    for (std::int64_t j = 0; j < d; ++j)
      shift_phase += static_cast<double>(lo[static_cast<std::size_t>(j)]) *
                     static_cast<double>(k[static_cast<std::size_t>(j)]) / static_cast<double>(n);
    if (shift_phase != 0.0)
      out.values[static_cast<std::size_t>(idx)] *=
          std::polar(1.0, 2.0 * std::numbers::pi * shift_phase);
    std::int64_t axis = d - 1;
    while (axis >= 0) {
      if (++k[static_cast<std::size_t>(axis)] < n) break;
      k[static_cast<std::size_t>(axis)] = 0;
      --axis;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fourier correspondence with group-ring elements over Z^d: same sparse data,
// convolution <-> product, star <-> conjugate-reflect, trace <-> constant term.
// ---------------------------------------------------------------------------

inline GroupRingElement to_groupring(const LaurentPolynomial& p) {
  GroupRingElement f(Group::lattice(p.dim()));
  for (const auto& [e, c] : p.coeffs()) f.set(e, c);
  return f;
}

inline LaurentPolynomial from_groupring(const GroupRingElement& f) {
  if (f.model().kind() != GroupKind::lattice)
    throw precondition_error("Fourier correspondence needs a Z^d model");
  LaurentPolynomial p(f.model().rank());
  for (const auto& [g, c] : f.coeffs()) p.set(g, c);
  return p;
}

// P_r(X) = P(X^{r_1}, ..., X^{r_d}); collisions of (nu, r) accumulate.
inline LaurentPolynomial specialize(const LaurentPolynomial& p,
                                    const std::vector<std::int64_t>& r) {
  if (static_cast<std::int64_t>(r.size()) != p.dim())
    throw precondition_error("specialization vector has wrong length");
  LaurentPolynomial out(1);
  for (const auto& [e, c] : p.coeffs()) {
    std::int64_t k = 0;
    for (std::size_t i = 0; i < r.size(); ++i) k += e[i] * r[i];
    out.add_to({k}, c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// q(r) = min { max_i |nu_i| : 0 != nu with (nu, r) = 0 }, by shell enumeration
// with early exit. Degenerate conventions are flagged rather than silent:
// r = 0 yields q = 1, and d = 1 with r != 0 yields infinity.
// ---------------------------------------------------------------------------

struct LatticeGap {
  bool infinite = false;
  bool capped = false;
  bool zero_r = false;
  std::int64_t value = 0;
  std::vector<std::int64_t> witness;  // some nu realizing the minimum
};

namespace lattice_detail {

inline bool shell_search(const std::vector<std::int64_t>& r, std::int64_t bound,
                         std::vector<std::int64_t>& nu, std::size_t axis, bool pinned,
                         std::vector<std::int64_t>& witness) {
  const std::size_t d = r.size();
  if (axis == d) {
    if (!pinned) return false;
    std::int64_t dot = 0;
    for (std::size_t i = 0; i < d; ++i) dot += nu[i] * r[i];
    if (dot != 0) return false;
    witness = nu;
    return true;
  }
  for (std::int64_t v = -bound; v <= bound; ++v) {
    nu[axis] = v;
    const bool on_face = v == bound || v == -bound;
    if (shell_search(r, bound, nu, axis + 1, pinned || on_face, witness)) return true;
  }
  return false;
}

}  // namespace lattice_detail

inline LatticeGap q_of_r(const std::vector<std::int64_t>& r, std::int64_t cap = 10000) {
  if (r.empty()) throw precondition_error("r must be nonempty");
  LatticeGap out;
  bool all_zero = true;
  for (std::int64_t v : r) all_zero = all_zero && v == 0;
  if (all_zero) {
    out.zero_r = true;
    out.value = 1;
    out.witness.assign(r.size(), 0);
    out.witness[0] = 1;
    return out;
  }
  if (r.size() == 1) {
    out.infinite = true;
    return out;
  }
  std::vector<std::int64_t> nu(r.size(), 0);
  for (std::int64_t bound = 1; bound <= cap; ++bound) {
    if (lattice_detail::shell_search(r, bound, nu, 0, false, out.witness)) {
      out.value = bound;
      return out;
    }
  }
  out.capped = true;
  out.value = cap;
  return out;
}

// ---------------------------------------------------------------------------
// Wiener-grid invertibility certificate for f over Z^d: evaluate the Fourier
// transform on the offset N^d grid, subtract the per-axis Lipschitz slack
// L_j / (2N) with L_j = 2 pi sum_nu |nu_j| |f_nu|, and certify when the
// remainder is positive. By Wiener's theorem a nonvanishing transform makes f
// invertible in L^1(Z^d).
// ---------------------------------------------------------------------------

inline std::optional<InvertibilityCertificate> wiener_certificate(const GroupRingElement& f,
                                                                  std::int64_t grid_n) {
  if (f.model().kind() != GroupKind::lattice)
    throw precondition_error("the Wiener certificate needs a Z^d model");
  if (grid_n < 1) throw precondition_error("grid size must be >= 1");
  if (f.empty()) return std::nullopt;
  const std::int64_t d = f.model().rank();

  std::vector<double> lips(static_cast<std::size_t>(d), 0.0);
  for (const auto& [e, c] : f.coeffs())
    for (std::int64_t j = 0; j < d; ++j)
      lips[static_cast<std::size_t>(j)] += 2.0 * std::numbers::pi *
                                           std::abs(static_cast<double>(e[static_cast<std::size_t>(j)])) *
                                           std::abs(c);

  const GridValues g = grid_eval(from_groupring(f), grid_n, true);
  double min_abs = std::numeric_limits<double>::infinity();
  for (const cplx& v : g.values) min_abs = std::min(min_abs, std::abs(v));

  double slack = 0.0;
  for (double l : lips) slack += l / (2.0 * static_cast<double>(grid_n));
  const double bound = min_abs - slack;
  if (!(bound > 0.0)) return std::nullopt;

  InvertibilityCertificate cert;
  cert.kind = InvertibilityCertificate::Kind::wiener_grid;
  cert.bound = bound;
  cert.grid_n = grid_n;
  cert.lipschitz = lips;
  return cert;
}

}  // namespace fkdet
