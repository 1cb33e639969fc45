#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fkdet/errors.hpp"

namespace fkdet {

// Canonical element form, model-specific:
//   lattice / lattice_mod : integer vector of length d (mod entries in [0,n))
//   cyclic_image          : single integer (an element of D(r)Z)
//   heisenberg(_mod)      : triple (a,b,c), reduced mod n in the finite quotient
//   table                 : single index into the multiplication table
using GroupElt = std::vector<std::int64_t>;

enum class GroupKind {
  lattice,         // Z^d
  lattice_mod,     // (Z/n_1) x ... x (Z/n_d)
  cyclic_image,    // D(r)Z with marked generators r_1..r_d
  heisenberg,      // integral Heisenberg H_3(Z)
  heisenberg_mod,  // H_3(Z/n)
  table,           // explicit finite multiplication table
};

inline std::int64_t posmod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

class Group {
 public:
  static Group lattice(std::int64_t d) {
    if (d < 1) throw precondition_error("lattice rank must be >= 1");
    auto data = std::make_shared<Data>();
    data->kind = GroupKind::lattice;
    data->d = d;
    return Group(std::move(data));
  }

  static Group lattice_mod(std::vector<std::int64_t> moduli) {
    if (moduli.empty()) throw precondition_error("need at least one modulus");
    for (std::int64_t n : moduli)
      if (n < 1) throw precondition_error("moduli must be >= 1");
    auto data = std::make_shared<Data>();
    data->kind = GroupKind::lattice_mod;
    data->d = static_cast<std::int64_t>(moduli.size());
    data->moduli = std::move(moduli);
    return Group(std::move(data));
  }

  static Group cyclic_image(std::vector<std::int64_t> r) {
    if (r.empty()) throw precondition_error("need at least one generator value");
    auto data = std::make_shared<Data>();
    data->kind = GroupKind::cyclic_image;
    data->d = static_cast<std::int64_t>(r.size());
    data->r = std::move(r);
    return Group(std::move(data));
  }

  static Group heisenberg() {
    auto data = std::make_shared<Data>();
    data->kind = GroupKind::heisenberg;
    data->d = 2;
    return Group(std::move(data));
  }

  static Group heisenberg_mod(std::int64_t n) {
    if (n < 1) throw precondition_error("Heisenberg quotient modulus must be >= 1");
    auto data = std::make_shared<Data>();
    data->kind = GroupKind::heisenberg_mod;
    data->d = 2;
    data->n = n;
    return Group(std::move(data));
  }

  static Group from_table(std::vector<std::vector<std::int64_t>> table,
                          std::vector<std::int64_t> gens);
  static Group from_table_stream(std::istream& in);

  GroupKind kind() const { return p_->kind; }
  std::int64_t rank() const { return p_->d; }
  const std::vector<std::int64_t>& moduli() const { return p_->moduli; }
  const std::vector<std::int64_t>& generator_values() const { return p_->r; }
  std::int64_t heisenberg_modulus() const { return p_->n; }

  GroupElt identity() const {
    switch (p_->kind) {
      case GroupKind::lattice:
      case GroupKind::lattice_mod:
        return GroupElt(static_cast<std::size_t>(p_->d), 0);
      case GroupKind::cyclic_image:
        return {0};
      case GroupKind::heisenberg:
      case GroupKind::heisenberg_mod:
        return {0, 0, 0};
      case GroupKind::table:
        return {p_->table_id};
    }
    throw precondition_error("unknown group kind");
  }

  GroupElt mul(const GroupElt& a, const GroupElt& b) const {
    switch (p_->kind) {
      case GroupKind::lattice: {
        GroupElt c(a);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
        return c;
      }
      case GroupKind::lattice_mod: {
        GroupElt c(a);
        for (std::size_t i = 0; i < c.size(); ++i)
          c[i] = posmod(c[i] + b[i], p_->moduli[i]);
        return c;
      }
      case GroupKind::cyclic_image:
        return {a[0] + b[0]};
      case GroupKind::heisenberg:
        return {a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]};
      case GroupKind::heisenberg_mod: {
        const std::int64_t n = p_->n;
        return {posmod(a[0] + b[0], n), posmod(a[1] + b[1], n),
                posmod(a[2] + b[2] + a[0] * b[1], n)};
      }
      case GroupKind::table:
        return {p_->table[static_cast<std::size_t>(a[0])][static_cast<std::size_t>(b[0])]};
    }
    throw precondition_error("unknown group kind");
  }

  GroupElt inv(const GroupElt& a) const {
    switch (p_->kind) {
      case GroupKind::lattice: {
        GroupElt c(a);
        for (auto& v : c) v = -v;
        return c;
      }
      case GroupKind::lattice_mod: {
        GroupElt c(a);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = posmod(-c[i], p_->moduli[i]);
        return c;
      }
      case GroupKind::cyclic_image:
        return {-a[0]};
      case GroupKind::heisenberg:
        return {-a[0], -a[1], a[0] * a[1] - a[2]};
      case GroupKind::heisenberg_mod: {
        const std::int64_t n = p_->n;
        return {posmod(-a[0], n), posmod(-a[1], n), posmod(a[0] * a[1] - a[2], n)};
      }
      case GroupKind::table:
        return {p_->table_inv[static_cast<std::size_t>(a[0])]};
    }
    throw precondition_error("unknown group kind");
  }

  GroupElt pow(const GroupElt& a, std::int64_t e) const {
    GroupElt base = e < 0 ? inv(a) : a;
    std::int64_t k = e < 0 ? -e : e;
    GroupElt acc = identity();
    for (std::int64_t i = 0; i < k; ++i) acc = mul(acc, base);
    return acc;
  }

  std::vector<GroupElt> generators() const {
    std::vector<GroupElt> g;
    switch (p_->kind) {
      case GroupKind::lattice:
      case GroupKind::lattice_mod:
        for (std::int64_t i = 0; i < p_->d; ++i) {
          GroupElt e(static_cast<std::size_t>(p_->d), 0);
          e[static_cast<std::size_t>(i)] = 1;
          if (p_->kind == GroupKind::lattice_mod)
            e[static_cast<std::size_t>(i)] = posmod(1, p_->moduli[static_cast<std::size_t>(i)]);
          g.push_back(std::move(e));
        }
        return g;
      case GroupKind::cyclic_image:
        for (std::int64_t v : p_->r) g.push_back({v});
        return g;
      case GroupKind::heisenberg:
      case GroupKind::heisenberg_mod:
        if (p_->kind == GroupKind::heisenberg_mod && p_->n == 1)
          return {{0, 0, 0}, {0, 0, 0}};
        return {{1, 0, 0}, {0, 1, 0}};
      case GroupKind::table:
        for (std::int64_t v : p_->table_gens) g.push_back({v});
        return g;
    }
    throw precondition_error("unknown group kind");
  }

  // Canonical-form check for externally supplied elements.
  bool valid_form(const GroupElt& a) const {
    switch (p_->kind) {
      case GroupKind::lattice:
        return static_cast<std::int64_t>(a.size()) == p_->d;
      case GroupKind::lattice_mod:
        if (static_cast<std::int64_t>(a.size()) != p_->d) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
          if (a[i] < 0 || a[i] >= p_->moduli[i]) return false;
        return true;
      case GroupKind::cyclic_image: {
        if (a.size() != 1) return false;
        std::int64_t g = 0;
        for (std::int64_t v : p_->r) g = std::gcd(g, v);
        return g == 0 ? a[0] == 0 : a[0] % g == 0;
      }
      case GroupKind::heisenberg:
        return a.size() == 3;
      case GroupKind::heisenberg_mod:
        return a.size() == 3 && a[0] >= 0 && a[0] < p_->n && a[1] >= 0 && a[1] < p_->n &&
               a[2] >= 0 && a[2] < p_->n;
      case GroupKind::table:
        return a.size() == 1 && a[0] >= 0 &&
               a[0] < static_cast<std::int64_t>(p_->table.size());
    }
    return false;
  }

  bool finite() const {
    switch (p_->kind) {
      case GroupKind::lattice:
      case GroupKind::heisenberg:
        return false;
      case GroupKind::cyclic_image:
        for (std::int64_t v : p_->r)
          if (v != 0) return false;
        return true;
      default:
        return true;
    }
  }

  std::int64_t order() const {
    if (!finite()) throw precondition_error("group is infinite");
    switch (p_->kind) {
      case GroupKind::lattice_mod: {
        std::int64_t o = 1;
        for (std::int64_t n : p_->moduli) o *= n;
        return o;
      }
      case GroupKind::cyclic_image:
        return 1;
      case GroupKind::heisenberg_mod:
        return p_->n * p_->n * p_->n;
      case GroupKind::table:
        return static_cast<std::int64_t>(p_->table.size());
      default:
        throw precondition_error("group is infinite");
    }
  }

  // Deterministic enumeration of a finite model (lexicographic where graded).
  std::vector<GroupElt> elements() const {
    if (!finite()) throw precondition_error("cannot enumerate an infinite group");
    std::vector<GroupElt> out;
    switch (p_->kind) {
      case GroupKind::lattice_mod: {
        GroupElt cur(static_cast<std::size_t>(p_->d), 0);
        out.reserve(static_cast<std::size_t>(order()));
        while (true) {
          out.push_back(cur);
          std::int64_t axis = p_->d - 1;
          while (axis >= 0) {
            if (++cur[static_cast<std::size_t>(axis)] < p_->moduli[static_cast<std::size_t>(axis)]) break;
            cur[static_cast<std::size_t>(axis)] = 0;
            --axis;
          }
          if (axis < 0) break;
        }
        return out;
      }
      case GroupKind::cyclic_image:
        return {GroupElt{0}};
      case GroupKind::heisenberg_mod: {
        const std::int64_t n = p_->n;
        out.reserve(static_cast<std::size_t>(n * n * n));
        for (std::int64_t a = 0; a < n; ++a)
          for (std::int64_t b = 0; b < n; ++b)
            for (std::int64_t c = 0; c < n; ++c) out.push_back({a, b, c});
        return out;
      }
      case GroupKind::table:
        for (std::size_t i = 0; i < p_->table.size(); ++i)
          out.push_back({static_cast<std::int64_t>(i)});
        return out;
      default:
        throw precondition_error("cannot enumerate an infinite group");
    }
  }

  bool operator==(const Group& o) const {
    if (p_ == o.p_) return true;
    if (p_->kind != o.p_->kind || p_->d != o.p_->d) return false;
    return p_->moduli == o.p_->moduli && p_->r == o.p_->r && p_->n == o.p_->n &&
           p_->table == o.p_->table && p_->table_gens == o.p_->table_gens;
  }
  bool operator!=(const Group& o) const { return !(*this == o); }

 private:
  struct Data {
    GroupKind kind = GroupKind::lattice;
    std::int64_t d = 0;
    std::vector<std::int64_t> moduli;
    std::vector<std::int64_t> r;
    std::int64_t n = 0;
    std::vector<std::vector<std::int64_t>> table;
    std::vector<std::int64_t> table_gens;
    std::int64_t table_id = 0;
    std::vector<std::int64_t> table_inv;
  };

  explicit Group(std::shared_ptr<const Data> data) : p_(std::move(data)) {}

  std::shared_ptr<const Data> p_;
};

// Exhaustive group-axiom validation of a multiplication table: Latin square,
// associativity (with the failing triple reported), identity, inverses.
inline Group Group::from_table(std::vector<std::vector<std::int64_t>> table,
                               std::vector<std::int64_t> gens) {
  const std::int64_t m = static_cast<std::int64_t>(table.size());
  if (m < 1) throw precondition_error("multiplication table is empty");
  if (m > 512) throw resource_error("multiplication tables limited to order 512", m);
  for (const auto& row : table) {
    if (static_cast<std::int64_t>(row.size()) != m)
      throw precondition_error("multiplication table is not square");
    for (std::int64_t v : row)
      if (v < 0 || v >= m) throw precondition_error("table entry out of range");
  }
  std::vector<char> seen(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::int64_t j = 0; j < m; ++j) seen[static_cast<std::size_t>(table[i][j])] = 1;
    for (char s : seen)
      if (!s) throw precondition_error("not a group: row " + std::to_string(i) +
                                       " is not a permutation");
    std::fill(seen.begin(), seen.end(), 0);
    for (std::int64_t j = 0; j < m; ++j) seen[static_cast<std::size_t>(table[j][i])] = 1;
    for (char s : seen)
      if (!s) throw precondition_error("not a group: column " + std::to_string(i) +
                                       " is not a permutation");
  }
  for (std::int64_t a = 0; a < m; ++a)
    for (std::int64_t b = 0; b < m; ++b)
      for (std::int64_t c = 0; c < m; ++c) {
        const std::int64_t lhs = table[static_cast<std::size_t>(
            table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)])][static_cast<std::size_t>(c)];
        const std::int64_t rhs = table[static_cast<std::size_t>(a)][static_cast<std::size_t>(
            table[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)])];
        if (lhs != rhs)
          throw precondition_error("not a group: associativity fails at (" +
                                   std::to_string(a) + "," + std::to_string(b) + "," +
                                   std::to_string(c) + ")");
      }
  std::int64_t id = -1;
  for (std::int64_t e = 0; e < m; ++e) {
    bool ok = true;
    for (std::int64_t x = 0; x < m && ok; ++x)
      ok = table[static_cast<std::size_t>(e)][static_cast<std::size_t>(x)] == x &&
           table[static_cast<std::size_t>(x)][static_cast<std::size_t>(e)] == x;
    if (ok) {
      id = e;
      break;
    }
  }
  if (id < 0) throw precondition_error("not a group: no identity element");
  std::vector<std::int64_t> invs(static_cast<std::size_t>(m), -1);
  for (std::int64_t a = 0; a < m; ++a)
    for (std::int64_t b = 0; b < m; ++b)
      if (table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] == id) {
        invs[static_cast<std::size_t>(a)] = b;
        break;
      }
  for (std::int64_t v : invs)
    if (v < 0) throw precondition_error("not a group: missing inverse");
  if (gens.empty()) throw precondition_error("need at least one generator index");
  for (std::int64_t g : gens)
    if (g < 0 || g >= m) throw precondition_error("generator index out of range");

  auto data = std::make_shared<Data>();
  data->kind = GroupKind::table;
  data->d = static_cast<std::int64_t>(gens.size());
  data->table = std::move(table);
  data->table_gens = std::move(gens);
  data->table_id = id;
  data->table_inv = std::move(invs);
  return Group(std::move(data));
}

// File format: first line |G|, then |G| whitespace-separated rows of indices,
// generator list on a trailing line.
inline Group Group::from_table_stream(std::istream& in) {
  std::int64_t m = 0;
  if (!(in >> m) || m < 1) throw io_error("table file: bad order line");
  std::vector<std::vector<std::int64_t>> table(static_cast<std::size_t>(m),
                                               std::vector<std::int64_t>(static_cast<std::size_t>(m)));
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t j = 0; j < m; ++j)
      if (!(in >> table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]))
        throw io_error("table file: truncated row " + std::to_string(i));
  std::vector<std::int64_t> gens;
  std::int64_t g = 0;
  while (in >> g) gens.push_back(g);
  return from_table(std::move(table), std::move(gens));
}

// ---------------------------------------------------------------------------
// Quotient homomorphisms. The quotient is specified by its target model:
//   Z^d  -> (Z/n_1) x ... x (Z/n_d)   coordinate reduction
//   Z^d  -> D(r)Z                     nu -> (nu, r)
//   H_3(Z) -> H_3(Z/n)                coordinate reduction
// ---------------------------------------------------------------------------

class Homomorphism {
 public:
  enum class Rule { reduce_mod, dot_with_r, heis_reduce };

  Homomorphism(Group src, Group dst, Rule rule)
      : src_(std::move(src)), dst_(std::move(dst)), rule_(rule) {}

  const Group& source() const { return src_; }
  const Group& target() const { return dst_; }

  GroupElt apply(const GroupElt& g) const {
    switch (rule_) {
      case Rule::reduce_mod: {
        GroupElt out(g);
        const auto& mods = dst_.moduli();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = posmod(out[i], mods[i]);
        return out;
      }
      case Rule::dot_with_r: {
        std::int64_t s = 0;
        const auto& r = dst_.generator_values();
        for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * r[i];
        return {s};
      }
      case Rule::heis_reduce: {
        const std::int64_t n = dst_.heisenberg_modulus();
        return {posmod(g[0], n), posmod(g[1], n), posmod(g[2], n)};
      }
    }
    throw precondition_error("unknown homomorphism rule");
  }

  bool in_kernel(const GroupElt& g) const {
    switch (rule_) {
      case Rule::reduce_mod: {
        const auto& mods = dst_.moduli();
        for (std::size_t i = 0; i < g.size(); ++i)
          if (posmod(g[i], mods[i]) != 0) return false;
        return true;
      }
      case Rule::dot_with_r: {
        std::int64_t s = 0;
        const auto& r = dst_.generator_values();
        for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * r[i];
        return s == 0;
      }
      case Rule::heis_reduce: {
        const std::int64_t n = dst_.heisenberg_modulus();
        return posmod(g[0], n) == 0 && posmod(g[1], n) == 0 && posmod(g[2], n) == 0;
      }
    }
    throw precondition_error("unknown homomorphism rule");
  }

  std::vector<GroupElt> generator_images() const {
    std::vector<GroupElt> out;
    for (const GroupElt& s : src_.generators()) out.push_back(apply(s));
    return out;
  }

 private:
  Group src_, dst_;
  Rule rule_;
};

inline Homomorphism quotient_hom(const Group& src, const Group& dst) {
  if (src.kind() == GroupKind::lattice && dst.kind() == GroupKind::lattice_mod) {
    if (src.rank() != dst.rank())
      throw precondition_error("rank mismatch between lattice and quotient");
    return Homomorphism(src, dst, Homomorphism::Rule::reduce_mod);
  }
  if (src.kind() == GroupKind::lattice && dst.kind() == GroupKind::cyclic_image) {
    if (src.rank() != dst.rank())
      throw precondition_error("cyclic image needs one generator value per lattice axis");
    return Homomorphism(src, dst, Homomorphism::Rule::dot_with_r);
  }
  if (src.kind() == GroupKind::heisenberg && dst.kind() == GroupKind::heisenberg_mod)
    return Homomorphism(src, dst, Homomorphism::Rule::heis_reduce);
  throw precondition_error("unsupported quotient pair of group models");
}

// ---------------------------------------------------------------------------
// Folner sets.
// ---------------------------------------------------------------------------

struct FolnerSet {
  std::vector<GroupElt> elems;
  std::map<GroupElt, std::int64_t> index;
  std::int64_t size_param = 0;
};

inline FolnerSet make_folner(std::vector<GroupElt> elems, std::int64_t n) {
  FolnerSet f;
  f.elems = std::move(elems);
  f.size_param = n;
  for (std::size_t i = 0; i < f.elems.size(); ++i) {
    auto [it, fresh] = f.index.emplace(f.elems[i], static_cast<std::int64_t>(i));
    (void)it;
    if (!fresh) throw precondition_error("duplicate element in Folner set");
  }
  return f;
}

// Rectangular boxes prod_j {0..sizes_j - 1} for Z^d; used by the alternate
// Folner-sequence probes.
inline FolnerSet folner_box(const Group& model, const std::vector<std::int64_t>& sizes) {
  if (model.kind() != GroupKind::lattice)
    throw precondition_error("folner_box supports Z^d only");
  if (static_cast<std::int64_t>(sizes.size()) != model.rank())
    throw precondition_error("one box size per axis required");
  std::int64_t total = 1;
  for (std::int64_t s : sizes) {
    if (s < 1) throw precondition_error("box sizes must be >= 1");
    total *= s;
  }
  std::vector<GroupElt> elems;
  elems.reserve(static_cast<std::size_t>(total));
  GroupElt cur(sizes.size(), 0);
  while (true) {
    elems.push_back(cur);
    std::int64_t axis = static_cast<std::int64_t>(sizes.size()) - 1;
    while (axis >= 0) {
      if (++cur[static_cast<std::size_t>(axis)] < sizes[static_cast<std::size_t>(axis)]) break;
      cur[static_cast<std::size_t>(axis)] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return make_folner(std::move(elems), sizes[0]);
}

// The standard boxes: {0..n-1}^d for Z^d (lexicographic, n^d elements) and
// {0..n-1}^2 x {0..n^2-1} for H_3(Z) (n^4 elements).
inline FolnerSet folner_set(const Group& model, std::int64_t n) {
  if (n < 1) throw precondition_error("Folner size must be >= 1");
  if (model.kind() == GroupKind::lattice) {
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(model.rank()), n);
    FolnerSet f = folner_box(model, sizes);
    f.size_param = n;
    return f;
  }
  if (model.kind() == GroupKind::heisenberg) {
    std::vector<GroupElt> elems;
    elems.reserve(static_cast<std::size_t>(n * n * n * n));
    for (std::int64_t a = 0; a < n; ++a)
      for (std::int64_t b = 0; b < n; ++b)
        for (std::int64_t c = 0; c < n * n; ++c) elems.push_back({a, b, c});
    return make_folner(std::move(elems), n);
  }
  throw precondition_error("Folner sets are provided for Z^d and H_3(Z) only");
}

// ---------------------------------------------------------------------------
// Labeled Cayley balls: BFS from the identity over S and S^{-1}, vertex order
// by BFS level then label order. succ[v][2i] / succ[v][2i+1] give the vertex
// reached from v under s_{i+1} / s_{i+1}^{-1}, or -1 when it leaves the ball.
// ---------------------------------------------------------------------------

struct LabeledBall {
  std::int64_t radius = 0;
  std::vector<GroupElt> verts;
  std::map<GroupElt, std::int64_t> index;
  std::vector<std::vector<std::int64_t>> succ;
};

inline LabeledBall labeled_ball(const Group& model, const std::vector<GroupElt>& marks,
                                std::int64_t radius, std::int64_t vertex_cap = 1000000) {
  if (radius < 0) throw precondition_error("ball radius must be >= 0");
  const std::int64_t d = static_cast<std::int64_t>(marks.size());
  std::vector<GroupElt> moves;
  moves.reserve(static_cast<std::size_t>(2 * d));
  for (const GroupElt& s : marks) {
    moves.push_back(s);
    moves.push_back(model.inv(s));
  }

  LabeledBall ball;
  ball.radius = radius;
  ball.verts.push_back(model.identity());
  ball.index.emplace(model.identity(), 0);
  std::size_t level_begin = 0;
  for (std::int64_t level = 1; level <= radius; ++level) {
    const std::size_t level_end = ball.verts.size();
    for (std::size_t v = level_begin; v < level_end; ++v) {
      for (const GroupElt& mv : moves) {
        GroupElt nxt = model.mul(ball.verts[v], mv);
        if (ball.index.count(nxt)) continue;
        if (static_cast<std::int64_t>(ball.verts.size()) >= vertex_cap)
          throw resource_error("labeled ball exceeded the vertex budget", level - 1);
        ball.index.emplace(nxt, static_cast<std::int64_t>(ball.verts.size()));
        ball.verts.push_back(std::move(nxt));
      }
    }
    level_begin = level_end;
  }

  ball.succ.assign(ball.verts.size(),
                   std::vector<std::int64_t>(static_cast<std::size_t>(2 * d), -1));
  for (std::size_t v = 0; v < ball.verts.size(); ++v)
    for (std::size_t m = 0; m < moves.size(); ++m) {
      auto it = ball.index.find(model.mul(ball.verts[v], moves[m]));
      if (it != ball.index.end()) ball.succ[v][m] = it->second;
    }
  return ball;
}

inline LabeledBall labeled_ball(const Group& model, std::int64_t radius,
                                std::int64_t vertex_cap = 1000000) {
  return labeled_ball(model, model.generators(), radius, vertex_cap);
}

// ---------------------------------------------------------------------------
// Kernel escape through a family of homomorphisms with a shared source.
//
// Plain mode: smallest 1-based index N such that K_n meets Q only in {e} for
// every n >= N. Correspondence mode (reference kernel test supplied): the
// condition is (K triangle K_n) cap Q = empty. Returns nullopt when no such
// index exists among the provided maps.
// ---------------------------------------------------------------------------

inline std::optional<std::size_t> kernels_escape(
    const std::vector<Homomorphism>& homs, const std::vector<GroupElt>& quorum,
    const std::function<bool(const GroupElt&)>* reference_kernel = nullptr) {
  if (homs.empty()) throw precondition_error("need at least one homomorphism");
  for (const Homomorphism& h : homs)
    if (h.source() != homs.front().source())
      throw precondition_error("homomorphisms must share one source model");
  const GroupElt id = homs.front().source().identity();

  std::optional<std::size_t> escape;
  for (std::size_t n = homs.size(); n-- > 0;) {
    bool violated = false;
    for (const GroupElt& q : quorum) {
      if (reference_kernel) {
        if ((*reference_kernel)(q) != homs[n].in_kernel(q)) {
          violated = true;
          break;
        }
      } else {
        if (q != id && homs[n].in_kernel(q)) {
          violated = true;
          break;
        }
      }
    }
    if (violated) break;
    escape = n + 1;  // 1-based
  }
  return escape;
}

}  // namespace fkdet
