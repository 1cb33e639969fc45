#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fkdet/errors.hpp"
#include "fkdet/group.hpp"

namespace fkdet {

inline constexpr std::int64_t kWordLengthCap = 14;
inline constexpr std::int64_t kPairStateBudget = 4000000;

// A group model together with an ordered generating family (repetitions
// allowed). The family defaults to the model's own generators.
struct MarkedGroup {
  Group model;
  std::vector<GroupElt> marks;

  explicit MarkedGroup(Group g) : model(std::move(g)), marks(model.generators()) {}
  MarkedGroup(Group g, std::vector<GroupElt> s) : model(std::move(g)), marks(std::move(s)) {
    if (marks.empty()) throw precondition_error("a marked group needs generators");
    for (const GroupElt& m : marks)
      if (!model.valid_form(m))
        throw precondition_error("marked generator is not in canonical form");
  }
  std::int64_t rank() const { return static_cast<std::int64_t>(marks.size()); }
};

// A word is a string of signed letters; its length is the number of letters.
struct WordLetter {
  int index = 1;  // 1-based generator index
  int sign = 1;   // +1 or -1
};
using Word = std::vector<WordLetter>;

inline GroupElt evaluate(const MarkedGroup& mg, const Word& w) {
  GroupElt acc = mg.model.identity();
  for (const WordLetter& l : w) {
    if (l.index < 1 || l.index > mg.rank())
      throw precondition_error("word letter out of range");
    const GroupElt& s = mg.marks[static_cast<std::size_t>(l.index - 1)];
    acc = mg.model.mul(acc, l.sign >= 0 ? s : mg.model.inv(s));
  }
  return acc;
}

struct MetricResult {
  double distance = 0.0;
  bool exact = false;      // false: upper bound at the search budget
  std::int64_t level = 0;  // first differing length/radius, or the budget
};

namespace marked_detail {

inline bool is_abelian(const Group& g) {
  switch (g.kind()) {
    case GroupKind::lattice:
    case GroupKind::lattice_mod:
    case GroupKind::cyclic_image:
      return true;
    default:
      return false;
  }
}

inline bool exponent_relation(const MarkedGroup& mg, const std::vector<std::int64_t>& nu) {
  GroupElt acc = mg.model.identity();
  for (std::size_t i = 0; i < nu.size(); ++i)
    if (nu[i] != 0)
      acc = mg.model.mul(acc, mg.model.pow(mg.marks[i], nu[i]));
  return acc == mg.model.identity();
}

// Enumerate exponent vectors of l1-norm exactly `total` and stop at the first
// one that is a relation in exactly one of the two marked groups.
inline bool l1_shell_discrepancy(const MarkedGroup& a, const MarkedGroup& b,
                                 std::int64_t total, std::vector<std::int64_t>& nu,
                                 std::size_t axis) {
  const std::size_t d = nu.size();
  if (axis == d - 1) {
    for (int s = 0; s < 2; ++s) {
      nu[axis] = s == 0 ? total : -total;
      if (exponent_relation(a, nu) != exponent_relation(b, nu)) return true;
      if (total == 0) break;
    }
    return false;
  }
  for (std::int64_t m = 0; m <= total; ++m) {
    for (int s = 0; s < 2; ++s) {
      nu[axis] = s == 0 ? m : -m;
      if (l1_shell_discrepancy(a, b, total - m, nu, axis + 1)) return true;
      if (m == 0) break;
    }
  }
  return false;
}

// Lockstep BFS over evaluation pairs. Words with equal evaluations in both
// groups collapse to one state, so the search is over the product Cayley
// graph; `on_state` sees each new state once, at its first (= shortest) word
// length, and may stop the search by returning true.
template <typename Callback>
inline std::optional<std::int64_t> pair_bfs(const MarkedGroup& a, const MarkedGroup& b,
                                            std::int64_t max_len, Callback&& on_state) {
  const std::int64_t d = a.rank();
  std::vector<std::pair<GroupElt, GroupElt>> moves;
  for (std::int64_t i = 0; i < d; ++i) {
    const GroupElt& sa = a.marks[static_cast<std::size_t>(i)];
    const GroupElt& sb = b.marks[static_cast<std::size_t>(i)];
    moves.emplace_back(sa, sb);
    moves.emplace_back(a.model.inv(sa), b.model.inv(sb));
  }
  std::map<std::pair<GroupElt, GroupElt>, char> seen;
  std::vector<std::pair<GroupElt, GroupElt>> frontier;
  const std::pair<GroupElt, GroupElt> origin{a.model.identity(), b.model.identity()};
  seen.emplace(origin, 1);
  frontier.push_back(origin);
  for (std::int64_t level = 1; level <= max_len; ++level) {
    std::vector<std::pair<GroupElt, GroupElt>> next;
    for (const auto& [ga, gb] : frontier) {
      for (const auto& [ma, mb] : moves) {
        std::pair<GroupElt, GroupElt> state{a.model.mul(ga, ma), b.model.mul(gb, mb)};
        if (seen.count(state)) continue;
        if (static_cast<std::int64_t>(seen.size()) >= kPairStateBudget)
          throw resource_error("pair enumeration exceeded the state budget", level - 1);
        seen.emplace(state, 1);
        if (on_state(state, level)) return level;
        next.push_back(std::move(state));
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

}  // namespace marked_detail

// delta distance: 2^{-M} where M is the smallest length at which the relation
// sets of the two markings differ; an upper-bound flag when no difference
// shows up among words of length < Lmax. Abelian pairs take the exponent-sum
// fast path (a word is a relation iff its exponent vector lies in the kernel
// lattice); `force_generic` keeps the word-level search for cross-checks.
inline MetricResult delta_distance(const MarkedGroup& a, const MarkedGroup& b,
                                   std::int64_t lmax = 10, bool force_generic = false) {
  if (a.rank() != b.rank()) throw precondition_error("marked groups must share the rank");
  if (lmax < 1 || lmax > kWordLengthCap)
    throw precondition_error("Lmax must lie in [1, 14]");

  if (!force_generic && marked_detail::is_abelian(a.model) &&
      marked_detail::is_abelian(b.model)) {
    std::vector<std::int64_t> nu(static_cast<std::size_t>(a.rank()), 0);
    for (std::int64_t len = 1; len < lmax; ++len)
      if (marked_detail::l1_shell_discrepancy(a, b, len, nu, 0))
        return {std::ldexp(1.0, static_cast<int>(-len)), true, len};
    return {std::ldexp(1.0, static_cast<int>(-lmax)), false, lmax};
  }

  const GroupElt ea = a.model.identity();
  const GroupElt eb = b.model.identity();
  const auto differ = marked_detail::pair_bfs(
      a, b, lmax - 1, [&](const std::pair<GroupElt, GroupElt>& st, std::int64_t) {
        return (st.first == ea) != (st.second == eb);
      });
  if (differ)
    return {std::ldexp(1.0, static_cast<int>(-*differ)), true, *differ};
  return {std::ldexp(1.0, static_cast<int>(-lmax)), false, lmax};
}

// Ball distance: 2^{-N} where N is the first radius at which the labeled
// balls stop being isomorphic, i.e. the first length at which the equality
// patterns of word evaluations disagree (the forced vertex pairing stops
// being a bijection).
inline MetricResult ball_distance(const MarkedGroup& a, const MarkedGroup& b,
                                  std::int64_t nmax = 10) {
  if (a.rank() != b.rank()) throw precondition_error("marked groups must share the rank");
  if (nmax < 1 || nmax > kWordLengthCap)
    throw precondition_error("Nmax must lie in [1, 14]");
  std::map<GroupElt, GroupElt> fwd, bwd;
  fwd.emplace(a.model.identity(), b.model.identity());
  bwd.emplace(b.model.identity(), a.model.identity());
  const auto differ = marked_detail::pair_bfs(
      a, b, nmax, [&](const std::pair<GroupElt, GroupElt>& st, std::int64_t) {
        auto f = fwd.find(st.first);
        if (f != fwd.end() && f->second != st.second) return true;
        auto r = bwd.find(st.second);
        if (r != bwd.end() && r->second != st.first) return true;
        fwd.emplace(st.first, st.second);
        bwd.emplace(st.second, st.first);
        return false;
      });
  if (differ)
    return {std::ldexp(1.0, static_cast<int>(-*differ)), true, *differ};
  return {std::ldexp(1.0, static_cast<int>(-nmax)), false, nmax};
}

// ---------------------------------------------------------------------------
// Convergence scan: tabulates delta(mg_n, target) and, when the quotient maps
// are supplied, the kernel-escape indices for balls of increasing radius in
// the target. The two views must agree: the kernels escape the radius-R ball
// exactly where delta drops below 2^{-R}.
// ---------------------------------------------------------------------------

struct ConvergenceRow {
  std::int64_t label = 0;
  double delta = 0.0;
  bool exact = false;
};

struct ConvergenceScan {
  std::vector<ConvergenceRow> rows;
  std::vector<std::pair<std::int64_t, std::optional<std::size_t>>> escapes;
  bool equivalence_consistent = true;
};

inline ConvergenceScan convergence_scan(const std::vector<MarkedGroup>& sequence,
                                        const MarkedGroup& target, std::int64_t lmax,
                                        const std::vector<Homomorphism>& homs = {},
                                        const std::vector<std::int64_t>& radii = {1, 2, 3},
                                        const std::vector<std::int64_t>& labels = {}) {
  if (!labels.empty() && labels.size() != sequence.size())
    throw precondition_error("one label per marked group");
  if (!homs.empty() && homs.size() != sequence.size())
    throw precondition_error("one homomorphism per marked group");
  for (const Homomorphism& h : homs)
    if (h.source() != target.model)
      throw precondition_error("homomorphisms must start at the target model");

  ConvergenceScan out;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const MetricResult d = delta_distance(sequence[i], target, lmax);
    out.rows.push_back(
        {labels.empty() ? static_cast<std::int64_t>(i + 1) : labels[i], d.distance, d.exact});
  }
  if (homs.empty()) return out;

  for (std::int64_t radius : radii) {
    if (radius >= lmax)
      throw precondition_error("escape radii must stay below Lmax");
    const LabeledBall ball = labeled_ball(target.model, target.marks, radius);
    out.escapes.emplace_back(radius, kernels_escape(homs, ball.verts));
    for (std::size_t i = 0; i < sequence.size(); ++i) {
      // delta < 2^{-radius} iff the kernel meets the radius ball only in e.
      const bool small_delta =
          out.rows[i].exact ? out.rows[i].delta < std::ldexp(1.0, static_cast<int>(-radius))
                            : true;
      bool kernel_clean = true;
      for (const GroupElt& q : ball.verts)
        if (q != target.model.identity() && homs[i].in_kernel(q)) {
          kernel_clean = false;
          break;
        }
      if (small_delta != kernel_clean) out.equivalence_consistent = false;
    }
  }
  return out;
}

}  // namespace fkdet
