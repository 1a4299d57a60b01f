// Functional units over finite state spaces S_k = {0, ..., k-1}: the
// derived-operation closure and functional unit degrees.
//
// A behaviour S_k -> (Bool x S_k) + {div} is stored as k entry codes. The
// entry code of (b, s) is 2s + (b ? 0 : 1); the code 2k marks divergence.
// A whole behaviour is the base-(2k+1) number whose most significant digit
// is the entry of state 0, so numeric order on codes is lexicographic table
// order.
#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "isfu/unit.hpp"

namespace isfu {

using FnCode = std::uint32_t;

inline constexpr std::size_t kDefaultMaxStates = 4;
/// (2k+1)^k must fit the closure bitmap; k = 6 gives 4.8M behaviours.
inline constexpr std::size_t kHardMaxStates = 6;

class FiniteSpace {
 public:
  explicit FiniteSpace(std::size_t k, std::size_t max_k = kHardMaxStates)
      : k_(k) {
    if (k == 0) throw std::invalid_argument("state space must be nonempty");
    if (k > max_k || k > kHardMaxStates)
      throw std::invalid_argument("state space of size " + std::to_string(k) +
                                  " exceeds the limit of " +
                                  std::to_string(std::min(max_k, kHardMaxStates)));
    radix_ = static_cast<FnCode>(2 * k + 1);
    behaviours_ = 1;
    for (std::size_t i = 0; i < k; ++i) behaviours_ *= radix_;
    totals_ = 1;
    for (std::size_t i = 0; i < k; ++i) totals_ *= 2 * k;
  }

  std::size_t k() const noexcept { return k_; }
  std::uint8_t div() const noexcept { return static_cast<std::uint8_t>(2 * k_); }
  std::uint64_t behaviours() const noexcept { return behaviours_; }
  /// |MO(S_k)| = (2k)^k.
  std::uint64_t total_operations() const noexcept { return totals_; }

  static std::uint8_t entry(bool reply, std::size_t s) {
    return static_cast<std::uint8_t>(2 * s + (reply ? 0 : 1));
  }

  FnCode encode(std::span<const std::uint8_t> entries) const {
    FnCode c = 0;
    for (auto e : entries) c = c * radix_ + e;
    return c;
  }

  std::vector<std::uint8_t> decode(FnCode c) const {
    std::vector<std::uint8_t> out(k_);
    for (std::size_t i = k_; i-- > 0;) {
      out[i] = static_cast<std::uint8_t>(c % radix_);
      c /= radix_;
    }
    return out;
  }

  bool is_total(FnCode c) const {
    for (auto e : decode(c))
      if (e == div()) return false;
    return true;
  }

  FnCode code_of(const FiniteTable& t) const {
    if (t.size() != k_) throw std::invalid_argument("table size mismatch");
    std::vector<std::uint8_t> e;
    for (const auto& [b, s] : t) e.push_back(entry(b, s));
    return encode(e);
  }

  FiniteTable table_of(FnCode c) const {
    FiniteTable t;
    for (auto e : decode(c)) {
      if (e == div()) throw std::invalid_argument("behaviour is not total");
      t.emplace_back(e % 2 == 0, e / 2);
    }
    return t;
  }

  FnCode code_of(const MethodOperation& m) const {
    FiniteTable t;
    for (std::size_t s = 0; s < k_; ++s) {
      auto r = m(Natural(s));
      if (r.state >= k_) throw std::invalid_argument("operation leaves S_k");
      t.emplace_back(r.reply, static_cast<std::size_t>(r.state));
    }
    return code_of(t);
  }

  /// Code of the i-th total operation in lexicographic order.
  FnCode total_code(std::uint64_t i) const {
    std::vector<std::uint8_t> e(k_);
    for (std::size_t s = k_; s-- > 0;) {
      e[s] = static_cast<std::uint8_t>(i % (2 * k_));
      i /= 2 * k_;
    }
    return encode(e);
  }

  FnCode constant_reply(bool reply) const {
    std::vector<std::uint8_t> e(k_);
    for (std::size_t s = 0; s < k_; ++s) e[s] = entry(reply, s);
    return encode(e);
  }

  FnCode diverging() const {
    return encode(std::vector<std::uint8_t>(k_, div()));
  }

 private:
  std::size_t k_;
  FnCode radix_;
  std::uint64_t behaviours_;
  std::uint64_t totals_;
};

/// Every total method operation on S_k in lexicographic table order.
inline std::vector<FnCode> enumerate_mo_codes(std::size_t k,
                                              std::size_t max_k =
                                                  kDefaultMaxStates) {
  FiniteSpace sp(k, max_k);
  std::vector<FnCode> out;
  out.reserve(sp.total_operations());
  for (std::uint64_t i = 0; i < sp.total_operations(); ++i)
    out.push_back(sp.total_code(i));
  return out;
}

inline std::vector<MethodOperation> enumerate_mo(
    std::size_t k, std::size_t max_k = kDefaultMaxStates) {
  FiniteSpace sp(k, max_k);
  std::vector<MethodOperation> out;
  for (auto c : enumerate_mo_codes(k, max_k))
    out.push_back(MethodOperation::from_table(sp.table_of(c)));
  return out;
}

/// The total members of a closure, sorted; doubles as its fingerprint.
struct ClosedSet {
  std::size_t k = 0;
  std::vector<FnCode> members;
  std::size_t with_partial = 0;  // closure size before dropping partial ones

  bool contains(FnCode c) const {
    return std::binary_search(members.begin(), members.end(), c);
  }
  std::size_t size() const noexcept { return members.size(); }

  friend bool operator==(const ClosedSet& a, const ClosedSet& b) {
    return a.k == b.k && a.members == b.members;
  }
};

/// Least set of behaviours containing (T, s), (F, s) and div, closed under
///   g(s) = let (b, s') = M(s) in b ? t(s') : f(s')
/// for M in `gens` and t, f in the set. Its total members are exactly the
/// derived method operations of a unit with operations `gens`.
inline ClosedSet derived_closure(std::span<const FnCode> gens, std::size_t k) {
  FiniteSpace sp(k);
  std::vector<std::uint8_t> seen(sp.behaviours(), 0);
  std::vector<std::uint8_t> flat;  // k entries per behaviour
  std::vector<FnCode> codes;

  auto add = [&](FnCode c) {
    if (seen[c]) return;
    seen[c] = 1;
    auto e = sp.decode(c);
    flat.insert(flat.end(), e.begin(), e.end());
    codes.push_back(c);
  };
  add(sp.constant_reply(true));
  add(sp.constant_reply(false));
  add(sp.diverging());

  struct Gen {
    std::vector<std::uint8_t> reply, next;
  };
  std::vector<Gen> gs;
  for (auto c : gens) {
    if (c >= sp.behaviours() || !sp.is_total(c))
      throw std::invalid_argument("generator is not a total operation on S_k");
    Gen g;
    for (auto e : sp.decode(c)) {
      g.reply.push_back(e % 2 == 0);
      g.next.push_back(e / 2);
    }
    gs.push_back(std::move(g));
  }

  std::vector<std::uint8_t> buf(k);
  auto combine = [&](const Gen& g, std::size_t ti, std::size_t fi) {
    const std::uint8_t* t = &flat[ti * k];
    const std::uint8_t* f = &flat[fi * k];
    for (std::size_t s = 0; s < k; ++s)
      buf[s] = g.reply[s] ? t[g.next[s]] : f[g.next[s]];
    add(sp.encode(buf));
  };

  // Semi-naive: each pair is combined once, when its later member is taken.
  for (std::size_t i = 0; i < codes.size(); ++i) {
    for (const auto& g : gs) {
      for (std::size_t j = 0; j <= i; ++j) {
        combine(g, i, j);
        if (j != i) combine(g, j, i);
      }
    }
  }

  ClosedSet out;
  out.k = k;
  out.with_partial = codes.size();
  for (auto c : codes)
    if (sp.is_total(c)) out.members.push_back(c);
  std::sort(out.members.begin(), out.members.end());
  return out;
}

inline std::vector<FnCode> unit_codes(const FunctionalUnit& h) {
  if (!h.space().finite)
    throw std::invalid_argument("unit '" + h.name() +
                                "' does not have a finite state space");
  FiniteSpace sp(*h.space().finite);
  std::vector<FnCode> out;
  for (const auto& [m, op] : h.ops()) out.push_back(sp.code_of(op));
  return out;
}

/// H <= H' on a shared finite state space.
inline bool leq_by_closure(const FunctionalUnit& h, const FunctionalUnit& hp) {
  if (!h.space().finite || !hp.space().finite)
    throw std::invalid_argument("leq_by_closure needs finite state spaces");
  if (h.space() != hp.space())
    throw std::invalid_argument("units have different state spaces");
  auto rhs = unit_codes(hp);
  auto closed = derived_closure(rhs, *hp.space().finite);
  for (auto c : unit_codes(h))
    if (!closed.contains(c)) return false;
  return true;
}

struct DegreeLimits {
  std::optional<std::size_t> max_closed_sets;
  std::optional<double> max_seconds;
  /// Shuffles the order in which generators are tried.
  std::optional<std::uint64_t> order_seed;
  std::size_t max_k = kDefaultMaxStates;
};

struct Degree {
  ClosedSet closure;
  std::vector<FnCode> generators;  // a smallest generating set
};

struct DegreeCount {
  std::size_t count = 0;
  bool exact = true;  // false: count is a lower bound
  std::vector<Degree> degrees;
};

/// Distinct derived closures D(H) over all H within MO(S_k), found by
/// breadth-first search that adds one generator at a time. Layer j holds
/// closures first reached with j generators, so recorded generator sets are
/// minimal.
inline DegreeCount count_degrees(std::size_t k, const DegreeLimits& limits = {}) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto ops = enumerate_mo_codes(k, limits.max_k);
  if (limits.order_seed) {
    std::mt19937_64 rng(*limits.order_seed);
    std::shuffle(ops.begin(), ops.end(), rng);
  }

  DegreeCount out;
  std::map<std::vector<FnCode>, std::size_t> index;
  auto insert = [&](ClosedSet c, std::vector<FnCode> gens) -> bool {
    auto [it, fresh] = index.try_emplace(c.members, out.degrees.size());
    if (fresh) out.degrees.push_back({std::move(c), std::move(gens)});
    return fresh;
  };
  insert(derived_closure({}, k), {});

  auto over_budget = [&] {
    if (limits.max_closed_sets && out.degrees.size() >= *limits.max_closed_sets)
      return true;
    if (limits.max_seconds) {
      std::chrono::duration<double> el = Clock::now() - start;
      if (el.count() > *limits.max_seconds) return true;
    }
    return false;
  };

  for (std::size_t i = 0; i < out.degrees.size(); ++i) {
    for (auto m : ops) {
      const auto& cur = out.degrees[i];
      if (cur.closure.contains(m)) continue;
      if (over_budget()) {
        out.exact = false;
        out.count = out.degrees.size();
        return out;
      }
      std::vector<FnCode> gens = cur.closure.members;
      gens.push_back(m);
      auto next = derived_closure(gens, k);
      std::vector<FnCode> g = cur.generators;
      g.push_back(m);
      insert(std::move(next), std::move(g));
    }
  }
  out.count = out.degrees.size();
  return out;
}

}  // namespace isfu
