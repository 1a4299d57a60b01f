// Randomized checks over finite state spaces shared by the unit tests and
// the acceptance runner.
#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "isfu/isfu.hpp"
#include "support/axioms.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace isfu::testing {

inline UnitPtr unit_from_codes(std::size_t k, const std::vector<FnCode>& codes,
                               const std::string& name = "h") {
  FiniteSpace sp(k);
  std::map<std::string, MethodOperation> ops;
  for (std::size_t i = 0; i < codes.size(); ++i)
    ops.emplace("m" + std::to_string(i), MethodOperation::from_table(sp.table_of(codes[i])));
  return std::make_shared<const FunctionalUnit>(name, StateSpace::of_size(k),
                                                std::move(ops));
}

inline std::vector<FnCode> random_codes(Gen& g, std::size_t k, std::size_t count) {
  FiniteSpace sp(k);
  std::vector<FnCode> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(sp.total_code(g.below(sp.total_operations())));
  return out;
}

inline std::vector<FnCode> sample_members(Gen& g, const ClosedSet& c,
                                          std::size_t count) {
  std::vector<FnCode> out;
  for (std::size_t i = 0; i < count && !c.members.empty(); ++i)
    out.push_back(c.members[g.below(c.members.size())]);
  return out;
}

inline bool subset(const ClosedSet& a, const ClosedSet& b) {
  return std::includes(b.members.begin(), b.members.end(), a.members.begin(),
                       a.members.end());
}

/// Preorder, equivalence and closure laws for units over S_k.
inline void preorder_case(Gen& g, std::size_t k, Tally& t) {
  auto g3 = random_codes(g, k, 1 + g.below(2));
  auto c3 = derived_closure(g3, k);
  auto g2 = sample_members(g, c3, 1 + g.below(2));
  auto c2 = derived_closure(g2, k);
  auto g1 = sample_members(g, c2, 1 + g.below(2));
  auto h1 = unit_from_codes(k, g1), h2 = unit_from_codes(k, g2),
       h3 = unit_from_codes(k, g3);
  auto hr = unit_from_codes(k, random_codes(g, k, 1 + g.below(2)));

  t.record("reflexive", leq_by_closure(*hr, *hr) && leq_by_closure(*h3, *h3));
  bool chain = leq_by_closure(*h1, *h2) && leq_by_closure(*h2, *h3);
  t.record("chain", chain);
  t.record("transitive", !chain || leq_by_closure(*h1, *h3));
  bool ab = leq_by_closure(*hr, *h3), bc = leq_by_closure(*h3, *h2);
  t.record("transitive", !(ab && bc) || leq_by_closure(*hr, *h2));

  // x == y iff x <= y and y <= x. Extending g3 by its own members stays
  // equivalent.
  auto ext = g3;
  auto more = sample_members(g, c3, 2);
  ext.insert(ext.end(), more.begin(), more.end());
  auto he = unit_from_codes(k, ext);
  auto equiv = [](const FunctionalUnit& a, const FunctionalUnit& b) {
    return leq_by_closure(a, b) && leq_by_closure(b, a);
  };
  t.record("equivalence", equiv(*h3, *he) && equiv(*he, *h3) && equiv(*hr, *hr));
  auto hr2 = unit_from_codes(k, random_codes(g, k, 1 + g.below(2)));
  if (equiv(*hr, *hr2) && equiv(*hr2, *h3))
    t.record("equivalence", equiv(*hr, *h3));
  t.record("equivalence",
           equiv(*hr, *hr2) ==
               (derived_closure(unit_codes(*hr), k) ==
                derived_closure(unit_codes(*hr2), k)));

  t.record("idempotent", derived_closure(c3.members, k) == c3);
  auto bigger = g3;
  auto extra = random_codes(g, k, 1 + g.below(2));
  bigger.insert(bigger.end(), extra.begin(), extra.end());
  t.record("monotone", subset(c3, derived_closure(bigger, k)) && subset(c2, c3));
}

/// One inline_compose case over S_k: a base unit H'' with methods p, q;
/// implementations of a, b as total programs over H''; H' given by the
/// operations those programs compute; then a random x over a, b.
inline void inline_compose_case(Gen& g, std::size_t k, std::size_t max_len,
                                Tally& t) {
  auto base = g.finite_unit(k, {"p", "q"}, "base");
  auto base_basics = basics_over({"f"}, {"p", "q"});
  std::map<std::string, InstructionSequence> impls;
  std::map<std::string, MethodOperation> ops;
  for (const char* m : {"a", "b"}) {
    while (true) {
      auto prog = g.program(base_basics, 6);
      auto cert = derived_op(prog, base).certify_finite();
      if (cert.totality != DerivedOperation::Totality::total) continue;
      impls.emplace(m, prog);
      ops.emplace(m, MethodOperation::from_table(cert.table));
      break;
    }
  }
  auto mid = std::make_shared<const FunctionalUnit>("mid", StateSpace::of_size(k),
                                                    std::move(ops));
  auto x = g.program(basics_over({"f"}, {"a", "b"}), max_len);
  auto y = inline_compose(x, impls);
  auto dx = derived_op(x, mid), dy = derived_op(y, base);
  bool ok = true;
  for (std::size_t s = 0; s < k; ++s) ok = ok && dx(s) == dy(s);
  t.record("inline_compose", ok, render_program(x) + " => " + render_program(y));
}

/// Total members of the closure of a single generator against brute-force
/// enumeration of normal-form programs with bodies up to `max_body`.
inline bool closure_matches_enumeration(std::size_t k, FnCode gen,
                                        std::size_t max_body) {
  FiniteSpace sp(k);
  auto closed = derived_closure(std::vector<FnCode>{gen}, k);
  std::vector<FnCode> found;
  for (const auto& table : enumerate_derived_tables(sp.table_of(gen), max_body))
    found.push_back(sp.code_of(table));
  std::sort(found.begin(), found.end());
  return found == closed.members;
}

}  // namespace isfu::testing
