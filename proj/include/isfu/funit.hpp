// Derived method operations and the <= relation between functional units.
#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isfu/exec.hpp"
#include "isfu/finfu.hpp"
#include "isfu/isa.hpp"
#include "isfu/services.hpp"
#include "isfu/threads.hpp"
#include "isfu/unit.hpp"

namespace isfu {

inline const std::string kDefaultFocus = "f";

struct PartialResult {
  enum class Kind : unsigned char { defined, undefined, unknown };

  Kind kind = Kind::undefined;
  bool reply = false;
  Natural state;

  static PartialResult defined(bool b, Natural s) {
    return {Kind::defined, b, std::move(s)};
  }
  static PartialResult undefined() { return {}; }
  static PartialResult unknown() { return {Kind::unknown, false, 0}; }

  bool is_defined() const noexcept { return kind == Kind::defined; }

  std::string str() const {
    switch (kind) {
      case Kind::defined:
        return std::string("(") + (reply ? "T" : "F") + ", " + state.str() + ")";
      case Kind::undefined: return "undefined";
      case Kind::unknown: return "unknown";
    }
    return {};
  }

  friend bool operator==(const PartialResult&, const PartialResult&) = default;
};

/// Checks that x only uses `focus` and methods of H.
inline void check_program_over(const InstructionSequence& x,
                               const FunctionalUnit& h,
                               const std::string& focus) {
  for (const auto& u : x) {
    if (!u.has_basic()) continue;
    const auto& a = u.basic();
    if (a.focus != focus)
      throw std::invalid_argument("instruction '" + a.str() +
                                  "' uses a focus other than '" + focus + "'");
    if (!h.has(a.method))
      throw std::invalid_argument("instruction '" + a.str() +
                                  "' names a method outside the interface of '" +
                                  h.name() + "'");
  }
}

/// |x|_H: evaluates x against the single service focus -> H(s).
class DerivedOperation {
 public:
  DerivedOperation(const InstructionSequence& x, UnitPtr h, std::string focus,
                   ExecMode mode)
      : thread_(extract(x)),
        unit_(std::move(h)),
        focus_(std::move(focus)),
        mode_(mode) {
    mode_.record_trace = false;
    mode_.validate();
    check_program_over(x, *unit_, focus_);
  }

  PartialResult operator()(const Natural& s) const {
    auto out = run(thread_, singleton(focus_, Service(unit_, s)), mode_);
    switch (out.status) {
      case ExecStatus::completed:
        return PartialResult::defined(out.reply == Reply::T,
                                      out.family.at(focus_).state());
      case ExecStatus::proven_divergent: return PartialResult::undefined();
      case ExecStatus::budget_exhausted: return PartialResult::unknown();
    }
    return PartialResult::unknown();
  }

  enum class Totality : unsigned char { total, partial, unknown };

  struct Certificate {
    Totality totality = Totality::unknown;
    FiniteTable table;  // filled when total
  };

  /// Evaluates every state of a finite space. `unknown` wins over `partial`
  /// only when no state was proven undefined.
  Certificate certify_finite() const {
    if (!unit_->space().finite)
      throw std::invalid_argument("certify_finite needs a finite state space");
    Certificate c;
    bool unknown = false;
    for (std::size_t s = 0; s < *unit_->space().finite; ++s) {
      auto r = (*this)(Natural(s));
      if (r.kind == PartialResult::Kind::undefined) {
        c.totality = Totality::partial;
        c.table.clear();
        return c;
      }
      if (r.kind == PartialResult::Kind::unknown) {
        unknown = true;
        continue;
      }
      c.table.emplace_back(r.reply, static_cast<std::size_t>(r.state));
    }
    c.totality = unknown ? Totality::unknown : Totality::total;
    if (unknown) c.table.clear();
    return c;
  }

  const LinearSpec& thread() const noexcept { return thread_; }

 private:
  LinearSpec thread_;
  UnitPtr unit_;
  std::string focus_;
  ExecMode mode_;
};

inline DerivedOperation derived_op(const InstructionSequence& x, UnitPtr h,
                                   const std::string& focus = kDefaultFocus,
                                   const ExecMode& mode = {}) {
  return DerivedOperation(x, std::move(h), focus, mode);
}

/// Replaces every `+f.m'` in x_m by the body of impls[m'] (both brought to
/// normal form first). Inside a substituted block the body's trailing
/// `!t ; !f` become `#2 ; #2`, continuing at the test's true and false
/// successors; body jumps that left the body become #0. Jumps of x_m are
/// re-targeted to the start of the instruction they pointed at, so jumps
/// spanning a block widen by its length. Bodies are substituted once and
/// are not themselves rescanned.
inline InstructionSequence inline_compose(
    const InstructionSequence& x_m,
    const std::map<std::string, InstructionSequence>& impls) {
  auto nf = [](const InstructionSequence& x) {
    return is_normal_form(x) ? x : normalize(x);
  };
  const InstructionSequence x = nf(x_m);
  std::map<std::string, std::vector<Instruction>> bodies;
  for (const auto& [m, prog] : impls) {
    auto p = nf(prog);
    std::vector<Instruction> body(p.begin(), p.end() - 2);
    const std::uint64_t len = p.size();  // body plus the two terminations
    for (std::size_t q = 1; q <= body.size(); ++q) {
      auto& u = body[q - 1];
      if (!u.is_jump()) continue;
      auto t = jump_target(u, q);
      if (!t || *t < 1 || *t > len) u = Instruction::fwd_jump(0);
    }
    body.push_back(Instruction::fwd_jump(2));
    body.push_back(Instruction::fwd_jump(2));
    bodies.emplace(m, std::move(body));
  }

  const std::size_t n = x.size();
  for (std::size_t i = 1; i + 2 <= n; ++i) {
    const auto& u = x.at(i);
    if (u.kind() == InstrKind::pos_test && !bodies.count(u.basic().method))
      throw std::invalid_argument("no implementation for method '" +
                                  u.basic().method + "'");
  }

  using detail::BlockItem;
  auto out = detail::relayout(n, 0, {}, [&](std::size_t i) {
    const auto& u = x.at(i);
    std::vector<BlockItem> block;
    if (u.kind() == InstrKind::pos_test) {
      for (const auto& b : bodies.at(u.basic().method)) block.push_back({b});
    } else if (u.is_jump()) {
      block.push_back(
          {std::nullopt, detail::in_range_or_zero(jump_target(u, i), n), false});
    } else {
      block.push_back({u});
    }
    return block;
  });
  return InstructionSequence(std::move(out));
}

/// H <= H' on a finite state space, decided through the derived closure.
inline bool check_leq_finite(const FunctionalUnit& h, const FunctionalUnit& hp) {
  if (!h.space().finite || !hp.space().finite)
    throw std::invalid_argument(
        "<= is only decided for finite state spaces; use a witness check");
  return leq_by_closure(h, hp);
}

/// Checks user-supplied programs as evidence for H <= H' on sample states:
/// every operation m of H must agree with |programs[m]|_H' on each sample.
inline bool check_leq_witness(const FunctionalUnit& h, UnitPtr hp,
                              const std::map<std::string, InstructionSequence>& programs,
                              std::span<const Natural> samples,
                              const ExecMode& mode = {}) {
  for (const auto& [m, op] : h.ops()) {
    auto it = programs.find(m);
    if (it == programs.end()) return false;
    auto d = derived_op(it->second, hp, kDefaultFocus, mode);
    for (const auto& s : samples) {
      auto want = op(s);
      auto got = d(s);
      if (!got.is_defined() || got.reply != want.reply ||
          got.state != want.state)
        return false;
    }
  }
  return true;
}

/// Sound refutation of "some |x|_H maps s to target": true only when the
/// reachable set from s is complete within `bound` and misses the target
/// state. Inconclusive searches return false.
inline bool refute_derivability(const FunctionalUnit& h, const Natural& s,
                                const MethodResult& target, std::size_t bound) {
  auto r = reachable_states(h, s, bound);
  return r.complete && !r.states.count(target.state);
}

}  // namespace isfu
