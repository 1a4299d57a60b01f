// Test-only oracles. Nothing here goes through extract(), run() or the
// closure machinery; they re-state the semantics directly so they can be
// used to check those.
#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "isfu/isa.hpp"
#include "isfu/unit.hpp"

namespace isfu::testing {

/// Outcome of executing an instruction sequence on one service focus.
struct OracleResult {
  enum class Kind { defined, undefined } kind = Kind::undefined;
  bool reply = false;
  Natural state;

  friend bool operator==(const OracleResult&, const OracleResult&) = default;
};

/// Executes x position by position. A basic instruction on a focus other
/// than `focus`, or on a method the unit lacks, is divergence. A repeated
/// (position, state) pair is divergence; since execution is deterministic
/// the run can never terminate after that.
inline OracleResult interpret(const InstructionSequence& x,
                              const FunctionalUnit& h, const std::string& focus,
                              Natural s, std::uint64_t max_steps = 1'000'000) {
  const std::uint64_t n = x.size();
  std::uint64_t pos = 1;
  std::set<std::pair<std::uint64_t, Natural>> seen;
  for (std::uint64_t step = 0; step < max_steps; ++step) {
    if (pos < 1 || pos > n) return {};
    if (!seen.emplace(pos, s).second) return {};
    const auto& u = x.at(pos);
    switch (u.kind()) {
      case InstrKind::halt_pos: return {OracleResult::Kind::defined, true, s};
      case InstrKind::halt_neg: return {OracleResult::Kind::defined, false, s};
      case InstrKind::fwd_jump:
        pos += u.count();
        continue;
      case InstrKind::bwd_jump:
        if (u.count() >= pos) return {};
        pos -= u.count();
        continue;
      default: break;
    }
    const auto& a = u.basic();
    if (a.focus != focus || !h.has(a.method)) return {};
    auto r = h.apply(a.method, s);
    s = r.state;
    bool t = r.reply;
    switch (u.kind()) {
      case InstrKind::plain: pos += 1; break;
      case InstrKind::pos_test: pos += t ? 1 : 2; break;
      case InstrKind::neg_test: pos += t ? 2 : 1; break;
      default: break;
    }
  }
  return {};
}

/// Compact normal-form instruction for enumeration: a positive test on the
/// single method, or a jump.
struct CompactInstr {
  enum Op : std::uint8_t { test, fwd, bwd, halt_t, halt_f } op;
  std::uint8_t count;
};

/// All normal-form programs u_1 ; ... ; u_j ; !t ; !f with j <= max_body over
/// a single basic instruction. Forward jumps range up to one past the end
/// (every longer jump behaves the same); backward jumps up to one before the
/// start.
inline void for_each_normal_program(
    std::size_t max_body,
    const std::function<void(const std::vector<CompactInstr>&)>& visit) {
  for (std::size_t j = 0; j <= max_body; ++j) {
    const std::size_t n = j + 2;
    std::vector<std::vector<CompactInstr>> choices(j);
    for (std::size_t i = 1; i <= j; ++i) {
      auto& c = choices[i - 1];
      c.push_back({CompactInstr::test, 0});
      for (std::size_t l = 0; l <= n + 1 - i; ++l)
        c.push_back({CompactInstr::fwd, static_cast<std::uint8_t>(l)});
      for (std::size_t l = 1; l <= i; ++l)
        c.push_back({CompactInstr::bwd, static_cast<std::uint8_t>(l)});
    }
    std::vector<std::size_t> idx(j, 0);
    std::vector<CompactInstr> prog(n);
    prog[j] = {CompactInstr::halt_t, 0};
    prog[j + 1] = {CompactInstr::halt_f, 0};
    while (true) {
      for (std::size_t i = 0; i < j; ++i) prog[i] = choices[i][idx[i]];
      visit(prog);
      std::size_t d = 0;
      while (d < j && ++idx[d] == choices[d].size()) idx[d++] = 0;
      if (d == j) break;
    }
  }
}

inline InstructionSequence to_sequence(const std::vector<CompactInstr>& prog,
                                       const BasicInstruction& a) {
  std::vector<Instruction> out;
  for (const auto& u : prog) {
    switch (u.op) {
      case CompactInstr::test: out.push_back(Instruction::pos_test(a)); break;
      case CompactInstr::fwd: out.push_back(Instruction::fwd_jump(u.count)); break;
      case CompactInstr::bwd: out.push_back(Instruction::bwd_jump(u.count)); break;
      case CompactInstr::halt_t: out.push_back(Instruction::halt_pos()); break;
      case CompactInstr::halt_f: out.push_back(Instruction::halt_neg()); break;
    }
  }
  return InstructionSequence(std::move(out));
}

/// Executes a compact program against a finite table from state s.
/// Returns false on divergence (leaving the program or revisiting a
/// (position, state) pair).
inline bool interpret_compact(const std::vector<CompactInstr>& prog,
                              const FiniteTable& op, std::size_t s,
                              std::pair<bool, std::size_t>& result) {
  const std::size_t n = prog.size(), k = op.size();
  std::uint64_t small = 0;
  std::vector<bool> large(n * k > 64 ? n * k : 0, false);
  auto visit = [&](std::size_t i) {
    if (large.empty()) {
      if (small >> i & 1) return false;
      small |= std::uint64_t{1} << i;
      return true;
    }
    if (large[i]) return false;
    large[i] = true;
    return true;
  };
  std::size_t pos = 0;  // 0-based
  while (true) {
    if (pos >= n) return false;
    if (!visit(pos * k + s)) return false;
    const auto& u = prog[pos];
    switch (u.op) {
      case CompactInstr::halt_t: result = {true, s}; return true;
      case CompactInstr::halt_f: result = {false, s}; return true;
      case CompactInstr::fwd: pos += u.count; break;
      case CompactInstr::bwd:
        if (u.count > pos) return false;
        pos -= u.count;
        break;
      case CompactInstr::test: {
        auto [b, nx] = op[s];
        s = nx;
        pos += b ? 1 : 2;
        break;
      }
    }
  }
}

/// The total derived operations of the one-method unit {m -> op} found by
/// running every normal-form program with at most `max_body` instructions
/// before the termination tail.
inline std::set<FiniteTable> enumerate_derived_tables(const FiniteTable& op,
                                                      std::size_t max_body) {
  const std::size_t k = op.size();
  std::set<FiniteTable> out;
  FiniteTable t(k);
  for_each_normal_program(max_body, [&](const std::vector<CompactInstr>& prog) {
    for (std::size_t s = 0; s < k; ++s)
      if (!interpret_compact(prog, op, s, t[s])) return;
    out.insert(t);
  });
  return out;
}

}  // namespace isfu::testing
