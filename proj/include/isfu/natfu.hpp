// Functional units for the natural numbers: the counter, the Decr_n family,
// the universal units Univ and Univ3, and six-register machine programs.
#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "isfu/exec.hpp"
#include "isfu/isa.hpp"
#include "isfu/unit.hpp"

namespace isfu {

// ---------------------------------------------------------------------------
// Counter and Decr_n

inline UnitPtr counter_unit() {
  static const UnitPtr unit = [] {
    std::map<std::string, MethodOperation> ops;
    ops.emplace("setzero", MethodOperation::builtin("Setzero", [](const Natural&) {
                  return MethodResult{true, 0};
                }));
    ops.emplace("incr", MethodOperation::builtin("Incr", [](const Natural& x) {
                  return MethodResult{true, x + 1};
                }));
    ops.emplace("decr", MethodOperation::builtin("Decr", [](const Natural& x) {
                  return x > 0 ? MethodResult{true, x - 1} : MethodResult{false, 0};
                }));
    ops.emplace("iszero", MethodOperation::builtin("Iszero", [](const Natural& x) {
                  return MethodResult{x == 0, x};
                }));
    return std::make_shared<const FunctionalUnit>("counter", StateSpace::naturals(),
                                                  std::move(ops));
  }();
  return unit;
}

/// {decr_n, iszero}: Decr_n(x) = (T, x - n) if x >= n, else (F, 0).
inline UnitPtr decr_n_unit(const Natural& n) {
  std::map<std::string, MethodOperation> ops;
  ops.emplace("decr_n", MethodOperation::builtin("Decr_" + n.str(), [n](const Natural& x) {
                return x >= n ? MethodResult{true, x - n} : MethodResult{false, 0};
              }));
  ops.emplace("iszero", counter_unit()->op("iszero"));
  return std::make_shared<const FunctionalUnit>("decr" + n.str(),
                                                StateSpace::naturals(), std::move(ops));
}

// ---------------------------------------------------------------------------
// Univ

inline constexpr std::array<unsigned, 6> kRegisterPrimes{2, 3, 5, 7, 11, 13};
inline constexpr std::size_t kUnivOps = 20;

/// Canonical order M_0..M_19: exp2, fact5, then succ_i, pred_i, iszero_i for
/// i = 0..5.
inline const std::vector<std::string>& univ_method_order() {
  static const std::vector<std::string> order = [] {
    std::vector<std::string> v{"exp2", "fact5"};
    for (int i = 0; i < 6; ++i) {
      auto d = std::to_string(i);
      v.push_back("succ" + d);
      v.push_back("pred" + d);
      v.push_back("iszero" + d);
    }
    return v;
  }();
  return order;
}

inline UnitPtr univ_unit() {
  static const UnitPtr unit = [] {
    std::map<std::string, MethodOperation> ops;
    ops.emplace("exp2", MethodOperation::builtin("Exp2", [](const Natural& x) {
                  return MethodResult{true, pow2(x)};
                }));
    ops.emplace("fact5", MethodOperation::builtin("Fact5", [](const Natural& x) {
                  return MethodResult{true, multiplicity(x, 5)};
                }));
    for (int i = 0; i < 6; ++i) {
      const unsigned p = kRegisterPrimes[i];
      const auto d = std::to_string(i);
      ops.emplace("succ" + d, MethodOperation::builtin("Succ" + d, [p](const Natural& x) {
                    return MethodResult{true, x * p};
                  }));
      ops.emplace("pred" + d, MethodOperation::builtin("Pred" + d, [p](const Natural& x) {
                    if (x % p == 0) return MethodResult{true, x / p};
                    return MethodResult{false, x};
                  }));
      ops.emplace("iszero" + d, MethodOperation::builtin("Iszero" + d, [p](const Natural& x) {
                    return MethodResult{x % p != 0, x};
                  }));
    }
    return std::make_shared<const FunctionalUnit>("univ", StateSpace::naturals(),
                                                  std::move(ops));
  }();
  return unit;
}

/// M_i under the canonical order.
inline const MethodOperation& univ_op(std::size_t i) {
  return univ_unit()->op(univ_method_order().at(i));
}

// ---------------------------------------------------------------------------
// Univ3

namespace detail {

inline const Natural& three_pow_19() {
  static const Natural v = boost::multiprecision::pow(Natural(3), 19);
  return v;
}

/// x = 2^a * 3^b for some a, b (x >= 1): the only prime divisors are 2, 3.
inline bool only_primes_2_3(const Natural& x) {
  if (x == 0) return false;
  Natural r = x;
  while (r % 2 == 0) r /= 2;
  while (r % 3 == 0) r /= 3;
  return r == 1;
}

}  // namespace detail

inline MethodResult univ3_g2(const Natural& x) {
  if (!detail::only_primes_2_3(x)) return {false, 0};
  const Natural b = multiplicity(x, 3);
  if (b < 19) return {true, 3 * x};
  if (b == 19) return {true, x / detail::three_pow_19()};
  return {false, 0};
}

/// M_{fact3(x)}(fact2(x)); exponents of 3 beyond 19 select no operation and
/// yield (F, 0).
inline MethodResult univ3_g3(const Natural& x) {
  const Natural i = multiplicity(x, 3);
  if (i >= kUnivOps) return {false, 0};
  return univ_op(static_cast<std::size_t>(i))(multiplicity(x, 2));
}

inline UnitPtr univ3_unit() {
  static const UnitPtr unit = [] {
    std::map<std::string, MethodOperation> ops;
    ops.emplace("g1", MethodOperation::builtin("G1", [](const Natural& x) {
                  return MethodResult{true, pow2(x)};
                }));
    ops.emplace("g2", MethodOperation::builtin("G2", univ3_g2));
    ops.emplace("g3", MethodOperation::builtin("G3", univ3_g3));
    return std::make_shared<const FunctionalUnit>("univ3", StateSpace::naturals(),
                                                  std::move(ops));
  }();
  return unit;
}

/// f.g1 ; (f.g2)^i ; +f.g3 ; !t ; !f, computing M_i on Univ3.
inline InstructionSequence univ3_program(std::size_t i) {
  if (i >= kUnivOps)
    throw std::invalid_argument("univ3_program: index must be in [0, 19]");
  std::vector<Instruction> v{Instruction::plain({"f", "g1"})};
  auto rep = repeat_instruction(Instruction::plain({"f", "g2"}), i);
  v.insert(v.end(), rep.begin(), rep.end());
  v.push_back(Instruction::pos_test({"f", "g3"}));
  v.push_back(Instruction::halt_pos());
  v.push_back(Instruction::halt_neg());
  return InstructionSequence(std::move(v));
}

// ---------------------------------------------------------------------------
// Register machine programs (RML)

inline constexpr std::size_t kRegisters = 6;
using Registers = std::array<Natural, kRegisters>;

/// Register index of a focus `r0`..`r5`, or -1.
inline int register_index(const std::string& focus) {
  if (focus.size() == 2 && focus[0] == 'r' && focus[1] >= '0' && focus[1] <= '5')
    return focus[1] - '0';
  return -1;
}

inline bool is_register_method(const std::string& m) {
  return m == "incr" || m == "decr" || m == "iszero";
}

inline void check_rml(const InstructionSequence& p) {
  for (const auto& u : p) {
    if (!u.has_basic()) continue;
    const auto& a = u.basic();
    if (register_index(a.focus) < 0 || !is_register_method(a.method))
      throw std::invalid_argument("'" + a.str() +
                                  "' is not a register machine instruction");
  }
}

/// Control may leave P only by reaching position k+1 or by termination;
/// anything else would run into the decode block after translation.
inline void check_translatable(const InstructionSequence& p) {
  check_rml(p);
  const std::uint64_t k = p.size();
  for (std::uint64_t i = 1; i <= k; ++i) {
    const auto& u = p.at(i);
    if (u.is_jump()) {
      auto t = jump_target(u, i);
      if (!t || *t > k + 1)
        throw std::invalid_argument("jump at position " + std::to_string(i) +
                                    " leaves the program");
    } else if ((u.kind() == InstrKind::pos_test ||
                u.kind() == InstrKind::neg_test) &&
               i == k) {
      throw std::invalid_argument("test at the last position may skip past "
                                  "the end of the program");
    }
  }
}

inline Natural encode_registers(const Registers& r) {
  Natural x = 1;
  for (std::size_t i = 0; i < kRegisters; ++i)
    x *= boost::multiprecision::pow(Natural(kRegisterPrimes[i]),
                                    static_cast<unsigned>(r[i]));
  return x;
}

struct RmOutcome {
  ExecStatus status = ExecStatus::proven_divergent;
  Reply reply = Reply::D;     // beta(r1) when completed
  Natural output;             // r2 when completed
  Registers registers{};      // final registers when completed
  std::uint64_t steps = 0;    // register instructions executed
  std::vector<Registers> trace;  // registers after each register instruction
};

/// Direct six-register machine semantics: r0 = input, the others 0. The
/// program stops when control reaches position k+1 or a termination
/// instruction; the result is (beta(r1), r2) with beta(0) = T.
inline RmOutcome rm_run(const InstructionSequence& p, const Natural& input,
                        const ExecMode& mode = {}) {
  mode.validate();
  check_rml(p);
  const std::uint64_t k = p.size();
  RmOutcome out;
  Registers reg{};
  reg[0] = input;
  std::uint64_t pos = 1;
  std::uint64_t executed = 0;
  std::set<std::pair<std::uint64_t, Registers>> visited;

  auto finish = [&] {
    out.status = ExecStatus::completed;
    out.reply = reg[1] == 0 ? Reply::T : Reply::F;
    out.output = reg[2];
    out.registers = reg;
    return out;
  };

  while (true) {
    if (pos == k + 1) return finish();
    if (pos < 1 || pos > k) {
      out.status = ExecStatus::proven_divergent;
      return out;
    }
    if (mode.budget && executed >= *mode.budget) {
      out.status = ExecStatus::budget_exhausted;
      return out;
    }
    if (mode.detect_cycles && !visited.emplace(pos, reg).second) {
      out.status = ExecStatus::proven_divergent;
      return out;
    }
    ++executed;
    const auto& u = p.at(pos);
    switch (u.kind()) {
      case InstrKind::halt_pos:
      case InstrKind::halt_neg: return finish();
      case InstrKind::fwd_jump:
        if (u.count() == 0) {
          out.status = ExecStatus::proven_divergent;
          return out;
        }
        pos += u.count();
        continue;
      case InstrKind::bwd_jump:
        if (u.count() == 0 || u.count() >= pos) {
          out.status = ExecStatus::proven_divergent;
          return out;
        }
        pos -= u.count();
        continue;
      default: break;
    }
    Natural& c = reg[register_index(u.basic().focus)];
    const auto& m = u.basic().method;
    bool reply = true;
    if (m == "incr") {
      ++c;
    } else if (m == "decr") {
      if (c > 0) --c;
      else reply = false;
    } else {
      reply = c == 0;
    }
    ++out.steps;
    if (mode.record_trace) out.trace.push_back(reg);
    if (u.kind() == InstrKind::neg_test) reply = !reply;
    pos += (u.kind() == InstrKind::plain || reply) ? 1 : 2;
  }
}

/// f.exp2 ; phi(u_1) ; ... ; phi(u_k) ; -f.iszero1 ; #3 ; f.fact5 ; !t ;
/// f.fact5 ; !f, where phi renames r_i.incr/decr/iszero to f.succ_i/pred_i/
/// iszero_i and sends a termination at position i to the -f.iszero1 test.
inline InstructionSequence rmlful(const InstructionSequence& p) {
  check_translatable(p);
  const std::uint64_t k = p.size();
  static const std::map<std::string, std::string> psi{
      {"incr", "succ"}, {"decr", "pred"}, {"iszero", "iszero"}};
  std::vector<Instruction> v{Instruction::plain({"f", "exp2"})};
  for (std::uint64_t i = 1; i <= k; ++i) {
    const auto& u = p.at(i);
    if (u.has_basic()) {
      BasicInstruction b{"f", psi.at(u.basic().method) +
                                  std::to_string(register_index(u.basic().focus))};
      switch (u.kind()) {
        case InstrKind::plain: v.push_back(Instruction::plain(b)); break;
        case InstrKind::pos_test: v.push_back(Instruction::pos_test(b)); break;
        default: v.push_back(Instruction::neg_test(b)); break;
      }
    } else if (u.is_halt()) {
      v.push_back(Instruction::fwd_jump(k + 1 - i));
    } else {
      v.push_back(u);
    }
  }
  v.push_back(Instruction::neg_test({"f", "iszero1"}));
  v.push_back(Instruction::fwd_jump(3));
  v.push_back(Instruction::plain({"f", "fact5"}));
  v.push_back(Instruction::halt_pos());
  v.push_back(Instruction::plain({"f", "fact5"}));
  v.push_back(Instruction::halt_neg());
  return InstructionSequence(std::move(v));
}

}  // namespace isfu
