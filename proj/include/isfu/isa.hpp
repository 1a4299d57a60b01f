// Instruction sequences with Boolean termination: syntax, parsing, rendering
// and the positive-test normal form.
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace isfu {

/// Raised by the program parser; `position` is a 0-based byte offset.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at offset " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

inline bool is_identifier(std::string_view s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

/// A focus.method pair.
struct BasicInstruction {
  std::string focus;
  std::string method;

  BasicInstruction() = default;
  BasicInstruction(std::string f, std::string m)
      : focus(std::move(f)), method(std::move(m)) {
    if (!is_identifier(focus) || !is_identifier(method))
      throw std::invalid_argument("malformed basic instruction '" + focus +
                                  "." + method + "'");
  }

  std::string str() const { return focus + "." + method; }

  friend auto operator<=>(const BasicInstruction&,
                          const BasicInstruction&) = default;
};

enum class InstrKind : std::uint8_t {
  plain,
  pos_test,
  neg_test,
  fwd_jump,
  bwd_jump,
  halt_pos,
  halt_neg,
};

/// Jump counters are 64-bit. Anything wider already points far outside any
/// representable sequence, so the parser rejects it rather than saturating.
using JumpCount = std::uint64_t;

class Instruction {
 public:
  static Instruction plain(BasicInstruction a) {
    return {InstrKind::plain, std::move(a), 0};
  }
  static Instruction pos_test(BasicInstruction a) {
    return {InstrKind::pos_test, std::move(a), 0};
  }
  static Instruction neg_test(BasicInstruction a) {
    return {InstrKind::neg_test, std::move(a), 0};
  }
  static Instruction fwd_jump(JumpCount l) { return {InstrKind::fwd_jump, {}, l}; }
  static Instruction bwd_jump(JumpCount l) { return {InstrKind::bwd_jump, {}, l}; }
  static Instruction halt_pos() { return {InstrKind::halt_pos, {}, 0}; }
  static Instruction halt_neg() { return {InstrKind::halt_neg, {}, 0}; }

  InstrKind kind() const noexcept { return kind_; }
  bool has_basic() const noexcept {
    return kind_ == InstrKind::plain || kind_ == InstrKind::pos_test ||
           kind_ == InstrKind::neg_test;
  }
  bool is_jump() const noexcept {
    return kind_ == InstrKind::fwd_jump || kind_ == InstrKind::bwd_jump;
  }
  bool is_halt() const noexcept {
    return kind_ == InstrKind::halt_pos || kind_ == InstrKind::halt_neg;
  }
  const BasicInstruction& basic() const {
    if (!has_basic()) throw std::logic_error("instruction has no basic part");
    return basic_;
  }
  JumpCount count() const {
    if (!is_jump()) throw std::logic_error("instruction is not a jump");
    return count_;
  }

  std::string str() const {
    switch (kind_) {
      case InstrKind::plain: return basic_.str();
      case InstrKind::pos_test: return "+" + basic_.str();
      case InstrKind::neg_test: return "-" + basic_.str();
      case InstrKind::fwd_jump: return "#" + std::to_string(count_);
      case InstrKind::bwd_jump: return "\\" + std::to_string(count_);
      case InstrKind::halt_pos: return "!t";
      case InstrKind::halt_neg: return "!f";
    }
    return {};
  }

  friend bool operator==(const Instruction&, const Instruction&) = default;

 private:
  Instruction(InstrKind k, BasicInstruction a, JumpCount l)
      : kind_(k), basic_(std::move(a)), count_(l) {}

  InstrKind kind_;
  BasicInstruction basic_;
  JumpCount count_;
};

/// Nonempty finite sequence of primitive instructions. Positions are 1-based
/// in all public operations, matching the usual reading of relative jumps.
class InstructionSequence {
 public:
  explicit InstructionSequence(std::vector<Instruction> instrs)
      : instrs_(std::move(instrs)) {
    if (instrs_.empty())
      throw std::invalid_argument("instruction sequence must be nonempty");
  }
  InstructionSequence(std::initializer_list<Instruction> instrs)
      : InstructionSequence(std::vector<Instruction>(instrs)) {}

  std::size_t size() const noexcept { return instrs_.size(); }
  /// 1-based access.
  const Instruction& at(std::size_t pos) const { return instrs_.at(pos - 1); }
  const std::vector<Instruction>& instructions() const noexcept {
    return instrs_;
  }
  auto begin() const { return instrs_.begin(); }
  auto end() const { return instrs_.end(); }

  friend bool operator==(const InstructionSequence&,
                         const InstructionSequence&) = default;

 private:
  std::vector<Instruction> instrs_;
};

namespace detail {

class ProgramScanner {
 public:
  explicit ProgramScanner(std::string_view text) : text_(text) {}

  InstructionSequence parse() {
    skip_ws();
    if (at_end()) throw ParseError("empty program", pos_);
    std::vector<Instruction> out;
    out.push_back(instruction());
    skip_ws();
    while (!at_end()) {
      expect(';');
      skip_ws();
      out.push_back(instruction());
      skip_ws();
    }
    return InstructionSequence(std::move(out));
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_ws() {
    while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                         text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  void expect(char c) {
    if (peek() != c)
      throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  Instruction instruction() {
    switch (peek()) {
      case '+': ++pos_; return Instruction::pos_test(basic());
      case '-': ++pos_; return Instruction::neg_test(basic());
      case '#': ++pos_; return Instruction::fwd_jump(nat());
      case '\\': ++pos_; return Instruction::bwd_jump(nat());
      case '!': {
        ++pos_;
        char c = peek();
        if (c == 't') { ++pos_; return Instruction::halt_pos(); }
        if (c == 'f') { ++pos_; return Instruction::halt_neg(); }
        throw ParseError("expected 't' or 'f' after '!'", pos_);
      }
      default: return Instruction::plain(basic());
    }
  }

  std::string ident() {
    std::size_t start = pos_;
    if (peek() < 'a' || peek() > 'z')
      throw ParseError("expected identifier", pos_);
    while (!at_end()) {
      char c = text_[pos_];
      if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')
        ++pos_;
      else
        break;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  BasicInstruction basic() {
    std::string f = ident();
    expect('.');
    std::string m = ident();
    return {std::move(f), std::move(m)};
  }

  JumpCount nat() {
    std::size_t start = pos_;
    if (peek() < '0' || peek() > '9') throw ParseError("expected natural", pos_);
    if (peek() == '0') {
      ++pos_;
      if (peek() >= '0' && peek() <= '9')
        throw ParseError("leading zero in natural", pos_);
      return 0;
    }
    JumpCount v = 0;
    constexpr JumpCount max = std::numeric_limits<JumpCount>::max();
    while (peek() >= '0' && peek() <= '9') {
      JumpCount d = static_cast<JumpCount>(peek() - '0');
      if (v > (max - d) / 10) throw ParseError("jump counter too large", start);
      v = v * 10 + d;
      ++pos_;
    }
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline InstructionSequence parse_program(std::string_view text) {
  return detail::ProgramScanner(text).parse();
}

inline std::string render_program(const InstructionSequence& x) {
  std::string out;
  for (const auto& u : x) {
    if (!out.empty()) out += " ; ";
    out += u.str();
  }
  return out;
}

/// u^0 = #1, u^1 = u, u^(n+2) = u ; u^(n+1).
inline InstructionSequence repeat_instruction(const Instruction& u,
                                              std::size_t n) {
  if (n == 0) return InstructionSequence{Instruction::fwd_jump(1)};
  return InstructionSequence(std::vector<Instruction>(n, u));
}

inline InstructionSequence concat(const InstructionSequence& a,
                                  const InstructionSequence& b) {
  std::vector<Instruction> out = a.instructions();
  out.insert(out.end(), b.begin(), b.end());
  return InstructionSequence(std::move(out));
}

/// Absolute target of a jump at 1-based `pos`; nullopt when the target is
/// position 0 or below (i.e. outside the sequence on the left).
inline std::optional<std::uint64_t> jump_target(const Instruction& u,
                                                std::uint64_t pos) {
  if (u.kind() == InstrKind::fwd_jump) {
    if (u.count() > std::numeric_limits<std::uint64_t>::max() - pos)
      return std::numeric_limits<std::uint64_t>::max();
    return pos + u.count();
  }
  if (u.count() >= pos) return std::nullopt;
  return pos - u.count();
}

/// A relative jump from `from` to `to` (both 1-based positions in the
/// output sequence).
inline Instruction jump_between(std::uint64_t from, std::uint64_t to) {
  return to >= from ? Instruction::fwd_jump(to - from)
                    : Instruction::bwd_jump(from - to);
}

namespace detail {

/// Re-lays out a sequence block by block. `emit(i)` yields the block for
/// old position i with jump placeholders expressed as old-position targets;
/// targets outside [1, n] (0 = none) turn into #0, which deadlocks exactly
/// like a jump out of the sequence.
struct BlockItem {
  std::optional<Instruction> fixed;  // emitted verbatim
  std::uint64_t old_target = 0;      // used when !fixed; 0 = out of range
  bool to_tail = false;              // old_target indexes the appended tail
};

template <typename Emit>
std::vector<Instruction> relayout(std::size_t n, std::size_t tail_size,
                                  const std::vector<Instruction>& tail,
                                  Emit emit) {
  std::vector<std::vector<BlockItem>> blocks(n);
  std::vector<std::uint64_t> start(n + 1);
  std::uint64_t next = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    blocks[i - 1] = emit(i);
    start[i - 1] = next;
    next += blocks[i - 1].size();
  }
  const std::uint64_t tail_start = next;
  std::vector<Instruction> out;
  out.reserve(next - 1 + tail_size);
  for (std::size_t i = 1; i <= n; ++i) {
    for (const auto& item : blocks[i - 1]) {
      const std::uint64_t here = out.size() + 1;
      if (item.fixed) {
        out.push_back(*item.fixed);
      } else if (item.to_tail) {
        out.push_back(jump_between(here, tail_start + item.old_target));
      } else if (item.old_target >= 1 && item.old_target <= n) {
        out.push_back(jump_between(here, start[item.old_target - 1]));
      } else {
        out.push_back(Instruction::fwd_jump(0));
      }
    }
  }
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

inline std::uint64_t in_range_or_zero(std::optional<std::uint64_t> t,
                                      std::size_t n) {
  return (t && *t >= 1 && *t <= n) ? *t : 0;
}

}  // namespace detail

/// True when every instruction except the last two is a positive test or a
/// jump and the sequence ends in `!t ; !f`.
inline bool is_normal_form(const InstructionSequence& x) {
  const auto& v = x.instructions();
  if (v.size() < 2) return false;
  if (v[v.size() - 2].kind() != InstrKind::halt_pos ||
      v.back().kind() != InstrKind::halt_neg)
    return false;
  for (std::size_t i = 0; i + 2 < v.size(); ++i)
    if (v[i].kind() != InstrKind::pos_test && !v[i].is_jump()) return false;
  return true;
}

/// Rewrites into u_1 ; ... ; u_k ; !t ; !f with every u_i a positive test or
/// a jump. Each basic instruction becomes a three-instruction block
/// `+a ; J_true ; J_false`; terminations become jumps into the tail.
inline InstructionSequence normalize(const InstructionSequence& x) {
  using detail::BlockItem;
  const std::size_t n = x.size();
  const std::vector<Instruction> tail{Instruction::halt_pos(),
                                      Instruction::halt_neg()};
  auto at = [&](std::uint64_t t) -> BlockItem {
    return {std::nullopt, (t >= 1 && t <= n) ? t : 0, false};
  };
  auto out = detail::relayout(n, 2, tail, [&](std::size_t i) {
    const Instruction& u = x.at(i);
    std::vector<BlockItem> block;
    switch (u.kind()) {
      case InstrKind::plain:
        block = {{Instruction::pos_test(u.basic())}, at(i + 1), at(i + 1)};
        break;
      case InstrKind::pos_test:
        block = {{Instruction::pos_test(u.basic())}, at(i + 1), at(i + 2)};
        break;
      case InstrKind::neg_test:
        block = {{Instruction::pos_test(u.basic())}, at(i + 2), at(i + 1)};
        break;
      case InstrKind::fwd_jump:
      case InstrKind::bwd_jump:
        block = {{std::nullopt, detail::in_range_or_zero(jump_target(u, i), n),
                  false}};
        break;
      case InstrKind::halt_pos: block = {{std::nullopt, 0, true}}; break;
      case InstrKind::halt_neg: block = {{std::nullopt, 1, true}}; break;
    }
    return block;
  });
  return InstructionSequence(std::move(out));
}

}  // namespace isfu
