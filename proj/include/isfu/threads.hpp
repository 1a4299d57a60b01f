// Regular threads presented as finite linear recursive specifications.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "isfu/isa.hpp"

namespace isfu {

/// Either the internal action tau or a basic action f.m.
struct Action {
  std::optional<BasicInstruction> basic;  // nullopt = tau

  static Action tau() { return {}; }
  static Action of(BasicInstruction a) { return {std::move(a)}; }
  bool is_tau() const noexcept { return !basic.has_value(); }
  std::string str() const { return basic ? basic->str() : "tau"; }

  friend auto operator<=>(const Action&, const Action&) = default;
};

enum class EntryKind : std::uint8_t { deadlock, term_pos, term_neg, post };

struct ThreadEntry {
  EntryKind kind = EntryKind::deadlock;
  Action action;
  std::size_t on_true = 0;
  std::size_t on_false = 0;

  static ThreadEntry deadlock() { return {}; }
  static ThreadEntry term_pos() { return {EntryKind::term_pos, {}, 0, 0}; }
  static ThreadEntry term_neg() { return {EntryKind::term_neg, {}, 0, 0}; }
  static ThreadEntry post(Action a, std::size_t t, std::size_t f) {
    return {EntryKind::post, std::move(a), t, f};
  }

  friend bool operator==(const ThreadEntry&, const ThreadEntry&) = default;
};

/// x_i = D | S+ | S- | x_t <| a |> x_f, state ids 0-based.
/// `origin[i]` is the 1-based instruction position a state was extracted
/// from, or 0 for states with no source position.
struct LinearSpec {
  std::vector<ThreadEntry> entries;
  std::size_t root = 0;
  std::vector<std::uint64_t> origin;

  LinearSpec() = default;
  LinearSpec(std::vector<ThreadEntry> e, std::size_t r,
             std::vector<std::uint64_t> o = {})
      : entries(std::move(e)), root(r), origin(std::move(o)) {
    if (origin.empty()) origin.assign(entries.size(), 0);
    validate();
  }

  std::size_t size() const noexcept { return entries.size(); }

  void validate() const {
    if (entries.empty()) throw std::invalid_argument("empty linear spec");
    if (root >= entries.size())
      throw std::invalid_argument("root out of range");
    if (origin.size() != entries.size())
      throw std::invalid_argument("origin table size mismatch");
    for (const auto& e : entries)
      if (e.kind == EntryKind::post &&
          (e.on_true >= entries.size() || e.on_false >= entries.size()))
        throw std::invalid_argument("successor state out of range");
  }

  bool has_tau() const {
    return std::any_of(entries.begin(), entries.end(), [](const auto& e) {
      return e.kind == EntryKind::post && e.action.is_tau();
    });
  }

  /// Structural equality (same numbering); use `bisimilar` for behaviour.
  friend bool operator==(const LinearSpec& a, const LinearSpec& b) {
    return a.root == b.root && a.entries == b.entries;
  }
};

// ---------------------------------------------------------------------------
// Extraction

/// Thread extraction. Jump chains are followed eagerly; a chain that runs out
/// of the sequence or revisits a position is deadlock.
inline LinearSpec extract(const InstructionSequence& x) {
  const std::uint64_t n = x.size();
  constexpr std::uint64_t kDead = 0;

  // resolved[p] for p in [1, n]: first non-jump position reached from p,
  // or kDead.
  std::vector<std::optional<std::uint64_t>> resolved(n + 1);
  auto resolve = [&](std::uint64_t p) -> std::uint64_t {
    if (p < 1 || p > n) return kDead;
    if (resolved[p]) return *resolved[p];
    std::vector<std::uint64_t> chain;
    std::vector<bool> on_chain(n + 1, false);
    std::uint64_t cur = p;
    std::uint64_t result = kDead;
    while (true) {
      if (cur < 1 || cur > n) { result = kDead; break; }
      if (resolved[cur]) { result = *resolved[cur]; break; }
      if (on_chain[cur]) { result = kDead; break; }
      const Instruction& u = x.at(cur);
      if (!u.is_jump()) { result = cur; break; }
      on_chain[cur] = true;
      chain.push_back(cur);
      auto t = jump_target(u, cur);
      cur = t ? *t : 0;
    }
    for (auto q : chain) resolved[q] = result;
    if (result != kDead) resolved[result] = result;
    return result;
  };

  std::vector<ThreadEntry> entries;
  std::vector<std::uint64_t> origin;
  std::map<std::uint64_t, std::size_t> state_of;  // position -> state id
  std::optional<std::size_t> dead_state;
  std::deque<std::uint64_t> work;

  auto state_for = [&](std::uint64_t pos) -> std::size_t {
    std::uint64_t r = resolve(pos);
    if (r == kDead) {
      if (!dead_state) {
        dead_state = entries.size();
        entries.push_back(ThreadEntry::deadlock());
        origin.push_back(0);
      }
      return *dead_state;
    }
    auto [it, fresh] = state_of.try_emplace(r, entries.size());
    if (fresh) {
      entries.emplace_back();
      origin.push_back(r);
      work.push_back(r);
    }
    return it->second;
  };

  const std::size_t root = state_for(1);
  while (!work.empty()) {
    std::uint64_t p = work.front();
    work.pop_front();
    const Instruction& u = x.at(p);
    const std::size_t id = state_of.at(p);
    ThreadEntry e;
    switch (u.kind()) {
      case InstrKind::plain: {
        auto next = state_for(p + 1);
        e = ThreadEntry::post(Action::of(u.basic()), next, next);
        break;
      }
      case InstrKind::pos_test: {
        auto t = state_for(p + 1);
        auto f = state_for(p + 2);
        e = ThreadEntry::post(Action::of(u.basic()), t, f);
        break;
      }
      case InstrKind::neg_test: {
        auto f = state_for(p + 1);
        auto t = state_for(p + 2);
        e = ThreadEntry::post(Action::of(u.basic()), t, f);
        break;
      }
      case InstrKind::halt_pos: e = ThreadEntry::term_pos(); break;
      case InstrKind::halt_neg: e = ThreadEntry::term_neg(); break;
      case InstrKind::fwd_jump:
      case InstrKind::bwd_jump:
        throw std::logic_error("unresolved jump during extraction");
    }
    entries[id] = std::move(e);
  }
  return LinearSpec(std::move(entries), root, std::move(origin));
}

// ---------------------------------------------------------------------------
// Finite threads and projection

class FiniteThread {
 public:
  using Ptr = std::shared_ptr<const FiniteThread>;

  static Ptr deadlock() { return leaf(EntryKind::deadlock); }
  static Ptr term_pos() { return leaf(EntryKind::term_pos); }
  static Ptr term_neg() { return leaf(EntryKind::term_neg); }
  static Ptr post(Action a, Ptr t, Ptr f) {
    auto p = std::shared_ptr<FiniteThread>(new FiniteThread());
    p->kind_ = EntryKind::post;
    p->action_ = std::move(a);
    p->on_true_ = std::move(t);
    p->on_false_ = std::move(f);
    return p;
  }

  EntryKind kind() const noexcept { return kind_; }
  const Action& action() const noexcept { return action_; }
  const Ptr& on_true() const noexcept { return on_true_; }
  const Ptr& on_false() const noexcept { return on_false_; }

  std::size_t depth() const {
    if (kind_ != EntryKind::post) return 0;
    return 1 + std::max(on_true_->depth(), on_false_->depth());
  }

  std::string str() const {
    switch (kind_) {
      case EntryKind::deadlock: return "D";
      case EntryKind::term_pos: return "S+";
      case EntryKind::term_neg: return "S-";
      case EntryKind::post:
        return "(" + on_true_->str() + " <| " + action_.str() + " |> " +
               on_false_->str() + ")";
    }
    return {};
  }

  friend bool operator==(const FiniteThread& a, const FiniteThread& b) {
    if (&a == &b) return true;
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ != EntryKind::post) return true;
    return a.action_ == b.action_ && *a.on_true_ == *b.on_true_ &&
           *a.on_false_ == *b.on_false_;
  }

 private:
  FiniteThread() = default;
  static Ptr leaf(EntryKind k) {
    auto p = std::shared_ptr<FiniteThread>(new FiniteThread());
    p->kind_ = k;
    return p;
  }

  EntryKind kind_ = EntryKind::deadlock;
  Action action_;
  Ptr on_true_;
  Ptr on_false_;
};

inline bool equal(const FiniteThread::Ptr& a, const FiniteThread::Ptr& b) {
  return *a == *b;
}

/// Approximation of depth n. Shared subterms are built once per
/// (state, depth), so the result is a DAG of size O(|s| * n).
inline FiniteThread::Ptr project(const LinearSpec& s, std::size_t n) {
  std::map<std::pair<std::size_t, std::size_t>, FiniteThread::Ptr> memo;
  auto go = [&](auto& self, std::size_t id, std::size_t depth)
      -> FiniteThread::Ptr {
    if (depth == 0) return FiniteThread::deadlock();
    const ThreadEntry& e = s.entries[id];
    switch (e.kind) {
      case EntryKind::deadlock: return FiniteThread::deadlock();
      case EntryKind::term_pos: return FiniteThread::term_pos();
      case EntryKind::term_neg: return FiniteThread::term_neg();
      case EntryKind::post: break;
    }
    auto key = std::make_pair(id, depth);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    auto r = FiniteThread::post(e.action, self(self, e.on_true, depth - 1),
                                self(self, e.on_false, depth - 1));
    memo.emplace(key, r);
    return r;
  };
  return go(go, s.root, n);
}

/// x <| tau |> y  ->  x <| tau |> x, applied bottom-up.
inline FiniteThread::Ptr tau_contract(const FiniteThread::Ptr& t) {
  if (t->kind() != EntryKind::post) return t;
  auto tt = tau_contract(t->on_true());
  if (t->action().is_tau()) return FiniteThread::post(t->action(), tt, tt);
  return FiniteThread::post(t->action(), tt, tau_contract(t->on_false()));
}

/// Unfolds a finite thread into a linear spec (one state per tree node).
inline LinearSpec spec_of(const FiniteThread::Ptr& t) {
  std::vector<ThreadEntry> entries;
  auto go = [&](auto& self, const FiniteThread::Ptr& node) -> std::size_t {
    std::size_t id = entries.size();
    entries.emplace_back();
    switch (node->kind()) {
      case EntryKind::deadlock: entries[id] = ThreadEntry::deadlock(); break;
      case EntryKind::term_pos: entries[id] = ThreadEntry::term_pos(); break;
      case EntryKind::term_neg: entries[id] = ThreadEntry::term_neg(); break;
      case EntryKind::post: {
        auto tt = self(self, node->on_true());
        auto ff = self(self, node->on_false());
        entries[id] = ThreadEntry::post(node->action(), tt, ff);
        break;
      }
    }
    return id;
  };
  go(go, t);
  return LinearSpec(std::move(entries), 0);
}

// ---------------------------------------------------------------------------
// Partition refinement

/// Coarsest partition of the states of `s` that respects entry kind, action
/// and the blocks of both successors. Returns the block id of every state.
inline std::vector<std::size_t> bisimulation_classes(const LinearSpec& s) {
  const std::size_t n = s.size();
  std::vector<std::size_t> block(n);
  {
    std::map<std::pair<EntryKind, Action>, std::size_t> label_ids;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& e = s.entries[i];
      Action a = e.kind == EntryKind::post ? e.action : Action::tau();
      auto [it, _] = label_ids.try_emplace({e.kind, a}, label_ids.size());
      block[i] = it->second;
    }
  }
  std::size_t count = 0;
  for (auto b : block) count = std::max(count, b + 1);
  while (true) {
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t>
        sig_ids;
    std::vector<std::size_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& e = s.entries[i];
      auto sig = e.kind == EntryKind::post
                     ? std::make_tuple(block[i], block[e.on_true] + 1,
                                       block[e.on_false] + 1)
                     : std::make_tuple(block[i], std::size_t{0},
                                       std::size_t{0});
      auto [it, _] = sig_ids.try_emplace(sig, sig_ids.size());
      next[i] = it->second;
    }
    block = std::move(next);
    if (sig_ids.size() == count) break;
    count = sig_ids.size();
  }
  return block;
}

/// Quotient by bisimilarity, restricted to states reachable from the root and
/// numbered breadth-first (true successor first). Bisimilar specs minimize to
/// structurally equal specs.
inline LinearSpec minimize(const LinearSpec& s) {
  auto block = bisimulation_classes(s);
  std::vector<std::optional<std::size_t>> new_id(s.size());
  std::vector<std::size_t> rep;  // representative state of each new id
  std::map<std::size_t, std::size_t> block_to_new;
  std::deque<std::size_t> work;
  auto visit = [&](std::size_t state) -> std::size_t {
    auto [it, fresh] = block_to_new.try_emplace(block[state], rep.size());
    if (fresh) {
      rep.push_back(state);
      work.push_back(state);
    }
    return it->second;
  };
  std::size_t root = visit(s.root);
  std::vector<ThreadEntry> entries;
  while (!work.empty()) {
    std::size_t st = work.front();
    work.pop_front();
    const auto& e = s.entries[st];
    std::size_t id = block_to_new.at(block[st]);
    if (entries.size() <= id) entries.resize(id + 1);
    if (e.kind == EntryKind::post) {
      auto t = visit(e.on_true);
      auto f = visit(e.on_false);
      entries[id] = ThreadEntry::post(e.action, t, f);
    } else {
      entries[id] = e;
    }
  }
  entries.resize(rep.size());
  return LinearSpec(std::move(entries), root);
}

inline LinearSpec disjoint_union(const LinearSpec& a, const LinearSpec& b) {
  std::vector<ThreadEntry> entries = a.entries;
  const std::size_t off = a.size();
  for (auto e : b.entries) {
    if (e.kind == EntryKind::post) {
      e.on_true += off;
      e.on_false += off;
    }
    entries.push_back(std::move(e));
  }
  return LinearSpec(std::move(entries), a.root);
}

/// Strong bisimilarity of the rooted structures; tau-free inputs only.
inline bool bisimilar(const LinearSpec& a, const LinearSpec& b) {
  if (a.has_tau() || b.has_tau())
    throw std::invalid_argument("bisimilar: specs must be tau-free");
  auto u = disjoint_union(a, b);
  auto block = bisimulation_classes(u);
  return block[a.root] == block[a.size() + b.root];
}

/// An instruction sequence whose extraction is bisimilar to `s`. Reachable
/// states are laid out breadth-first from the root; each post state becomes
/// `+a ; J_true ; J_false`.
inline InstructionSequence compile_thread(const LinearSpec& s) {
  if (s.has_tau())
    throw std::invalid_argument("compile_thread: spec must be tau-free");
  std::vector<std::size_t> order;
  std::vector<std::optional<std::size_t>> index(s.size());
  std::deque<std::size_t> work{s.root};
  index[s.root] = 0;
  order.push_back(s.root);
  while (!work.empty()) {
    auto st = work.front();
    work.pop_front();
    const auto& e = s.entries[st];
    if (e.kind != EntryKind::post) continue;
    for (auto nx : {e.on_true, e.on_false}) {
      if (!index[nx]) {
        index[nx] = order.size();
        order.push_back(nx);
        work.push_back(nx);
      }
    }
  }
  using detail::BlockItem;
  auto out = detail::relayout(order.size(), 0, {}, [&](std::size_t i) {
    const auto& e = s.entries[order[i - 1]];
    std::vector<BlockItem> block;
    switch (e.kind) {
      case EntryKind::deadlock:
        block = {{Instruction::fwd_jump(0)}};
        break;
      case EntryKind::term_pos: block = {{Instruction::halt_pos()}}; break;
      case EntryKind::term_neg: block = {{Instruction::halt_neg()}}; break;
      case EntryKind::post:
        block = {{Instruction::pos_test(*e.action.basic)},
                 {std::nullopt, *index[e.on_true] + 1, false},
                 {std::nullopt, *index[e.on_false] + 1, false}};
        break;
    }
    return block;
  });
  return InstructionSequence(std::move(out));
}

// ---------------------------------------------------------------------------
// Debug dump: one line per state, `<id>: D | S+ | S- | <action> ? <t> : <f>`,
// ids 1-based, the root line prefixed with `*`.

inline std::string dump(const LinearSpec& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& e = s.entries[i];
    if (i == s.root) os << '*';
    os << (i + 1) << ": ";
    switch (e.kind) {
      case EntryKind::deadlock: os << "D"; break;
      case EntryKind::term_pos: os << "S+"; break;
      case EntryKind::term_neg: os << "S-"; break;
      case EntryKind::post:
        os << e.action.str() << " ? " << (e.on_true + 1) << " : "
           << (e.on_false + 1);
        break;
    }
    os << '\n';
  }
  return os.str();
}

inline LinearSpec parse_dump(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::pair<std::size_t, ThreadEntry>> rows;
  std::optional<std::size_t> root;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("spec dump line " + std::to_string(lineno) +
                                ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    bool is_root = head[0] == '*';
    if (is_root) head.erase(0, 1);
    if (head.empty() || head.back() != ':') fail("expected '<id>:'");
    head.pop_back();
    std::size_t id = 0;
    try {
      id = std::stoul(head);
    } catch (const std::exception&) {
      fail("bad state id");
    }
    if (id == 0) fail("state ids start at 1");
    std::string tok;
    if (!(ls >> tok)) fail("missing entry");
    ThreadEntry e;
    if (tok == "D") {
      e = ThreadEntry::deadlock();
    } else if (tok == "S+") {
      e = ThreadEntry::term_pos();
    } else if (tok == "S-") {
      e = ThreadEntry::term_neg();
    } else {
      Action a;
      if (tok != "tau") {
        auto dot = tok.find('.');
        if (dot == std::string::npos) fail("bad action '" + tok + "'");
        try {
          a = Action::of({tok.substr(0, dot), tok.substr(dot + 1)});
        } catch (const std::invalid_argument&) {
          fail("bad action '" + tok + "'");
        }
      }
      std::string q, c;
      std::size_t t = 0, f = 0;
      if (!(ls >> q >> t >> c >> f) || q != "?" || c != ":" || t == 0 ||
          f == 0)
        fail("expected '<action> ? <id> : <id>'");
      e = ThreadEntry::post(a, t - 1, f - 1);
    }
    if (ls >> tok) fail("trailing input");
    if (is_root) {
      if (root) fail("duplicate root");
      root = id - 1;
    }
    rows.emplace_back(id - 1, std::move(e));
  }
  if (rows.empty()) throw std::invalid_argument("spec dump is empty");
  if (!root) throw std::invalid_argument("spec dump has no root marker");
  std::vector<std::optional<ThreadEntry>> slots(rows.size());
  for (auto& [id, e] : rows) {
    if (id >= slots.size() || slots[id])
      throw std::invalid_argument("spec dump ids must be 1..n, each once");
    slots[id] = std::move(e);
  }
  std::vector<ThreadEntry> entries;
  for (auto& s : slots) entries.push_back(std::move(*s));
  return LinearSpec(std::move(entries), *root);
}

}  // namespace isfu
