// Functional units: finite maps from method names to method operations over
// a state space.
#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isfu/isa.hpp"
#include "isfu/natural.hpp"

namespace isfu {

struct MethodResult {
  bool reply = true;
  Natural state;

  friend bool operator==(const MethodResult&, const MethodResult&) = default;
};

/// Entry s of a finite table is the (reply, next state) for state s.
using FiniteTable = std::vector<std::pair<bool, std::size_t>>;

/// A total function S -> Bool x S, presented either as a closed-form builtin
/// or as a table over a finite state space.
class MethodOperation {
 public:
  using Fn = std::function<MethodResult(const Natural&)>;

  static MethodOperation builtin(std::string name, Fn fn) {
    MethodOperation m;
    m.name_ = std::move(name);
    m.fn_ = std::move(fn);
    return m;
  }

  static MethodOperation from_table(FiniteTable t) {
    for (const auto& [b, s] : t)
      if (s >= t.size())
        throw std::invalid_argument("table entry leaves the state space");
    MethodOperation m;
    m.table_ = std::move(t);
    return m;
  }

  MethodResult operator()(const Natural& s) const {
    if (table_) {
      if (s >= table_->size())
        throw std::out_of_range("state " + s.str() +
                                " outside finite state space");
      const auto& [b, nx] = (*table_)[static_cast<std::size_t>(s)];
      return {b, Natural(nx)};
    }
    return fn_(s);
  }

  const std::optional<FiniteTable>& table() const noexcept { return table_; }
  const std::string& builtin_name() const noexcept { return name_; }

 private:
  MethodOperation() = default;
  std::string name_;
  Fn fn_;
  std::optional<FiniteTable> table_;
};

struct StateSpace {
  std::optional<std::size_t> finite;  // nullopt: the naturals

  static StateSpace naturals() { return {}; }
  static StateSpace of_size(std::size_t k) {
    if (k == 0) throw std::invalid_argument("state space must be nonempty");
    return {k};
  }
  bool is_finite() const noexcept { return finite.has_value(); }
  bool contains(const Natural& s) const { return !finite || s < *finite; }

  friend bool operator==(const StateSpace&, const StateSpace&) = default;
};

class FunctionalUnit {
 public:
  FunctionalUnit(std::string name, StateSpace space,
                 std::map<std::string, MethodOperation> ops)
      : name_(std::move(name)), space_(space), ops_(std::move(ops)) {
    for (const auto& [m, op] : ops_) {
      if (!is_identifier(m))
        throw std::invalid_argument("bad method name '" + m + "'");
      if (op.table()) {
        if (!space_.finite || op.table()->size() != *space_.finite)
          throw std::invalid_argument("table for '" + m +
                                      "' does not match the state space");
      }
    }
  }

  const std::string& name() const noexcept { return name_; }
  const StateSpace& space() const noexcept { return space_; }
  const std::map<std::string, MethodOperation>& ops() const noexcept {
    return ops_;
  }

  std::vector<std::string> interface() const {
    std::vector<std::string> out;
    for (const auto& [m, _] : ops_) out.push_back(m);
    return out;
  }

  bool has(const std::string& m) const { return ops_.count(m) != 0; }

  const MethodOperation& op(const std::string& m) const {
    auto it = ops_.find(m);
    if (it == ops_.end())
      throw std::invalid_argument("unit '" + name_ + "' has no method '" + m +
                                  "'");
    return it->second;
  }

  MethodResult apply(const std::string& m, const Natural& s) const {
    return op(m)(s);
  }

 private:
  std::string name_;
  StateSpace space_;
  std::map<std::string, MethodOperation> ops_;
};

using UnitPtr = std::shared_ptr<const FunctionalUnit>;

/// <I, H>: the pairs of H whose method name lies in I.
inline FunctionalUnit restrict(const FunctionalUnit& h,
                               const std::set<std::string>& names) {
  std::map<std::string, MethodOperation> ops;
  for (const auto& m : names) ops.emplace(m, h.op(m));
  std::string label = h.name() + "|{";
  bool first = true;
  for (const auto& m : names) {
    label += (first ? "" : ",") + m;
    first = false;
  }
  label += "}";
  return FunctionalUnit(std::move(label), h.space(), std::move(ops));
}

// ---------------------------------------------------------------------------
// Table files
//
//   states <k>
//   method <name>
//   <s> -> <T|F> <s'>     (k lines, each state 0..k-1 exactly once)
//   method <name>
//   ...

inline FunctionalUnit parse_unit_table(std::string_view text,
                                       std::string name = "table") {
  std::istringstream in{std::string(text)};
  std::string tok;
  auto fail = [](const std::string& why) -> void {
    throw std::invalid_argument("unit table: " + why);
  };
  if (!(in >> tok) || tok != "states") fail("expected 'states <k>'");
  std::size_t k = 0;
  if (!(in >> k) || k == 0) fail("state count must be a positive integer");
  std::map<std::string, MethodOperation> ops;
  while (in >> tok) {
    if (tok != "method") fail("expected 'method', got '" + tok + "'");
    std::string m;
    if (!(in >> m) || !is_identifier(m)) fail("bad method name");
    if (ops.count(m)) fail("duplicate method '" + m + "'");
    std::vector<std::optional<std::pair<bool, std::size_t>>> rows(k);
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t s = 0, nx = 0;
      std::string arrow, reply;
      if (!(in >> s >> arrow >> reply >> nx) || arrow != "->" ||
          (reply != "T" && reply != "F"))
        fail("method '" + m + "': expected '<s> -> <T|F> <s'>'");
      if (s >= k || nx >= k) fail("method '" + m + "': state out of range");
      if (rows[s]) fail("method '" + m + "': state listed twice");
      rows[s] = std::make_pair(reply == "T", nx);
    }
    FiniteTable t;
    for (auto& r : rows) t.push_back(*r);
    ops.emplace(m, MethodOperation::from_table(std::move(t)));
  }
  return FunctionalUnit(std::move(name), StateSpace::of_size(k),
                        std::move(ops));
}

inline std::string render_unit_table(const FunctionalUnit& h) {
  if (!h.space().finite)
    throw std::invalid_argument("only finite units have a table form");
  const std::size_t k = *h.space().finite;
  std::ostringstream os;
  os << "states " << k << '\n';
  for (const auto& [m, op] : h.ops()) {
    os << "method " << m << '\n';
    for (std::size_t s = 0; s < k; ++s) {
      auto r = op(Natural(s));
      os << s << " -> " << (r.reply ? 'T' : 'F') << ' ' << r.state << '\n';
    }
  }
  return os.str();
}

}  // namespace isfu
