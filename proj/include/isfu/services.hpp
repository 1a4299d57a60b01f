// Services and service families.
#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>

#include "isfu/unit.hpp"

namespace isfu {

enum class Reply : unsigned char { T, F, D };

inline char reply_char(Reply r) {
  return r == Reply::T ? 'T' : r == Reply::F ? 'F' : 'D';
}

/// A functional unit paired with a state, or the empty service (no unit).
/// Two unit services are equal when they share the same unit object and
/// the same state.
class Service {
 public:
  Service() = default;  // empty
  Service(UnitPtr unit, Natural state)
      : unit_(std::move(unit)), state_(std::move(state)) {
    if (!unit_) throw std::invalid_argument("null functional unit");
    if (!unit_->space().contains(state_))
      throw std::invalid_argument("state " + state_.str() +
                                  " outside the state space of '" +
                                  unit_->name() + "'");
  }

  static Service empty() { return {}; }

  bool is_empty() const noexcept { return unit_ == nullptr; }
  const UnitPtr& unit() const noexcept { return unit_; }
  const Natural& state() const noexcept { return state_; }

  std::string str() const {
    return is_empty() ? "empty" : unit_->name() + "(" + state_.str() + ")";
  }

  friend bool operator==(const Service& a, const Service& b) {
    if (a.is_empty() || b.is_empty()) return a.is_empty() && b.is_empty();
    return a.unit_ == b.unit_ && a.state_ == b.state_;
  }

 private:
  UnitPtr unit_;
  Natural state_;
};

/// Reply and successor service for one method request.
inline std::pair<Reply, Service> service_step(const Service& s,
                                              const std::string& m) {
  if (s.is_empty() || !s.unit()->has(m)) return {Reply::D, Service::empty()};
  auto r = s.unit()->apply(m, s.state());
  return {r.reply ? Reply::T : Reply::F, Service(s.unit(), std::move(r.state))};
}

class ServiceFamily {
 public:
  using Map = std::map<std::string, Service>;

  ServiceFamily() = default;
  explicit ServiceFamily(Map m) : services_(std::move(m)) {}

  const Map& services() const noexcept { return services_; }
  bool empty() const noexcept { return services_.empty(); }
  std::size_t size() const noexcept { return services_.size(); }
  bool contains(const std::string& f) const { return services_.count(f) != 0; }
  const Service& at(const std::string& f) const { return services_.at(f); }

  std::string str() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [f, s] : services_) {
      out += (first ? "" : ", ") + f + " -> " + s.str();
      first = false;
    }
    return out + "}";
  }

  friend bool operator==(const ServiceFamily&,
                         const ServiceFamily&) = default;

 private:
  Map services_;
};

inline ServiceFamily singleton(const std::string& focus, Service s) {
  if (!is_identifier(focus))
    throw std::invalid_argument("bad focus '" + focus + "'");
  return ServiceFamily({{focus, std::move(s)}});
}

/// Union of the two families; a focus named in both collapses to empty.
inline ServiceFamily compose(const ServiceFamily& u, const ServiceFamily& v) {
  ServiceFamily::Map out = u.services();
  for (const auto& [f, s] : v.services()) {
    auto [it, fresh] = out.try_emplace(f, s);
    if (!fresh) it->second = Service::empty();
  }
  return ServiceFamily(std::move(out));
}

/// Drops every service whose focus is in `foci`.
inline ServiceFamily encapsulate(const std::set<std::string>& foci,
                                 const ServiceFamily& u) {
  ServiceFamily::Map out;
  for (const auto& [f, s] : u.services())
    if (!foci.count(f)) out.emplace(f, s);
  return ServiceFamily(std::move(out));
}

}  // namespace isfu
