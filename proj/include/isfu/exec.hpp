// Executing a regular thread against a service family (apply and reply).
#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "isfu/services.hpp"
#include "isfu/threads.hpp"

namespace isfu {

inline constexpr std::uint64_t kDefaultBudget = 1'000'000;

struct ExecMode {
  /// Maximum number of thread transitions (tau steps included).
  std::optional<std::uint64_t> budget = kDefaultBudget;
  /// Stop with ProvenDivergent when a (thread state, family) configuration
  /// repeats.
  bool detect_cycles = true;
  bool record_trace = false;

  void validate() const {
    if (!budget && !detect_cycles)
      throw std::invalid_argument(
          "exec mode needs a budget or cycle detection");
  }
};

enum class ExecStatus : unsigned char {
  completed,
  proven_divergent,
  budget_exhausted
};

inline const char* status_name(ExecStatus s) {
  switch (s) {
    case ExecStatus::completed: return "completed";
    case ExecStatus::proven_divergent: return "divergent";
    case ExecStatus::budget_exhausted: return "budget_exhausted";
  }
  return "";
}

struct TraceStep {
  std::size_t thread_state = 0;
  std::uint64_t position = 0;  // instruction position, 0 if unknown
  BasicInstruction action;
  Reply reply = Reply::T;
  Natural state;  // state of the addressed service after the step
};

struct ExecOutcome {
  ExecStatus status = ExecStatus::proven_divergent;
  Reply reply = Reply::D;
  ServiceFamily family;     // final family when completed, empty otherwise
  std::uint64_t steps = 0;  // basic actions processed
  std::vector<TraceStep> trace;
};

/// p . u and p ! u for a closed configuration.
///
/// Divergence is reported as ProvenDivergent only when it is certain:
/// deadlock, a missing focus, a rejected method, or a repeated
/// configuration. Repeats are found with Brent's cycle detection, which
/// is exact for the deterministic configuration sequence and keeps only one
/// saved configuration.
inline ExecOutcome run(const LinearSpec& t, const ServiceFamily& u,
                       const ExecMode& mode = {}) {
  mode.validate();
  std::vector<std::string> foci;
  std::vector<Service> services;
  for (const auto& [f, s] : u.services()) {
    foci.push_back(f);
    services.push_back(s);
  }
  constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  std::vector<std::size_t> focus_index(t.size(), kAbsent);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& e = t.entries[i];
    if (e.kind != EntryKind::post || e.action.is_tau()) continue;
    for (std::size_t j = 0; j < foci.size(); ++j)
      if (foci[j] == e.action.basic->focus) focus_index[i] = j;
  }

  ExecOutcome out;
  auto diverge = [&] {
    out.status = ExecStatus::proven_divergent;
    out.reply = Reply::D;
    out.family = ServiceFamily();
    return out;
  };

  std::size_t cur = t.root;
  std::uint64_t transitions = 0;
  std::size_t saved_cur = cur;
  std::vector<Service> saved = services;
  std::uint64_t power = 1, lam = 0;

  while (true) {
    const ThreadEntry& e = t.entries[cur];
    switch (e.kind) {
      case EntryKind::term_pos:
      case EntryKind::term_neg: {
        out.status = ExecStatus::completed;
        out.reply = e.kind == EntryKind::term_pos ? Reply::T : Reply::F;
        ServiceFamily::Map m;
        for (std::size_t j = 0; j < foci.size(); ++j)
          m.emplace(foci[j], services[j]);
        out.family = ServiceFamily(std::move(m));
        return out;
      }
      case EntryKind::deadlock: return diverge();
      case EntryKind::post: break;
    }
    if (mode.budget && transitions >= *mode.budget) {
      out.status = ExecStatus::budget_exhausted;
      out.reply = Reply::D;
      out.family = ServiceFamily();
      return out;
    }
    ++transitions;
    if (e.action.is_tau()) {
      cur = e.on_true;
    } else {
      const std::size_t j = focus_index[cur];
      if (j == kAbsent) return diverge();
      auto [r, next] = service_step(services[j], e.action.basic->method);
      if (r == Reply::D) return diverge();
      services[j] = std::move(next);
      ++out.steps;
      if (mode.record_trace)
        out.trace.push_back(
            {cur, t.origin[cur], *e.action.basic, r, services[j].state()});
      cur = r == Reply::T ? e.on_true : e.on_false;
    }
    if (mode.detect_cycles) {
      if (cur == saved_cur && services == saved) return diverge();
      if (++lam == power) {
        saved_cur = cur;
        saved = services;
        power *= 2;
        lam = 0;
      }
    }
  }
}

struct Reachability {
  std::set<Natural> states;
  bool complete = false;
};

/// States reachable from s0 through the effects of H's operations, explored
/// breadth-first until `bound` distinct states have been seen.
inline Reachability reachable_states(const FunctionalUnit& h,
                                     const Natural& s0, std::size_t bound) {
  Reachability r;
  if (bound == 0) return r;
  std::deque<Natural> work{s0};
  r.states.insert(s0);
  while (!work.empty()) {
    Natural s = std::move(work.front());
    work.pop_front();
    for (const auto& [m, op] : h.ops()) {
      Natural nx = op(s).state;
      if (r.states.count(nx)) continue;
      if (r.states.size() >= bound) return r;  // incomplete
      r.states.insert(nx);
      work.push_back(std::move(nx));
    }
  }
  r.complete = true;
  return r;
}

}  // namespace isfu
