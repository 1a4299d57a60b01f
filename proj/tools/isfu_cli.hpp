// Command-line front end. `dispatch` is kept separate from main() so the
// test suite can drive it in-process.
#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isfu/isfu.hpp"

namespace isfu::cli {

enum ExitCode : int {
  kOk = 0,
  kReplyF = 1,
  kDivergent = 2,
  kBudgetExhausted = 3,
  kUsage = 64,
  kDataError = 65,
};

/// Bad option values detected after CLI11 accepted the command line.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unreadable files and malformed file contents.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline InstructionSequence load_program(const std::string& path) {
  try {
    return parse_program(read_file(path));
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline FunctionalUnit load_table(const std::string& path) {
  try {
    return parse_unit_table(read_file(path), path);
  } catch (const std::invalid_argument& e) {
    throw DataError(path + ": " + e.what());
  }
}

/// `f=counter:0`, `f=univ:12`, `f=univ3:4`, `f=table:<file>:<state>`,
/// comma-separated. Repeated foci collapse to the empty service, as in
/// family composition.
inline ServiceFamily parse_family(const std::string& literal) {
  ServiceFamily out;
  std::stringstream ss(literal);
  std::string item;
  auto bad = [&](const std::string& why) {
    return UsageError("family literal '" + item + "': " + why);
  };
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw bad("expected <focus>=<unit>:<state>");
    std::string focus = item.substr(0, eq);
    std::string rest = item.substr(eq + 1);
    if (!is_identifier(focus)) throw bad("bad focus");
    auto colon = rest.find(':');
    if (colon == std::string::npos) throw bad("missing ':<state>'");
    std::string kind = rest.substr(0, colon);
    std::string arg = rest.substr(colon + 1);
    UnitPtr unit;
    std::string state_text = arg;
    if (kind == "counter") {
      unit = counter_unit();
    } else if (kind == "univ") {
      unit = univ_unit();
    } else if (kind == "univ3") {
      unit = univ3_unit();
    } else if (kind == "table") {
      auto last = arg.rfind(':');
      if (last == std::string::npos) throw bad("expected table:<file>:<state>");
      unit = std::make_shared<const FunctionalUnit>(load_table(arg.substr(0, last)));
      state_text = arg.substr(last + 1);
    } else {
      throw bad("unknown unit '" + kind + "'");
    }
    Natural state;
    try {
      state = parse_natural(state_text);
    } catch (const std::invalid_argument&) {
      throw bad("bad state '" + state_text + "'");
    }
    if (!unit->space().contains(state)) throw bad("state outside the state space");
    out = compose(out, singleton(focus, Service(unit, state)));
  }
  if (out.empty()) throw UsageError("empty family literal");
  return out;
}

/// "a..b" or a comma-separated list of naturals.
inline std::vector<Natural> parse_inputs(const std::string& text) {
  std::vector<Natural> out;
  try {
    auto dots = text.find("..");
    if (dots != std::string::npos) {
      Natural lo = parse_natural(text.substr(0, dots));
      Natural hi = parse_natural(text.substr(dots + 2));
      for (Natural n = lo; n <= hi; ++n) out.push_back(n);
      return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_natural(item));
  } catch (const std::invalid_argument&) {
    throw UsageError("bad --inputs '" + text + "'");
  }
  return out;
}

inline std::string service_state(const Service& s) {
  return s.is_empty() ? "empty" : s.state().str();
}

/// Single focus: `2`; several: `f:2,g:5`.
inline std::string family_states(const ServiceFamily& u) {
  if (u.size() == 1) return service_state(u.services().begin()->second);
  std::string out;
  for (const auto& [f, s] : u.services())
    out += (out.empty() ? "" : ",") + f + ":" + service_state(s);
  return out.empty() ? "-" : out;
}

/// Compact behaviour table: `T0/F1` is (T,0) on state 0, (F,1) on state 1.
inline std::string behaviour_str(const FiniteSpace& sp, FnCode c) {
  std::string out;
  for (auto e : sp.decode(c)) {
    if (!out.empty()) out += '/';
    if (e == sp.div()) out += "D";
    else out += (e % 2 == 0 ? "T" : "F") + std::to_string(e / 2);
  }
  return out;
}

inline nlohmann::json spec_json_line(const LinearSpec& s, std::size_t i) {
  const auto& e = s.entries[i];
  nlohmann::json j{{"id", i + 1}, {"root", i == s.root}};
  switch (e.kind) {
    case EntryKind::deadlock: j["kind"] = "D"; break;
    case EntryKind::term_pos: j["kind"] = "S+"; break;
    case EntryKind::term_neg: j["kind"] = "S-"; break;
    case EntryKind::post:
      j["kind"] = "post";
      j["action"] = e.action.str();
      j["true"] = e.on_true + 1;
      j["false"] = e.on_false + 1;
      break;
  }
  return j;
}

inline int dispatch(const std::vector<std::string>& args, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{"Instruction sequences, service families and functional units",
               "isfu"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "Line-delimited JSON output");
  app.fallthrough();

  // run
  std::string program_path, family_literal;
  std::uint64_t budget = kDefaultBudget;
  bool trace = false, no_cycles = false;
  auto* run_cmd = app.add_subcommand("run", "Run a program against a service family");
  run_cmd->add_option("--program", program_path, "Program file")->required();
  run_cmd->add_option("--family", family_literal, "Family literal")->required();
  run_cmd->add_option("--budget", budget, "Maximum thread transitions");
  run_cmd->add_flag("--trace", trace, "Print one line per basic action");
  run_cmd->add_flag("--no-cycle-detection", no_cycles, "Rely on the budget only");

  auto* extract_cmd = app.add_subcommand("extract", "Print the extracted thread");
  extract_cmd->add_option("--program", program_path, "Program file")->required();

  auto* normalize_cmd =
      app.add_subcommand("normalize", "Rewrite into positive-test normal form");
  normalize_cmd->add_option("--program", program_path, "Program file")->required();

  std::string spec_path;
  auto* compile_cmd = app.add_subcommand(
      "compile-thread", "Compile a thread dump back into an instruction sequence");
  compile_cmd->add_option("--spec", spec_path, "Thread dump file")->required();

  std::string rml_path, inputs_text;
  auto* translate_cmd =
      app.add_subcommand("translate", "Translate an RML program for Univ");
  translate_cmd->add_option("--rml", rml_path, "RML program file")->required();

  auto* cosim_cmd = app.add_subcommand(
      "cosim", "Compare the register machine with its Univ translation");
  cosim_cmd->add_option("--rml", rml_path, "RML program file")->required();
  cosim_cmd->add_option("--inputs", inputs_text, "Inputs, a..b or a,b,c")->required();
  cosim_cmd->add_option("--budget", budget, "Maximum steps per run");

  std::size_t k = 2;
  bool list = false;
  std::size_t max_sets = 0, max_k = kDefaultMaxStates;
  double max_seconds = 0;
  auto* degrees_cmd =
      app.add_subcommand("degrees", "Count functional unit degrees over S_k");
  degrees_cmd->add_option("--k", k, "Number of states")->required();
  degrees_cmd->add_flag("--list", list, "One line per degree");
  degrees_cmd->add_option("--max-sets", max_sets, "Stop after this many closed sets");
  degrees_cmd->add_option("--max-seconds", max_seconds, "Stop after this many seconds");
  degrees_cmd->add_option("--max-k", max_k, "Largest accepted k");

  std::string left_path, right_path;
  auto* leq_cmd = app.add_subcommand("leq", "Decide H <= H' for finite table units");
  leq_cmd->add_option("--left", left_path, "Table file for H")->required();
  leq_cmd->add_option("--right", right_path, "Table file for H'")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (run_cmd->parsed()) {
      auto x = load_program(program_path);
      auto family = parse_family(family_literal);
      ExecMode mode;
      mode.budget = budget;
      mode.detect_cycles = !no_cycles;
      mode.record_trace = trace;
      auto o = run(extract(x), family, mode);
      for (const auto& st : o.trace) {
        if (json) {
          out << nlohmann::json{{"pos", st.position},
                                {"action", st.action.str()},
                                {"reply", std::string(1, reply_char(st.reply))},
                                {"state", st.state.str()}}
                     .dump()
              << '\n';
        } else {
          out << "pos=" << st.position << " action=" << st.action.str()
              << " reply=" << reply_char(st.reply) << " state=" << st.state
              << '\n';
        }
      }
      if (json) {
        nlohmann::json fam = nlohmann::json::object();
        for (const auto& [f, s] : o.family.services()) fam[f] = service_state(s);
        out << nlohmann::json{{"status", status_name(o.status)},
                              {"reply", std::string(1, reply_char(o.reply))},
                              {"family", fam},
                              {"steps", o.steps}}
                   .dump()
            << '\n';
      } else {
        out << "reply=" << reply_char(o.reply)
            << " state=" << family_states(o.family) << '\n';
        out << "status=" << status_name(o.status) << " steps=" << o.steps << '\n';
      }
      switch (o.status) {
        case ExecStatus::completed: return o.reply == Reply::T ? kOk : kReplyF;
        case ExecStatus::proven_divergent: return kDivergent;
        case ExecStatus::budget_exhausted: return kBudgetExhausted;
      }
    }

    if (extract_cmd->parsed()) {
      auto s = extract(load_program(program_path));
      if (json) {
        for (std::size_t i = 0; i < s.size(); ++i)
          out << spec_json_line(s, i).dump() << '\n';
      } else {
        out << dump(s);
      }
      return kOk;
    }

    auto print_program = [&](const InstructionSequence& x) {
      if (json)
        out << nlohmann::json{{"program", render_program(x)}, {"length", x.size()}}
                   .dump()
            << '\n';
      else
        out << render_program(x) << '\n';
    };

    if (normalize_cmd->parsed()) {
      print_program(normalize(load_program(program_path)));
      return kOk;
    }

    if (compile_cmd->parsed()) {
      LinearSpec s;
      try {
        s = parse_dump(read_file(spec_path));
      } catch (const std::invalid_argument& e) {
        throw DataError(spec_path + ": " + e.what());
      }
      if (s.has_tau()) throw DataError(spec_path + ": tau actions cannot be compiled");
      print_program(compile_thread(s));
      return kOk;
    }

    auto load_rml = [&] {
      auto p = load_program(rml_path);
      try {
        check_translatable(p);
      } catch (const std::invalid_argument& e) {
        throw DataError(rml_path + ": " + e.what());
      }
      return p;
    };

    if (translate_cmd->parsed()) {
      print_program(rmlful(load_rml()));
      return kOk;
    }

    if (cosim_cmd->parsed()) {
      auto p = load_rml();
      auto inputs = parse_inputs(inputs_text);
      ExecMode mode;
      mode.budget = budget;
      auto translated = derived_op(rmlful(p), univ_unit(), kDefaultFocus, mode);
      for (const auto& n : inputs) {
        auto oracle = rm_run(p, n, mode);
        auto got = translated(n);
        std::string oracle_text =
            oracle.status == ExecStatus::completed
                ? PartialResult::defined(oracle.reply == Reply::T, oracle.output).str()
                : (oracle.status == ExecStatus::proven_divergent ? "undefined"
                                                                 : "unknown");
        bool agree = oracle_text == got.str();
        if (json)
          out << nlohmann::json{{"input", n.str()},
                                {"oracle", oracle_text},
                                {"translated", got.str()},
                                {"agree", agree}}
                     .dump()
              << '\n';
        else
          out << "input=" << n << " oracle=" << oracle_text
              << " translated=" << got.str() << " agree=" << (agree ? "yes" : "no")
              << '\n';
      }
      return kOk;
    }

    if (degrees_cmd->parsed()) {
      DegreeLimits limits;
      if (max_sets) limits.max_closed_sets = max_sets;
      if (max_seconds > 0) limits.max_seconds = max_seconds;
      limits.max_k = max_k;
      DegreeCount r;
      try {
        r = count_degrees(k, limits);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      FiniteSpace sp(k, max_k);
      auto join = [&](const std::vector<FnCode>& cs) {
        std::string s;
        for (auto c : cs) s += (s.empty() ? "" : ",") + behaviour_str(sp, c);
        return s;
      };
      if (list) {
        for (const auto& d : r.degrees) {
          if (json)
            out << nlohmann::json{{"fingerprint", join(d.closure.members)},
                                  {"size", d.closure.size()},
                                  {"generators", join(d.generators)}}
                       .dump()
                << '\n';
          else
            out << "fingerprint={" << join(d.closure.members)
                << "} size=" << d.closure.size() << " generators={"
                << join(d.generators) << "}\n";
        }
      }
      if (json)
        out << nlohmann::json{{"k", k}, {"degrees", r.count}, {"exact", r.exact}}.dump()
            << '\n';
      else
        out << (r.exact ? "degrees=" : "degrees>=") << r.count << '\n';
      return kOk;
    }

    if (leq_cmd->parsed()) {
      auto h = load_table(left_path);
      auto hp = load_table(right_path);
      if (h.space() != hp.space())
        throw DataError("units have different state spaces");
      bool r = check_leq_finite(h, hp);
      if (json)
        out << nlohmann::json{{"leq", r}}.dump() << '\n';
      else
        out << (r ? "true" : "false") << '\n';
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace isfu::cli
