#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hobn/bn.hpp"
#include "hobn/check.hpp"
#include "hobn/error.hpp"
#include "hobn/flow.hpp"
#include "hobn/infer.hpp"
#include "hobn/json_io.hpp"
#include "hobn/rewrite.hpp"
#include "hobn/semantics.hpp"
#include "hobn/surface.hpp"
#include "hobn/term.hpp"
#include "json.hpp"

namespace {

using namespace hobn;
using nlohmann::json;

constexpr double kAgreement = 1e-12;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t pick_fuel(std::uint64_t flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("HOBN_FUEL")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return default_fuel;
}

void emit(const std::string& text, const std::string& dot_path) {
  if (dot_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(dot_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + dot_path + "'");
  out << text;
}

std::string show_path(const std::vector<int>& path) {
  std::string s = "[";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(path[i]);
  }
  return s + "]";
}

int cmd_parse(const std::string& file, bool as_json) {
  auto t = parse_program(slurp(file));
  if (as_json)
    std::cout << to_json(*t) << "\n";
  else
    std::cout << pretty(*t) << "\n";
  return 0;
}

int cmd_reduce(const std::string& file, std::uint64_t fuel, bool trace,
               bool as_json) {
  auto t = parse_program(slurp(file));
  auto red = normalize(t, fuel);
  if (as_json) {
    json steps = json::array();
    for (const auto& s : red.steps)
      steps.push_back({{"rule", rule_name(s.contracted.rule)},
                       {"path", s.contracted.path},
                       {"after", pretty(*s.after)}});
    std::cout << json{{"normal_form", json::parse(to_json(*red.normal_form))},
                      {"steps", steps}}
                     .dump(2)
              << "\n";
    return 0;
  }
  if (trace) {
    for (std::size_t i = 0; i < red.steps.size(); ++i)
      std::cout << "step " << i + 1 << ": "
                << rule_name(red.steps[i].contracted.rule) << " at "
                << show_path(red.steps[i].contracted.path) << "\n  "
                << pretty(*red.steps[i].after) << "\n";
    std::cout << "steps: " << red.steps.size() << "\n";
  }
  std::cout << pretty(*red.normal_form) << "\n";
  return 0;
}

int cmd_type(const std::string& file, std::uint64_t fuel, bool general,
             bool show_deriv, bool as_json) {
  auto t = parse_program(slurp(file));
  auto inf = infer_ground(t, fuel);
  deriv_ptr d = general ? generalize(inf.deriv) : inf.deriv;
  if (as_json) {
    json out = {{"type", json::parse(to_json(*d->concl.type))}};
    if (show_deriv) out["derivation"] = json::parse(to_json(*d));
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << type_to_string(*d->concl.type) << "\n";
  if (show_deriv) std::cout << derivation_to_text(*d);
  return 0;
}

int cmd_infer(const std::string& file, std::uint64_t fuel, bool posterior,
              bool as_json) {
  auto t = parse_program(slurp(file));
  auto q = posterior_query(t, fuel);
  if (as_json) {
    std::cout << to_json(q) << "\n";
    return 0;
  }
  std::cout << "marginal:\n" << factor_to_text(q.marginal);
  std::cout << "evidence: " << q.evidence << "\n";
  if (posterior) std::cout << "posterior:\n" << factor_to_text(q.posterior);
  return 0;
}

int cmd_cost(const std::string& file, std::uint64_t fuel, bool as_json) {
  auto t = parse_program(slurp(file));
  auto inf = infer_ground(t, fuel);
  auto r = cost(infer_low(inf.reduction.normal_form));
  if (as_json) {
    std::cout << to_json(r) << "\n";
    return 0;
  }
  std::cout << "multiplications: " << r.multiplications << "\n"
            << "additions: " << r.additions << "\n"
            << "prob_axioms: " << r.prob_axioms << "\n"
            << "axiom_names: " << r.axiom_names << "\n"
            << "max_width: " << r.max_width << "\n"
            << "bound_global: " << r.bound_global << "\n"
            << "bound_inductive: " << r.bound_inductive << "\n";
  return 0;
}

int cmd_graph(const std::string& file, std::uint64_t fuel, bool flow,
              const std::string& dot_path, bool as_json) {
  auto t = parse_program(slurp(file));
  auto inf = infer_ground(t, fuel);
  if (flow) {
    auto g = build_flow(inf.deriv);
    if (as_json)
      std::cout << to_json(g) << "\n";
    if (!as_json || !dot_path.empty()) emit(export_dot(g), dot_path);
    return 0;
  }
  auto b = extract_bn(infer_low(inf.reduction.normal_form));
  if (b.warning) std::cerr << *b.warning << "\n";
  if (as_json)
    std::cout << to_json(b) << "\n";
  if (!as_json || !dot_path.empty()) emit(export_dot(b), dot_path);
  return 0;
}

// One corpus program: expectation parsed from a leading
// "# expect: <status>" line, every semantic cross-check recorded.
struct file_report {
  std::string name;
  std::string expect = "ok";
  std::string status = "ok";
  std::string detail;
  std::vector<std::string> failed;  // names of failed cross-checks
  bool passed = false;
};

std::string expectation_of(const std::string& source) {
  std::istringstream in(source);
  std::string line;
  for (int i = 0; i < 5 && std::getline(in, line); ++i) {
    auto at = line.find("# expect:");
    if (at == std::string::npos) continue;
    auto value = line.substr(at + 9);
    value.erase(0, value.find_first_not_of(" \t"));
    auto end = value.find_last_not_of(" \t\r");
    return end == std::string::npos ? "" : value.substr(0, end + 1);
  }
  return "ok";
}

void run_battery(const term_ptr& t, std::uint64_t fuel, file_report& r) {
  auto inf = infer_ground(t, fuel);

  auto graph = reduction_graph(t, fuel);
  bool confluent = graph.path_lengths.size() == 1 &&
                   graph.normal_forms.size() == 1 &&
                   alpha_equal(*graph.normal_forms[0],
                               *inf.reduction.normal_form);
  if (!confluent) r.failed.push_back("confluence");

  deriv_ptr compiled = infer_low(inf.reduction.normal_form);
  auto inductive = interpret_inductive(compiled).psi;
  auto global = interpret_global(compiled);
  if (max_abs_diff(inductive, global) > kAgreement)
    r.failed.push_back("inductive-vs-global");

  auto bn = extract_bn(compiled);
  auto joint = bn_semantics(bn);
  std::set<std::string> drop;
  auto keep = judgment_names(compiled->concl);
  for (const auto& a : joint.scope)
    if (!keep.count(a.name)) drop.insert(a.name);
  if (max_abs_diff(sum_out(joint, drop), global) > kAgreement)
    r.failed.push_back("network-joint");
  if (extract_bn(compiled, bn_edge_source::flow_collapse).edges != bn.edges)
    r.failed.push_back("edge-collapse");

  for (const deriv_ptr& d : {inf.deriv, compiled}) {
    auto g = build_flow(d);
    if (!is_acyclic(g)) {
      r.failed.push_back("acyclicity");
      break;
    }
    (void)named_components(g);
  }

  // Walk the reduction backwards; every intermediate derivation must
  // mean exactly what the normal form means.
  deriv_ptr d = compiled;
  const auto& steps = inf.reduction.steps;
  bool invariant = true;
  for (std::size_t i = steps.size(); i-- > 0;) {
    const term_ptr& before = i == 0 ? t : steps[i - 1].after;
    d = expand_step(d, before, steps[i].contracted);
    if (max_abs_diff(interpret_inductive(d).psi, inductive) > kAgreement)
      invariant = false;
  }
  if (!invariant) r.failed.push_back("invariance");

  (void)normalize_posterior(inductive);
}

file_report check_one(const std::string& name, const std::string& source,
                      std::uint64_t fuel) {
  file_report r;
  r.name = name;
  r.expect = expectation_of(source);
  try {
    run_battery(parse_program(source), fuel, r);
  } catch (const syntax_error& e) {
    r.status = "syntax-error";
    r.detail = e.what();
  } catch (const type_error& e) {
    r.status = "type-error";
    r.detail = e.what();
  } catch (const fuel_exhausted& e) {
    r.status = "fuel-exhausted";
    r.detail = e.what();
  } catch (const zero_evidence& e) {
    r.status = "zero-evidence";
    r.detail = e.what();
  }
  r.passed = r.status == r.expect && (r.status != "ok" || r.failed.empty());
  return r;
}

term_ptr fuzz_program(std::mt19937_64& rng) {
  auto coin = [&](double p) {
    return std::uniform_real_distribution<>(0, 1)(rng) < p;
  };
  auto pick = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  const rational probs[] = {{1, 4}, {1, 2}, {3, 4}};
  auto prob = [&]() { return probs[pick(3)]; };

  std::vector<std::string> vars;
  // An obs-bound variable aliases the atom of the variable it observes,
  // so a second observation anywhere along the chain must keep the first
  // polarity; flipping it makes the program untypable.
  std::map<std::string, std::string> atom_of;
  std::map<std::string, bool> polarity;
  std::size_t lets = 1 + pick(5);
  term_ptr body;
  std::vector<std::pair<std::string, term_ptr>> binds;
  for (std::size_t i = 0; i < lets; ++i) {
    std::string x = "v" + std::to_string(i);
    term_ptr bound;
    if (vars.empty() || coin(0.45)) {
      bound = mk_sample(prob());
      atom_of[x] = x;
    } else if (coin(0.75)) {
      int arity = vars.size() > 1 && coin(0.5) ? 2 : 1;
      term_ptr scrut = mk_var(vars[pick(vars.size())]);
      if (arity == 2)
        scrut = mk_pair(std::move(scrut), mk_var(vars[pick(vars.size())]));
      std::vector<rational> clauses;
      for (int c = 0; c < 1 << arity; ++c) clauses.push_back(prob());
      bound = mk_case(std::move(scrut), arity, std::move(clauses));
      atom_of[x] = x;
    } else {
      const std::string& y = vars[pick(vars.size())];
      auto [it, fresh] = polarity.emplace(atom_of[y], coin(0.5));
      (void)fresh;
      bound = mk_observe(y, it->second);
      atom_of[x] = atom_of[y];
    }
    binds.emplace_back(x, std::move(bound));
    vars.push_back(x);
  }
  body = mk_var(vars[pick(vars.size())]);
  if (vars.size() > 1 && coin(0.5))
    body = mk_pair(std::move(body), mk_var(vars[pick(vars.size())]));
  for (std::size_t i = binds.size(); i-- > 0;)
    body = mk_let(binds[i].first, std::move(binds[i].second), std::move(body));
  return body;
}

int cmd_check(const std::string& path, std::uint64_t fuel, bool as_json,
              std::uint64_t fuzz, std::uint64_t seed) {
  namespace fs = std::filesystem;
  std::vector<file_report> reports;

  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.path().extension() == ".hobn") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  } else {
    files.emplace_back(path);
  }
  for (const auto& f : files)
    reports.push_back(
        check_one(f.filename().string(), slurp(f.string()), fuel));

  std::mt19937_64 rng(seed);
  for (std::uint64_t i = 0; i < fuzz; ++i) {
    file_report r;
    r.name = "fuzz/" + std::to_string(i);
    try {
      run_battery(fuzz_program(rng), fuel, r);
    } catch (const zero_evidence&) {
      // a fuzzed observation chain may kill all mass; that is not a bug
    } catch (const std::exception& e) {
      r.status = "error";
      r.detail = e.what();
    }
    r.passed = r.status == "ok" && r.failed.empty();
    reports.push_back(std::move(r));
  }

  bool all = std::all_of(reports.begin(), reports.end(),
                         [](const file_report& r) { return r.passed; });
  if (as_json) {
    json files_json = json::array();
    for (const auto& r : reports)
      files_json.push_back({{"file", r.name},
                            {"expect", r.expect},
                            {"status", r.status},
                            {"failed_checks", r.failed},
                            {"detail", r.detail},
                            {"passed", r.passed}});
    std::cout << json{{"passed", all}, {"files", files_json}}.dump(2) << "\n";
  } else {
    for (const auto& r : reports) {
      std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.status;
      if (r.status != r.expect) std::cout << ", expected " << r.expect;
      for (const auto& f : r.failed) std::cout << ", " << f;
      std::cout << ")\n";
    }
    std::cout << (all ? "all checks passed" : "checks FAILED") << "\n";
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compiler from a probabilistic lambda calculus to Bayesian "
               "networks, with exact inference"};
  app.require_subcommand(1);

  std::string file;
  std::uint64_t fuel_flag = 0;
  bool as_json = false;

  auto add_common = [&](CLI::App* cmd, bool takes_file = true) {
    if (takes_file)
      cmd->add_option("file", file, "program file")->required();
    cmd->add_option("--fuel", fuel_flag,
                    "reduction step budget (default from HOBN_FUEL or " +
                        std::to_string(default_fuel) + ")");
    cmd->add_flag("--json", as_json, "machine-readable output");
  };

  auto* parse_cmd = app.add_subcommand("parse", "parse and echo a program");
  add_common(parse_cmd);

  bool trace = false;
  auto* reduce_cmd = app.add_subcommand("reduce", "reduce to normal form");
  add_common(reduce_cmd);
  reduce_cmd->add_flag("--trace", trace, "print every step");

  bool general = false, show_deriv = false;
  auto* type_cmd = app.add_subcommand("type", "infer the program's type");
  add_common(type_cmd);
  type_cmd->add_flag("--general", general,
                     "drop observation marks not forced by an observation");
  type_cmd->add_flag("--show-derivation", show_deriv,
                     "print the full derivation");

  bool posterior = false;
  auto* infer_cmd =
      app.add_subcommand("infer", "exact marginal, evidence and posterior");
  add_common(infer_cmd);
  infer_cmd->add_flag("--posterior", posterior, "print the posterior table");

  auto* cost_cmd =
      app.add_subcommand("cost", "arithmetic work of exact inference");
  add_common(cost_cmd);

  bool want_flow = false, want_bn = false;
  std::string dot_path;
  auto* graph_cmd = app.add_subcommand(
      "graph", "flow graph of the derivation or the extracted network");
  add_common(graph_cmd);
  graph_cmd->add_flag("--flow", want_flow, "derivation flow graph");
  graph_cmd->add_flag("--bn", want_bn, "extracted network (default)");
  graph_cmd->add_option("--dot", dot_path, "write DOT to this file");

  std::uint64_t fuzz = 0, seed = 0;
  auto* check_cmd = app.add_subcommand(
      "check", "run the semantic cross-checks over a corpus");
  check_cmd->add_option("path", file, "corpus directory or single program")
      ->required();
  check_cmd->add_option("--fuel", fuel_flag, "reduction step budget");
  check_cmd->add_flag("--json", as_json, "machine-readable output");
  check_cmd->add_option("--fuzz", fuzz, "extra random programs to check");
  check_cmd->add_option("--seed", seed, "seed for --fuzz (default 0)");

  CLI11_PARSE(app, argc, argv);

  try {
    std::uint64_t fuel = pick_fuel(fuel_flag);
    if (parse_cmd->parsed()) return cmd_parse(file, as_json);
    if (reduce_cmd->parsed()) return cmd_reduce(file, fuel, trace, as_json);
    if (type_cmd->parsed())
      return cmd_type(file, fuel, general, show_deriv, as_json);
    if (infer_cmd->parsed()) return cmd_infer(file, fuel, posterior, as_json);
    if (cost_cmd->parsed()) return cmd_cost(file, fuel, as_json);
    if (graph_cmd->parsed()) {
      if (want_flow && want_bn)
        throw std::runtime_error("choose one of --flow and --bn");
      return cmd_graph(file, fuel, want_flow, dot_path, as_json);
    }
    if (check_cmd->parsed()) return cmd_check(file, fuel, as_json, fuzz, seed);
  } catch (const syntax_error& e) {
    std::cerr << e.what() << "\n";
    return exit_syntax;
  } catch (const type_error& e) {
    std::cerr << e.what() << "\n";
    return exit_type;
  } catch (const fuel_exhausted& e) {
    std::cerr << e.what() << "\n";
    return exit_fuel;
  } catch (const zero_evidence& e) {
    std::cerr << e.what() << "\n";
    return exit_zero_evidence;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return exit_internal;
  }
  return 0;
}
