#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "seqalloc/characterize.hpp"
#include "seqalloc/engine.hpp"
#include "seqalloc/queries.hpp"
#include "seqalloc/reductions.hpp"

using nlohmann::json;
using namespace seqalloc;

namespace {

constexpr int kExitAnswered = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSizeLimit = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct CommonOpts {
  std::string output = "text";
  std::uint64_t max_policies = kDefaultPolicyLimit;
  bool pad_dummies = false;

  bool machine() const { return output == "machine"; }
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--output", opts->output, "output mode")
      ->check(CLI::IsMember({"text", "machine"}));
  cmd->add_option("--max-policies", opts->max_policies,
                  "enumeration size limit")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--pad-dummies", opts->pad_dummies,
                "append dummy items (bottom of every preference list) until "
                "the item count is a multiple of the agent count");
}

Instance load_instance(const std::string& path, const CommonOpts& opts) {
  Instance inst = parse_instance(slurp(path));
  if (!opts.pad_dummies || inst.divisible()) return inst;
  int need = inst.agent_count() - inst.item_count() % inst.agent_count();
  std::vector<std::string> items = inst.item_names();
  std::vector<std::string> pad;
  for (int i = 1; i <= need; ++i) {
    std::string name = "__pad" + std::to_string(i);
    while (inst.item_index(name)) name = "_" + name;
    pad.push_back(name);
    items.push_back(name);
  }
  std::vector<std::vector<std::string>> prefs(inst.agent_count());
  for (int a = 0; a < inst.agent_count(); ++a) {
    for (int it : inst.pref(a)) prefs[a].push_back(inst.item_name(it));
    for (const auto& name : pad) prefs[a].push_back(name);
  }
  return Instance(inst.agent_names(), items, prefs, true);
}

std::vector<int> parse_item_set(const Instance& inst, const std::string& text) {
  std::vector<int> out;
  std::istringstream is(text);
  std::string token;
  while (is >> token) out.push_back(inst.require_item(token));
  return out;
}

json assignment_json(const Instance& inst, const Assignment& m) {
  json shares = json::object();
  for (int a = 0; a < inst.agent_count(); ++a) {
    json items = json::array();
    for (int i = 0; i < inst.item_count(); ++i)
      if (m.owner[i] == a) items.push_back(inst.item_name(i));
    shares[inst.agent_name(a)] = items;
  }
  return shares;
}

std::string assignment_line(const Instance& inst, const Assignment& m) {
  std::string out;
  for (int a = 0; a < inst.agent_count(); ++a) {
    if (a) out += " / ";
    out += inst.agent_name(a) + ":";
    for (int i = 0; i < inst.item_count(); ++i)
      if (m.owner[i] == a) out += " " + inst.item_name(i);
  }
  return out;
}

PolicyClass parse_class(const std::string& text) {
  auto cls = policy_class_from_string(text);
  if (!cls) throw ValidationError("unknown policy class '" + text + "'");
  return *cls;
}

void print_answer(const Instance& inst, const Query& q, const Answer& a,
                  const CommonOpts& opts, bool want_witness,
                  const std::string& command) {
  if (opts.machine()) {
    json rec = {
        {"command", command},
        {"decision", a.yes ? "yes" : "no"},
        {"method", to_string(a.method)},
        {"derived_from_sketch", a.derived_from_sketch},
        {"problem", to_string(q.problem)},
        {"class", to_string(q.cls)},
        {"class_count", policy_class_count(inst, q.cls).str()},
    };
    rec["witness"] = a.witness ? json(a.witness->to_string(inst)) : json();
    std::cout << rec.dump() << '\n';
    return;
  }
  std::cout << (a.yes ? "YES" : "NO") << '\n';
  if (want_witness && a.witness)
    std::cout << "witness: " << a.witness->to_string(inst) << '\n';
}

int run_exec(const std::string& file, const std::string& policy_text,
             const CommonOpts& opts) {
  Instance inst = load_instance(file, opts);
  Policy pi = Policy::parse(policy_text, inst);
  ExecutionTrace trace = execute_policy(inst, pi);
  if (opts.machine()) {
    json steps = json::array();
    for (const auto& step : trace.steps)
      steps.push_back({{"turn", step.turn},
                       {"agent", inst.agent_name(step.agent)},
                       {"item", inst.item_name(step.item)}});
    json rec = {{"command", "exec"},
                {"policy", pi.to_string(inst)},
                {"steps", steps},
                {"assignment", assignment_json(inst, trace.final)}};
    std::cout << rec.dump() << '\n';
  } else {
    std::cout << trace.final.serialize(inst);
  }
  return kExitAnswered;
}

int run_query(const std::string& file, const std::string& problem_text,
              const std::string& class_text, const std::string& agent,
              const std::string& item, const std::string& set_text,
              const std::string& assignment_file, bool top_k,
              const std::string& method_text, bool want_witness,
              const CommonOpts& opts) {
  Instance inst = load_instance(file, opts);
  auto problem = problem_from_string(problem_text);
  if (!problem) throw ValidationError("unknown problem '" + problem_text + "'");
  Query q;
  q.problem = *problem;
  q.cls = parse_class(class_text);
  q.top_k = top_k;
  if (!agent.empty()) q.agent = inst.require_agent(agent);
  if (!item.empty()) q.item = inst.require_item(item);
  if (!set_text.empty()) q.item_set = parse_item_set(inst, set_text);
  if (!assignment_file.empty())
    q.target = parse_assignment(slurp(assignment_file), inst);
  SolveMethod method = method_text == "exact"   ? SolveMethod::Exact
                       : method_text == "brute" ? SolveMethod::Brute
                                                : SolveMethod::Auto;
  Answer a = solve(inst, q, method, opts.max_policies);
  print_answer(inst, q, a, opts, want_witness, "query");
  return kExitAnswered;
}

int run_check_assignment(const std::string& file,
                         const std::string& assignment_file,
                         const std::string& class_text, const std::string& mode,
                         const CommonOpts& opts) {
  Instance inst = load_instance(file, opts);
  Query q;
  q.problem = mode == "possible" ? Problem::PossibleAssignment
                                 : Problem::NecessaryAssignment;
  q.cls = parse_class(class_text);
  q.target = parse_assignment(slurp(assignment_file), inst);
  Answer a = solve(inst, q, SolveMethod::Auto, opts.max_policies);
  print_answer(inst, q, a, opts, true, "check-assignment");
  return kExitAnswered;
}

int run_enumerate(const std::string& file, const std::string& class_text,
                  bool distinct_outcomes, const CommonOpts& opts) {
  Instance inst = load_instance(file, opts);
  PolicyClass cls = parse_class(class_text);
  std::vector<Policy> policies = enumerate_policies(inst, cls, opts.max_policies);
  if (distinct_outcomes) {
    std::vector<Assignment> outcomes;
    for (const auto& pi : policies) {
      Assignment m = execute_to_assignment(inst, pi);
      if (std::find(outcomes.begin(), outcomes.end(), m) == outcomes.end())
        outcomes.push_back(m);
    }
    if (opts.machine()) {
      json arr = json::array();
      for (const auto& m : outcomes) arr.push_back(assignment_json(inst, m));
      json rec = {{"command", "enumerate"},
                  {"class", to_string(cls)},
                  {"class_count", std::to_string(policies.size())},
                  {"distinct_outcomes", arr}};
      std::cout << rec.dump() << '\n';
    } else {
      for (const auto& m : outcomes)
        std::cout << assignment_line(inst, m) << '\n';
    }
    return kExitAnswered;
  }
  if (opts.machine()) {
    json arr = json::array();
    for (const auto& pi : policies) arr.push_back(pi.to_string(inst));
    json rec = {{"command", "enumerate"},
                {"class", to_string(cls)},
                {"class_count", std::to_string(policies.size())},
                {"policies", arr}};
    std::cout << rec.dump() << '\n';
  } else {
    for (const auto& pi : policies) std::cout << pi.to_string(inst) << '\n';
  }
  return kExitAnswered;
}

int run_prob(const std::string& file, const std::string& problem_text,
             const std::string& class_text, const std::string& agent,
             const std::string& item, const std::string& set_text,
             const std::string& assignment_file, bool top_k,
             const CommonOpts& opts) {
  Instance inst = load_instance(file, opts);
  PolicyClass cls = parse_class(class_text);

  // The predicate may be named directly, named through a query problem, or
  // inferred from which arguments are present.
  std::string kind = problem_text;
  if (auto p = problem_from_string(problem_text)) {
    switch (*p) {
      case Problem::PossibleItem:
      case Problem::NecessaryItem: kind = "item"; break;
      case Problem::PossibleSet:
      case Problem::NecessarySet: kind = "set"; break;
      case Problem::PossibleSubset:
      case Problem::NecessarySubset: kind = "subset"; break;
      default: kind = "assignment"; break;
    }
  } else if (kind.empty()) {
    if (!item.empty())
      kind = "item";
    else if (!assignment_file.empty())
      kind = "assignment";
    else if (top_k || !set_text.empty())
      throw ValidationError(
          "--problem set or --problem subset is required to disambiguate");
    else
      throw ValidationError("nothing to compute a probability for");
  }

  Query q;
  q.cls = cls;
  q.top_k = top_k;
  if (!agent.empty()) q.agent = inst.require_agent(agent);
  if (!item.empty()) q.item = inst.require_item(item);
  if (!set_text.empty()) q.item_set = parse_item_set(inst, set_text);
  if (!assignment_file.empty())
    q.target = parse_assignment(slurp(assignment_file), inst);
  if (kind == "item")
    q.problem = Problem::PossibleItem;
  else if (kind == "set")
    q.problem = Problem::PossibleSet;
  else if (kind == "subset")
    q.problem = Problem::PossibleSubset;
  else if (kind == "assignment")
    q.problem = Problem::PossibleAssignment;
  else
    throw ValidationError("unknown predicate '" + kind + "'");

  OutcomePredicate pred = query_predicate(inst, q);
  Rational p = outcome_probability(inst, cls, pred, opts.max_policies);
  if (opts.machine()) {
    json rec = {{"command", "prob"},
                {"class", to_string(cls)},
                {"probability", p.str()},
                {"numerator", p.num},
                {"denominator", p.den},
                {"class_count", policy_class_count(inst, cls).str()}};
    std::cout << rec.dump() << '\n';
  } else {
    std::cout << p.str() << '\n';
  }
  return kExitAnswered;
}

int run_gen(const std::string& name, const std::string& source_file,
            const std::string& out_file, const std::string& agent,
            const std::string& item, const CommonOpts& opts) {
  ReductionOutput out;
  if (name == "palla") {
    if (!agent.empty() || !item.empty())
      throw ValidationError("the palla generator takes an X3C source file and "
                            "no --agent/--item");
    out = reduce_x3c_to_balalt(X3CInstance::parse(slurp(source_file)));
  } else {
    Instance src = parse_instance(slurp(source_file));
    int a = agent.empty() ? 0 : src.require_agent(agent);
    int o = item.empty() ? 0 : src.require_item(item);
    if (src.item_count() == 0) throw ValidationError("the source has no items");
    out = reduce_by_name(name, src, a, o);
  }
  std::string serialized = serialize_reduction(out);
  std::ofstream f(out_file, std::ios::binary);
  if (!f) throw ValidationError("cannot open output file '" + out_file + "'");
  f << serialized;
  f.close();

  std::istringstream header(serialized);
  std::string line;
  if (opts.machine()) {
    json queries = json::array();
    while (std::getline(header, line) && line.rfind("# ", 0) == 0)
      queries.push_back(line.substr(2));
    json rec = {{"command", "gen"},
                {"generator", out.name},
                {"file", out_file},
                {"agents", out.instance.agent_count()},
                {"items", out.instance.item_count()},
                {"header", queries}};
    std::cout << rec.dump() << '\n';
  } else {
    while (std::getline(header, line) && line.rfind("# ", 0) == 0)
      std::cout << line.substr(2) << '\n';
    std::cout << "wrote " << out_file << " (" << out.instance.agent_count()
              << " agents, " << out.instance.item_count() << " items)\n";
  }
  return kExitAnswered;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact solver for sequential allocation of indivisible items"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* exec = app.add_subcommand("exec", "run a policy sincerely");
  std::string exec_file, exec_policy;
  exec->add_option("file", exec_file, "instance file")->required();
  exec->add_option("--policy", exec_policy, "space-separated agent turns")
      ->required();
  add_common(exec, &opts);

  auto* query = app.add_subcommand("query", "decide a possible/necessary question");
  std::string q_file, q_problem, q_class, q_agent, q_item, q_set, q_assignment;
  std::string q_method = "auto";
  bool q_topk = false, q_witness = false;
  query->add_option("file", q_file, "instance file")->required();
  query->add_option("--problem", q_problem)->required();
  query->add_option("--class", q_class)->required();
  query->add_option("--agent", q_agent);
  query->add_option("--item", q_item);
  query->add_option("--set", q_set, "space-separated item names");
  query->add_option("--assignment", q_assignment, "assignment file");
  query->add_flag("--top-k", q_topk, "pin the set to the agent's top k items");
  query->add_option("--method", q_method)
      ->check(CLI::IsMember({"auto", "exact", "brute"}));
  query->add_flag("--witness", q_witness, "print the certificate policy");
  add_common(query, &opts);

  auto* check = app.add_subcommand("check-assignment",
                                   "test achievability of an assignment");
  std::string c_file, c_assignment, c_class, c_mode;
  check->add_option("file", c_file, "instance file")->required();
  check->add_option("--assignment", c_assignment, "assignment file")->required();
  check->add_option("--class", c_class)->required();
  check->add_option("--mode", c_mode)
      ->required()
      ->check(CLI::IsMember({"possible", "necessary"}));
  add_common(check, &opts);

  auto* enumerate = app.add_subcommand("enumerate", "list the policies of a class");
  std::string e_file, e_class;
  bool e_distinct = false;
  enumerate->add_option("file", e_file, "instance file")->required();
  enumerate->add_option("--class", e_class)->required();
  enumerate->add_flag("--distinct-outcomes", e_distinct,
                      "print distinct outcome assignments instead");
  add_common(enumerate, &opts);

  auto* prob = app.add_subcommand(
      "prob", "probability of an outcome under a uniform random class policy");
  std::string p_file, p_problem, p_class, p_agent, p_item, p_set, p_assignment;
  bool p_topk = false;
  prob->add_option("file", p_file, "instance file")->required();
  prob->add_option("--problem", p_problem,
                   "item | set | subset | assignment (inferred when omitted)");
  prob->add_option("--class", p_class)->required();
  prob->add_option("--agent", p_agent);
  prob->add_option("--item", p_item);
  prob->add_option("--set", p_set);
  prob->add_option("--assignment", p_assignment);
  prob->add_flag("--top-k", p_topk);
  add_common(prob, &opts);

  auto* gen = app.add_subcommand("gen", "generate a hard instance");
  std::string g_name, g_source, g_out, g_agent, g_item;
  gen->add_option("generator", g_name)
      ->required()
      ->check(CLI::IsMember(
          {"nib", "nirb", "kpsrb", "pastrict", "knstrict", "palla", "knsa"}));
  gen->add_option("source", g_source, "source instance (X3C file for palla)")
      ->required();
  gen->add_option("-o,--out", g_out, "output instance file")->required();
  gen->add_option("--agent", g_agent, "distinguished source agent");
  gen->add_option("--item", g_item, "distinguished source item");
  add_common(gen, &opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*exec) return run_exec(exec_file, exec_policy, opts);
    if (*query)
      return run_query(q_file, q_problem, q_class, q_agent, q_item, q_set,
                       q_assignment, q_topk, q_method, q_witness, opts);
    if (*check)
      return run_check_assignment(c_file, c_assignment, c_class, c_mode, opts);
    if (*enumerate) return run_enumerate(e_file, e_class, e_distinct, opts);
    if (*prob)
      return run_prob(p_file, p_problem, p_class, p_agent, p_item, p_set,
                      p_assignment, p_topk, opts);
    if (*gen) return run_gen(g_name, g_source, g_out, g_agent, g_item, opts);
  } catch (const SizeLimitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSizeLimit;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
