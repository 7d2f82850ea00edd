#include "seqalloc/reductions.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace seqalloc {

namespace {

std::vector<std::string> tokens_of(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

// Preference assembly: ordered, duplicate-ignoring appends plus a
// declaration-order fill for "others".
class PrefBuilder {
 public:
  explicit PrefBuilder(const std::vector<std::string>& all_items)
      : all_(all_items) {}

  void add(const std::string& name) {
    if (seen_.insert(name).second) out_.push_back(name);
  }
  void add_all(const std::vector<std::string>& names) {
    for (const auto& n : names) add(n);
  }
  // Appends every still-missing item in declaration order, except `skip`.
  void fill_others(const std::set<std::string>& skip = {}) {
    for (const auto& n : all_)
      if (!skip.count(n)) add(n);
  }
  std::vector<std::string> take() {
    if (out_.size() != all_.size())
      throw std::logic_error("generated preference is not a permutation");
    return std::move(out_);
  }

 private:
  const std::vector<std::string>& all_;
  std::vector<std::string> out_;
  std::set<std::string> seen_;
};

std::vector<std::string> name_block(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

void require_unit_source(const Instance& src, int agent, int item) {
  if (src.item_count() != src.agent_count())
    throw ValidationError(
        "the source instance must have exactly one item per agent (m = n)");
  if (agent < 0 || agent >= src.agent_count())
    throw ValidationError("unknown source agent");
  if (item < 0 || item >= src.item_count())
    throw ValidationError("unknown source item");
}

Query source_possible_item(const Instance& out, const Instance& src, int agent,
                           int item) {
  Query q;
  q.problem = Problem::PossibleItem;
  q.cls = PolicyClass::Balanced;
  q.agent = agent;
  q.item = item;
  (void)out;
  (void)src;
  return q;
}

std::vector<std::string> source_pref_names(const Instance& src, int agent) {
  std::vector<std::string> out;
  for (int it : src.pref(agent)) out.push_back(src.item_name(it));
  return out;
}

}  // namespace

X3CInstance X3CInstance::parse(std::string_view text) {
  X3CInstance out;
  std::istringstream is{std::string(text)};
  std::string line;
  int line_no = 0;
  bool have_universe = false;
  while (std::getline(is, line)) {
    ++line_no;
    auto toks = tokens_of(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks[0] == "universe:") {
      if (have_universe) throw ParseError("duplicate 'universe:' line", line_no);
      have_universe = true;
      std::set<std::string> seen;
      for (size_t i = 1; i < toks.size(); ++i) {
        if (toks[i].find(':') != std::string::npos)
          throw ParseError("invalid element name '" + toks[i] + "'", line_no);
        if (!seen.insert(toks[i]).second)
          throw ParseError("duplicate element '" + toks[i] + "'", line_no);
        out.universe.push_back(toks[i]);
      }
      continue;
    }
    if (toks[0] == "set:") {
      if (!have_universe)
        throw ParseError("'set:' line before 'universe:'", line_no);
      if (toks.size() != 4)
        throw ParseError("a set needs exactly 3 elements", line_no);
      std::array<int, 3> s{};
      for (int j = 0; j < 3; ++j) {
        auto it = std::find(out.universe.begin(), out.universe.end(), toks[j + 1]);
        if (it == out.universe.end())
          throw ParseError("unknown element '" + toks[j + 1] + "'", line_no);
        s[j] = static_cast<int>(it - out.universe.begin());
      }
      std::sort(s.begin(), s.end());
      if (s[0] == s[1] || s[1] == s[2])
        throw ParseError("a set must have 3 distinct elements", line_no);
      out.sets.push_back(s);
      continue;
    }
    throw ParseError("expected 'universe:' or 'set:' line", line_no, 1);
  }
  if (!have_universe) throw ParseError("missing 'universe:' line");
  if (out.universe.size() % 3 != 0)
    throw ValidationError("the universe size must be a multiple of 3");
  return out;
}

ReductionOutput reduce_pi_to_necessaryitem_balanced(const Instance& src,
                                                    int agent, int item) {
  require_unit_source(src, agent, item);
  const int n = src.agent_count();
  if (n < 2)
    throw ValidationError("this construction needs at least two source agents");
  const std::string extra = "__an1";
  const std::string& o = src.item_name(item);

  std::vector<std::string> agents = src.agent_names();
  agents.push_back(extra);

  auto d_items = name_block("__D", n - 1);
  std::vector<std::vector<std::string>> f_items;
  for (int j = 1; j <= n; ++j)
    f_items.push_back(name_block("__F" + std::to_string(j) + "_", n - 2));

  std::vector<std::string> items = src.item_names();
  items.insert(items.end(), d_items.begin(), d_items.end());
  for (const auto& block : f_items)
    items.insert(items.end(), block.begin(), block.end());

  std::vector<std::vector<std::string>> prefs;
  for (int a = 0; a < n; ++a) {
    PrefBuilder pb(items);
    pb.add_all(f_items[a]);
    if (a == agent) {
      pb.add_all(source_pref_names(src, a));
      pb.fill_others();
    } else {
      for (int it : src.pref(a)) {
        if (it == item)
          pb.add_all(d_items);
        else
          pb.add(src.item_name(it));
      }
      pb.fill_others({o});
      pb.add(o);
    }
    prefs.push_back(pb.take());
  }
  {
    PrefBuilder pb(items);
    pb.add(o);
    pb.fill_others();
    prefs.push_back(pb.take());
  }

  ReductionOutput out;
  out.name = "nib";
  out.instance = Instance(agents, items, prefs, true);
  Query q;
  q.problem = Problem::NecessaryItem;
  q.cls = PolicyClass::Balanced;
  q.agent = out.instance.require_agent(extra);
  q.item = out.instance.require_item(o);
  out.queries.push_back(q);
  out.negated.push_back(1);
  out.source_query = source_possible_item(out.instance, src, agent, item);
  out.gadget_map["new_agent"] = {extra};
  out.gadget_map["D"] = d_items;
  for (int j = 0; j < n; ++j)
    out.gadget_map["F" + std::to_string(j + 1)] = f_items[j];
  return out;
}

namespace {

// Shared gadget of the recursively-balanced and strict-alternation
// necessary-query constructions (k = 2 targets). The filler block D is
// sized so that the enlarged instance stays divisible: n items rather than
// the n+1 a literal reading would give.
ReductionOutput necessary_pair_gadget(const Instance& src, int agent, int item,
                                      PolicyClass cls, const std::string& name) {
  require_unit_source(src, agent, item);
  const int n = src.agent_count();
  const std::string extra = "__an1";
  const std::string& o = src.item_name(item);
  const std::string c = "__c";
  const std::string d = "__d";

  auto d_items = name_block("__D", n);
  std::vector<std::string> items = src.item_names();
  items.push_back(c);
  items.push_back(d);
  items.insert(items.end(), d_items.begin(), d_items.end());

  std::vector<std::string> agents = src.agent_names();
  agents.push_back(extra);

  std::vector<std::vector<std::string>> prefs;
  for (int a = 0; a < n; ++a) {
    PrefBuilder pb(items);
    if (a == agent) {
      for (int it : src.pref(a)) {
        if (it == item) pb.add(d);
        pb.add(src.item_name(it));
      }
      pb.fill_others({c});
      pb.add(c);
    } else {
      for (int it : src.pref(a)) {
        if (it == item)
          pb.add_all(d_items);
        else
          pb.add(src.item_name(it));
      }
      pb.fill_others({c, d, o});
      pb.add(c);
      pb.add(d);
      pb.add(o);
    }
    prefs.push_back(pb.take());
  }
  {
    PrefBuilder pb(items);
    pb.add(c);
    pb.add(o);
    pb.fill_others({d});
    pb.add(d);
    prefs.push_back(pb.take());
  }

  ReductionOutput out;
  out.name = name;
  out.instance = Instance(agents, items, prefs, true);
  int target_agent = out.instance.require_agent(extra);
  int target_item = out.instance.require_item(o);
  int c_item = out.instance.require_item(c);
  Query necessary_item;
  necessary_item.problem = Problem::NecessaryItem;
  necessary_item.cls = cls;
  necessary_item.agent = target_agent;
  necessary_item.item = target_item;
  out.queries.push_back(necessary_item);
  out.negated.push_back(1);
  Query necessary_set;
  necessary_set.problem = Problem::NecessarySet;
  necessary_set.cls = cls;
  necessary_set.agent = target_agent;
  necessary_set.item_set = std::vector<int>{c_item, target_item};
  necessary_set.top_k = true;
  out.queries.push_back(necessary_set);
  out.negated.push_back(1);
  out.source_query = source_possible_item(out.instance, src, agent, item);
  out.gadget_map["new_agent"] = {extra};
  out.gadget_map["c"] = {c};
  out.gadget_map["d"] = {d};
  out.gadget_map["D"] = d_items;
  return out;
}

}  // namespace

ReductionOutput reduce_pi_to_recbal_family(const Instance& src, int agent,
                                           int item) {
  return necessary_pair_gadget(src, agent, item,
                               PolicyClass::RecursivelyBalanced, "nirb");
}

ReductionOutput reduce_pi_to_strict_necessary(const Instance& src, int agent,
                                              int item) {
  return necessary_pair_gadget(src, agent, item, PolicyClass::StrictAlternation,
                               "knstrict");
}

ReductionOutput reduce_pi_to_top3_possibleset(const Instance& src, int agent,
                                              int item, PolicyClass cls) {
  require_unit_source(src, agent, item);
  if (cls != PolicyClass::RecursivelyBalanced &&
      cls != PolicyClass::StrictAlternation)
    throw ValidationError(
        "the top-3 construction targets rec-balanced or strict-alt policies");
  const int n = src.agent_count();
  if (n < 2)
    throw ValidationError("this construction needs at least two source agents");
  const std::string extra = "__an1";
  const std::string& o = src.item_name(item);
  const std::vector<std::string> c_items = {"__c1", "__c2", "__c3"};

  auto d_items = name_block("__D", n - 1);
  auto e_items = name_block("__E", n - 1);
  auto f_items = name_block("__F", 3 * n - 1);

  std::vector<std::string> items = src.item_names();
  items.insert(items.end(), c_items.begin(), c_items.end());
  items.insert(items.end(), d_items.begin(), d_items.end());
  items.insert(items.end(), e_items.begin(), e_items.end());
  items.insert(items.end(), f_items.begin(), f_items.end());

  std::vector<std::string> agents = src.agent_names();
  agents.push_back(extra);
  auto d_agents = name_block("__d", n - 1);
  agents.insert(agents.end(), d_agents.begin(), d_agents.end());

  std::vector<std::vector<std::string>> prefs;
  for (int a = 0; a < n; ++a) {
    PrefBuilder pb(items);
    if (a == agent) {
      pb.add_all(source_pref_names(src, a));
      pb.fill_others({c_items[0], c_items[1], c_items[2]});
      pb.add_all(c_items);
    } else {
      for (int it : src.pref(a)) {
        if (it == item)
          pb.add_all(e_items);
        else
          pb.add(src.item_name(it));
      }
      pb.fill_others({c_items[0], c_items[1], c_items[2], o});
      pb.add_all(c_items);
      pb.add(o);
    }
    prefs.push_back(pb.take());
  }
  {
    PrefBuilder pb(items);
    pb.add_all(c_items);
    pb.fill_others();
    prefs.push_back(pb.take());
  }
  for (int j = 0; j < n - 1; ++j) {
    PrefBuilder pb(items);
    pb.add_all(d_items);
    for (const auto& name : src.item_names())
      if (name != o) pb.add(name);
    pb.add_all(e_items);
    pb.add(c_items[2]);
    pb.add(c_items[1]);
    pb.add(c_items[0]);
    pb.fill_others();
    prefs.push_back(pb.take());
  }

  ReductionOutput out;
  out.name = cls == PolicyClass::RecursivelyBalanced ? "kpsrb" : "pastrict";
  out.instance = Instance(agents, items, prefs, true);
  Query q;
  q.problem = Problem::PossibleSet;
  q.cls = cls;
  q.agent = out.instance.require_agent(extra);
  q.item_set = std::vector<int>{out.instance.require_item(c_items[0]),
                                out.instance.require_item(c_items[1]),
                                out.instance.require_item(c_items[2])};
  q.top_k = true;
  out.queries.push_back(q);
  out.negated.push_back(0);
  out.source_query = source_possible_item(out.instance, src, agent, item);
  out.gadget_map["new_agent"] = {extra};
  out.gadget_map["d_agents"] = d_agents;
  out.gadget_map["C"] = c_items;
  out.gadget_map["D"] = d_items;
  out.gadget_map["E"] = e_items;
  out.gadget_map["F"] = f_items;
  return out;
}

ReductionOutput reduce_pi_to_balalt_necessaryset(const Instance& src, int agent,
                                                 int item) {
  require_unit_source(src, agent, item);
  const int n = src.agent_count();
  const std::string extra = "__an1";
  const std::string& o = src.item_name(item);
  const std::string c1 = "__c1";
  const std::string c2 = "__c2";

  auto d_items = name_block("__D", n);
  std::vector<std::string> items = src.item_names();
  items.push_back(c1);
  items.push_back(c2);
  items.insert(items.end(), d_items.begin(), d_items.end());

  std::vector<std::string> agents = src.agent_names();
  agents.push_back(extra);

  std::vector<std::vector<std::string>> prefs;
  for (int a = 0; a < n; ++a) {
    PrefBuilder pb(items);
    if (a == agent) {
      for (int it : src.pref(a)) {
        pb.add(src.item_name(it));
        if (it == item) pb.add(c2);
      }
      pb.add_all(d_items);
      pb.fill_others({c1});
      pb.add(c1);
    } else {
      for (int it : src.pref(a)) {
        if (it == item)
          pb.add_all(d_items);
        else
          pb.add(src.item_name(it));
      }
      pb.add(o);
      pb.add(c2);
      pb.add(c1);
      pb.fill_others();
    }
    prefs.push_back(pb.take());
  }
  {
    PrefBuilder pb(items);
    pb.add(c1);
    pb.add(c2);
    pb.fill_others({o});
    pb.add(o);
    prefs.push_back(pb.take());
  }

  ReductionOutput out;
  out.name = "knsa";
  out.instance = Instance(agents, items, prefs, true);
  Query q;
  q.problem = Problem::NecessarySet;
  q.cls = PolicyClass::BalancedAlternation;
  q.agent = out.instance.require_agent(extra);
  q.item_set = std::vector<int>{out.instance.require_item(c1),
                                out.instance.require_item(c2)};
  q.top_k = true;
  out.queries.push_back(q);
  out.negated.push_back(1);
  out.source_query = source_possible_item(out.instance, src, agent, item);
  out.gadget_map["new_agent"] = {extra};
  out.gadget_map["C"] = {c1, c2};
  out.gadget_map["D"] = d_items;
  return out;
}

ReductionOutput reduce_x3c_to_balalt(const X3CInstance& src) {
  const int q = static_cast<int>(src.universe.size());
  const int t = static_cast<int>(src.sets.size());
  if (q % 3 != 0 || q == 0)
    throw ValidationError("the universe size must be a positive multiple of 3");
  if (t == 0) throw ValidationError("the family must contain at least one set");
  const int f_count = 4 * t - q / 3 - 1;
  if (f_count < 0)
    throw ValidationError(
        "the family is too small for the construction (needs 4t > q/3)");

  auto set_base = [&](int j) { return "__S" + std::to_string(j + 1); };
  auto set_clone = [&](int j, int elem) {
    return set_base(j) + "_x" + std::to_string(elem + 1);
  };

  std::vector<std::string> agents;
  agents.push_back("__a");
  for (int j = 0; j < t; ++j) {
    agents.push_back(set_base(j));
    for (int e : src.sets[j]) agents.push_back(set_clone(j, e));
  }
  for (int i = 0; i < q; ++i) agents.push_back("__x" + std::to_string(i + 1));
  for (int l = 0; l < q / 3; ++l) agents.push_back("__C" + std::to_string(l + 1));

  auto d_items = name_block("__D", 8 * q / 3);
  auto e_items = name_block("__E", q / 3);
  auto f_items = name_block("__F", f_count);

  std::vector<std::string> items = {"__a", "__b", "__c"};
  std::vector<std::string> set_item_names;
  for (int j = 0; j < t; ++j) {
    items.push_back(set_base(j));
    set_item_names.push_back(set_base(j));
    for (int e : src.sets[j]) items.push_back(set_clone(j, e));
  }
  items.insert(items.end(), d_items.begin(), d_items.end());
  items.insert(items.end(), e_items.begin(), e_items.end());
  items.insert(items.end(), f_items.begin(), f_items.end());

  std::vector<std::vector<std::string>> prefs;
  {
    PrefBuilder pb(items);
    pb.add("__a");
    pb.add("__b");
    pb.add("__c");
    pb.fill_others();
    prefs.push_back(pb.take());
  }
  for (int j = 0; j < t; ++j) {
    {
      PrefBuilder pb(items);
      pb.add(set_base(j));
      pb.add("__a");
      pb.add_all(d_items);
      pb.add("__b");
      pb.fill_others({"__c"});
      pb.add("__c");
      prefs.push_back(pb.take());
    }
    for (int e : src.sets[j]) {
      PrefBuilder pb(items);
      pb.add(set_base(j));
      pb.add(set_clone(j, e));
      pb.add("__a");
      pb.add_all(d_items);
      pb.add("__b");
      pb.fill_others({"__c"});
      pb.add("__c");
      prefs.push_back(pb.take());
    }
  }
  for (int i = 0; i < q; ++i) {
    PrefBuilder pb(items);
    for (int j = 0; j < t; ++j)
      if (std::find(src.sets[j].begin(), src.sets[j].end(), i) !=
          src.sets[j].end())
        pb.add(set_clone(j, i));
    pb.add("__b");
    pb.fill_others({"__c"});
    pb.add("__c");
    prefs.push_back(pb.take());
  }
  for (int l = 0; l < q / 3; ++l) {
    PrefBuilder pb(items);
    pb.add("__a");
    pb.add_all(set_item_names);
    pb.add_all(e_items);
    pb.fill_others({"__c"});
    pb.add("__c");
    prefs.push_back(pb.take());
  }

  ReductionOutput out;
  out.name = "palla";
  out.instance = Instance(agents, items, prefs, true);
  int agent_a = out.instance.require_agent("__a");
  Query possible;
  possible.problem = Problem::PossibleSet;
  possible.cls = PolicyClass::BalancedAlternation;
  possible.agent = agent_a;
  possible.item_set = std::vector<int>{out.instance.require_item("__a"),
                                       out.instance.require_item("__b")};
  possible.top_k = true;
  out.queries.push_back(possible);
  out.negated.push_back(0);
  Query necessary;
  necessary.problem = Problem::NecessaryItem;
  necessary.cls = PolicyClass::BalancedAlternation;
  necessary.agent = agent_a;
  necessary.item = out.instance.require_item("__c");
  out.queries.push_back(necessary);
  out.negated.push_back(1);
  out.gadget_map["a"] = {"__a"};
  out.gadget_map["marker_items"] = {"__a", "__b", "__c"};
  out.gadget_map["set_items"] = set_item_names;
  out.gadget_map["D"] = d_items;
  out.gadget_map["E"] = e_items;
  out.gadget_map["F"] = f_items;
  return out;
}

ReductionOutput reduce_by_name(const std::string& name, const Instance& src,
                               int agent, int item) {
  if (name == "nib") return reduce_pi_to_necessaryitem_balanced(src, agent, item);
  if (name == "nirb") return reduce_pi_to_recbal_family(src, agent, item);
  if (name == "kpsrb")
    return reduce_pi_to_top3_possibleset(src, agent, item,
                                         PolicyClass::RecursivelyBalanced);
  if (name == "pastrict")
    return reduce_pi_to_top3_possibleset(src, agent, item,
                                         PolicyClass::StrictAlternation);
  if (name == "knstrict") return reduce_pi_to_strict_necessary(src, agent, item);
  if (name == "knsa") return reduce_pi_to_balalt_necessaryset(src, agent, item);
  throw ValidationError("unknown generator '" + name + "'");
}

namespace {

std::string query_flags(const Instance& inst, const Query& q) {
  std::string out = "--problem " + to_string(q.problem) + " --class " +
                    to_string(q.cls);
  if (q.agent >= 0) out += " --agent " + inst.agent_name(q.agent);
  if (q.item >= 0) out += " --item " + inst.item_name(q.item);
  if (q.item_set) {
    out += " --set \"";
    for (size_t i = 0; i < q.item_set->size(); ++i) {
      if (i) out += ' ';
      out += inst.item_name((*q.item_set)[i]);
    }
    out += '"';
  }
  if (q.top_k) out += " --top-k";
  return out;
}

}  // namespace

std::string serialize_reduction(const ReductionOutput& out) {
  std::ostringstream os;
  os << "# reduction: " << out.name << '\n';
  for (size_t i = 0; i < out.queries.size(); ++i) {
    os << "# query: " << query_flags(out.instance, out.queries[i]);
    os << (out.negated[i] ? "   (negation of the source answer)"
                          : "   (same as the source answer)");
    os << '\n';
  }
  os << out.instance.serialize();
  return os.str();
}

}  // namespace seqalloc
