#include "seqalloc/model.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace seqalloc {

ParseError::ParseError(const std::string& msg, int line_, int col_)
    : Error(line_ > 0 ? "parse error at line " + std::to_string(line_) +
                            (col_ > 0 ? ", column " + std::to_string(col_) : "") +
                            ": " + msg
                      : "parse error: " + msg),
      line(line_),
      col(col_) {}

SizeLimitError::SizeLimitError(const std::string& msg, std::string count_)
    : Error(msg), count(std::move(count_)) {}

std::optional<PolicyClass> policy_class_from_string(std::string_view s) {
  if (s == "arbitrary" || s == "any" || s == "all") return PolicyClass::Arbitrary;
  if (s == "balanced") return PolicyClass::Balanced;
  if (s == "rec-balanced" || s == "recursively-balanced" || s == "rec-bal")
    return PolicyClass::RecursivelyBalanced;
  if (s == "strict-alt" || s == "strict-alternation")
    return PolicyClass::StrictAlternation;
  if (s == "bal-alt" || s == "balanced-alternation")
    return PolicyClass::BalancedAlternation;
  return std::nullopt;
}

std::string to_string(PolicyClass cls) {
  switch (cls) {
    case PolicyClass::Arbitrary: return "arbitrary";
    case PolicyClass::Balanced: return "balanced";
    case PolicyClass::RecursivelyBalanced: return "rec-balanced";
    case PolicyClass::StrictAlternation: return "strict-alt";
    case PolicyClass::BalancedAlternation: return "bal-alt";
  }
  return "?";
}

namespace {

bool valid_name(std::string_view name, bool allow_reserved) {
  if (name.empty()) return false;
  for (char ch : name) {
    if (ch == ':' || ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n')
      return false;
  }
  if (!allow_reserved && name.size() >= 2 && name[0] == '_' && name[1] == '_')
    return false;
  return true;
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

struct Line {
  std::string text;
  int number;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  int number = 1;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    std::string_view raw = end == std::string_view::npos
                               ? text.substr(start)
                               : text.substr(start, end - start);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    lines.push_back(Line{std::string(raw), number});
    if (end == std::string_view::npos) break;
    start = end + 1;
    ++number;
  }
  return lines;
}

}  // namespace

Instance::Instance(std::vector<std::string> agents, std::vector<std::string> items,
                   std::vector<std::vector<std::string>> prefs,
                   bool allow_reserved_names) {
  if (agents.empty()) throw ValidationError("an instance needs at least one agent");
  std::unordered_set<std::string> seen;
  for (const auto& a : agents) {
    if (!valid_name(a, allow_reserved_names))
      throw ValidationError("invalid agent name '" + a + "'");
    if (!seen.insert(a).second)
      throw ValidationError("duplicate agent '" + a + "'");
  }
  seen.clear();
  for (const auto& it : items) {
    if (!valid_name(it, allow_reserved_names))
      throw ValidationError("invalid item name '" + it + "'");
    if (!seen.insert(it).second)
      throw ValidationError("duplicate item '" + it + "'");
  }
  if (prefs.size() != agents.size())
    throw ValidationError("expected one preference list per agent");

  agents_ = std::move(agents);
  items_ = std::move(items);

  std::unordered_map<std::string, int> item_idx;
  for (int i = 0; i < item_count(); ++i) item_idx[items_[i]] = i;

  prefs_.resize(agents_.size());
  rank_.assign(agents_.size(), std::vector<int>(items_.size(), -1));
  for (size_t a = 0; a < agents_.size(); ++a) {
    if (prefs[a].size() != items_.size())
      throw ValidationError("preference list of agent '" + agents_[a] +
                            "' is not a permutation of the items");
    prefs_[a].reserve(items_.size());
    for (const auto& token : prefs[a]) {
      auto it = item_idx.find(token);
      if (it == item_idx.end())
        throw ValidationError("preference list of agent '" + agents_[a] +
                              "' mentions unknown item '" + token + "'");
      if (rank_[a][it->second] != -1)
        throw ValidationError("preference list of agent '" + agents_[a] +
                              "' repeats item '" + token + "'");
      rank_[a][it->second] = static_cast<int>(prefs_[a].size());
      prefs_[a].push_back(it->second);
    }
  }
}

std::optional<int> Instance::agent_index(std::string_view name) const {
  for (int a = 0; a < agent_count(); ++a)
    if (agents_[a] == name) return a;
  return std::nullopt;
}

std::optional<int> Instance::item_index(std::string_view name) const {
  for (int i = 0; i < item_count(); ++i)
    if (items_[i] == name) return i;
  return std::nullopt;
}

int Instance::require_agent(std::string_view name) const {
  auto idx = agent_index(name);
  if (!idx) throw ValidationError("unknown agent '" + std::string(name) + "'");
  return *idx;
}

int Instance::require_item(std::string_view name) const {
  auto idx = item_index(name);
  if (!idx) throw ValidationError("unknown item '" + std::string(name) + "'");
  return *idx;
}

Instance Instance::restricted(const std::vector<int>& agents,
                              const std::vector<int>& items) const {
  std::vector<char> keep(item_count(), 0);
  for (int i : items) keep[i] = 1;
  Instance out;
  for (int a : agents) out.agents_.push_back(agents_[a]);
  for (int i : items) out.items_.push_back(items_[i]);
  std::vector<int> remap(item_count(), -1);
  for (size_t j = 0; j < items.size(); ++j) remap[items[j]] = static_cast<int>(j);
  out.prefs_.resize(agents.size());
  out.rank_.assign(agents.size(), std::vector<int>(items.size(), -1));
  for (size_t a = 0; a < agents.size(); ++a) {
    for (int item : prefs_[agents[a]]) {
      if (!keep[item]) continue;
      out.rank_[a][remap[item]] = static_cast<int>(out.prefs_[a].size());
      out.prefs_[a].push_back(remap[item]);
    }
  }
  return out;
}

std::string Instance::serialize() const {
  std::ostringstream os;
  os << "agents:";
  for (const auto& a : agents_) os << ' ' << a;
  os << "\nitems:";
  for (const auto& i : items_) os << ' ' << i;
  os << '\n';
  for (int a = 0; a < agent_count(); ++a) {
    os << "pref " << agents_[a] << ':';
    for (int item : prefs_[a]) os << ' ' << items_[item];
    os << '\n';
  }
  return os.str();
}

Instance parse_instance(std::string_view text) {
  auto lines = split_lines(text);
  bool allow_reserved = false;
  size_t pos = 0;

  auto next_directive = [&]() -> const Line* {
    while (pos < lines.size()) {
      const Line& ln = lines[pos];
      std::string_view sv = ln.text;
      size_t first = sv.find_first_not_of(' ');
      if (first == std::string_view::npos) {
        ++pos;
        continue;
      }
      if (sv[first] == '#') {
        if (sv.find("# reduction:") != std::string_view::npos) allow_reserved = true;
        ++pos;
        continue;
      }
      return &ln;
    }
    return nullptr;
  };

  const Line* ln = next_directive();
  if (!ln) throw ParseError("missing 'agents:' line");
  auto tokens = tokenize(ln->text);
  if (tokens.empty() || tokens[0] != "agents:")
    throw ParseError("expected 'agents:' line", ln->number, 1);
  if (tokens.size() < 2)
    throw ParseError("at least one agent is required", ln->number);
  std::vector<std::string> agents(tokens.begin() + 1, tokens.end());
  ++pos;

  ln = next_directive();
  if (!ln) throw ParseError("missing 'items:' line");
  tokens = tokenize(ln->text);
  if (tokens.empty() || tokens[0] != "items:")
    throw ParseError("expected 'items:' line", ln->number, 1);
  std::vector<std::string> items(tokens.begin() + 1, tokens.end());
  ++pos;

  std::vector<std::vector<std::string>> prefs(agents.size());
  std::vector<char> have_pref(agents.size(), 0);
  for (size_t want = 0; want < agents.size(); ++want) {
    ln = next_directive();
    if (!ln) {
      for (size_t a = 0; a < agents.size(); ++a)
        if (!have_pref[a])
          throw ParseError("missing preference line for agent '" + agents[a] + "'");
      throw ParseError("missing preference line");
    }
    tokens = tokenize(ln->text);
    if (tokens.size() < 2 || tokens[0] != "pref" || tokens[1].back() != ':')
      throw ParseError("expected 'pref <agent>: <items>' line", ln->number, 1);
    std::string who = tokens[1].substr(0, tokens[1].size() - 1);
    auto it = std::find(agents.begin(), agents.end(), who);
    if (it == agents.end())
      throw ParseError("preference line for unknown agent '" + who + "'",
                       ln->number);
    size_t a = static_cast<size_t>(it - agents.begin());
    if (have_pref[a])
      throw ParseError("duplicate preference line for agent '" + who + "'",
                       ln->number);
    have_pref[a] = 1;
    prefs[a].assign(tokens.begin() + 2, tokens.end());
    ++pos;
  }
  if (const Line* extra = next_directive())
    throw ParseError("unexpected trailing content", extra->number, 1);

  try {
    return Instance(std::move(agents), std::move(items), std::move(prefs),
                    allow_reserved);
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
}

int rank_of(const Instance& inst, std::string_view agent, std::string_view item) {
  return inst.rank0(inst.require_agent(agent), inst.require_item(item)) + 1;
}

bool Assignment::complete() const {
  for (int a : owner)
    if (a < 0) return false;
  return true;
}

std::vector<int> Assignment::share(int agent) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(owner.size()); ++i)
    if (owner[i] == agent) out.push_back(i);
  return out;
}

std::vector<int> Assignment::share_sizes(const Instance& inst) const {
  std::vector<int> sizes(inst.agent_count(), 0);
  for (int a : owner)
    if (a >= 0) ++sizes[a];
  return sizes;
}

std::string Assignment::serialize(const Instance& inst) const {
  std::ostringstream os;
  for (int a = 0; a < inst.agent_count(); ++a) {
    os << inst.agent_name(a) << ':';
    for (int i = 0; i < inst.item_count(); ++i)
      if (owner[i] == a) os << ' ' << inst.item_name(i);
    os << '\n';
  }
  return os.str();
}

Assignment parse_assignment(std::string_view text, const Instance& inst) {
  Assignment m = Assignment::empty_of(inst);
  std::vector<char> seen_agent(inst.agent_count(), 0);
  for (const Line& ln : split_lines(text)) {
    auto tokens = tokenize(ln.text);
    if (tokens.empty()) continue;
    if (tokens[0][0] == '#') continue;
    if (tokens[0].back() != ':')
      throw ParseError("expected '<agent>: <items>' line", ln.number, 1);
    std::string who = tokens[0].substr(0, tokens[0].size() - 1);
    auto a = inst.agent_index(who);
    if (!a) throw ParseError("unknown agent '" + who + "'", ln.number);
    if (seen_agent[*a])
      throw ParseError("duplicate line for agent '" + who + "'", ln.number);
    seen_agent[*a] = 1;
    for (size_t t = 1; t < tokens.size(); ++t) {
      auto i = inst.item_index(tokens[t]);
      if (!i) throw ParseError("unknown item '" + tokens[t] + "'", ln.number);
      if (m.owner[*i] != -1)
        throw ParseError("item '" + tokens[t] + "' assigned twice", ln.number);
      m.owner[*i] = *a;
    }
  }
  for (int i = 0; i < inst.item_count(); ++i)
    if (m.owner[i] == -1)
      throw ValidationError("item '" + inst.item_name(i) + "' is unassigned");
  return m;
}

int ranked_share(const Instance& inst, const Assignment& m, int agent, int i) {
  std::vector<int> mine;
  for (int item : inst.pref(agent))
    if (m.owner[item] == agent) mine.push_back(item);
  if (i < 1 || i > static_cast<int>(mine.size()))
    throw ValidationError("rank " + std::to_string(i) +
                          " out of range for agent '" + inst.agent_name(agent) +
                          "' holding " + std::to_string(mine.size()) + " items");
  return mine[i - 1];
}

std::string ranked_share(const Instance& inst, const Assignment& m,
                         std::string_view agent, int i) {
  return inst.item_name(ranked_share(inst, m, inst.require_agent(agent), i));
}

std::vector<std::vector<int>> ranked_shares(const Instance& inst,
                                            const Assignment& m) {
  std::vector<std::vector<int>> out(inst.agent_count());
  for (int a = 0; a < inst.agent_count(); ++a)
    for (int item : inst.pref(a))
      if (m.owner[item] == a) out[a].push_back(item);
  return out;
}

Policy Policy::parse(std::string_view text, const Instance& inst) {
  Policy p;
  for (const auto& token : tokenize(text)) p.turns.push_back(inst.require_agent(token));
  return p;
}

std::string Policy::to_string(const Instance& inst) const {
  std::string out;
  for (size_t i = 0; i < turns.size(); ++i) {
    if (i) out += ' ';
    out += inst.agent_name(turns[i]);
  }
  return out;
}

}  // namespace seqalloc
