#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seqalloc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (instance, assignment, policy, X3C files).
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line = 0, int col = 0);
  int line;
  int col;
};

// Structurally valid input that violates a precondition (unknown name,
// incomplete assignment, divisibility, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A policy class is too large to enumerate under the configured limit.
class SizeLimitError : public Error {
 public:
  SizeLimitError(const std::string& msg, std::string count);
  std::string count;  // exact class cardinality, decimal
};

enum class PolicyClass {
  Arbitrary,
  Balanced,
  RecursivelyBalanced,
  StrictAlternation,
  BalancedAlternation,
};

// Accepts the CLI spellings and a few common aliases.
std::optional<PolicyClass> policy_class_from_string(std::string_view s);
std::string to_string(PolicyClass cls);

// Agents, items, and one strict total preference order per agent. Immutable
// after construction; all queries are const.
class Instance {
 public:
  // Empty shell; only useful as a slot to assign a real instance into.
  Instance() = default;

  // Builds from names; `prefs[a]` lists item names in decreasing preference.
  // Validates the same rules as parsing (permutations, name syntax).
  Instance(std::vector<std::string> agents, std::vector<std::string> items,
           std::vector<std::vector<std::string>> prefs,
           bool allow_reserved_names = false);

  int agent_count() const { return static_cast<int>(agents_.size()); }
  int item_count() const { return static_cast<int>(items_.size()); }
  bool divisible() const {
    return item_count() % agent_count() == 0;
  }
  // k = m/n. Only meaningful when divisible().
  int turns_per_agent() const { return item_count() / agent_count(); }

  const std::string& agent_name(int a) const { return agents_[a]; }
  const std::string& item_name(int i) const { return items_[i]; }
  const std::vector<std::string>& agent_names() const { return agents_; }
  const std::vector<std::string>& item_names() const { return items_; }

  std::optional<int> agent_index(std::string_view name) const;
  std::optional<int> item_index(std::string_view name) const;
  int require_agent(std::string_view name) const;  // throws ValidationError
  int require_item(std::string_view name) const;   // throws ValidationError

  // Items of `agent` in decreasing preference.
  const std::vector<int>& pref(int agent) const { return prefs_[agent]; }
  // 0-based position of `item` in the agent's preference order.
  int rank0(int agent, int item) const { return rank_[agent][item]; }

  // Sub-instance on a subset of agents and items, preferences restricted.
  // Indices refer to this instance; names are preserved.
  Instance restricted(const std::vector<int>& agents,
                      const std::vector<int>& items) const;

  std::string serialize() const;

 private:
  std::vector<std::string> agents_;
  std::vector<std::string> items_;
  std::vector<std::vector<int>> prefs_;  // [agent][position] = item
  std::vector<std::vector<int>> rank_;   // [agent][item] = position
};

// Instance file: optional '#' comment lines, then `agents: ...`, `items:
// ...`, then one `pref <agent>: ...` line per agent. Names starting with the
// reserved "__" prefix are rejected unless the file carries a
// `# reduction:` header (generator output).
Instance parse_instance(std::string_view text);

// 1-based preference rank; rank 1 is the agent's most preferred item.
int rank_of(const Instance& inst, std::string_view agent, std::string_view item);

// A partition of all items among agents: owner[item] = agent.
struct Assignment {
  std::vector<int> owner;

  static Assignment empty_of(const Instance& inst) {
    return Assignment{std::vector<int>(inst.item_count(), -1)};
  }
  bool complete() const;
  // Items of `agent`, in item declaration order.
  std::vector<int> share(int agent) const;
  std::vector<int> share_sizes(const Instance& inst) const;
  std::string serialize(const Instance& inst) const;

  bool operator==(const Assignment& o) const { return owner == o.owner; }
};

// Assignment file: one `<agent>: <item>*` line per agent; agents with empty
// shares may be omitted. Validates disjointness and completeness.
Assignment parse_assignment(std::string_view text, const Instance& inst);

// The item ranked i-th (1-based) by `agent` among the items assigned to
// that agent. Throws when i is out of range.
int ranked_share(const Instance& inst, const Assignment& m, int agent, int i);
std::string ranked_share(const Instance& inst, const Assignment& m,
                         std::string_view agent, int i);

// Per-agent shares sorted by the owner's preference, i.e. entry [a][i-1] is
// ranked_share(a, i).
std::vector<std::vector<int>> ranked_shares(const Instance& inst,
                                            const Assignment& m);

// An ordered sequence of agent turns.
struct Policy {
  std::vector<int> turns;

  static Policy parse(std::string_view text, const Instance& inst);
  std::string to_string(const Instance& inst) const;
  bool operator==(const Policy& o) const { return turns == o.turns; }
  bool operator<(const Policy& o) const { return turns < o.turns; }
};

}  // namespace seqalloc
