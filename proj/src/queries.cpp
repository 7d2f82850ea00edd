#include "seqalloc/queries.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "seqalloc/characterize.hpp"
#include "seqalloc/flows.hpp"
#include "seqalloc/pareto.hpp"

namespace seqalloc {

std::optional<Problem> problem_from_string(std::string_view s) {
  if (s == "possible-item") return Problem::PossibleItem;
  if (s == "necessary-item") return Problem::NecessaryItem;
  if (s == "possible-set") return Problem::PossibleSet;
  if (s == "necessary-set") return Problem::NecessarySet;
  if (s == "possible-subset") return Problem::PossibleSubset;
  if (s == "necessary-subset") return Problem::NecessarySubset;
  if (s == "possible-assignment") return Problem::PossibleAssignment;
  if (s == "necessary-assignment") return Problem::NecessaryAssignment;
  return std::nullopt;
}

std::string to_string(Problem p) {
  switch (p) {
    case Problem::PossibleItem: return "possible-item";
    case Problem::NecessaryItem: return "necessary-item";
    case Problem::PossibleSet: return "possible-set";
    case Problem::NecessarySet: return "necessary-set";
    case Problem::PossibleSubset: return "possible-subset";
    case Problem::NecessarySubset: return "necessary-subset";
    case Problem::PossibleAssignment: return "possible-assignment";
    case Problem::NecessaryAssignment: return "necessary-assignment";
  }
  return "?";
}

bool is_possible_problem(Problem p) {
  switch (p) {
    case Problem::PossibleItem:
    case Problem::PossibleSet:
    case Problem::PossibleSubset:
    case Problem::PossibleAssignment:
      return true;
    default:
      return false;
  }
}

const char* to_string(Answer::Method m) {
  return m == Answer::Method::ExactPoly ? "exact-poly" : "brute-force";
}

namespace {

void check_divisible(const Instance& inst) {
  if (!inst.divisible())
    throw ValidationError(
        "the number of items (" + std::to_string(inst.item_count()) +
        ") must be a multiple of the number of agents (" +
        std::to_string(inst.agent_count()) + ") for this policy class");
}

std::vector<int> top_k_items(const Instance& inst, int agent) {
  check_divisible(inst);
  const auto& pref = inst.pref(agent);
  return std::vector<int>(pref.begin(), pref.begin() + inst.turns_per_agent());
}

// Balanced policy giving `agent` the first k turns, then the other agents
// in declaration order, k turns each.
Policy agent_first_policy(const Instance& inst, int agent) {
  const int k = inst.turns_per_agent();
  Policy pi;
  pi.turns.insert(pi.turns.end(), k, agent);
  for (int a = 0; a < inst.agent_count(); ++a)
    if (a != agent) pi.turns.insert(pi.turns.end(), k, a);
  return pi;
}

Policy uniform_policy(const Instance& inst, int agent) {
  Policy pi;
  pi.turns.assign(inst.item_count(), agent);
  return pi;
}

bool sorted_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) == v.end();
}

// Answer "no" to a necessary query over arbitrary policies with the first
// single-agent policy whose outcome breaks the predicate.
Answer first_deviating_uniform(const Instance& inst, const OutcomePredicate& pred) {
  for (int a = 0; a < inst.agent_count(); ++a) {
    Policy pi = uniform_policy(inst, a);
    if (!pred.eval(inst, execute_to_assignment(inst, pi)))
      return Answer{false, std::move(pi), Answer::Method::ExactPoly, false};
  }
  throw std::logic_error("no single-agent policy deviates");
}

// ---------------------------------------------------------------------------
// Exhaustive search with pruning.
//
// Every query reduces to: does some class policy produce an outcome with
// `goal`? (Necessary queries search the negated goal; a hit is the
// counterexample.) Goals are monotone enough to resolve during execution:
// a pick can kill the branch (Dead), settle it (Locked: every completion
// satisfies the goal), or leave it open.

enum class Pick { Live, Dead, Locked };

struct GoalTracker {
  enum class Kind {
    GetsItem,        // agent ends up with the item
    MissesItem,      // agent does not get the item
    ShareEquals,     // share == S
    ShareDiffers,    // share != S
    ShareContains,   // share >= S
    ShareMisses,     // share fails to cover S
    AssignEquals,    // outcome == target
    AssignDiffers,   // outcome != target
  };

  Kind kind;
  int agent = -1;
  int item = -1;
  std::vector<char> in_set;
  int set_left = 0;  // unassigned items of S (ShareContains lock)
  const Assignment* target = nullptr;

  Pick on_pick(int it, int ag) {
    switch (kind) {
      case Kind::GetsItem:
        if (it != item) return Pick::Live;
        return ag == agent ? Pick::Locked : Pick::Dead;
      case Kind::MissesItem:
        if (it != item) return Pick::Live;
        return ag == agent ? Pick::Dead : Pick::Locked;
      case Kind::ShareEquals:
        if (ag == agent && !in_set[it]) return Pick::Dead;
        if (ag != agent && in_set[it]) return Pick::Dead;
        return Pick::Live;
      case Kind::ShareDiffers:
        if (ag == agent && !in_set[it]) return Pick::Locked;
        if (ag != agent && in_set[it]) return Pick::Locked;
        return Pick::Live;
      case Kind::ShareContains:
        if (in_set[it]) {
          if (ag != agent) return Pick::Dead;
          if (--set_left == 0) return Pick::Locked;
        }
        return Pick::Live;
      case Kind::ShareMisses:
        if (in_set[it] && ag != agent) return Pick::Locked;
        return Pick::Live;
      case Kind::AssignEquals:
        return target->owner[it] == ag ? Pick::Live : Pick::Dead;
      case Kind::AssignDiffers:
        return target->owner[it] == ag ? Pick::Live : Pick::Locked;
    }
    return Pick::Live;
  }

  void undo_pick(int it, int ag) {
    if (kind == Kind::ShareContains && in_set[it] && ag == agent) ++set_left;
  }

  // Whether a branch that stayed Live through all m picks satisfies the
  // goal.
  bool live_completion_succeeds() const {
    switch (kind) {
      case Kind::ShareEquals:
      case Kind::AssignEquals:
        return true;
      case Kind::ShareContains:
        return set_left == 0;
      default:
        // GetsItem/MissesItem always settle once the item is picked;
        // the *Differs/*Misses goals fail when no deviation ever happened.
        return false;
    }
  }
};

GoalTracker make_tracker(const Instance& inst, const OutcomePredicate& pred,
                         bool negated) {
  GoalTracker t;
  t.agent = pred.agent;
  t.item = pred.item;
  using K = GoalTracker::Kind;
  using PK = OutcomePredicate::Kind;
  switch (pred.kind) {
    case PK::AgentGetsItem:
      t.kind = negated ? K::MissesItem : K::GetsItem;
      break;
    case PK::ShareEquals:
      t.kind = negated ? K::ShareDiffers : K::ShareEquals;
      break;
    case PK::ShareContains:
      t.kind = negated ? K::ShareMisses : K::ShareContains;
      break;
    case PK::AssignmentEquals:
      t.kind = negated ? K::AssignDiffers : K::AssignEquals;
      break;
  }
  if (pred.kind == PK::ShareEquals || pred.kind == PK::ShareContains) {
    t.in_set.assign(inst.item_count(), 0);
    for (int i : pred.items) t.in_set[i] = 1;
    t.set_left = static_cast<int>(pred.items.size());
  }
  if (pred.kind == PK::AssignmentEquals) t.target = &pred.target;
  return t;
}

// Depth-first search over class policies in lexicographic order. Returns
// the least policy whose outcome satisfies the goal, if any.
class PolicySearch {
 public:
  PolicySearch(const Instance& inst, PolicyClass cls, GoalTracker tracker)
      : inst_(inst),
        cls_(cls),
        tracker_(std::move(tracker)),
        taken_(inst.item_count(), 0),
        cursor_(inst.agent_count(), 0) {}

  std::optional<Policy> run() {
    const int m = inst_.item_count();
    if (m == 0) {
      // Single empty policy in every class.
      return tracker_.live_completion_succeeds() ? std::optional<Policy>(Policy{})
                                                 : std::nullopt;
    }
    turns_.clear();
    switch (cls_) {
      case PolicyClass::Arbitrary:
      case PolicyClass::Balanced: {
        const int k = cls_ == PolicyClass::Balanced ? inst_.turns_per_agent() : m;
        remaining_.assign(inst_.agent_count(), k);
        if (search_sequence(0)) return found_;
        return std::nullopt;
      }
      case PolicyClass::RecursivelyBalanced: {
        use_memo_ = m <= 64;
        round_mask_ = 0;
        if (search_rounds(0)) return found_;
        return std::nullopt;
      }
      case PolicyClass::StrictAlternation:
      case PolicyClass::BalancedAlternation:
        return search_orders();
    }
    return std::nullopt;
  }

 private:
  // Picks for `agent` at the current position; returns Dead/Locked/Live.
  Pick apply(int agent) {
    int& c = cursor_[agent];
    const auto& pref = inst_.pref(agent);
    while (taken_[pref[c]]) ++c;
    int item = pref[c];
    taken_[item] = 1;
    undo_stack_.push_back({agent, item, c});
    turns_.push_back(agent);
    return tracker_.on_pick(item, agent);
  }

  void unapply() {
    auto [agent, item, old_cursor] = undo_stack_.back();
    undo_stack_.pop_back();
    turns_.pop_back();
    taken_[item] = 0;
    cursor_[agent] = old_cursor;
    tracker_.undo_pick(item, agent);
  }

  // Lexicographically least class-valid completion of the current prefix.
  void complete_lexicographically() {
    found_ = Policy{turns_};
    const int n = inst_.agent_count();
    const int m = inst_.item_count();
    switch (cls_) {
      case PolicyClass::Arbitrary:
        found_->turns.resize(m, 0);
        break;
      case PolicyClass::Balanced: {
        auto counts = remaining_;
        for (int a = 0; a < n; ++a)
          found_->turns.insert(found_->turns.end(), counts[a], a);
        break;
      }
      case PolicyClass::RecursivelyBalanced: {
        // Finish the current round with the unused agents ascending, then
        // identity rounds.
        while (static_cast<int>(found_->turns.size()) % n != 0) {
          std::vector<char> used(n, 0);
          size_t round_start = found_->turns.size() / n * n;
          for (size_t i = round_start; i < found_->turns.size(); ++i)
            used[found_->turns[i]] = 1;
          for (int a = 0; a < n; ++a)
            if (!used[a]) {
              found_->turns.push_back(a);
              break;
            }
        }
        while (static_cast<int>(found_->turns.size()) < m)
          for (int a = 0; a < n; ++a) found_->turns.push_back(a);
        break;
      }
      default:
        break;  // alternation policies are always complete
    }
  }

  bool search_sequence(int pos) {
    if (pos == inst_.item_count()) {
      if (!tracker_.live_completion_succeeds()) return false;
      found_ = Policy{turns_};
      return true;
    }
    for (int a = 0; a < inst_.agent_count(); ++a) {
      if (remaining_[a] == 0) continue;
      --remaining_[a];
      Pick outcome = apply(a);
      if (outcome == Pick::Locked) {
        complete_lexicographically();
        return true;
      }
      if (outcome == Pick::Live && search_sequence(pos + 1)) return true;
      unapply();
      ++remaining_[a];
    }
    return false;
  }

  bool search_rounds(int round) {
    const int n = inst_.agent_count();
    const int k = inst_.turns_per_agent();
    if (round == k) {
      if (!tracker_.live_completion_succeeds()) return false;
      found_ = Policy{turns_};
      return true;
    }
    if (use_memo_) {
      std::uint64_t key = round_mask();
      if (failed_.count(key)) return false;
    }
    round_used_.emplace_back(n, 0);
    bool hit = search_round_slot(round, 0);
    round_used_.pop_back();
    if (!hit && use_memo_) failed_.insert(round_mask());
    return hit;
  }

  std::uint64_t round_mask() const {
    std::uint64_t mask = 0;
    for (int i = 0; i < inst_.item_count(); ++i)
      if (taken_[i]) mask |= std::uint64_t(1) << i;
    return mask;
  }

  bool search_round_slot(int round, int slot) {
    const int n = inst_.agent_count();
    if (slot == n) return search_rounds(round + 1);
    auto& used = round_used_.back();
    for (int a = 0; a < n; ++a) {
      if (used[a]) continue;
      used[a] = 1;
      Pick outcome = apply(a);
      if (outcome == Pick::Locked) {
        complete_lexicographically();
        return true;
      }
      if (outcome == Pick::Live && search_round_slot(round, slot + 1)) return true;
      unapply();
      used[a] = 0;
    }
    return false;
  }

  std::optional<Policy> search_orders() {
    const int n = inst_.agent_count();
    const int k = inst_.turns_per_agent();
    const bool serpentine = cls_ == PolicyClass::BalancedAlternation;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Policy pi;
    pi.turns.resize(inst_.item_count());
    do {
      for (int r = 0; r < k; ++r)
        for (int i = 0; i < n; ++i)
          pi.turns[r * n + i] =
              serpentine && r % 2 == 1 ? order[n - 1 - i] : order[i];
      if (policy_satisfies(pi)) return pi;
    } while (std::next_permutation(order.begin(), order.end()));
    return std::nullopt;
  }

  bool policy_satisfies(const Policy& pi) {
    GoalTracker tracker = tracker_;
    std::vector<char> taken(inst_.item_count(), 0);
    std::vector<int> cursor(inst_.agent_count(), 0);
    for (int agent : pi.turns) {
      int& c = cursor[agent];
      const auto& pref = inst_.pref(agent);
      while (taken[pref[c]]) ++c;
      taken[pref[c]] = 1;
      Pick outcome = tracker.on_pick(pref[c], agent);
      if (outcome == Pick::Dead) return false;
      if (outcome == Pick::Locked) return true;
    }
    return tracker.live_completion_succeeds();
  }

  struct Undo {
    int agent;
    int item;
    int cursor;
  };

  const Instance& inst_;
  PolicyClass cls_;
  GoalTracker tracker_;
  std::vector<char> taken_;
  std::vector<int> cursor_;
  std::vector<int> remaining_;
  std::vector<Undo> undo_stack_;
  std::vector<int> turns_;
  std::vector<std::vector<char>> round_used_;
  std::optional<Policy> found_;
  bool use_memo_ = false;
  std::uint64_t round_mask_ = 0;
  std::unordered_set<std::uint64_t> failed_;
};

// Resolved copy of a query: top_k expanded, arguments validated.
Query resolve_query(const Instance& inst, const Query& q) {
  Query r = q;
  auto need_agent = [&] {
    if (r.agent < 0 || r.agent >= inst.agent_count())
      throw ValidationError("query needs a valid agent");
  };
  auto no_extras = [&](bool item_ok, bool set_ok, bool target_ok) {
    if (!item_ok && r.item >= 0)
      throw ValidationError("query does not take an item argument");
    if (!set_ok && r.item_set)
      throw ValidationError("query does not take a set argument");
    if (!target_ok && r.target)
      throw ValidationError("query does not take an assignment argument");
  };
  switch (r.problem) {
    case Problem::PossibleItem:
    case Problem::NecessaryItem:
      need_agent();
      if (r.item < 0 || r.item >= inst.item_count())
        throw ValidationError("query needs a valid item");
      no_extras(true, false, false);
      if (r.top_k) throw ValidationError("--top-k applies to set queries only");
      break;
    case Problem::PossibleSet:
    case Problem::NecessarySet:
    case Problem::PossibleSubset:
    case Problem::NecessarySubset: {
      need_agent();
      no_extras(false, true, false);
      if (r.top_k && (r.problem == Problem::PossibleSubset ||
                      r.problem == Problem::NecessarySubset))
        throw ValidationError("--top-k applies to set queries only");
      if (r.top_k) {
        auto top = top_k_items(inst, r.agent);
        std::sort(top.begin(), top.end());
        if (r.item_set) {
          auto given = *r.item_set;
          if (!sorted_unique(given) || given != top)
            throw ValidationError(
                "--top-k set argument must equal the agent's top-k items");
        }
        r.item_set = std::move(top);
      }
      if (!r.item_set) throw ValidationError("query needs a set argument");
      for (int i : *r.item_set)
        if (i < 0 || i >= inst.item_count())
          throw ValidationError("set argument names an unknown item");
      if (!sorted_unique(*r.item_set))
        throw ValidationError("set argument repeats an item");
      break;
    }
    case Problem::PossibleAssignment:
    case Problem::NecessaryAssignment:
      no_extras(false, false, true);
      if (r.top_k) throw ValidationError("--top-k applies to set queries only");
      if (!r.target) throw ValidationError("query needs an assignment argument");
      if (static_cast<int>(r.target->owner.size()) != inst.item_count() ||
          !r.target->complete())
        throw ValidationError("target assignment must be complete");
      break;
  }
  if (r.cls != PolicyClass::Arbitrary || r.top_k) check_divisible(inst);
  return r;
}

}  // namespace

OutcomePredicate query_predicate(const Instance& inst, const Query& q) {
  Query r = resolve_query(inst, q);
  switch (r.problem) {
    case Problem::PossibleItem:
    case Problem::NecessaryItem:
      return OutcomePredicate::agent_gets_item(r.agent, r.item);
    case Problem::PossibleSet:
    case Problem::NecessarySet:
      return OutcomePredicate::share_equals(r.agent, *r.item_set);
    case Problem::PossibleSubset:
    case Problem::NecessarySubset:
      return OutcomePredicate::share_contains(r.agent, *r.item_set);
    case Problem::PossibleAssignment:
    case Problem::NecessaryAssignment:
      return OutcomePredicate::assignment_equals(*r.target);
  }
  throw std::logic_error("unreachable");
}

Answer brute_force_solve(const Instance& inst, const Query& q, std::uint64_t limit) {
  Query r = resolve_query(inst, q);
  ClassCount count = policy_class_count(inst, r.cls);
  if (count.exceeds(limit))
    throw SizeLimitError("policy class holds " + count.str() +
                             " policies, more than the limit of " +
                             std::to_string(limit),
                         count.str());
  OutcomePredicate pred = query_predicate(inst, r);
  bool possible = is_possible_problem(r.problem);
  PolicySearch search(inst, r.cls, make_tracker(inst, pred, !possible));
  std::optional<Policy> hit = search.run();
  Answer a;
  a.method = Answer::Method::BruteForce;
  a.yes = possible ? hit.has_value() : !hit.has_value();
  a.witness = std::move(hit);
  return a;
}

Answer possible_set_arbitrary(const Instance& inst, int agent,
                              const std::vector<int>& set) {
  std::vector<char> wanted(inst.item_count(), 0);
  for (int i : set) wanted[i] = 1;
  const int n = inst.agent_count();
  const int m = inst.item_count();
  std::vector<char> taken(m, 0);
  std::vector<int> cursor(n, 0);
  auto top_of = [&](int a) {
    int& c = cursor[a];
    const auto& pref = inst.pref(a);
    while (taken[pref[c]]) ++c;
    return pref[c];
  };
  Policy pi;
  for (int step = 0; step < m; ++step) {
    int pick_agent = -1;
    for (int a = 0; a < n && pick_agent < 0; ++a)
      if (a != agent && !wanted[top_of(a)]) pick_agent = a;
    if (pick_agent < 0 && wanted[top_of(agent)]) pick_agent = agent;
    if (pick_agent < 0)
      return Answer{false, std::nullopt, Answer::Method::ExactPoly, false};
    taken[top_of(pick_agent)] = 1;
    pi.turns.push_back(pick_agent);
  }
  return Answer{true, std::move(pi), Answer::Method::ExactPoly, false};
}

Answer possible_subset_arbitrary(const Instance& inst, int agent,
                                 const std::vector<int>& set) {
  (void)set;
  return Answer{true, uniform_policy(inst, agent), Answer::Method::ExactPoly, false};
}

namespace {

// Realizes a flow allocation of `items` among `agents` (all indices into
// `inst`, the distinguished agent excluded) as a picking order: Pareto
// improvement by trading cycles, then the greedy witness. Returns turns in
// original agent indices.
std::vector<int> realize_side_allocation(const Instance& inst,
                                         const std::vector<int>& agents,
                                         const std::vector<int>& items,
                                         const std::vector<int>& owner_of_item) {
  Instance sub = inst.restricted(agents, items);
  Assignment sub_m = Assignment::empty_of(sub);
  for (size_t j = 0; j < items.size(); ++j) sub_m.owner[j] = owner_of_item[j];
  sub_m = pareto_improve(sub, sub_m);
  Policy order = witness_picking_sequence(sub, sub_m);
  std::vector<int> turns;
  turns.reserve(order.turns.size());
  for (int a : order.turns) turns.push_back(agents[a]);
  return turns;
}

// Flow feasibility for one candidate bundle: can `items` be split among the
// other agents, k each, so that everybody only receives items she ranks
// above every item of `bundle`? On success fills owner_of_item.
bool side_allocation_exists(const Instance& inst, int agent, int k,
                            const std::vector<int>& items,
                            const std::vector<int>& bundle,
                            std::vector<int>* owner_of_item) {
  const int n = inst.agent_count();
  std::vector<int> others;
  for (int a = 0; a < n; ++a)
    if (a != agent) others.push_back(a);

  FlowNetwork net;
  const int source = 0;
  net.node_count = 2 + static_cast<int>(others.size()) + static_cast<int>(items.size());
  net.source = source;
  net.sink = net.node_count - 1;
  auto agent_node = [&](int idx) { return 1 + idx; };
  auto item_node = [&](int idx) { return 1 + static_cast<int>(others.size()) + idx; };

  std::vector<std::pair<int, std::pair<int, int>>> arc_meta;  // arc -> (other, item)
  for (size_t ai = 0; ai < others.size(); ++ai)
    net.add_arc(source, agent_node(static_cast<int>(ai)), k);
  for (size_t ai = 0; ai < others.size(); ++ai) {
    int a = others[ai];
    int worst_ok = inst.item_count();
    for (int b : bundle) worst_ok = std::min(worst_ok, inst.rank0(a, b));
    for (size_t ii = 0; ii < items.size(); ++ii) {
      if (inst.rank0(a, items[ii]) < worst_ok) {
        int arc = net.add_arc(agent_node(static_cast<int>(ai)),
                              item_node(static_cast<int>(ii)), 1);
        arc_meta.push_back({arc, {static_cast<int>(ai), static_cast<int>(ii)}});
      }
    }
  }
  for (size_t ii = 0; ii < items.size(); ++ii)
    net.add_arc(item_node(static_cast<int>(ii)), net.sink, 1);

  MaxFlowResult flow = max_flow(net);
  long long want = static_cast<long long>(k) * static_cast<long long>(others.size());
  if (flow.value != want) return false;
  if (owner_of_item) {
    owner_of_item->assign(items.size(), -1);
    for (const auto& [arc, who] : arc_meta)
      if (flow.arc_flow[arc] > 0) (*owner_of_item)[who.second] = who.first;
  }
  return true;
}

}  // namespace

Answer necessary_item_balanced(const Instance& inst, int agent, int item) {
  check_divisible(inst);
  const int k = inst.turns_per_agent();
  const int kp = inst.rank0(agent, item) + 1;
  if (kp > k)
    return Answer{false, agent_first_policy(inst, agent),
                  Answer::Method::ExactPoly, false};

  const auto& pref = inst.pref(agent);
  // Items the agent ranks strictly below `item`.
  std::vector<int> below(pref.begin() + kp, pref.end());
  const int need = k - kp + 1;
  if (need > static_cast<int>(below.size()))
    return Answer{true, std::nullopt, Answer::Method::ExactPoly, false};

  std::vector<int> pick(need);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    std::vector<int> bundle;
    for (int idx : pick) bundle.push_back(below[idx]);
    std::vector<char> excluded(inst.item_count(), 0);
    for (int b : bundle) excluded[b] = 1;
    for (int i = 0; i < kp - 1; ++i) excluded[pref[i]] = 1;
    std::vector<int> rest;
    for (int i = 0; i < inst.item_count(); ++i)
      if (!excluded[i]) rest.push_back(i);

    std::vector<int> owner;
    if (side_allocation_exists(inst, agent, k, rest, bundle, &owner)) {
      std::vector<int> others;
      for (int a = 0; a < inst.agent_count(); ++a)
        if (a != agent) others.push_back(a);
      std::vector<int> sub_owner(rest.size());
      for (size_t j = 0; j < rest.size(); ++j) {
        // owner holds indices into `others`.
        sub_owner[j] = owner[j];
      }
      Policy pi;
      pi.turns.insert(pi.turns.end(), kp - 1, agent);
      auto side = realize_side_allocation(inst, others, rest, sub_owner);
      pi.turns.insert(pi.turns.end(), side.begin(), side.end());
      pi.turns.insert(pi.turns.end(), k - kp + 1, agent);
      return Answer{false, std::move(pi), Answer::Method::ExactPoly, false};
    }

    // Next lexicographic combination.
    int pos = need - 1;
    while (pos >= 0 && pick[pos] == static_cast<int>(below.size()) - need + pos)
      --pos;
    if (pos < 0) break;
    ++pick[pos];
    for (int j = pos + 1; j < need; ++j) pick[j] = pick[j - 1] + 1;
  }
  return Answer{true, std::nullopt, Answer::Method::ExactPoly, false};
}

Answer necessary_set_balanced(const Instance& inst, int agent,
                              const std::vector<int>& set, bool /*top_k*/) {
  check_divisible(inst);
  const int k = inst.turns_per_agent();
  std::vector<int> target = set;
  std::sort(target.begin(), target.end());
  std::vector<int> top = top_k_items(inst, agent);
  std::sort(top.begin(), top.end());
  if (target != top)
    return Answer{false, agent_first_policy(inst, agent),
                  Answer::Method::ExactPoly, true};

  // Reduced instance: the agent's top-k items collapse into one fresh
  // token; the agent picks once, at the very end.
  std::string fresh = "__c";
  for (int suffix = 0; inst.item_index(fresh); ++suffix)
    fresh = "__c" + std::to_string(suffix);
  std::vector<char> is_top(inst.item_count(), 0);
  for (int i : top) is_top[i] = 1;

  std::vector<std::string> red_items;
  std::vector<int> red_to_orig;  // -1 for the fresh token
  for (int i = 0; i < inst.item_count(); ++i)
    if (!is_top[i]) {
      red_items.push_back(inst.item_name(i));
      red_to_orig.push_back(i);
    }
  red_items.push_back(fresh);
  red_to_orig.push_back(-1);
  const int fresh_idx = static_cast<int>(red_items.size()) - 1;

  std::vector<std::vector<std::string>> red_prefs(inst.agent_count());
  for (int a = 0; a < inst.agent_count(); ++a) {
    bool used_fresh = false;
    for (int item : inst.pref(a)) {
      if (is_top[item]) {
        if (!used_fresh) {
          red_prefs[a].push_back(fresh);
          used_fresh = true;
        }
      } else {
        red_prefs[a].push_back(inst.item_name(item));
      }
    }
  }
  Instance reduced(inst.agent_names(), red_items, red_prefs, true);

  std::vector<int> others;
  for (int a = 0; a < inst.agent_count(); ++a)
    if (a != agent) others.push_back(a);

  for (int x = 0; x < reduced.item_count(); ++x) {
    if (x == fresh_idx) continue;
    std::vector<int> rest;
    for (int i = 0; i < reduced.item_count(); ++i)
      if (i != x) rest.push_back(i);
    std::vector<int> owner;
    if (!side_allocation_exists(reduced, agent, k, rest, {x}, &owner)) continue;
    Policy pi;
    pi.turns = realize_side_allocation(reduced, others, rest, owner);
    pi.turns.insert(pi.turns.end(), k, agent);
    return Answer{false, std::move(pi), Answer::Method::ExactPoly, true};
  }
  return Answer{true, std::nullopt, Answer::Method::ExactPoly, true};
}

Answer necessary_subset_balanced(const Instance& inst, int agent,
                                 const std::vector<int>& set) {
  check_divisible(inst);
  const int k = inst.turns_per_agent();
  std::vector<int> ordered = set;
  std::sort(ordered.begin(), ordered.end());
  for (int item : ordered)
    if (inst.rank0(agent, item) >= k)
      return Answer{false, agent_first_policy(inst, agent),
                    Answer::Method::ExactPoly, false};
  for (int item : ordered) {
    Answer sub = necessary_item_balanced(inst, agent, item);
    if (!sub.yes) return sub;
  }
  return Answer{true, std::nullopt, Answer::Method::ExactPoly, false};
}

Answer necessary_assignment(const Instance& inst, const Assignment& m,
                            PolicyClass cls) {
  if (static_cast<int>(m.owner.size()) != inst.item_count() || !m.complete())
    throw ValidationError("assignment is not a complete partition of the items");
  const int n = inst.agent_count();
  if (inst.item_count() == 0)
    return Answer{true, std::nullopt, Answer::Method::ExactPoly, false};

  if (cls == PolicyClass::Arbitrary) {
    if (n == 1) return Answer{true, std::nullopt, Answer::Method::ExactPoly, false};
    return first_deviating_uniform(inst,
                                   OutcomePredicate::assignment_equals(m));
  }
  check_divisible(inst);
  const int k = inst.turns_per_agent();

  auto sizes = m.share_sizes(inst);
  bool balanced = std::all_of(sizes.begin(), sizes.end(),
                              [&](int s) { return s == k; });

  if (cls == PolicyClass::Balanced) {
    for (int a = 0; a < n; ++a) {
      std::vector<int> share = m.share(a);
      std::vector<int> top = top_k_items(inst, a);
      std::sort(share.begin(), share.end());
      std::sort(top.begin(), top.end());
      if (share != top)
        return Answer{false, agent_first_policy(inst, a),
                      Answer::Method::ExactPoly, false};
    }
    return Answer{true, std::nullopt, Answer::Method::ExactPoly, false};
  }

  // Round-structured classes: in every round each agent's most preferred
  // remaining item must be her own round item, otherwise the round order
  // matters (or the target is plainly unreachable) and some class policy
  // deviates.
  // A class policy whose round `round` opens with the violating agent.
  // Earlier (passing) rounds hand out the target's round items in any
  // order, so only that one position matters.
  auto witness_with_violator = [&](int round, int violator) {
    bool violator_last =
        cls == PolicyClass::BalancedAlternation && round % 2 == 1;
    std::vector<int> base;
    if (!violator_last) base.push_back(violator);
    for (int a = 0; a < n; ++a)
      if (a != violator) base.push_back(a);
    if (violator_last) base.push_back(violator);
    Policy pi;
    for (int r = 0; r < k; ++r) {
      bool reversed = cls == PolicyClass::BalancedAlternation && r % 2 == 1;
      if (reversed)
        pi.turns.insert(pi.turns.end(), base.rbegin(), base.rend());
      else
        pi.turns.insert(pi.turns.end(), base.begin(), base.end());
    }
    return pi;
  };

  if (!balanced) {
    // Any class policy yields a balanced outcome, which differs from m.
    return Answer{false, witness_with_violator(0, 0),
                  Answer::Method::ExactPoly, false};
  }

  auto p = ranked_shares(inst, m);
  std::vector<char> available(inst.item_count(), 1);
  std::vector<int> cursor(n, 0);
  for (int round = 0; round < k; ++round) {
    for (int a = 0; a < n; ++a) {
      int& c = cursor[a];
      const auto& pref = inst.pref(a);
      while (!available[pref[c]]) ++c;
      if (pref[c] != p[a][round])
        return Answer{false, witness_with_violator(round, a),
                      Answer::Method::ExactPoly, false};
    }
    for (int a = 0; a < n; ++a) available[p[a][round]] = 0;
  }
  return Answer{true, std::nullopt, Answer::Method::ExactPoly, false};
}

Answer top2_possible_set(const Instance& inst, int agent, PolicyClass cls) {
  if (cls != PolicyClass::RecursivelyBalanced &&
      cls != PolicyClass::StrictAlternation)
    throw ValidationError("top-2 matching test covers rec-balanced and strict-alt");
  check_divisible(inst);
  if (inst.turns_per_agent() != 2)
    throw ValidationError("top-2 matching test requires k = 2");
  const int n = inst.agent_count();
  const bool sketch = cls == PolicyClass::StrictAlternation;
  const int s1 = inst.pref(agent)[0];
  const int s2 = inst.pref(agent)[1];

  std::vector<int> others;
  for (int a = 0; a < n; ++a)
    if (a != agent) others.push_back(a);

  if (!others.empty()) {
    // Right side: all items but s1. An edge means the other agent strictly
    // prefers the item to s2, so she can be served before s2 is at risk.
    std::vector<int> right;
    for (int i = 0; i < inst.item_count(); ++i)
      if (i != s1) right.push_back(i);
    std::vector<std::pair<int, int>> edges;
    for (size_t ai = 0; ai < others.size(); ++ai)
      for (size_t ri = 0; ri < right.size(); ++ri)
        if (inst.rank0(others[ai], right[ri]) < inst.rank0(others[ai], s2))
          edges.push_back({static_cast<int>(ai), static_cast<int>(ri)});
    MatchingResult matching =
        max_bipartite_matching(static_cast<int>(others.size()),
                               static_cast<int>(right.size()), edges);
    if (matching.size < static_cast<int>(others.size()))
      return Answer{false, std::nullopt, Answer::Method::ExactPoly, sketch};

    // Turn the matching into a first-round picking order: rotate matched
    // items along trading cycles until every next agent's sincere top is
    // her own matched item.
    std::vector<char> in_pool(inst.item_count(), 1);
    in_pool[s1] = 0;
    std::vector<int> mu(n, -1);
    for (size_t ai = 0; ai < others.size(); ++ai)
      mu[others[ai]] = right[matching.right_of_left[ai]];
    std::vector<int> reserved_by(inst.item_count(), -1);
    std::vector<int> remaining = others;
    for (int a : remaining) reserved_by[mu[a]] = a;

    std::vector<int> order;
    std::vector<int> cursor(n, 0);
    auto top_of = [&](int a) {
      int& c = cursor[a];
      const auto& pref = inst.pref(a);
      while (!in_pool[pref[c]]) ++c;
      return pref[c];
    };
    while (!remaining.empty()) {
      int placed = -1;
      for (size_t i = 0; i < remaining.size() && placed < 0; ++i) {
        int a = remaining[i];
        int top = top_of(a);
        if (reserved_by[top] == -1 || reserved_by[top] == a)
          placed = static_cast<int>(i);
      }
      if (placed >= 0) {
        int a = remaining[placed];
        int top = top_of(a);
        reserved_by[mu[a]] = -1;
        in_pool[top] = 0;
        order.push_back(a);
        remaining.erase(remaining.begin() + placed);
        continue;
      }
      // Every remaining agent's top is reserved by someone else: rotate the
      // matching along the cycle through the lowest remaining agent.
      std::vector<char> seen(n, 0);
      int start = remaining.front();
      int walker = start;
      while (!seen[walker]) {
        seen[walker] = 1;
        walker = reserved_by[top_of(walker)];
      }
      int cycle_entry = walker;
      std::vector<int> cycle;
      do {
        cycle.push_back(walker);
        walker = reserved_by[top_of(walker)];
      } while (walker != cycle_entry);
      std::vector<int> new_mu(cycle.size());
      for (size_t i = 0; i < cycle.size(); ++i) new_mu[i] = top_of(cycle[i]);
      for (size_t i = 0; i < cycle.size(); ++i) {
        reserved_by[mu[cycle[i]]] = -1;
        mu[cycle[i]] = new_mu[i];
      }
      for (int a : cycle) reserved_by[mu[a]] = a;
    }

    Policy pi;
    pi.turns.push_back(agent);
    pi.turns.insert(pi.turns.end(), order.begin(), order.end());
    pi.turns.push_back(agent);
    pi.turns.insert(pi.turns.end(), order.begin(), order.end());
    return Answer{true, std::move(pi), Answer::Method::ExactPoly, sketch};
  }

  return Answer{true, uniform_policy(inst, agent), Answer::Method::ExactPoly,
                sketch};
}

Answer solve(const Instance& inst, const Query& q, SolveMethod method,
             std::uint64_t limit) {
  Query r = resolve_query(inst, q);
  if (method == SolveMethod::Brute) return brute_force_solve(inst, r, limit);

  const bool arbitrary = r.cls == PolicyClass::Arbitrary;
  switch (r.problem) {
    case Problem::PossibleAssignment: {
      Achievability res = achievable(inst, *r.target, r.cls);
      return Answer{res.achievable, std::move(res.witness),
                    Answer::Method::ExactPoly, false};
    }
    case Problem::NecessaryAssignment:
      return necessary_assignment(inst, *r.target, r.cls);
    case Problem::PossibleItem:
      if (arbitrary)
        return Answer{true, uniform_policy(inst, r.agent),
                      Answer::Method::ExactPoly, false};
      break;
    case Problem::NecessaryItem:
      if (arbitrary) {
        if (inst.agent_count() == 1)
          return Answer{true, std::nullopt, Answer::Method::ExactPoly, false};
        return first_deviating_uniform(
            inst, OutcomePredicate::agent_gets_item(r.agent, r.item));
      }
      if (r.cls == PolicyClass::Balanced)
        return necessary_item_balanced(inst, r.agent, r.item);
      break;
    case Problem::PossibleSet:
      if (arbitrary) return possible_set_arbitrary(inst, r.agent, *r.item_set);
      if (r.top_k && r.cls == PolicyClass::Balanced)
        return Answer{true, agent_first_policy(inst, r.agent),
                      Answer::Method::ExactPoly, false};
      if (r.top_k && inst.turns_per_agent() == 2 &&
          (r.cls == PolicyClass::RecursivelyBalanced ||
           r.cls == PolicyClass::StrictAlternation))
        return top2_possible_set(inst, r.agent, r.cls);
      break;
    case Problem::NecessarySet:
      if (arbitrary) {
        if (inst.agent_count() == 1) {
          bool yes = static_cast<int>(r.item_set->size()) == inst.item_count();
          if (yes)
            return Answer{true, std::nullopt, Answer::Method::ExactPoly, false};
          return Answer{false, uniform_policy(inst, r.agent),
                        Answer::Method::ExactPoly, false};
        }
        return first_deviating_uniform(
            inst, OutcomePredicate::share_equals(r.agent, *r.item_set));
      }
      if (r.cls == PolicyClass::Balanced)
        return necessary_set_balanced(inst, r.agent, *r.item_set, r.top_k);
      break;
    case Problem::PossibleSubset:
      if (arbitrary) return possible_subset_arbitrary(inst, r.agent, *r.item_set);
      break;
    case Problem::NecessarySubset:
      if (arbitrary) {
        if (r.item_set->empty() || inst.agent_count() == 1)
          return Answer{true, std::nullopt, Answer::Method::ExactPoly, false};
        return first_deviating_uniform(
            inst, OutcomePredicate::share_contains(r.agent, *r.item_set));
      }
      if (r.cls == PolicyClass::Balanced)
        return necessary_subset_balanced(inst, r.agent, *r.item_set);
      break;
  }
  if (method == SolveMethod::Exact)
    throw ValidationError("no exact polynomial algorithm for " +
                          to_string(r.problem) + " under " + to_string(r.cls) +
                          " policies");
  return brute_force_solve(inst, r, limit);
}

bool answer_certified(const Instance& inst, const Query& q, const Answer& a) {
  Query r = resolve_query(inst, q);
  bool possible = is_possible_problem(r.problem);
  bool needs_witness = (possible && a.yes) || (!possible && !a.yes);
  if (!needs_witness) return !a.witness.has_value();
  if (!a.witness) return false;
  if (!policy_in_class(inst, *a.witness, r.cls)) return false;
  OutcomePredicate pred = query_predicate(inst, r);
  bool holds = pred.eval(inst, execute_to_assignment(inst, *a.witness));
  return possible ? holds : !holds;
}

}  // namespace seqalloc
