#include "seqalloc/engine.hpp"

#include <algorithm>
#include <numeric>

namespace seqalloc {

namespace {

void check_policy(const Instance& inst, const Policy& pi) {
  if (static_cast<int>(pi.turns.size()) != inst.item_count())
    throw ValidationError("policy has " + std::to_string(pi.turns.size()) +
                          " turns, expected " + std::to_string(inst.item_count()));
  for (int a : pi.turns)
    if (a < 0 || a >= inst.agent_count())
      throw ValidationError("policy names an unknown agent");
}

void check_divisible(const Instance& inst) {
  if (!inst.divisible())
    throw ValidationError(
        "the number of items (" + std::to_string(inst.item_count()) +
        ") must be a multiple of the number of agents (" +
        std::to_string(inst.agent_count()) + ") for this policy class");
}

// Picking cursors: cursor[a] scans agent a's preference list left to right,
// skipping items already taken.
struct Picker {
  explicit Picker(const Instance& inst)
      : inst(&inst), taken(inst.item_count(), 0), cursor(inst.agent_count(), 0) {}

  int pick(int agent) {
    int& c = cursor[agent];
    const auto& pref = inst->pref(agent);
    while (taken[pref[c]]) ++c;
    int item = pref[c];
    taken[item] = 1;
    return item;
  }

  const Instance* inst;
  std::vector<char> taken;
  std::vector<int> cursor;
};

}  // namespace

ExecutionTrace execute_policy(const Instance& inst, const Policy& pi) {
  check_policy(inst, pi);
  ExecutionTrace trace;
  trace.final = Assignment::empty_of(inst);
  Picker picker(inst);
  for (int t = 0; t < static_cast<int>(pi.turns.size()); ++t) {
    int agent = pi.turns[t];
    int item = picker.pick(agent);
    trace.steps.push_back({t, agent, item});
    trace.final.owner[item] = agent;
  }
  return trace;
}

Assignment execute_to_assignment(const Instance& inst, const Policy& pi) {
  check_policy(inst, pi);
  Assignment out = Assignment::empty_of(inst);
  Picker picker(inst);
  for (int agent : pi.turns) out.owner[picker.pick(agent)] = agent;
  return out;
}

bool policy_in_class(const Instance& inst, const Policy& pi, PolicyClass cls) {
  check_policy(inst, pi);
  if (cls == PolicyClass::Arbitrary) return true;
  check_divisible(inst);
  const int n = inst.agent_count();
  const int k = inst.turns_per_agent();

  std::vector<int> counts(n, 0);
  for (int a : pi.turns) ++counts[a];
  for (int c : counts)
    if (c != k) return false;
  if (cls == PolicyClass::Balanced) return true;

  auto round_is_permutation = [&](int r) {
    std::vector<char> seen(n, 0);
    for (int i = 0; i < n; ++i) {
      int a = pi.turns[r * n + i];
      if (seen[a]) return false;
      seen[a] = 1;
    }
    return true;
  };
  for (int r = 0; r < k; ++r)
    if (!round_is_permutation(r)) return false;
  if (cls == PolicyClass::RecursivelyBalanced) return true;

  // First round fixes the order; later rounds must repeat it (strict
  // alternation) or serpentine it (balanced alternation).
  for (int r = 1; r < k; ++r) {
    for (int i = 0; i < n; ++i) {
      int expected = cls == PolicyClass::StrictAlternation || r % 2 == 0
                         ? pi.turns[i]
                         : pi.turns[n - 1 - i];
      if (pi.turns[r * n + i] != expected) return false;
    }
  }
  return true;
}

std::string ClassCount::str() const {
  if (saturated) return ">=2^128";
  if (value == 0) return "0";
  std::string out;
  unsigned __int128 v = value;
  while (v > 0) {
    out += static_cast<char>('0' + static_cast<int>(v % 10));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

ClassCount mul(ClassCount a, unsigned __int128 b) {
  if (a.saturated) return a;
  if (b != 0 && a.value > static_cast<unsigned __int128>(-1) / b) {
    a.saturated = true;
    return a;
  }
  a.value *= b;
  return a;
}

ClassCount factorial(int n) {
  ClassCount c{1, false};
  for (int i = 2; i <= n; ++i) c = mul(c, i);
  return c;
}

// m! / (k!)^n as a product of binomial coefficients C(m, k) C(m-k, k) ...
ClassCount multinomial(int m, int n, int k) {
  ClassCount c{1, false};
  int rest = m;
  for (int a = 0; a < n; ++a) {
    // C(rest, k), computed without intermediate overflow wherever possible.
    unsigned __int128 binom = 1;
    for (int i = 1; i <= k; ++i) {
      unsigned __int128 num = static_cast<unsigned>(rest - k + i);
      if (binom > static_cast<unsigned __int128>(-1) / num)
        return ClassCount{0, true};
      binom = binom * num / static_cast<unsigned>(i);
    }
    c = mul(c, binom);
    if (c.saturated) return c;
    rest -= k;
  }
  return c;
}

}  // namespace

ClassCount policy_class_count(const Instance& inst, PolicyClass cls) {
  const int n = inst.agent_count();
  const int m = inst.item_count();
  if (cls == PolicyClass::Arbitrary) {
    ClassCount c{1, false};
    for (int i = 0; i < m; ++i) c = mul(c, static_cast<unsigned>(n));
    return c;
  }
  check_divisible(inst);
  const int k = inst.turns_per_agent();
  if (m == 0) return ClassCount{1, false};
  switch (cls) {
    case PolicyClass::Balanced:
      return multinomial(m, n, k);
    case PolicyClass::RecursivelyBalanced: {
      ClassCount f = factorial(n);
      ClassCount c{1, false};
      for (int r = 0; r < k; ++r) {
        if (f.saturated) return f;
        c = mul(c, f.value);
      }
      return c;
    }
    case PolicyClass::StrictAlternation:
    case PolicyClass::BalancedAlternation:
      return factorial(n);
    default:
      return ClassCount{0, false};
  }
}

namespace {

// Lexicographic enumeration helpers. Each yields policies through `visit`
// and honors early termination.

bool visit_balanced(const Instance& inst, const std::function<bool(const Policy&)>& visit) {
  const int n = inst.agent_count();
  const int m = inst.item_count();
  const int k = inst.turns_per_agent();
  Policy pi;
  pi.turns.assign(m, -1);
  std::vector<int> remaining(n, k);
  std::function<bool(int)> rec = [&](int pos) -> bool {
    if (pos == m) return visit(pi);
    for (int a = 0; a < n; ++a) {
      if (remaining[a] == 0) continue;
      --remaining[a];
      pi.turns[pos] = a;
      bool keep_going = rec(pos + 1);
      ++remaining[a];
      if (!keep_going) return false;
    }
    return true;
  };
  return rec(0);
}

bool visit_arbitrary(const Instance& inst, const std::function<bool(const Policy&)>& visit) {
  const int n = inst.agent_count();
  const int m = inst.item_count();
  Policy pi;
  pi.turns.assign(m, 0);
  while (true) {
    if (!visit(pi)) return false;
    int pos = m - 1;
    while (pos >= 0 && pi.turns[pos] == n - 1) pi.turns[pos--] = 0;
    if (pos < 0) return true;
    ++pi.turns[pos];
  }
}

bool visit_rec_balanced(const Instance& inst, const std::function<bool(const Policy&)>& visit) {
  const int n = inst.agent_count();
  const int k = inst.turns_per_agent();
  Policy pi;
  pi.turns.assign(inst.item_count(), -1);
  std::function<bool(int)> rec = [&](int round) -> bool {
    if (round == k) return visit(pi);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    do {
      std::copy(order.begin(), order.end(), pi.turns.begin() + round * n);
      if (!rec(round + 1)) return false;
    } while (std::next_permutation(order.begin(), order.end()));
    return true;
  };
  return rec(0);
}

bool visit_alternation(const Instance& inst, bool serpentine,
                       const std::function<bool(const Policy&)>& visit) {
  const int n = inst.agent_count();
  const int k = inst.turns_per_agent();
  Policy pi;
  pi.turns.assign(inst.item_count(), -1);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  do {
    for (int r = 0; r < k; ++r)
      for (int i = 0; i < n; ++i)
        pi.turns[r * n + i] =
            serpentine && r % 2 == 1 ? order[n - 1 - i] : order[i];
    if (!visit(pi)) return false;
  } while (std::next_permutation(order.begin(), order.end()));
  return true;
}

}  // namespace

void for_each_policy(const Instance& inst, PolicyClass cls,
                     const std::function<bool(const Policy&)>& visit) {
  if (cls != PolicyClass::Arbitrary) check_divisible(inst);
  if (inst.item_count() == 0) {
    visit(Policy{});
    return;
  }
  switch (cls) {
    case PolicyClass::Arbitrary:
      visit_arbitrary(inst, visit);
      break;
    case PolicyClass::Balanced:
      visit_balanced(inst, visit);
      break;
    case PolicyClass::RecursivelyBalanced:
      visit_rec_balanced(inst, visit);
      break;
    case PolicyClass::StrictAlternation:
      visit_alternation(inst, false, visit);
      break;
    case PolicyClass::BalancedAlternation:
      visit_alternation(inst, true, visit);
      break;
  }
}

std::vector<Policy> enumerate_policies(const Instance& inst, PolicyClass cls,
                                       std::uint64_t limit) {
  ClassCount count = policy_class_count(inst, cls);
  if (count.exceeds(limit))
    throw SizeLimitError("policy class holds " + count.str() +
                             " policies, more than the limit of " +
                             std::to_string(limit),
                         count.str());
  std::vector<Policy> out;
  out.reserve(static_cast<size_t>(count.value));
  for_each_policy(inst, cls, [&](const Policy& pi) {
    out.push_back(pi);
    return true;
  });
  return out;
}

Rational make_rational(long long num, long long den) {
  long long g = std::gcd(num, den);
  if (g == 0) return Rational{0, 1};
  return Rational{num / g, den / g};
}

OutcomePredicate OutcomePredicate::agent_gets_item(int agent, int item) {
  OutcomePredicate p;
  p.kind = Kind::AgentGetsItem;
  p.agent = agent;
  p.item = item;
  return p;
}

OutcomePredicate OutcomePredicate::share_equals(int agent, std::vector<int> items) {
  OutcomePredicate p;
  p.kind = Kind::ShareEquals;
  p.agent = agent;
  p.items = std::move(items);
  return p;
}

OutcomePredicate OutcomePredicate::share_contains(int agent, std::vector<int> items) {
  OutcomePredicate p;
  p.kind = Kind::ShareContains;
  p.agent = agent;
  p.items = std::move(items);
  return p;
}

OutcomePredicate OutcomePredicate::assignment_equals(Assignment target) {
  OutcomePredicate p;
  p.kind = Kind::AssignmentEquals;
  p.target = std::move(target);
  return p;
}

bool OutcomePredicate::eval(const Instance& inst, const Assignment& outcome) const {
  switch (kind) {
    case Kind::AgentGetsItem:
      return outcome.owner[item] == agent;
    case Kind::ShareEquals: {
      int mine = 0;
      for (int a : outcome.owner)
        if (a == agent) ++mine;
      if (mine != static_cast<int>(items.size())) return false;
      for (int i : items)
        if (outcome.owner[i] != agent) return false;
      return true;
    }
    case Kind::ShareContains:
      for (int i : items)
        if (outcome.owner[i] != agent) return false;
      return true;
    case Kind::AssignmentEquals:
      return outcome == target;
  }
  (void)inst;
  return false;
}

Rational outcome_probability(const Instance& inst, PolicyClass cls,
                             const OutcomePredicate& pred, std::uint64_t limit) {
  ClassCount count = policy_class_count(inst, cls);
  if (count.exceeds(limit))
    throw SizeLimitError("policy class holds " + count.str() +
                             " policies, more than the limit of " +
                             std::to_string(limit),
                         count.str());
  long long total = 0;
  long long hits = 0;
  for_each_policy(inst, cls, [&](const Policy& pi) {
    ++total;
    if (pred.eval(inst, execute_to_assignment(inst, pi))) ++hits;
    return true;
  });
  return make_rational(hits, total);
}

}  // namespace seqalloc
