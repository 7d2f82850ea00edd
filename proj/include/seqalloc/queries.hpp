#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "seqalloc/engine.hpp"
#include "seqalloc/model.hpp"

namespace seqalloc {

enum class Problem {
  PossibleItem,
  NecessaryItem,
  PossibleSet,
  NecessarySet,
  PossibleSubset,
  NecessarySubset,
  PossibleAssignment,
  NecessaryAssignment,
};

std::optional<Problem> problem_from_string(std::string_view s);
std::string to_string(Problem p);
bool is_possible_problem(Problem p);

// One decision query. The populated arguments must match the problem arity:
// item problems carry agent+item, set/subset problems agent+item_set (or
// top_k, which pins the set to the agent's top k = m/n items), assignment
// problems a target assignment.
struct Query {
  Problem problem;
  PolicyClass cls;
  int agent = -1;
  int item = -1;
  std::optional<std::vector<int>> item_set;
  std::optional<Assignment> target;
  bool top_k = false;
};

struct Answer {
  enum class Method { ExactPoly, BruteForce };

  bool yes = false;
  // Certificate: a class policy achieving the target (possible, yes) or
  // violating it (necessary, no).
  std::optional<Policy> witness;
  Method method = Method::ExactPoly;
  // Set when the algorithm is an instantiation of a sketched procedure,
  // validated against brute force rather than a written-out proof.
  bool derived_from_sketch = false;
};

const char* to_string(Answer::Method m);

enum class SolveMethod { Auto, Exact, Brute };

// The outcome predicate a query quantifies over (after top_k resolution).
OutcomePredicate query_predicate(const Instance& inst, const Query& q);

// Validates arity, resolves top_k, and routes to an exact polynomial
// algorithm where one exists for (problem, class, top_k), otherwise to
// guarded enumeration. `Exact` insists on an exact algorithm and throws
// when the cell has none; `Brute` forces enumeration.
Answer solve(const Instance& inst, const Query& q,
             SolveMethod method = SolveMethod::Auto,
             std::uint64_t limit = kDefaultPolicyLimit);

// Exhaustive decision over the policy class (depth-first over turn
// prefixes with sound pruning; the reported certificate is the
// lexicographically least one). Throws SizeLimitError when the class
// cardinality exceeds the limit.
Answer brute_force_solve(const Instance& inst, const Query& q,
                         std::uint64_t limit = kDefaultPolicyLimit);

// Exact algorithms behind the solve dispatch.

// Greedy certificate search: others pick outside the target set while they
// want to, the agent picks inside it; yes iff the loop allocates everything
// with the agent's share exactly S.
Answer possible_set_arbitrary(const Instance& inst, int agent,
                              const std::vector<int>& set);
// Always yes: the all-`agent` policy hands the agent every item.
Answer possible_subset_arbitrary(const Instance& inst, int agent,
                                 const std::vector<int>& set);
// Flow-based test per candidate leftover bundle of the agent.
Answer necessary_item_balanced(const Instance& inst, int agent, int item);
// Reduced-instance flow test; `top_k` only marks that the caller already
// checked the set against the agent's top-k.
Answer necessary_set_balanced(const Instance& inst, int agent,
                              const std::vector<int>& set, bool top_k = false);
// Conjunction of necessary_item_balanced over the set.
Answer necessary_subset_balanced(const Instance& inst, int agent,
                                 const std::vector<int>& set);
// Per-class uniqueness-of-outcome test.
Answer necessary_assignment(const Instance& inst, const Assignment& m,
                            PolicyClass cls);
// k = 2 saturating-matching test for recursively balanced or strict
// alternation policies.
Answer top2_possible_set(const Instance& inst, int agent, PolicyClass cls);

// True when the answer's certificate (if the answer should carry one)
// exists, lies in the queried class, and re-executes to a state that
// proves the decision.
bool answer_certified(const Instance& inst, const Query& q, const Answer& a);

}  // namespace seqalloc
