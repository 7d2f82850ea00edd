#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "seqalloc/model.hpp"

namespace seqalloc {

inline constexpr std::uint64_t kDefaultPolicyLimit = 10'000'000;

// One sincere-picking run: at every turn the agent takes her most preferred
// item that is still available.
struct ExecutionTrace {
  struct Step {
    int turn;
    int agent;
    int item;
  };
  std::vector<Step> steps;
  Assignment final;
};

ExecutionTrace execute_policy(const Instance& inst, const Policy& pi);
// Same picking rule without the step log.
Assignment execute_to_assignment(const Instance& inst, const Policy& pi);

// Membership test for the five classes. Throws ValidationError when the
// policy length is not m or names an unknown agent, and for non-arbitrary
// classes when n does not divide m.
bool policy_in_class(const Instance& inst, const Policy& pi, PolicyClass cls);

// Class cardinality with saturation (counts can exceed 128 bits only far
// beyond anything enumerable).
struct ClassCount {
  unsigned __int128 value = 0;
  bool saturated = false;

  bool exceeds(std::uint64_t limit) const {
    return saturated || value > limit;
  }
  std::string str() const;
};

ClassCount policy_class_count(const Instance& inst, PolicyClass cls);

// Visits every policy of the class exactly once, in lexicographic order by
// agent declaration index. The visitor returns false to stop early. The
// Policy reference is only valid during the call.
void for_each_policy(const Instance& inst, PolicyClass cls,
                     const std::function<bool(const Policy&)>& visit);

// Materializes the class; refuses (SizeLimitError) when its cardinality
// exceeds `limit`.
std::vector<Policy> enumerate_policies(const Instance& inst, PolicyClass cls,
                                       std::uint64_t limit = kDefaultPolicyLimit);

struct Rational {
  long long num = 0;
  long long den = 1;

  std::string str() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }
  bool operator==(const Rational& o) const {
    return num == o.num && den == o.den;
  }
};

Rational make_rational(long long num, long long den);

// Outcome predicates for probability queries over a uniformly random policy
// of a class.
struct OutcomePredicate {
  enum class Kind { AgentGetsItem, ShareEquals, ShareContains, AssignmentEquals };

  Kind kind;
  int agent = -1;
  int item = -1;
  std::vector<int> items;  // target set for ShareEquals / ShareContains
  Assignment target;       // for AssignmentEquals

  bool eval(const Instance& inst, const Assignment& outcome) const;

  static OutcomePredicate agent_gets_item(int agent, int item);
  static OutcomePredicate share_equals(int agent, std::vector<int> items);
  static OutcomePredicate share_contains(int agent, std::vector<int> items);
  static OutcomePredicate assignment_equals(Assignment target);
};

// Fraction of class policies whose outcome satisfies the predicate, as a
// reduced exact rational. Enumerates the class; SizeLimitError beyond
// `limit`.
Rational outcome_probability(const Instance& inst, PolicyClass cls,
                             const OutcomePredicate& pred,
                             std::uint64_t limit = kDefaultPolicyLimit);

}  // namespace seqalloc
