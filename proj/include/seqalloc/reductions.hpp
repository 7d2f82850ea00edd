#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "seqalloc/model.hpp"
#include "seqalloc/queries.hpp"

namespace seqalloc {

// Exact cover by 3-sets: a universe X with 3 | |X| and a family of
// 3-element subsets; asked for |X|/3 family members whose union is X.
struct X3CInstance {
  std::vector<std::string> universe;
  std::vector<std::array<int, 3>> sets;  // indices into universe, ascending

  static X3CInstance parse(std::string_view text);
};

// A generated hard instance together with the queries whose truth value the
// construction ties to the source problem.
struct ReductionOutput {
  std::string name;  // generator tag, e.g. "nirb"
  Instance instance;
  std::vector<Query> queries;
  // Per query: whether it answers the *negation* of the source problem
  // (necessary-style targets) or agrees with it.
  std::vector<char> negated;
  // Present for the picking-source generators; absent for the X3C one.
  std::optional<Query> source_query;
  std::map<std::string, std::vector<std::string>> gadget_map;
};

// Sources for the pi_* generators are one-item-per-agent instances (m = n)
// with the question "can `agent` get `item` under some balanced policy".

// Balanced NecessaryItem target with an extra agent chasing `item`.
ReductionOutput reduce_pi_to_necessaryitem_balanced(const Instance& src,
                                                    int agent, int item);
// Recursively balanced NecessaryItem and top-2 NecessarySet targets.
ReductionOutput reduce_pi_to_recbal_family(const Instance& src, int agent,
                                           int item);
// Top-3 PossibleSet target, recursively balanced or strict alternation.
ReductionOutput reduce_pi_to_top3_possibleset(const Instance& src, int agent,
                                              int item, PolicyClass cls);
// Strict-alternation NecessaryItem and top-2 NecessarySet targets.
ReductionOutput reduce_pi_to_strict_necessary(const Instance& src, int agent,
                                              int item);
// Balanced-alternation top-2 PossibleSet / NecessaryItem pair from X3C.
ReductionOutput reduce_x3c_to_balalt(const X3CInstance& src);
// Balanced-alternation top-2 NecessarySet target.
ReductionOutput reduce_pi_to_balalt_necessaryset(const Instance& src, int agent,
                                                 int item);

ReductionOutput reduce_by_name(const std::string& name, const Instance& src,
                               int agent, int item);

// Instance file with a `# reduction:` header and `# query:` comment lines.
std::string serialize_reduction(const ReductionOutput& out);

}  // namespace seqalloc
