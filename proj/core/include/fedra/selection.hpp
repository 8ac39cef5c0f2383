#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedra/catalog.hpp"

namespace fedra {

/// Endpoints that can serve the same data fragment for one query pattern:
/// a per-dataset view-equivalence class of relevant fragments, whose member
/// set also includes every same-dataset endpoint hosting a fragment that
/// contains the class view. Only one member ever needs contacting.
struct CandidateGroup {
  std::string dataset;
  ViewDefinition view;                        // class representative, canonical
  std::vector<TriplePattern> contributions;   // class view's patterns for k
  std::set<std::string> members;              // endpoint ids
  std::map<std::string, std::vector<std::string>> member_fragments;  // diagnostics
  bool origin_universal = false;  // class contains an origin's universal fragment

  bool has_member_outside(const std::set<std::string>& ids) const;
};

/// Set-cover reduction: one universe element per surviving (pattern, group)
/// pair; an endpoint's subset is the set of elements whose group it belongs to.
struct CoverInstance {
  std::vector<std::string> universe;                       // element ids, k{i}_{j}
  std::map<std::string, std::set<std::string>> subsets;    // endpoint -> elements
  std::set<std::string> public_endpoints;                  // for tie-breaking
  std::map<std::string, std::pair<std::size_t, std::size_t>> element_origin;
  // element id -> (pattern index, group index)
};

struct Assignment {
  std::size_t index = 0;  // pattern position in the query
  TriplePattern pattern;
  std::vector<std::string> endpoints;  // sorted
};

/// The map D of the source selection problem, plus diagnostics.
struct SelectionPlan {
  std::vector<Assignment> assignments;
  std::vector<std::string> warnings;
  double sst_seconds = 0.0;
};

/// Full intermediate state, for tests and trace output.
struct SelectionTrace {
  struct PatternStage {
    std::size_t index = 0;
    TriplePattern pattern;
    std::vector<Candidate> candidates;
    std::vector<CandidateGroup> grouped;
    std::vector<CandidateGroup> pruned;
    std::vector<CandidateGroup> final_groups;
  };
  std::vector<PatternStage> patterns;
  CoverInstance instance;
  std::vector<std::string> cover;
};

struct SelectOptions {
  /// Keep public members inside mixed groups (reproduces the paper's
  /// illustration where E1 stays next to E3/E5).
  bool illustration = false;
};

/// Patterns a dataset's replicas could contribute for k, regardless of age.
/// drop_public uses this to decide whether an origin may be dropped.
using DatasetNeeds = std::map<std::string, std::vector<TriplePattern>>;
DatasetNeeds dataset_needs(const FederationCatalog& catalog, const TriplePattern& k);

/// Group candidates into per-dataset view-equivalence classes, then add every
/// same-dataset candidate whose fragment view contains the class view.
std::vector<CandidateGroup> group_equivalent(const std::vector<Candidate>& candidates,
                                             const TriplePattern& k);

/// Containment simplification: a replica class strictly contained in another
/// surviving same-dataset replica class is deleted (not merged). Classes
/// holding an origin's universal fragment are left to drop_public.
std::vector<CandidateGroup> prune_contained(std::vector<CandidateGroup> groups,
                                            const TriplePattern& k);

/// Public-endpoint removal: strip public members from groups that also have
/// non-public ones (skipped in illustration mode); then drop an all-public
/// group entirely when some non-public group survives for this pattern and
/// every contribution its dataset's replicas could make (any age) is covered
/// by surviving same-dataset non-public groups. Coverage the removal gives up
/// is reported through `warnings`.
std::vector<CandidateGroup> drop_public(std::vector<CandidateGroup> groups,
                                        const std::set<std::string>& public_ids,
                                        const DatasetNeeds& needs,
                                        const TriplePattern& k,
                                        bool illustration = false,
                                        std::vector<std::string>* warnings = nullptr);

/// Build the set-cover instance from the finalized per-pattern groups.
CoverInstance build_cover_instance(
    const std::vector<std::vector<CandidateGroup>>& per_pattern_groups,
    const std::set<std::string>& public_ids);

/// Standard greedy cover; ties broken non-public first, then smallest id.
std::vector<std::string> greedy_set_cover(const CoverInstance& instance);

/// One endpoint per (pattern, group) from the cover, chosen by the greedy
/// tie-break order; D(k) is the union over the pattern's groups.
SelectionPlan finalize(const std::vector<std::vector<CandidateGroup>>& per_pattern_groups,
                       const std::vector<TriplePattern>& patterns,
                       const std::vector<std::string>& cover,
                       const std::set<std::string>& public_ids);

struct SelectionResult {
  SelectionPlan plan;
  SelectionTrace trace;
};

/// The whole pipeline: preselect, group, prune, drop public, reduce to set
/// cover, solve greedily, finalize. Patterns with no candidates get an empty
/// assignment and a warning.
SelectionResult select_sources(const Query& q, const FederationCatalog& catalog,
                               std::optional<std::int64_t> dt,
                               const SelectOptions& options = {});

int nss(const SelectionPlan& plan);
int nsps(const SelectionPlan& plan, const std::set<std::string>& public_ids);

/// Plan serialization used by the CLI: {query, dt, now, assignments, nss,
/// nsps, sst_seconds, warnings}.
std::string serialize_plan(const SelectionPlan& plan, const Query& q,
                           std::optional<std::int64_t> dt, std::int64_t now,
                           const std::set<std::string>& public_ids);

}  // namespace fedra
