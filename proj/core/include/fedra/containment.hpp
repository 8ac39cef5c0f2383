#pragma once

#include <optional>
#include <vector>

#include "fedra/sparql.hpp"

namespace fedra {

/// Variable-to-term mapping used by unification and subsumption checks.
using Substitution = std::map<std::string, Term>;

/// An instance of a query triple pattern specialized by a fragment's view:
/// the unit of coverage comparison.
struct ContributionPattern {
  TriplePattern pattern;
  auto operator<=>(const ContributionPattern&) const = default;
};

/// Rename variables to v0, v1, ... in first-occurrence order. Makes pattern
/// and pattern-set comparison deterministic.
TriplePattern canonicalize_pattern(const TriplePattern& p);
std::vector<TriplePattern> canonicalize_body(const std::vector<TriplePattern>& body);

/// True iff the two patterns unify, treating each side's variables
/// independently; repeated variables within one pattern must take equal
/// values. Literals behave as constants.
bool compatible(const TriplePattern& t1, const TriplePattern& t2);

/// Most general common instance of the two patterns (canonicalized), or
/// absent when they do not unify.
std::optional<ContributionPattern> unify(const TriplePattern& query_pattern,
                                         const TriplePattern& view_pattern);

/// True iff some substitution over general's variables maps it exactly onto
/// specific (position-wise, repeated variables consistent).
bool subsumes(const TriplePattern& general, const TriplePattern& specific);

/// BGP containment: inner ⊆ outer, decided by a homomorphism from
/// outer.body into inner.body (outer's variables map to inner terms,
/// constants are fixed). Bodies over 16 patterns are rejected.
bool bgp_contains(const ViewDefinition& outer, const ViewDefinition& inner);

/// Containment both ways.
bool view_equivalent(const ViewDefinition& a, const ViewDefinition& b);

/// Contribution patterns of a view for query pattern k: unify(k, tp) over
/// the view's compatible body patterns, deduplicated up to renaming and
/// keeping only the most general ones. Join constraints inside the view are
/// ignored, with one exception: a fully-variable pattern inside a
/// multi-pattern body is a join catch-all and contributes nothing (a
/// single-pattern fully-variable view is a mirror and contributes to every
/// pattern).
std::vector<ContributionPattern> contribution(const ViewDefinition& view,
                                              const TriplePattern& k);

}  // namespace fedra
