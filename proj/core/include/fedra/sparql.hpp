#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fedra/rdf.hpp"

namespace fedra {

/// Triple pattern: any position may be a variable, including the predicate.
struct TriplePattern {
  Term subject, predicate, object;
  auto operator<=>(const TriplePattern&) const = default;

  const Term& at(int pos) const { return pos == 0 ? subject : pos == 1 ? predicate : object; }
  Term& at(int pos) { return pos == 0 ? subject : pos == 1 ? predicate : object; }
};

std::string pattern_to_string(const TriplePattern& p);

enum class BlockKind { Basic, Optional, UnionBranch };

struct PatternBlock {
  BlockKind kind = BlockKind::Basic;
  std::vector<TriplePattern> patterns;
  bool operator==(const PatternBlock&) const = default;
};

enum class QueryForm { Select, Construct };

/// SERVICE annotation recovered when reparsing rendered queries.
struct ServiceBlock {
  std::string endpoint_url;
  std::vector<TriplePattern> patterns;
  bool operator==(const ServiceBlock&) const = default;
};

struct Query {
  QueryForm form = QueryForm::Select;
  bool distinct = false;
  bool star = false;                     // SELECT *
  std::vector<std::string> projection;   // variable names, empty when star
  std::vector<PatternBlock> blocks;
  std::vector<std::string> filters;      // opaque, never interpreted
  std::vector<ServiceBlock> services;    // only from SERVICE-extended parses

  bool operator==(const Query&) const = default;
};

/// CONSTRUCT-WHERE view: the template head equals the body.
struct ViewDefinition {
  std::vector<TriplePattern> body;
  bool operator==(const ViewDefinition&) const = default;
};

struct ParseOptions {
  /// Accept `SERVICE <iri> { ... }` groups (used to reparse rendered plans).
  bool allow_service = false;
};

/// Parse the query subset: SELECT/CONSTRUCT-WHERE, DISTINCT, BGPs, OPTIONAL,
/// UNION, FILTER-as-opaque-text, PREFIX declarations, bare-token IRIs.
Query parse_query(const std::string& text, const ParseOptions& opts = {});

/// Parse `CONSTRUCT WHERE { TriplesBlock }`. Rejects SELECT and any
/// non-basic construct: views are plain BGPs.
ViewDefinition parse_view(const std::string& text);

/// All patterns from all blocks in source order, duplicates preserved.
std::vector<TriplePattern> triple_patterns(const Query& q);

/// Pretty-printer; parse_query(print_query(q)) == q on the supported subset.
std::string print_query(const Query& q);
std::string print_view(const ViewDefinition& v);

struct SelectionPlan;  // selection.hpp

/// Rewrite each triple pattern of `q` into SERVICE clauses per the plan.
/// Several endpoints for one pattern become a UNION of SERVICE blocks; an
/// empty endpoint set leaves the pattern unwrapped behind a warning comment.
/// `endpoint_urls` maps endpoint ids to URLs; a plan endpoint without a URL
/// is an error. The output reparses under ParseOptions{.allow_service=true}.
std::string render_service_query(const Query& q, const SelectionPlan& plan,
                                 const std::map<std::string, std::string>& endpoint_urls);

}  // namespace fedra
