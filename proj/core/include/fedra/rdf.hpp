#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fedra {

/// Namespace used for the paper-style compact notation: a bare token `s1`
/// stands for the IRI `urn:fedra:s1`.
inline constexpr const char* kBareIriPrefix = "urn:fedra:";

enum class TermKind { Iri, Literal, Variable };

/// An RDF term: IRI, literal, or variable. Literals keep their lexical form
/// opaque (no datatypes or language tags). Equality is (kind, lexical).
struct Term {
  TermKind kind = TermKind::Iri;
  std::string lexical;

  static Term iri(std::string s) { return {TermKind::Iri, std::move(s)}; }
  static Term literal(std::string s) { return {TermKind::Literal, std::move(s)}; }
  static Term variable(std::string s) { return {TermKind::Variable, std::move(s)}; }
  /// Bare tokens become IRIs in the reserved namespace.
  static Term bare(const std::string& s) { return iri(std::string(kBareIriPrefix) + s); }

  bool is_variable() const { return kind == TermKind::Variable; }

  auto operator<=>(const Term&) const = default;
};

/// Ground triple: no variables in any position.
struct Triple {
  Term subject, predicate, object;
  auto operator<=>(const Triple&) const = default;
};

/// Duplicate-free triple set. Replication duplicates are artifacts, not data.
using Graph = std::set<Triple>;

enum class OpKind { Insert, Delete };

struct UpdateOp {
  std::int64_t time = 0;  // non-negative integer epoch
  OpKind kind = OpKind::Insert;
  Triple triple;
};

/// Timestamped update log of one dataset; ops sorted by time, ties kept in
/// file order.
struct UpdateLog {
  std::string dataset_id;
  std::vector<UpdateOp> ops;
};

/// Map from variable name (without '?') to a non-variable Term.
using Binding = std::map<std::string, Term>;

/// Bag of solutions: explicit variable list plus a multiset of rows, each
/// binding exactly those variables.
struct SolutionBag {
  std::vector<std::string> variables;
  std::vector<Binding> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
};

struct TriplePattern;  // sparql.hpp

/// One Binding per triple of `graph` unifiable with `pattern`; repeated
/// variables in the pattern must take equal values.
SolutionBag match_pattern(const Graph& graph, const TriplePattern& pattern);

/// Dataset state at epoch `t`: fold of all ops with time <= t. Deleting an
/// absent triple is a no-op.
Graph graph_at_time(const UpdateLog& log, std::int64_t t);

/// Natural join on shared variables; multiplicities multiply.
SolutionBag join_solutions(const SolutionBag& left, const SolutionBag& right);

/// Evaluate a conjunction of patterns over one graph (joins in list order).
SolutionBag eval_bgp(const Graph& graph, const std::vector<TriplePattern>& patterns);

/// --- update-log file format -------------------------------------------
/// One op per line: `<time:int> <I|D> <subject> <predicate> <object> .`
/// Terms are `<iri>`, `"literal"` or bare tokens; blank lines and lines
/// starting with `#` are skipped.
UpdateLog parse_update_log(const std::string& text, const std::string& dataset_id);
UpdateLog load_update_log_file(const std::string& path);

/// Parse a single term token as it appears in logs (`<iri>`, quoted literal,
/// `?var` or bare token).
Term parse_term_token(const std::string& token);

/// Compact rendering: vars as `?x`, reserved-namespace IRIs as bare tokens,
/// other IRIs in angle brackets, literals quoted.
std::string term_to_string(const Term& t);
std::string triple_to_string(const Triple& t);

/// Canonical one-line form of a row, used for bag comparisons.
std::string binding_to_string(const Binding& b);

/// Bag (multiset) equality over rows, ignoring row order.
bool bag_equal(const SolutionBag& a, const SolutionBag& b);

/// Multiset row counts, keyed by canonical row text.
std::map<std::string, std::size_t> bag_counts(const SolutionBag& bag);

}  // namespace fedra
