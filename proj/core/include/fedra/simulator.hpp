#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fedra/rdf.hpp"
#include "fedra/selection.hpp"

namespace fedra {

/// Materialized contents of one endpoint: fragment id -> graph.
struct EndpointStore {
  std::string endpoint;
  std::map<std::string, Graph> graphs;
};

using StoreMap = std::map<std::string, EndpointStore>;

/// One report row; mirrors the CSV columns.
struct MetricsRow {
  std::string query_id;
  std::optional<std::int64_t> dt;
  int nss = 0;
  int nsps = 0;
  double sst_seconds = 0.0;
  double etue_seconds = 0.0;
  std::size_t answers = 0;
  double completeness = 0.0;
  double staleness = 0.0;
  std::vector<std::string> warnings;
};

/// Evaluate the view body over the source state at sync_time and instantiate
/// it per match (set semantics).
Graph materialize_replica(const UpdateLog& log, const ViewDefinition& view,
                          std::int64_t sync_time);

/// Materialize every endpoint's fragments (origins hold their dataset at
/// catalog.now). Logs are keyed by dataset id; a replica whose source log is
/// missing is an error.
StoreMap build_stores(const FederationCatalog& catalog, const std::vector<UpdateLog>& logs);

/// Execute a plan: per pattern, set-union of matches over every graph hosted
/// by the pattern's endpoints, then bag-join across patterns in query order,
/// projection, and DISTINCT. BGP-only queries.
SolutionBag execute_plan(const Query& q, const SelectionPlan& plan, const StoreMap& stores);

/// Expected answers: the query over the union of all origin datasets at now.
SolutionBag oracle_answer(const Query& q, const FederationCatalog& catalog,
                          const std::vector<UpdateLog>& logs);

/// Execution with the all-endpoints plan F (every pattern at every endpoint).
SolutionBag endpoint_oracle_answer(const Query& q, const StoreMap& stores);

/// |obtained ⊓ expected| / |expected| with bag intersection; 1.0 when
/// expected is empty.
double completeness(const SolutionBag& obtained, const SolutionBag& expected);

/// |obtained ∖ expected| / |obtained| with bag difference; 0.0 when obtained
/// is empty.
double staleness(const SolutionBag& obtained, const SolutionBag& expected);

struct NamedQuery {
  std::string id;
  std::string text;
};

/// Select + execute every query, computing the metric columns against the
/// oracle. Per-query failures are recorded in the row; the run continues.
std::vector<MetricsRow> run_experiment(const FederationCatalog& catalog,
                                       const std::vector<UpdateLog>& logs,
                                       const std::vector<NamedQuery>& queries,
                                       std::optional<std::int64_t> dt);

/// CSV report: header
/// `query,dt,nss,nsps,sst_seconds,etue_seconds,answers,completeness,staleness,warnings`
/// with ratios at 4 fractional digits.
std::string metrics_to_csv(const std::vector<MetricsRow>& rows);

}  // namespace fedra
