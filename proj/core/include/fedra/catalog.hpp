#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedra/containment.hpp"
#include "fedra/sparql.hpp"

namespace fedra {

struct Endpoint {
  std::string id;
  std::optional<std::string> url;
  bool is_public = false;
};

/// Replica description: fragment id, source dataset and endpoint, defining
/// view, sync time and hosting endpoint.
struct ReplicaDescriptor {
  std::string fragment_id;
  std::string source_dataset;
  std::string source_endpoint;
  ViewDefinition view;
  std::int64_t sync_time = 0;
  std::string host;
};

struct OriginDeclaration {
  std::string dataset_id;
  std::string endpoint;
};

struct FederationCatalog {
  std::vector<Endpoint> endpoints;
  std::vector<OriginDeclaration> origins;
  std::vector<ReplicaDescriptor> replicas;
  std::int64_t now = 0;

  const Endpoint* find_endpoint(const std::string& id) const;
  bool is_public(const std::string& endpoint_id) const;
  std::set<std::string> public_endpoints() const;
  /// id -> url for endpoints that declare one.
  std::map<std::string, std::string> endpoint_urls() const;
};

/// The view implicitly hosted by origin endpoints: CONSTRUCT WHERE { ?s ?p ?o }.
ViewDefinition universal_view();

/// Synthetic fragment id for an origin's universal fragment.
std::string origin_fragment_id(const std::string& dataset_id);

/// A pre-selected (endpoint, fragment) pair for one query triple pattern.
struct Candidate {
  std::string endpoint;
  std::string fragment_id;
  std::string source_dataset;
  ViewDefinition view;
  std::vector<ContributionPattern> contributions;  // non-empty
  std::int64_t age = 0;
  bool origin_universal = false;
};

struct CatalogLoadResult {
  std::optional<FederationCatalog> catalog;
  std::vector<std::string> issues;  // every violation found
};

/// Parse and validate; reports all violations instead of stopping at the first.
CatalogLoadResult try_load_catalog(const std::string& text);

/// Like try_load_catalog but throws ValidationError on any issue.
FederationCatalog load_catalog(const std::string& text);
FederationCatalog load_catalog_file(const std::string& path);

/// Canonical JSON form; load -> serialize -> load is a fixpoint.
std::string serialize_catalog(const FederationCatalog& catalog);

/// Replica age in integer epochs: now - sync_time.
std::int64_t age(const ReplicaDescriptor& replica, std::int64_t now);

/// Replay the catalog at an earlier epoch: replicas synced after `now` are
/// dropped, the rest keep their sync times.
FederationCatalog with_now(const FederationCatalog& catalog, std::int64_t now);

/// All (endpoint, fragment) pairs — including origins' universal fragments —
/// relevant to k (non-empty contribution) and fresh enough (age <= dt;
/// nullopt dt means unbounded). Sorted by (endpoint, fragment).
std::vector<Candidate> preselect(const FederationCatalog& catalog, const TriplePattern& k,
                                 std::optional<std::int64_t> dt);

}  // namespace fedra
