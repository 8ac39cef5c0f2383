#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fedra/catalog.hpp"
#include "fedra/rdf.hpp"

namespace fedra {

/// Synthetic federation generator: random BGP views of size 1..6 over the
/// logs' vocabulary, each placed on a bounded number of consumer endpoints.
struct GeneratorOptions {
  int consumer_endpoints = 10;
  int fragments = 30;
  std::uint64_t seed = 0;
  int min_hosts = 0;  // per fragment
  int max_hosts = 3;
  int min_view_size = 1;
  int max_view_size = 6;
  bool public_origins = true;
  /// Add a fresh full mirror ({?s ?p ?o}) of every dataset on a consumer.
  bool mirror_every_dataset = false;
  /// Force every replica's sync_time to the latest epoch (age 0).
  bool all_fresh = false;
};

/// One public origin per log; consumer endpoints named C1..Cn. Deterministic
/// for a given seed.
FederationCatalog generate_federation(const std::vector<UpdateLog>& logs,
                                      const GeneratorOptions& options);

/// Random BGP query over the logs' vocabulary (1..max_patterns patterns,
/// chained variables so joins actually happen).
std::string generate_query(const std::vector<UpdateLog>& logs, int max_patterns,
                           std::mt19937_64& rng);

/// Seeded random insert/delete log for tests and benchmarks.
UpdateLog generate_log(const std::string& dataset_id, int n_ops, int n_predicates,
                       int n_constants, std::uint64_t seed, bool with_deletes = false);

}  // namespace fedra
