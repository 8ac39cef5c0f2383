#include "fedra/catalog.hpp"

#include <algorithm>

#include "doctest.h"
#include "fedra/error.hpp"
#include "helpers.hpp"

using namespace fedra;
using testutil::pat;

namespace {

FederationCatalog fig2() {
  return load_catalog_file(testutil::fixture("fig2/federation.json"));
}

const ReplicaDescriptor& replica(const FederationCatalog& cat, const std::string& id) {
  for (const auto& r : cat.replicas)
    if (r.fragment_id == id) return r;
  throw Error("no replica " + id);
}

std::set<std::string> candidate_keys(const std::vector<Candidate>& cs) {
  std::set<std::string> keys;
  for (const auto& c : cs) keys.insert(c.endpoint + "[" + c.fragment_id + "]");
  return keys;
}

}  // namespace

TEST_CASE("Fig. 2 catalog loads with the paper's ages") {
  FederationCatalog cat = fig2();
  CHECK(cat.now == 2);
  CHECK(cat.endpoints.size() == 6);
  CHECK(cat.public_endpoints() == std::set<std::string>{"E1", "E2"});

  CHECK(age(replica(cat, "D1"), cat.now) == 1);
  CHECK(age(replica(cat, "D2"), cat.now) == 2);
  CHECK(age(replica(cat, "D3"), cat.now) == 0);
  CHECK(age(replica(cat, "F1"), cat.now) == 0);
  CHECK(age(replica(cat, "F2"), cat.now) == 1);
}

TEST_CASE("minimal catalog: one public origin, zero replicas") {
  FederationCatalog cat = load_catalog(R"({
    "now": 0,
    "endpoints": [{"id": "E1", "public": true}],
    "origins": [{"dataset": "D", "endpoint": "E1"}],
    "replicas": []
  })");
  CHECK(cat.replicas.empty());
  CHECK(cat.origins.size() == 1);
}

TEST_CASE("dangling references are rejected with all violations reported") {
  CatalogLoadResult r = try_load_catalog(R"({
    "now": 1,
    "endpoints": [{"id": "E1", "public": true}],
    "origins": [{"dataset": "D", "endpoint": "E1"}],
    "replicas": [
      {"fragment": "X", "dataset": "D", "source_endpoint": "E9", "host": "E8",
       "view": "CONSTRUCT WHERE { ?s p1 ?o }", "sync_time": 0}
    ]
  })");
  CHECK_FALSE(r.catalog.has_value());
  CHECK(r.issues.size() >= 2);  // unknown host and unknown source endpoint

  CHECK_THROWS_AS(load_catalog(R"({"now": 0, "endpoints": [], "origins": [], "replicas": [],
                                   "extra": 1})"),
                  ValidationError);
}

TEST_CASE("validation catches duplicates, bad views and future sync times") {
  CatalogLoadResult r = try_load_catalog(R"({
    "now": 1,
    "endpoints": [{"id": "E1", "public": true}, {"id": "E1", "public": false},
                  {"id": "E2", "public": false}],
    "origins": [{"dataset": "D", "endpoint": "E1"}],
    "replicas": [
      {"fragment": "X", "dataset": "D", "source_endpoint": "E1", "host": "E2",
       "view": "SELECT * WHERE { ?s p1 ?o }", "sync_time": 5}
    ]
  })");
  REQUIRE_FALSE(r.catalog.has_value());
  auto has_issue = [&](const std::string& needle) {
    return std::any_of(r.issues.begin(), r.issues.end(), [&](const std::string& s) {
      return s.find(needle) != std::string::npos;
    });
  };
  CHECK(has_issue("duplicate endpoint id"));
  CHECK(has_issue("view does not parse"));
  CHECK(has_issue("after catalog now"));
}

TEST_CASE("replica source must be the dataset's origin") {
  CatalogLoadResult r = try_load_catalog(R"({
    "now": 1,
    "endpoints": [{"id": "E1", "public": true}, {"id": "E2", "public": true},
                  {"id": "E3", "public": false}],
    "origins": [{"dataset": "D", "endpoint": "E1"}, {"dataset": "F", "endpoint": "E2"}],
    "replicas": [
      {"fragment": "X", "dataset": "D", "source_endpoint": "E2", "host": "E3",
       "view": "CONSTRUCT WHERE { ?s p1 ?o }", "sync_time": 0}
    ]
  })");
  CHECK_FALSE(r.catalog.has_value());
}

TEST_CASE("load -> serialize -> load is a fixpoint") {
  FederationCatalog cat = fig2();
  std::string once = serialize_catalog(cat);
  FederationCatalog again = load_catalog(once);
  CHECK(serialize_catalog(again) == once);
}

TEST_CASE("preselect for k2 at dt=1 keeps the paper's relevant fragments") {
  FederationCatalog cat = fig2();
  auto cs = preselect(cat, pat("?o", "p4", "?r"), 1);
  // E2 (universal F), E5 (F1) and E6 (F2) as in the paper, plus the D origin's
  // universal fragment, which the view-based relevance cannot rule out.
  CHECK(candidate_keys(cs) == std::set<std::string>{"E1[origin:D]", "E2[origin:F]",
                                                    "E5[F1]", "E6[F2]"});
  for (const auto& c : cs) {
    CHECK(c.age <= 1);
    CHECK_FALSE(c.contributions.empty());
  }
}

TEST_CASE("preselect for k1 at dt=1 age-excludes E4") {
  FederationCatalog cat = fig2();
  auto keys = candidate_keys(preselect(cat, pat("?s", "p1", "?o"), 1));
  CHECK(keys.count("E3[D1]") == 1);
  CHECK(keys.count("E5[D3]") == 1);
  CHECK(keys.count("E1[origin:D]") == 1);
  CHECK(keys.count("E4[D2]") == 0);  // age 2 > dt 1, strict line-4 filter

  auto keys2 = candidate_keys(preselect(cat, pat("?s", "p1", "?o"), 2));
  CHECK(keys2.count("E4[D2]") == 1);
}

TEST_CASE("dt=0 keeps only age-0 fragments, origins always qualify") {
  FederationCatalog cat = fig2();
  auto keys = candidate_keys(preselect(cat, pat("?s", "p1", "?o"), 0));
  CHECK(keys == std::set<std::string>{"E1[origin:D]", "E2[origin:F]", "E5[D3]"});
}

TEST_CASE("preselect is monotone in dt") {
  FederationCatalog cat = fig2();
  for (const TriplePattern& k : {pat("?s", "p1", "?o"), pat("?o", "p4", "?r"),
                                 pat("?a", "?b", "?c")}) {
    std::set<std::string> previous;
    for (std::int64_t dt = 0; dt <= 3; ++dt) {
      auto keys = candidate_keys(preselect(cat, k, dt));
      CHECK(std::includes(keys.begin(), keys.end(), previous.begin(), previous.end()));
      previous = keys;
    }
    auto unbounded = candidate_keys(preselect(cat, k, std::nullopt));
    CHECK(std::includes(unbounded.begin(), unbounded.end(), previous.begin(), previous.end()));
  }
}

TEST_CASE("origins appear in preselect for every pattern shape") {
  FederationCatalog cat = fig2();
  for (const TriplePattern& k :
       {pat("?s", "p1", "?o"), pat("?o", "p4", "?r"), pat("s1", "?p", "?o"),
        pat("?a", "p9", "\"lit\"")}) {
    auto keys = candidate_keys(preselect(cat, k, 0));
    CHECK(keys.count("E1[origin:D]") == 1);
    CHECK(keys.count("E2[origin:F]") == 1);
  }
}

TEST_CASE("with_now drops replicas synced later and recomputes ages") {
  FederationCatalog cat = fig2();
  FederationCatalog at1 = with_now(cat, 1);
  CHECK(at1.now == 1);
  CHECK(at1.replicas.size() == 3);  // D3 and F1 (sync 2) dropped
  CHECK(age(replica(at1, "D1"), at1.now) == 0);
}
