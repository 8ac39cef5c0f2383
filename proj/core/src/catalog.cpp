#include "fedra/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fedra/error.hpp"
#include "json.hpp"

namespace fedra {

using nlohmann::json;

const Endpoint* FederationCatalog::find_endpoint(const std::string& id) const {
  for (const Endpoint& e : endpoints)
    if (e.id == id) return &e;
  return nullptr;
}

bool FederationCatalog::is_public(const std::string& endpoint_id) const {
  const Endpoint* e = find_endpoint(endpoint_id);
  return e != nullptr && e->is_public;
}

std::set<std::string> FederationCatalog::public_endpoints() const {
  std::set<std::string> out;
  for (const Endpoint& e : endpoints)
    if (e.is_public) out.insert(e.id);
  return out;
}

std::map<std::string, std::string> FederationCatalog::endpoint_urls() const {
  std::map<std::string, std::string> out;
  for (const Endpoint& e : endpoints)
    if (e.url) out[e.id] = *e.url;
  return out;
}

ViewDefinition universal_view() {
  return ViewDefinition{{TriplePattern{Term::variable("s"), Term::variable("p"),
                                       Term::variable("o")}}};
}

std::string origin_fragment_id(const std::string& dataset_id) {
  return "origin:" + dataset_id;
}

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where, std::vector<std::string>& issues) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      issues.push_back(where + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
std::optional<T> get_field(const json& obj, const std::string& key, const std::string& where,
                           std::vector<std::string>& issues, bool required = true) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) issues.push_back(where + ": missing field '" + key + "'");
    return std::nullopt;
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    issues.push_back(where + ": field '" + key + "' has the wrong type");
    return std::nullopt;
  }
}

}  // namespace

CatalogLoadResult try_load_catalog(const std::string& text) {
  CatalogLoadResult result;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    result.issues.push_back(std::string("catalog is not valid JSON: ") + e.what());
    return result;
  }
  if (!doc.is_object()) {
    result.issues.push_back("catalog root must be a JSON object");
    return result;
  }

  std::vector<std::string>& issues = result.issues;
  check_keys(doc, {"now", "endpoints", "origins", "replicas"}, "catalog", issues);

  FederationCatalog cat;
  if (auto now = get_field<std::int64_t>(doc, "now", "catalog", issues)) cat.now = *now;
  if (cat.now < 0) issues.push_back("catalog: now must be >= 0");

  std::set<std::string> endpoint_ids;
  if (doc.contains("endpoints") && doc["endpoints"].is_array()) {
    int i = 0;
    for (const json& e : doc["endpoints"]) {
      std::string where = "endpoints[" + std::to_string(i++) + "]";
      if (!e.is_object()) {
        issues.push_back(where + ": must be an object");
        continue;
      }
      check_keys(e, {"id", "url", "public"}, where, issues);
      Endpoint ep;
      if (auto id = get_field<std::string>(e, "id", where, issues)) ep.id = *id;
      if (e.contains("url")) {
        if (auto url = get_field<std::string>(e, "url", where, issues, false)) ep.url = *url;
      }
      if (auto pub = get_field<bool>(e, "public", where, issues)) ep.is_public = *pub;
      if (!ep.id.empty() && !endpoint_ids.insert(ep.id).second)
        issues.push_back(where + ": duplicate endpoint id '" + ep.id + "'");
      cat.endpoints.push_back(std::move(ep));
    }
  } else if (doc.contains("endpoints")) {
    issues.push_back("catalog: 'endpoints' must be an array");
  } else {
    issues.push_back("catalog: missing field 'endpoints'");
  }

  std::map<std::string, std::string> origin_of;  // dataset -> endpoint
  if (doc.contains("origins") && doc["origins"].is_array()) {
    int i = 0;
    for (const json& o : doc["origins"]) {
      std::string where = "origins[" + std::to_string(i++) + "]";
      if (!o.is_object()) {
        issues.push_back(where + ": must be an object");
        continue;
      }
      check_keys(o, {"dataset", "endpoint"}, where, issues);
      OriginDeclaration decl;
      if (auto d = get_field<std::string>(o, "dataset", where, issues)) decl.dataset_id = *d;
      if (auto e = get_field<std::string>(o, "endpoint", where, issues)) decl.endpoint = *e;
      if (!decl.dataset_id.empty()) {
        if (origin_of.count(decl.dataset_id))
          issues.push_back(where + ": dataset '" + decl.dataset_id +
                           "' already has an origin");
        else
          origin_of[decl.dataset_id] = decl.endpoint;
      }
      if (!decl.endpoint.empty() && !endpoint_ids.count(decl.endpoint))
        issues.push_back(where + ": unknown endpoint '" + decl.endpoint + "'");
      cat.origins.push_back(std::move(decl));
    }
  } else if (doc.contains("origins")) {
    issues.push_back("catalog: 'origins' must be an array");
  } else {
    issues.push_back("catalog: missing field 'origins'");
  }

  std::set<std::string> fragment_ids;
  if (doc.contains("replicas") && doc["replicas"].is_array()) {
    int i = 0;
    for (const json& r : doc["replicas"]) {
      std::string where = "replicas[" + std::to_string(i++) + "]";
      if (!r.is_object()) {
        issues.push_back(where + ": must be an object");
        continue;
      }
      check_keys(r, {"fragment", "dataset", "source_endpoint", "host", "view", "sync_time"},
                 where, issues);
      ReplicaDescriptor rep;
      if (auto f = get_field<std::string>(r, "fragment", where, issues)) rep.fragment_id = *f;
      if (auto d = get_field<std::string>(r, "dataset", where, issues))
        rep.source_dataset = *d;
      if (auto s = get_field<std::string>(r, "source_endpoint", where, issues))
        rep.source_endpoint = *s;
      if (auto h = get_field<std::string>(r, "host", where, issues)) rep.host = *h;
      if (auto t = get_field<std::int64_t>(r, "sync_time", where, issues)) rep.sync_time = *t;
      if (auto v = get_field<std::string>(r, "view", where, issues)) {
        try {
          rep.view = parse_view(*v);
        } catch (const Error& e) {
          issues.push_back(where + ": view does not parse: " + e.what());
        }
      }
      if (!rep.fragment_id.empty() && !fragment_ids.insert(rep.fragment_id).second)
        issues.push_back(where + ": duplicate fragment id '" + rep.fragment_id + "'");
      if (!rep.host.empty() && !endpoint_ids.count(rep.host))
        issues.push_back(where + ": unknown host endpoint '" + rep.host + "'");
      if (!rep.source_endpoint.empty() && !endpoint_ids.count(rep.source_endpoint))
        issues.push_back(where + ": unknown source endpoint '" + rep.source_endpoint + "'");
      if (!rep.source_dataset.empty()) {
        auto it = origin_of.find(rep.source_dataset);
        if (it == origin_of.end())
          issues.push_back(where + ": dataset '" + rep.source_dataset +
                           "' has no declared origin");
        else if (!rep.source_endpoint.empty() && it->second != rep.source_endpoint)
          issues.push_back(where + ": source endpoint '" + rep.source_endpoint +
                           "' is not the origin of dataset '" + rep.source_dataset + "'");
      }
      if (rep.sync_time < 0) issues.push_back(where + ": sync_time must be >= 0");
      if (rep.sync_time > cat.now)
        issues.push_back(where + ": sync_time " + std::to_string(rep.sync_time) +
                         " is after catalog now " + std::to_string(cat.now));
      cat.replicas.push_back(std::move(rep));
    }
  } else if (doc.contains("replicas")) {
    issues.push_back("catalog: 'replicas' must be an array");
  } else {
    issues.push_back("catalog: missing field 'replicas'");
  }

  if (issues.empty()) result.catalog = std::move(cat);
  return result;
}

FederationCatalog load_catalog(const std::string& text) {
  CatalogLoadResult r = try_load_catalog(text);
  if (!r.catalog) throw ValidationError(r.issues);
  return std::move(*r.catalog);
}

FederationCatalog load_catalog_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open catalog file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_catalog(buf.str());
}

std::string serialize_catalog(const FederationCatalog& catalog) {
  json doc;
  doc["now"] = catalog.now;
  doc["endpoints"] = json::array();
  for (const Endpoint& e : catalog.endpoints) {
    json j;
    j["id"] = e.id;
    if (e.url) j["url"] = *e.url;
    j["public"] = e.is_public;
    doc["endpoints"].push_back(std::move(j));
  }
  doc["origins"] = json::array();
  for (const OriginDeclaration& o : catalog.origins)
    doc["origins"].push_back({{"dataset", o.dataset_id}, {"endpoint", o.endpoint}});
  doc["replicas"] = json::array();
  for (const ReplicaDescriptor& r : catalog.replicas) {
    json j;
    j["fragment"] = r.fragment_id;
    j["dataset"] = r.source_dataset;
    j["source_endpoint"] = r.source_endpoint;
    j["host"] = r.host;
    j["view"] = print_view(r.view);
    j["sync_time"] = r.sync_time;
    doc["replicas"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::int64_t age(const ReplicaDescriptor& replica, std::int64_t now) {
  return now - replica.sync_time;
}

FederationCatalog with_now(const FederationCatalog& catalog, std::int64_t now) {
  FederationCatalog out = catalog;
  out.now = now;
  // A replica synced later did not exist at this epoch.
  std::erase_if(out.replicas,
                [now](const ReplicaDescriptor& r) { return r.sync_time > now; });
  return out;
}

std::vector<Candidate> preselect(const FederationCatalog& catalog, const TriplePattern& k,
                                 std::optional<std::int64_t> dt) {
  std::vector<Candidate> out;
  auto admit = [&](Candidate c) {
    if (c.contributions.empty()) return;
    if (dt && c.age > *dt) return;
    out.push_back(std::move(c));
  };

  for (const OriginDeclaration& o : catalog.origins) {
    Candidate c;
    c.endpoint = o.endpoint;
    c.fragment_id = origin_fragment_id(o.dataset_id);
    c.source_dataset = o.dataset_id;
    c.view = universal_view();
    c.contributions = contribution(c.view, k);
    c.age = 0;
    c.origin_universal = true;
    admit(std::move(c));
  }
  for (const ReplicaDescriptor& r : catalog.replicas) {
    Candidate c;
    c.endpoint = r.host;
    c.fragment_id = r.fragment_id;
    c.source_dataset = r.source_dataset;
    c.view = r.view;
    c.contributions = contribution(r.view, k);
    c.age = age(r, catalog.now);
    admit(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.endpoint, a.fragment_id) < std::tie(b.endpoint, b.fragment_id);
  });
  return out;
}

}  // namespace fedra
