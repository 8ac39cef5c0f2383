#include "fedra/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "fedra/error.hpp"

namespace fedra {

namespace {

Term substitute(const Term& t, const Binding& b) {
  if (!t.is_variable()) return t;
  auto it = b.find(t.lexical);
  if (it == b.end()) throw Error("unbound variable ?" + t.lexical + " in view body");
  return it->second;
}

void require_bgp_only(const Query& q) {
  for (const PatternBlock& b : q.blocks)
    if (b.kind != BlockKind::Basic)
      throw UnsupportedError("simulation supports plain BGP queries only");
  if (!q.filters.empty())
    throw UnsupportedError("simulation does not evaluate FILTER expressions");
}

std::vector<std::string> all_pattern_vars(const std::vector<TriplePattern>& patterns) {
  std::vector<std::string> vars;
  for (const TriplePattern& p : patterns)
    for (int pos = 0; pos < 3; ++pos) {
      const Term& t = p.at(pos);
      if (t.is_variable() &&
          std::find(vars.begin(), vars.end(), t.lexical) == vars.end())
        vars.push_back(t.lexical);
    }
  return vars;
}

SolutionBag project_and_distinct(const Query& q, SolutionBag bag,
                                 const std::vector<TriplePattern>& patterns) {
  std::vector<std::string> out_vars =
      q.star || q.form == QueryForm::Construct ? all_pattern_vars(patterns) : q.projection;
  SolutionBag out;
  out.variables = out_vars;
  for (const Binding& row : bag.rows) {
    Binding projected;
    for (const std::string& v : out_vars) {
      auto it = row.find(v);
      if (it == row.end())
        throw UnsupportedError("projection variable ?" + v + " is not bound by the query");
      projected.emplace(v, it->second);
    }
    out.rows.push_back(std::move(projected));
  }
  if (q.distinct) {
    std::set<std::string> seen;
    std::vector<Binding> rows;
    for (Binding& row : out.rows)
      if (seen.insert(binding_to_string(row)).second) rows.push_back(std::move(row));
    out.rows = std::move(rows);
  }
  return out;
}

// Per-pattern matches as a triple-level set union over the given graphs.
SolutionBag union_matches(const TriplePattern& pattern, const std::vector<const Graph*>& graphs) {
  Graph merged_matches;
  for (const Graph* g : graphs) {
    SolutionBag bag = match_pattern(*g, pattern);
    // re-instantiate to triples so cross-graph duplicates collapse
    for (const Binding& row : bag.rows) {
      Triple t{substitute(pattern.subject, row), substitute(pattern.predicate, row),
               substitute(pattern.object, row)};
      merged_matches.insert(t);
    }
  }
  return match_pattern(merged_matches, pattern);
}

double ratio_round(double x) { return x; }

}  // namespace

Graph materialize_replica(const UpdateLog& log, const ViewDefinition& view,
                          std::int64_t sync_time) {
  Graph source = graph_at_time(log, sync_time);
  SolutionBag rows = eval_bgp(source, view.body);
  Graph out;
  for (const Binding& row : rows.rows) {
    for (const TriplePattern& tp : view.body) {
      out.insert(Triple{substitute(tp.subject, row), substitute(tp.predicate, row),
                        substitute(tp.object, row)});
    }
  }
  return out;
}

StoreMap build_stores(const FederationCatalog& catalog, const std::vector<UpdateLog>& logs) {
  std::map<std::string, const UpdateLog*> by_dataset;
  for (const UpdateLog& l : logs) by_dataset[l.dataset_id] = &l;
  auto log_of = [&](const std::string& dataset) -> const UpdateLog& {
    auto it = by_dataset.find(dataset);
    if (it == by_dataset.end()) throw Error("no update log for dataset '" + dataset + "'");
    return *it->second;
  };

  StoreMap stores;
  for (const Endpoint& e : catalog.endpoints) stores[e.id].endpoint = e.id;
  for (const OriginDeclaration& o : catalog.origins) {
    stores[o.endpoint].graphs[origin_fragment_id(o.dataset_id)] =
        graph_at_time(log_of(o.dataset_id), catalog.now);
  }
  for (const ReplicaDescriptor& r : catalog.replicas) {
    stores[r.host].graphs[r.fragment_id] =
        materialize_replica(log_of(r.source_dataset), r.view, r.sync_time);
  }
  return stores;
}

SolutionBag execute_plan(const Query& q, const SelectionPlan& plan, const StoreMap& stores) {
  require_bgp_only(q);
  std::vector<TriplePattern> patterns = triple_patterns(q);
  if (plan.assignments.size() != patterns.size())
    throw Error("plan does not cover the query's triple patterns");

  SolutionBag acc;
  acc.rows.push_back({});
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const Assignment& a = plan.assignments[i];
    std::vector<const Graph*> graphs;
    for (const std::string& ep : a.endpoints) {
      auto it = stores.find(ep);
      if (it == stores.end()) throw Error("plan references unknown endpoint '" + ep + "'");
      for (const auto& [fragment, graph] : it->second.graphs) graphs.push_back(&graph);
    }
    acc = join_solutions(acc, union_matches(patterns[i], graphs));
  }
  return project_and_distinct(q, std::move(acc), patterns);
}

SolutionBag oracle_answer(const Query& q, const FederationCatalog& catalog,
                          const std::vector<UpdateLog>& logs) {
  require_bgp_only(q);
  std::map<std::string, const UpdateLog*> by_dataset;
  for (const UpdateLog& l : logs) by_dataset[l.dataset_id] = &l;
  Graph all;
  for (const OriginDeclaration& o : catalog.origins) {
    auto it = by_dataset.find(o.dataset_id);
    if (it == by_dataset.end()) throw Error("no update log for dataset '" + o.dataset_id + "'");
    Graph g = graph_at_time(*it->second, catalog.now);
    all.insert(g.begin(), g.end());
  }
  std::vector<TriplePattern> patterns = triple_patterns(q);
  return project_and_distinct(q, eval_bgp(all, patterns), patterns);
}

SolutionBag endpoint_oracle_answer(const Query& q, const StoreMap& stores) {
  require_bgp_only(q);
  std::vector<TriplePattern> patterns = triple_patterns(q);
  SelectionPlan all;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    Assignment a;
    a.index = i;
    a.pattern = patterns[i];
    for (const auto& [ep, store] : stores) a.endpoints.push_back(ep);
    all.assignments.push_back(std::move(a));
  }
  return execute_plan(q, all, stores);
}

double completeness(const SolutionBag& obtained, const SolutionBag& expected) {
  if (expected.rows.empty()) return 1.0;
  auto oc = bag_counts(obtained);
  auto ec = bag_counts(expected);
  std::size_t hit = 0;
  for (const auto& [row, n] : ec) {
    auto it = oc.find(row);
    if (it != oc.end()) hit += std::min(n, it->second);
  }
  return ratio_round(static_cast<double>(hit) / static_cast<double>(expected.rows.size()));
}

double staleness(const SolutionBag& obtained, const SolutionBag& expected) {
  if (obtained.rows.empty()) return 0.0;
  auto oc = bag_counts(obtained);
  auto ec = bag_counts(expected);
  std::size_t stale = 0;
  for (const auto& [row, n] : oc) {
    auto it = ec.find(row);
    std::size_t have = it == ec.end() ? 0 : it->second;
    stale += n > have ? n - have : 0;
  }
  return ratio_round(static_cast<double>(stale) / static_cast<double>(obtained.rows.size()));
}

std::vector<MetricsRow> run_experiment(const FederationCatalog& catalog,
                                       const std::vector<UpdateLog>& logs,
                                       const std::vector<NamedQuery>& queries,
                                       std::optional<std::int64_t> dt) {
  StoreMap stores = build_stores(catalog, logs);
  std::set<std::string> public_ids = catalog.public_endpoints();

  std::vector<MetricsRow> rows;
  for (const NamedQuery& nq : queries) {
    MetricsRow row;
    row.query_id = nq.id;
    row.dt = dt;
    try {
      Query q = parse_query(nq.text);
      SelectionResult sel = select_sources(q, catalog, dt);
      row.nss = nss(sel.plan);
      row.nsps = nsps(sel.plan, public_ids);
      row.sst_seconds = sel.plan.sst_seconds;
      row.warnings = sel.plan.warnings;

      auto t0 = std::chrono::steady_clock::now();
      SolutionBag obtained = execute_plan(q, sel.plan, stores);
      row.etue_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      SolutionBag expected = oracle_answer(q, catalog, logs);
      row.answers = obtained.rows.size();
      row.completeness = completeness(obtained, expected);
      row.staleness = staleness(obtained, expected);
    } catch (const std::exception& e) {
      row.warnings.push_back(std::string("error: ") + e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  out << "query,dt,nss,nsps,sst_seconds,etue_seconds,answers,completeness,staleness,warnings\n";
  auto fmt4 = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", x);
    return std::string(buf);
  };
  for (const MetricsRow& r : rows) {
    std::string warn;
    for (const auto& w : r.warnings) warn += (warn.empty() ? "" : "; ") + w;
    bool quote = warn.find(',') != std::string::npos || warn.find('"') != std::string::npos;
    if (quote) {
      std::string escaped = "\"";
      for (char c : warn) {
        if (c == '"') escaped += '"';
        escaped += c;
      }
      warn = escaped + "\"";
    }
    out << r.query_id << ',' << (r.dt ? std::to_string(*r.dt) : std::string("inf")) << ','
        << r.nss << ',' << r.nsps << ',' << fmt4(r.sst_seconds) << ','
        << fmt4(r.etue_seconds) << ',' << r.answers << ',' << fmt4(r.completeness) << ','
        << fmt4(r.staleness) << ',' << warn << '\n';
  }
  return out.str();
}

}  // namespace fedra
