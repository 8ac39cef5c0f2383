#include "fedra/selection.hpp"

#include <algorithm>
#include <chrono>

#include "fedra/error.hpp"
#include "json.hpp"

namespace fedra {

bool CandidateGroup::has_member_outside(const std::set<std::string>& ids) const {
  return std::any_of(members.begin(), members.end(),
                     [&ids](const std::string& m) { return !ids.count(m); });
}

DatasetNeeds dataset_needs(const FederationCatalog& catalog, const TriplePattern& k) {
  DatasetNeeds needs;
  for (const ReplicaDescriptor& r : catalog.replicas) {
    for (const ContributionPattern& cp : contribution(r.view, k)) {
      auto& list = needs[r.source_dataset];
      if (std::find(list.begin(), list.end(), cp.pattern) == list.end())
        list.push_back(cp.pattern);
    }
  }
  return needs;
}

std::vector<CandidateGroup> group_equivalent(const std::vector<Candidate>& candidates,
                                             const TriplePattern& k) {
  std::vector<CandidateGroup> groups;
  // One class per (dataset, view-equivalence class), in candidate order.
  for (const Candidate& c : candidates) {
    CandidateGroup* home = nullptr;
    for (CandidateGroup& g : groups) {
      if (g.dataset != c.source_dataset) continue;
      if (view_equivalent(g.view, c.view)) {
        home = &g;
        break;
      }
    }
    if (!home) {
      CandidateGroup g;
      g.dataset = c.source_dataset;
      g.view.body = canonicalize_body(c.view.body);
      for (const ContributionPattern& cp : contribution(g.view, k))
        g.contributions.push_back(cp.pattern);
      groups.push_back(std::move(g));
      home = &groups.back();
    }
    home->members.insert(c.endpoint);
    home->member_fragments[c.endpoint].push_back(c.fragment_id);
    home->origin_universal = home->origin_universal || c.origin_universal;
  }
  // An endpoint whose same-dataset fragment contains the class view can serve
  // the class too (the paper's E2 sitting in both k2 groups).
  for (CandidateGroup& g : groups) {
    for (const Candidate& c : candidates) {
      if (c.source_dataset != g.dataset || g.members.count(c.endpoint)) continue;
      if (bgp_contains(c.view, g.view)) {
        g.members.insert(c.endpoint);
        g.member_fragments[c.endpoint].push_back(c.fragment_id);
      }
    }
  }
  return groups;
}

std::vector<CandidateGroup> prune_contained(std::vector<CandidateGroup> groups,
                                            const TriplePattern&) {
  std::vector<bool> dead(groups.size(), false);
  for (std::size_t a = 0; a < groups.size(); ++a) {
    if (groups[a].origin_universal) continue;  // origins are drop_public's business
    for (std::size_t b = 0; b < groups.size(); ++b) {
      if (a == b || groups[b].origin_universal) continue;
      if (groups[a].dataset != groups[b].dataset) continue;
      // a strictly contained in b: b's fragment already covers it
      if (bgp_contains(groups[b].view, groups[a].view) &&
          !bgp_contains(groups[a].view, groups[b].view)) {
        dead[a] = true;
        break;
      }
    }
  }
  std::vector<CandidateGroup> out;
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (!dead[i]) out.push_back(std::move(groups[i]));
  return out;
}

std::vector<CandidateGroup> drop_public(std::vector<CandidateGroup> groups,
                                        const std::set<std::string>& public_ids,
                                        const DatasetNeeds& needs, const TriplePattern& k,
                                        bool illustration,
                                        std::vector<std::string>* warnings) {
  if (!illustration) {
    for (CandidateGroup& g : groups) {
      if (!g.has_member_outside(public_ids)) continue;  // keep lone-public groups whole
      for (auto it = g.members.begin(); it != g.members.end();) {
        if (public_ids.count(*it)) {
          g.member_fragments.erase(*it);
          it = g.members.erase(it);
        } else {
          ++it;
        }
      }
    }
  }

  // Groups that can definitely be served without a public endpoint.
  auto supported = [&](const std::string& dataset, const TriplePattern& pattern) {
    for (const CandidateGroup& g : groups) {
      if (g.dataset != dataset || !g.has_member_outside(public_ids)) continue;
      for (const TriplePattern& q : g.contributions)
        if (subsumes(q, pattern)) return true;
    }
    return false;
  };
  bool any_nonpublic = std::any_of(groups.begin(), groups.end(), [&](const CandidateGroup& g) {
    return g.has_member_outside(public_ids);
  });

  std::vector<CandidateGroup> out;
  for (CandidateGroup& g : groups) {
    if (g.has_member_outside(public_ids) || !any_nonpublic) {
      out.push_back(std::move(g));
      continue;
    }
    // All-public group: removable only if everything its dataset's replicas
    // could contribute for k is available from non-public groups.
    bool removable = true;
    auto it = needs.find(g.dataset);
    if (it != needs.end()) {
      for (const TriplePattern& need : it->second) {
        if (!supported(g.dataset, need)) {
          removable = false;
          break;
        }
      }
    }
    if (!removable) {
      out.push_back(std::move(g));
      continue;
    }
    // Anything the group itself offered beyond the replicas' coverage is
    // forfeited with the removal.
    for (const TriplePattern& own : g.contributions) {
      if (!supported(g.dataset, own)) {
        if (warnings) {
          std::string members;
          for (const auto& m : g.members) members += (members.empty() ? "" : ",") + m;
          warnings->push_back("pattern " + pattern_to_string(k) + ": dropped public source(s) " +
                              members + " of dataset " + g.dataset +
                              "; answer may be incomplete relative to origin");
        }
        break;
      }
    }
  }
  return out;
}

CoverInstance build_cover_instance(
    const std::vector<std::vector<CandidateGroup>>& per_pattern_groups,
    const std::set<std::string>& public_ids) {
  CoverInstance instance;
  instance.public_endpoints = public_ids;
  for (std::size_t i = 0; i < per_pattern_groups.size(); ++i) {
    const auto& groups = per_pattern_groups[i];
    for (std::size_t j = 0; j < groups.size(); ++j) {
      std::string elem = "k" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
      instance.universe.push_back(elem);
      instance.element_origin[elem] = {i, j};
      for (const std::string& m : groups[j].members) instance.subsets[m].insert(elem);
    }
  }
  return instance;
}

std::vector<std::string> greedy_set_cover(const CoverInstance& instance) {
  std::set<std::string> uncovered(instance.universe.begin(), instance.universe.end());
  std::vector<std::string> cover;
  while (!uncovered.empty()) {
    const std::string* best = nullptr;
    std::size_t best_gain = 0;
    bool best_public = true;
    for (const auto& [endpoint, subset] : instance.subsets) {
      std::size_t gain = std::count_if(subset.begin(), subset.end(),
                                       [&](const std::string& e) { return uncovered.count(e); });
      bool is_public = instance.public_endpoints.count(endpoint) > 0;
      bool better = gain > best_gain ||
                    (gain == best_gain && gain > 0 && !is_public && best_public);
      // map iteration is id-ascending, so on full ties the first wins
      if (best == nullptr || better) {
        if (gain == 0 && best != nullptr) continue;
        best = &endpoint;
        best_gain = gain;
        best_public = is_public;
      }
    }
    if (best == nullptr || best_gain == 0)
      throw Error("set cover: universe is not coverable");
    cover.push_back(*best);
    for (const std::string& e : instance.subsets.at(*best)) uncovered.erase(e);
  }
  return cover;
}

namespace {

// Greedy tie-break order: non-public first, then smallest id.
std::string pick_member(const std::set<std::string>& members,
                        const std::set<std::string>& cover,
                        const std::set<std::string>& public_ids) {
  const std::string* best = nullptr;
  for (const std::string& m : members) {
    if (!cover.count(m)) continue;
    if (best == nullptr) {
      best = &m;
      continue;
    }
    bool m_pub = public_ids.count(m) > 0, b_pub = public_ids.count(*best) > 0;
    if (std::make_pair(m_pub, m) < std::make_pair(b_pub, *best)) best = &m;
  }
  if (best == nullptr) throw Error("set cover result does not cover a group");
  return *best;
}

}  // namespace

SelectionPlan finalize(const std::vector<std::vector<CandidateGroup>>& per_pattern_groups,
                       const std::vector<TriplePattern>& patterns,
                       const std::vector<std::string>& cover,
                       const std::set<std::string>& public_ids) {
  std::set<std::string> cover_set(cover.begin(), cover.end());
  SelectionPlan plan;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    Assignment a;
    a.index = i;
    a.pattern = patterns[i];
    std::set<std::string> chosen;
    for (const CandidateGroup& g : per_pattern_groups[i])
      chosen.insert(pick_member(g.members, cover_set, public_ids));
    a.endpoints.assign(chosen.begin(), chosen.end());
    plan.assignments.push_back(std::move(a));
  }
  return plan;
}

SelectionResult select_sources(const Query& q, const FederationCatalog& catalog,
                               std::optional<std::int64_t> dt,
                               const SelectOptions& options) {
  auto start = std::chrono::steady_clock::now();
  SelectionResult result;
  std::vector<TriplePattern> patterns = triple_patterns(q);
  std::set<std::string> public_ids = catalog.public_endpoints();
  std::vector<std::string> warnings;
  std::vector<std::vector<CandidateGroup>> final_groups;

  for (std::size_t i = 0; i < patterns.size(); ++i) {
    SelectionTrace::PatternStage stage;
    stage.index = i;
    stage.pattern = patterns[i];
    stage.candidates = preselect(catalog, patterns[i], dt);
    stage.grouped = group_equivalent(stage.candidates, patterns[i]);
    stage.pruned = prune_contained(stage.grouped, patterns[i]);
    stage.final_groups = drop_public(stage.pruned, public_ids,
                                     dataset_needs(catalog, patterns[i]), patterns[i],
                                     options.illustration, &warnings);
    if (stage.final_groups.empty())
      warnings.push_back("pattern " + pattern_to_string(patterns[i]) +
                         " has no candidate sources; assignment left empty");
    final_groups.push_back(stage.final_groups);
    result.trace.patterns.push_back(std::move(stage));
  }

  result.trace.instance = build_cover_instance(final_groups, public_ids);
  result.trace.cover = greedy_set_cover(result.trace.instance);
  result.plan = finalize(final_groups, patterns, result.trace.cover, public_ids);
  result.plan.warnings = std::move(warnings);
  result.plan.sst_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

int nss(const SelectionPlan& plan) {
  int total = 0;
  for (const Assignment& a : plan.assignments) total += static_cast<int>(a.endpoints.size());
  return total;
}

int nsps(const SelectionPlan& plan, const std::set<std::string>& public_ids) {
  int total = 0;
  for (const Assignment& a : plan.assignments)
    total += static_cast<int>(std::count_if(a.endpoints.begin(), a.endpoints.end(),
                                            [&](const std::string& e) {
                                              return public_ids.count(e) > 0;
                                            }));
  return total;
}

std::string serialize_plan(const SelectionPlan& plan, const Query& q,
                           std::optional<std::int64_t> dt, std::int64_t now,
                           const std::set<std::string>& public_ids) {
  nlohmann::json doc;
  doc["query"] = print_query(q);
  if (dt)
    doc["dt"] = *dt;
  else
    doc["dt"] = "inf";
  doc["now"] = now;
  doc["assignments"] = nlohmann::json::array();
  for (const Assignment& a : plan.assignments) {
    nlohmann::json j;
    j["pattern"] = pattern_to_string(a.pattern);
    j["endpoints"] = a.endpoints;
    doc["assignments"].push_back(std::move(j));
  }
  doc["nss"] = nss(plan);
  doc["nsps"] = nsps(plan, public_ids);
  doc["sst_seconds"] = plan.sst_seconds;
  doc["warnings"] = plan.warnings;
  return doc.dump(2) + "\n";
}

}  // namespace fedra
