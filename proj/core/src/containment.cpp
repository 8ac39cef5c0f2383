#include "fedra/containment.hpp"

#include <algorithm>

#include "fedra/error.hpp"

namespace fedra {

namespace {

constexpr std::size_t kMaxBodySize = 16;

void rename_into(TriplePattern& p, std::map<std::string, std::string>& names,
                 std::size_t& counter) {
  for (int pos = 0; pos < 3; ++pos) {
    Term& t = p.at(pos);
    if (!t.is_variable()) continue;
    auto it = names.find(t.lexical);
    if (it == names.end())
      it = names.emplace(t.lexical, "v" + std::to_string(counter++)).first;
    t.lexical = it->second;
  }
}

// Resolve a term through a substitution until a constant or an unbound
// variable is reached. Substitutions built here are acyclic by construction.
Term walk(Term t, const Substitution& sub) {
  while (t.is_variable()) {
    auto it = sub.find(t.lexical);
    if (it == sub.end()) break;
    t = it->second;
  }
  return t;
}

bool unify_terms(const Term& a, const Term& b, Substitution& sub) {
  Term ra = walk(a, sub), rb = walk(b, sub);
  if (ra == rb) return true;
  if (ra.is_variable()) {
    sub[ra.lexical] = rb;
    return true;
  }
  if (rb.is_variable()) {
    sub[rb.lexical] = ra;
    return true;
  }
  return false;  // distinct constants
}

std::optional<TriplePattern> unify_patterns(const TriplePattern& a, const TriplePattern& b) {
  // Standardize apart: each side's variables are independent.
  TriplePattern left = a, right = b;
  for (int pos = 0; pos < 3; ++pos) {
    if (left.at(pos).is_variable()) left.at(pos).lexical = "l#" + left.at(pos).lexical;
    if (right.at(pos).is_variable()) right.at(pos).lexical = "r#" + right.at(pos).lexical;
  }
  Substitution sub;
  for (int pos = 0; pos < 3; ++pos)
    if (!unify_terms(left.at(pos), right.at(pos), sub)) return std::nullopt;
  TriplePattern result;
  for (int pos = 0; pos < 3; ++pos) result.at(pos) = walk(left.at(pos), sub);
  return result;
}

bool fully_variable(const TriplePattern& p) {
  return p.subject.is_variable() && p.predicate.is_variable() && p.object.is_variable();
}

// Homomorphism from outer.body into inner.body: outer variables map to inner
// terms (inner variables count as constants), outer constants are fixed.
bool hom_exists(const std::vector<TriplePattern>& outer,
                const std::vector<TriplePattern>& inner, std::size_t next,
                Substitution& sub) {
  if (next == outer.size()) return true;
  const TriplePattern& op = outer[next];
  for (const TriplePattern& ip : inner) {
    Substitution saved = sub;
    bool ok = true;
    for (int pos = 0; pos < 3 && ok; ++pos) {
      const Term& ot = op.at(pos);
      const Term& it = ip.at(pos);
      if (!ot.is_variable()) {
        ok = (ot == it);
        continue;
      }
      auto bound = sub.find(ot.lexical);
      if (bound != sub.end())
        ok = (bound->second == it);
      else
        sub.emplace(ot.lexical, it);
    }
    if (ok && hom_exists(outer, inner, next + 1, sub)) return true;
    sub = std::move(saved);
  }
  return false;
}

}  // namespace

TriplePattern canonicalize_pattern(const TriplePattern& p) {
  TriplePattern out = p;
  std::map<std::string, std::string> names;
  std::size_t counter = 0;
  rename_into(out, names, counter);
  return out;
}

std::vector<TriplePattern> canonicalize_body(const std::vector<TriplePattern>& body) {
  std::vector<TriplePattern> out = body;
  std::map<std::string, std::string> names;
  std::size_t counter = 0;
  for (TriplePattern& p : out) rename_into(p, names, counter);
  return out;
}

bool compatible(const TriplePattern& t1, const TriplePattern& t2) {
  return unify_patterns(t1, t2).has_value();
}

std::optional<ContributionPattern> unify(const TriplePattern& query_pattern,
                                         const TriplePattern& view_pattern) {
  auto merged = unify_patterns(query_pattern, view_pattern);
  if (!merged) return std::nullopt;
  return ContributionPattern{canonicalize_pattern(*merged)};
}

bool subsumes(const TriplePattern& general, const TriplePattern& specific) {
  Substitution sub;
  for (int pos = 0; pos < 3; ++pos) {
    const Term& g = general.at(pos);
    const Term& s = specific.at(pos);
    if (!g.is_variable()) {
      if (g != s) return false;
      continue;
    }
    auto it = sub.find(g.lexical);
    if (it != sub.end()) {
      if (it->second != s) return false;
    } else {
      sub.emplace(g.lexical, s);
    }
  }
  return true;
}

bool bgp_contains(const ViewDefinition& outer, const ViewDefinition& inner) {
  if (outer.body.size() > kMaxBodySize || inner.body.size() > kMaxBodySize)
    throw UnsupportedError("view body exceeds " + std::to_string(kMaxBodySize) +
                           " patterns");
  if (outer.body.empty() || inner.body.empty()) return false;
  // Rename apart so outer and inner variable names cannot collide.
  std::vector<TriplePattern> o = canonicalize_body(outer.body);
  std::vector<TriplePattern> i = canonicalize_body(inner.body);
  for (TriplePattern& p : i)
    for (int pos = 0; pos < 3; ++pos)
      if (p.at(pos).is_variable()) p.at(pos).lexical = "i#" + p.at(pos).lexical;
  Substitution sub;
  return hom_exists(o, i, 0, sub);
}

bool view_equivalent(const ViewDefinition& a, const ViewDefinition& b) {
  return bgp_contains(a, b) && bgp_contains(b, a);
}

std::vector<ContributionPattern> contribution(const ViewDefinition& view,
                                              const TriplePattern& k) {
  std::vector<ContributionPattern> raw;
  for (const TriplePattern& tp : view.body) {
    // A fully unconstrained pattern inside a join is a catch-all for the
    // join, not a statement about what the fragment replicates.
    if (fully_variable(tp) && view.body.size() > 1) continue;
    if (auto u = unify(k, tp)) {
      if (std::find(raw.begin(), raw.end(), *u) == raw.end()) raw.push_back(*u);
    }
  }
  // Keep only the most general patterns.
  std::vector<ContributionPattern> out;
  for (const ContributionPattern& candidate : raw) {
    bool dominated = false;
    for (const ContributionPattern& other : raw) {
      if (other == candidate) continue;
      if (subsumes(other.pattern, candidate.pattern) &&
          !subsumes(candidate.pattern, other.pattern)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.push_back(candidate);
  }
  return out;
}

}  // namespace fedra
