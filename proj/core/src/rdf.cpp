#include "fedra/rdf.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "fedra/error.hpp"
#include "fedra/sparql.hpp"

namespace fedra {

namespace {

bool is_bare_token(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
    return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

// Try to bind pattern term `pt` against ground term `gt`.
bool bind_term(const Term& pt, const Term& gt, Binding& b) {
  if (!pt.is_variable()) return pt == gt;
  auto it = b.find(pt.lexical);
  if (it != b.end()) return it->second == gt;
  b.emplace(pt.lexical, gt);
  return true;
}

void collect_vars(const TriplePattern& p, std::vector<std::string>& out) {
  for (int pos = 0; pos < 3; ++pos) {
    const Term& t = p.at(pos);
    if (t.is_variable() && std::find(out.begin(), out.end(), t.lexical) == out.end())
      out.push_back(t.lexical);
  }
}

}  // namespace

SolutionBag match_pattern(const Graph& graph, const TriplePattern& pattern) {
  SolutionBag bag;
  collect_vars(pattern, bag.variables);
  for (const Triple& t : graph) {
    Binding b;
    if (bind_term(pattern.subject, t.subject, b) &&
        bind_term(pattern.predicate, t.predicate, b) &&
        bind_term(pattern.object, t.object, b)) {
      bag.rows.push_back(std::move(b));
    }
  }
  return bag;
}

Graph graph_at_time(const UpdateLog& log, std::int64_t t) {
  Graph g;
  for (const UpdateOp& op : log.ops) {
    if (op.time > t) break;  // ops sorted by time
    if (op.kind == OpKind::Insert)
      g.insert(op.triple);
    else
      g.erase(op.triple);  // deleting an absent triple is a no-op
  }
  return g;
}

SolutionBag join_solutions(const SolutionBag& left, const SolutionBag& right) {
  SolutionBag out;
  out.variables = left.variables;
  std::vector<std::string> shared;
  for (const auto& v : right.variables) {
    if (std::find(left.variables.begin(), left.variables.end(), v) != left.variables.end())
      shared.push_back(v);
    else
      out.variables.push_back(v);
  }

  // Hash right rows by their shared-variable values.
  auto key_of = [&shared](const Binding& b) {
    std::string key;
    for (const auto& v : shared) {
      const Term& t = b.at(v);
      key += static_cast<char>('0' + static_cast<int>(t.kind));
      key += t.lexical;
      key += '\x1f';
    }
    return key;
  };
  std::map<std::string, std::vector<const Binding*>> index;
  for (const Binding& r : right.rows) index[key_of(r)].push_back(&r);

  for (const Binding& l : left.rows) {
    auto it = index.find(key_of(l));
    if (it == index.end()) continue;
    for (const Binding* r : it->second) {
      Binding merged = l;
      merged.insert(r->begin(), r->end());
      out.rows.push_back(std::move(merged));
    }
  }
  return out;
}

SolutionBag eval_bgp(const Graph& graph, const std::vector<TriplePattern>& patterns) {
  SolutionBag acc;
  acc.rows.push_back({});  // unit bag
  for (const TriplePattern& p : patterns) acc = join_solutions(acc, match_pattern(graph, p));
  return acc;
}

Term parse_term_token(const std::string& token) {
  if (token.empty()) throw Error("empty term token");
  if (token.front() == '<' && token.back() == '>')
    return Term::iri(token.substr(1, token.size() - 2));
  if (token.front() == '"' && token.back() == '"' && token.size() >= 2)
    return Term::literal(token.substr(1, token.size() - 2));
  if (token.front() == '?') return Term::variable(token.substr(1));
  if (is_bare_token(token)) return Term::bare(token);
  throw Error("cannot parse term token '" + token + "'");
}

UpdateLog parse_update_log(const std::string& text, const std::string& dataset_id) {
  UpdateLog log;
  log.dataset_id = dataset_id;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') continue;

    UpdateOp op;
    try {
      op.time = std::stoll(first);
    } catch (const std::exception&) {
      throw ParseError("expected integer epoch, got '" + first + "'", lineno, 1);
    }
    if (op.time < 0) throw ParseError("negative epoch", lineno, 1);

    std::string kind, s, p, o, dot;
    if (!(ls >> kind >> s >> p >> o))
      throw ParseError("expected `<time> <I|D> <s> <p> <o> .`", lineno, 1);
    if (kind == "I")
      op.kind = OpKind::Insert;
    else if (kind == "D")
      op.kind = OpKind::Delete;
    else
      throw ParseError("op type must be I or D, got '" + kind + "'", lineno, 1);

    ls >> dot;  // trailing '.' optional
    if (!dot.empty() && dot != ".")
      throw ParseError("unexpected trailing token '" + dot + "'", lineno, 1);

    Term st = parse_term_token(s), pt = parse_term_token(p), ot = parse_term_token(o);
    if (st.is_variable() || pt.is_variable() || ot.is_variable())
      throw ParseError("update logs contain ground triples only", lineno, 1);
    op.triple = Triple{st, pt, ot};
    log.ops.push_back(std::move(op));
  }
  std::stable_sort(log.ops.begin(), log.ops.end(),
                   [](const UpdateOp& a, const UpdateOp& b) { return a.time < b.time; });
  return log;
}

UpdateLog load_update_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open log file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  // dataset id = file stem
  std::string stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos)
    stem = stem.substr(slash + 1);
  if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return parse_update_log(buf.str(), stem);
}

std::string term_to_string(const Term& t) {
  switch (t.kind) {
    case TermKind::Variable:
      return "?" + t.lexical;
    case TermKind::Literal: {
      std::string out = "\"";
      for (char c : t.lexical) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case TermKind::Iri: {
      const std::string prefix(kBareIriPrefix);
      if (t.lexical.rfind(prefix, 0) == 0) {
        std::string rest = t.lexical.substr(prefix.size());
        if (is_bare_token(rest)) return rest;
      }
      return "<" + t.lexical + ">";
    }
  }
  return {};
}

std::string triple_to_string(const Triple& t) {
  return term_to_string(t.subject) + " " + term_to_string(t.predicate) + " " +
         term_to_string(t.object);
}

std::string binding_to_string(const Binding& b) {
  std::string out;
  for (const auto& [var, term] : b) {
    if (!out.empty()) out += " ";
    out += "?" + var + "=" + term_to_string(term);
  }
  return out;
}

std::map<std::string, std::size_t> bag_counts(const SolutionBag& bag) {
  std::map<std::string, std::size_t> counts;
  for (const Binding& row : bag.rows) ++counts[binding_to_string(row)];
  return counts;
}

bool bag_equal(const SolutionBag& a, const SolutionBag& b) {
  if (a.rows.size() != b.rows.size()) return false;
  return bag_counts(a) == bag_counts(b);
}

}  // namespace fedra
