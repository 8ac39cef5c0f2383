#include "fedra/rdf.hpp"

#include <algorithm>
#include <random>

#include "doctest.h"
#include "fedra/error.hpp"
#include "fedra/sparql.hpp"
#include "helpers.hpp"

using namespace fedra;
using testutil::pat;
using testutil::triple;

TEST_CASE("term equality and rendering") {
  CHECK(testutil::T("s1") == Term::iri("urn:fedra:s1"));
  CHECK(testutil::T("?x") == Term::variable("x"));
  CHECK(Term::iri("a") != Term::literal("a"));
  CHECK(term_to_string(testutil::T("s1")) == "s1");
  CHECK(term_to_string(Term::iri("http://example.org/x")) == "<http://example.org/x>");
  CHECK(term_to_string(Term::literal("hi \"there\"")) == "\"hi \\\"there\\\"\"");
}

TEST_CASE("match_pattern binds one row per matching triple") {
  Graph g{triple("s1", "p1", "o1"), triple("s2", "p1", "o3"), triple("o1", "p2", "o2")};
  SolutionBag bag = match_pattern(g, pat("?s", "p1", "?o"));
  REQUIRE(bag.rows.size() == 2);
  CHECK(bag.variables == std::vector<std::string>{"s", "o"});
  auto counts = bag_counts(bag);
  CHECK(counts.count("?o=o1 ?s=s1") == 1);
  CHECK(counts.count("?o=o3 ?s=s2") == 1);
}

TEST_CASE("match_pattern on empty graph") {
  CHECK(match_pattern({}, pat("?s", "?p", "?o")).empty());
}

TEST_CASE("repeated variables force equal values") {
  Graph loop{triple("a", "p", "a")};
  CHECK(match_pattern(loop, pat("?x", "p", "?x")).rows.size() == 1);
  Graph edge{triple("a", "p", "b")};
  CHECK(match_pattern(edge, pat("?x", "p", "?x")).empty());
  CHECK(match_pattern(edge, pat("?x", "p", "?y")).rows.size() == 1);
}

TEST_CASE("fresh-variable pattern returns |G| rows") {
  std::mt19937_64 rng(11);
  Graph g;
  for (int i = 0; i < 40; ++i)
    g.insert(triple("s" + std::to_string(rng() % 10), "p" + std::to_string(rng() % 4),
                    "o" + std::to_string(rng() % 10)));
  CHECK(match_pattern(g, pat("?a", "?b", "?c")).rows.size() == g.size());
}

TEST_CASE("graph_at_time replays the Fig. 2 log") {
  UpdateLog log = load_update_log_file(testutil::fixture("fig2/logs/D.log"));
  CHECK(log.dataset_id == "D");

  Graph at_t = graph_at_time(log, 0);
  CHECK(at_t == Graph{triple("s1", "p1", "o1"), triple("o1", "p2", "o2"),
                      triple("s2", "p1", "o3"), triple("o3", "p3", "o4")});

  Graph at_t2 = graph_at_time(log, 2);
  CHECK(at_t2.size() == 6);
  CHECK(at_t2.count(triple("o1", "p2", "o7")) == 1);
  CHECK(at_t2.count(triple("o3", "p3", "o8")) == 1);
}

TEST_CASE("insert then delete cancels out") {
  UpdateLog log = parse_update_log("0 I a p b .\n1 D a p b .\n", "x");
  CHECK(graph_at_time(log, 0).size() == 1);
  CHECK(graph_at_time(log, 1).empty());
}

TEST_CASE("deleting an absent triple is a no-op") {
  UpdateLog log = parse_update_log("0 D a p b .\n1 I c p d .\n", "x");
  CHECK(graph_at_time(log, 5) == Graph{triple("c", "p", "d")});
}

TEST_CASE("graph_at_time monotone for insert-only logs") {
  std::mt19937_64 rng(3);
  UpdateLog log;
  log.dataset_id = "x";
  for (int i = 0; i < 60; ++i) {
    UpdateOp op;
    op.time = static_cast<std::int64_t>(rng() % 20);
    op.kind = OpKind::Insert;
    op.triple = triple("s" + std::to_string(rng() % 6), "p", "o" + std::to_string(rng() % 6));
    log.ops.push_back(op);
  }
  std::stable_sort(log.ops.begin(), log.ops.end(),
                   [](const UpdateOp& a, const UpdateOp& b) { return a.time < b.time; });
  for (std::int64_t t = 1; t < 20; ++t) {
    Graph earlier = graph_at_time(log, t - 1);
    Graph later = graph_at_time(log, t);
    CHECK(std::includes(later.begin(), later.end(), earlier.begin(), earlier.end()));
  }
}

TEST_CASE("update log parse errors") {
  CHECK_THROWS_AS(parse_update_log("x I a p b .", "d"), ParseError);
  CHECK_THROWS_AS(parse_update_log("0 X a p b .", "d"), ParseError);
  CHECK_THROWS_AS(parse_update_log("0 I ?v p b .", "d"), ParseError);
  CHECK_THROWS_AS(parse_update_log("-1 I a p b .", "d"), ParseError);
}

namespace {

SolutionBag bag_of(std::vector<std::string> vars, std::vector<std::vector<std::string>> rows) {
  SolutionBag bag;
  bag.variables = std::move(vars);
  for (const auto& row : rows) {
    Binding b;
    for (std::size_t i = 0; i < bag.variables.size(); ++i)
      b.emplace(bag.variables[i], testutil::T(row[i]));
    bag.rows.push_back(std::move(b));
  }
  return bag;
}

}  // namespace

TEST_CASE("join on shared variables") {
  SolutionBag left = bag_of({"o"}, {{"o1"}});
  SolutionBag right = bag_of({"o", "r"}, {{"o1", "o3"}});
  SolutionBag joined = join_solutions(left, right);
  REQUIRE(joined.rows.size() == 1);
  CHECK(joined.variables == std::vector<std::string>{"o", "r"});

  CHECK(join_solutions(bag_of({"o"}, {{"o1"}}), bag_of({"o", "r"}, {{"o2", "o5"}})).empty());
}

TEST_CASE("join multiplicities multiply") {
  SolutionBag left = bag_of({"o"}, {{"a"}, {"a"}});
  SolutionBag right = bag_of({"o", "r"}, {{"a", "b"}});
  CHECK(join_solutions(left, right).rows.size() == 2);
}

TEST_CASE("join is commutative and associative up to row order") {
  std::mt19937_64 rng(17);
  auto random_bag = [&rng](std::vector<std::string> vars) {
    std::vector<std::vector<std::string>> rows;
    int n = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
      std::vector<std::string> row;
      for (std::size_t j = 0; j < vars.size(); ++j)
        row.push_back("c" + std::to_string(rng() % 3));
      rows.push_back(std::move(row));
    }
    return bag_of(std::move(vars), std::move(rows));
  };
  for (int i = 0; i < 50; ++i) {
    SolutionBag a = random_bag({"x", "y"});
    SolutionBag b = random_bag({"y", "z"});
    SolutionBag c = random_bag({"z", "x"});
    CHECK(bag_equal(join_solutions(a, b), join_solutions(b, a)));
    CHECK(bag_equal(join_solutions(join_solutions(a, b), c),
                    join_solutions(a, join_solutions(b, c))));
  }
}

TEST_CASE("BGP evaluation is join-order independent") {
  std::mt19937_64 rng(5);
  Graph g;
  for (int i = 0; i < 25; ++i)
    g.insert(triple("s" + std::to_string(rng() % 4), "p" + std::to_string(rng() % 3),
                    "s" + std::to_string(rng() % 4)));
  std::vector<TriplePattern> patterns = {pat("?a", "p0", "?b"), pat("?b", "p1", "?c"),
                                         pat("?c", "?p", "?d")};
  SolutionBag forward = eval_bgp(g, patterns);
  std::vector<TriplePattern> reversed(patterns.rbegin(), patterns.rend());
  CHECK(bag_equal(forward, eval_bgp(g, reversed)));
}
