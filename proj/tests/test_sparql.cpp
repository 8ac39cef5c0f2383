#include "fedra/sparql.hpp"

#include "doctest.h"
#include "fedra/error.hpp"
#include "fedra/selection.hpp"
#include "helpers.hpp"

using namespace fedra;
using testutil::pat;

TEST_CASE("Listing 2 parses into k1 and k2") {
  Query q = parse_query(testutil::slurp(testutil::fixture("queries/listing2.rq")));
  CHECK(q.form == QueryForm::Select);
  CHECK(q.distinct);
  CHECK(q.projection == std::vector<std::string>{"s", "o", "r"});
  auto pats = triple_patterns(q);
  REQUIRE(pats.size() == 2);
  CHECK(pats[0] == pat("?s", "p1", "?o"));
  CHECK(pats[1] == pat("?o", "p4", "?r"));
}

TEST_CASE("Listing 1 parses with SELECT DISTINCT * and full IRIs") {
  Query q = parse_query(testutil::slurp(testutil::fixture("queries/listing1.rq")));
  CHECK(q.star);
  CHECK(q.distinct);
  auto pats = triple_patterns(q);
  REQUIRE(pats.size() == 3);
  CHECK(pats[0].predicate == Term::iri("http://dbpedia.org/ontology/country"));
}

TEST_CASE("empty group is rejected") {
  CHECK_THROWS_AS(parse_query("SELECT * WHERE { }"), ParseError);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_query("SELECT ?x WHERE {\n  ?x p1\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);  // object missing, error lands on '}'
  }
}

TEST_CASE("unsupported constructs are rejected") {
  CHECK_THROWS(parse_query("SELECT ?x WHERE { ?x p1 ?y . { SELECT ?z WHERE { ?z p ?w } } }"));
  CHECK_THROWS_AS(
      parse_query("SELECT ?x WHERE { SERVICE <http://x> { ?x p1 ?y } }"),
      UnsupportedError);
}

TEST_CASE("PREFIX declarations expand, undeclared prefixes fail") {
  Query q = parse_query(
      "PREFIX dbo: <http://dbpedia.org/ontology/>\n"
      "SELECT ?c WHERE { ?c dbo:country ?x }");
  CHECK(triple_patterns(q)[0].predicate == Term::iri("http://dbpedia.org/ontology/country"));
  CHECK_THROWS_AS(parse_query("SELECT ?c WHERE { ?c dbo:country ?x }"), ParseError);
}

TEST_CASE("OPTIONAL and UNION flatten into blocks") {
  Query q = parse_query(
      "SELECT ?x WHERE {\n"
      "  ?x p1 ?y .\n"
      "  OPTIONAL { ?y p2 ?z }\n"
      "  { ?x p3 ?a } UNION { ?x p4 ?b }\n"
      "}");
  REQUIRE(q.blocks.size() == 4);
  CHECK(q.blocks[0].kind == BlockKind::Basic);
  CHECK(q.blocks[1].kind == BlockKind::Optional);
  CHECK(q.blocks[2].kind == BlockKind::UnionBranch);
  CHECK(q.blocks[3].kind == BlockKind::UnionBranch);
  CHECK(triple_patterns(q).size() == 4);
}

TEST_CASE("a group not followed by UNION is an error") {
  CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { { ?x p1 ?y } { ?x p2 ?z } }"), ParseError);
}

TEST_CASE("FILTER text is captured verbatim and not interpreted") {
  Query q = parse_query(
      "SELECT ?x WHERE { ?x p1 ?y . FILTER (REGEX(?y, \"^a(b)\") && BOUND(?x)) }");
  REQUIRE(q.filters.size() == 1);
  CHECK(q.filters[0] == "(REGEX(?y, \"^a(b)\") && BOUND(?x))");
  CHECK(triple_patterns(q).size() == 1);
}

TEST_CASE("pattern counts match the benchmark query shapes") {
  // q7-like: 9 patterns spread over 8 union branches plus a basic block
  std::string q7 = "SELECT DISTINCT ?x WHERE { ?x p0 ?y .";
  q7 += " { ?x p1 ?a }";
  for (int i = 2; i <= 8; ++i) q7 += " UNION { ?x p" + std::to_string(i) + " ?a }";
  q7 += " }";
  CHECK(triple_patterns(parse_query(q7)).size() == 9);

  // q4-like: 5 patterns with 2 unions
  Query q4 = parse_query(
      "SELECT ?a WHERE { ?a p1 ?b . ?b p2 ?c . ?c p3 ?d . { ?a p4 ?e } UNION { ?a p5 ?e } }");
  CHECK(triple_patterns(q4).size() == 5);
}

TEST_CASE("parse_view accepts the Fig. 2 views") {
  ViewDefinition v1 = parse_view("CONSTRUCT WHERE { ?x p1 ?y . ?y ?p ?z }");
  REQUIRE(v1.body.size() == 2);
  CHECK(v1.body[0] == pat("?x", "p1", "?y"));
  CHECK(v1.body[1] == pat("?y", "?p", "?z"));

  ViewDefinition v3 = parse_view("CONSTRUCT WHERE { o2 p4 ?x }");
  REQUIRE(v3.body.size() == 1);
  CHECK(v3.body[0] == pat("o2", "p4", "?x"));

  ViewDefinition ground = parse_view("CONSTRUCT WHERE { a b c }");
  CHECK(ground.body[0] == pat("a", "b", "c"));
}

TEST_CASE("parse_view rejects SELECT and non-BGP bodies") {
  CHECK_THROWS_AS(parse_view("SELECT * WHERE { ?x p1 ?y }"), ParseError);
  CHECK_THROWS_AS(parse_view("CONSTRUCT WHERE { }"), ParseError);
  CHECK_THROWS_AS(parse_view("CONSTRUCT WHERE { OPTIONAL { ?x p1 ?y } }"), ParseError);
}

TEST_CASE("parse of print is identity on the supported subset") {
  std::vector<std::string> corpus = {
      testutil::slurp(testutil::fixture("queries/listing2.rq")),
      testutil::slurp(testutil::fixture("queries/listing1.rq")),
      "SELECT ?x WHERE { ?x p1 ?y . OPTIONAL { ?y p2 ?z } FILTER (?y > 3) }",
      "SELECT DISTINCT * WHERE { { ?x p1 ?y } UNION { ?x p2 ?y } UNION { ?x p3 ?y } }",
      "CONSTRUCT WHERE { ?x p1 ?y . ?y ?p ?z }",
      "SELECT ?x ?y WHERE { ?x <http://ex.org/p> \"lit\" . ?x p1 ?y }",
  };
  for (const std::string& text : corpus) {
    Query q = parse_query(text);
    CHECK(parse_query(print_query(q)) == q);
  }
}

namespace {

SelectionPlan plan_for(const Query& q,
                       std::vector<std::vector<std::string>> endpoints_per_pattern) {
  SelectionPlan plan;
  auto pats = triple_patterns(q);
  for (std::size_t i = 0; i < pats.size(); ++i) {
    Assignment a;
    a.index = i;
    a.pattern = pats[i];
    a.endpoints = endpoints_per_pattern.at(i);
    plan.assignments.push_back(std::move(a));
  }
  return plan;
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t count = 0, pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

const std::map<std::string, std::string> kUrls = {
    {"E5", "http://e5.example.org/sparql"},
    {"E6", "http://e6.example.org/sparql"},
};

}  // namespace

TEST_CASE("render_service_query wraps patterns per the plan") {
  Query q = parse_query(testutil::slurp(testutil::fixture("queries/listing2.rq")));
  SelectionPlan plan = plan_for(q, {{"E5"}, {"E5", "E6"}});
  std::string rendered = render_service_query(q, plan, kUrls);

  CHECK(count_occurrences(rendered, "SERVICE <http://e5.example.org/sparql>") == 2);
  CHECK(count_occurrences(rendered, "SERVICE <http://e6.example.org/sparql>") == 1);
  CHECK(count_occurrences(rendered, "UNION") == 1);

  Query back = parse_query(rendered, ParseOptions{.allow_service = true});
  REQUIRE(back.services.size() == 3);
  CHECK(back.services[0].patterns == std::vector<TriplePattern>{pat("?s", "p1", "?o")});
  CHECK(back.services[1].endpoint_url == "http://e5.example.org/sparql");
  CHECK(back.services[2].endpoint_url == "http://e6.example.org/sparql");
  CHECK(back.distinct);
}

TEST_CASE("uniform plan wraps every pattern in the same endpoint") {
  Query q = parse_query("SELECT ?x WHERE { ?x p1 ?y . ?y p2 ?z }");
  std::string rendered = render_service_query(q, plan_for(q, {{"E5"}, {"E5"}}), kUrls);
  CHECK(count_occurrences(rendered, "SERVICE <http://e5.example.org/sparql>") == 2);
  CHECK(rendered.find("UNION") == std::string::npos);
}

TEST_CASE("empty endpoint set emits a warning comment and reparses") {
  Query q = parse_query("SELECT ?x WHERE { ?x p1 ?y . ?y p2 ?z }");
  std::string rendered = render_service_query(q, plan_for(q, {{"E5"}, {}}), kUrls);
  CHECK(rendered.find("# warning") != std::string::npos);
  Query back = parse_query(rendered, ParseOptions{.allow_service = true});
  CHECK(triple_patterns(back).size() == 2);
}

TEST_CASE("plan endpoint without a URL is an error") {
  Query q = parse_query("SELECT ?x WHERE { ?x p1 ?y }");
  CHECK_THROWS_AS(render_service_query(q, plan_for(q, {{"E9"}}), kUrls), ValidationError);
}

TEST_CASE("render keeps OPTIONAL and UNION structure around rewrites") {
  Query q = parse_query(
      "SELECT ?x WHERE { ?x p1 ?y . OPTIONAL { ?y p2 ?z } { ?x p3 ?a } UNION { ?x p4 ?a } }");
  std::string rendered =
      render_service_query(q, plan_for(q, {{"E5"}, {"E5"}, {"E6"}, {"E6"}}), kUrls);
  CHECK(rendered.find("OPTIONAL {") != std::string::npos);
  CHECK(count_occurrences(rendered, "UNION") == 1);
  Query back = parse_query(rendered, ParseOptions{.allow_service = true});
  CHECK(back.services.size() == 4);
}
