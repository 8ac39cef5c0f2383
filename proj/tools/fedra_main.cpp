#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fedra/catalog.hpp"
#include "fedra/error.hpp"
#include "fedra/generator.hpp"
#include "fedra/selection.hpp"
#include "fedra/simulator.hpp"

namespace fs = std::filesystem;
using namespace fedra;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

int log_level() {
  const char* env = std::getenv("FEDRA_LOG");
  if (env == nullptr) return 0;
  std::string v(env);
  if (v == "debug") return 2;
  if (v == "info") return 1;
  return 0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

std::optional<std::int64_t> parse_dt(const std::string& text) {
  if (text.empty() || text == "inf") return std::nullopt;
  try {
    std::int64_t v = std::stoll(text);
    if (v < 0) throw Error("--dt must be >= 0 or 'inf'");
    return v;
  } catch (const std::invalid_argument&) {
    throw Error("--dt must be an integer or 'inf', got '" + text + "'");
  }
}

std::vector<std::optional<std::int64_t>> parse_dt_list(const std::string& text) {
  std::vector<std::optional<std::int64_t>> out;
  std::stringstream ss(text.empty() ? std::string("inf") : text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_dt(item));
  if (out.empty()) out.push_back(std::nullopt);
  return out;
}

std::vector<UpdateLog> load_logs_dir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".log")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<UpdateLog> logs;
  for (const auto& f : files) logs.push_back(load_update_log_file(f.string()));
  if (logs.empty()) throw Error("no .log files in " + dir);
  return logs;
}

std::vector<NamedQuery> load_queries_dir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".rq")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<NamedQuery> queries;
  for (const auto& f : files) queries.push_back({f.stem().string(), read_file(f.string())});
  return queries;
}

FederationCatalog load_federation(const std::string& path,
                                  std::optional<std::int64_t> now_override) {
  FederationCatalog cat = load_catalog_file(path);
  if (now_override) cat = with_now(cat, *now_override);
  return cat;
}

void dump_trace(const SelectionTrace& trace) {
  for (const auto& stage : trace.patterns) {
    std::cerr << "pattern " << stage.index + 1 << ": " << pattern_to_string(stage.pattern)
              << "\n  candidates:";
    for (const auto& c : stage.candidates)
      std::cerr << " " << c.endpoint << "[" << c.fragment_id << ",age=" << c.age << "]";
    std::cerr << "\n";
    auto show = [](const char* name, const std::vector<CandidateGroup>& groups) {
      std::cerr << "  " << name << ":";
      for (const auto& g : groups) {
        std::cerr << " {";
        bool first = true;
        for (const auto& m : g.members) {
          std::cerr << (first ? "" : ",") << m;
          first = false;
        }
        std::cerr << "}(" << g.dataset << ")";
      }
      std::cerr << "\n";
    };
    show("grouped", stage.grouped);
    show("pruned", stage.pruned);
    show("final", stage.final_groups);
  }
  std::cerr << "cover universe:";
  for (const auto& e : trace.instance.universe) std::cerr << " " << e;
  std::cerr << "\ncover:";
  for (const auto& e : trace.cover) std::cerr << " " << e;
  std::cerr << "\n";
}

int cmd_select(const std::string& federation_path, const std::string& query_path,
               const std::string& dt_text, const std::string& emit,
               std::optional<std::int64_t> now_override) {
  FederationCatalog catalog = load_federation(federation_path, now_override);
  Query q = parse_query(read_file(query_path));
  std::optional<std::int64_t> dt = parse_dt(dt_text);

  SelectionResult result = select_sources(q, catalog, dt);
  if (log_level() >= 2) dump_trace(result.trace);

  if (emit == "service-query")
    std::cout << render_service_query(q, result.plan, catalog.endpoint_urls());
  else
    std::cout << serialize_plan(result.plan, q, dt, catalog.now, catalog.public_endpoints());

  std::cerr << "NSS=" << nss(result.plan) << " NSPS="
            << nsps(result.plan, catalog.public_endpoints()) << " SST="
            << result.plan.sst_seconds << "s\n";
  for (const auto& w : result.plan.warnings) std::cerr << "warning: " << w << "\n";
  return kExitOk;
}

int cmd_simulate(const std::string& federation_path, const std::string& logs_dir,
                 const std::string& queries_dir, const std::string& dt_text,
                 const std::string& out_path, std::optional<std::int64_t> now_override) {
  FederationCatalog catalog = load_federation(federation_path, now_override);
  std::vector<UpdateLog> logs = load_logs_dir(logs_dir);
  std::vector<NamedQuery> queries = load_queries_dir(queries_dir);

  std::vector<MetricsRow> rows;
  for (const auto& dt : parse_dt_list(dt_text)) {
    auto batch = run_experiment(catalog, logs, queries, dt);
    rows.insert(rows.end(), batch.begin(), batch.end());
  }
  write_output(out_path, metrics_to_csv(rows));
  return kExitOk;
}

int cmd_containment(const std::string& view_a_path, const std::string& view_b_path) {
  ViewDefinition a = parse_view(read_file(view_a_path));
  ViewDefinition b = parse_view(read_file(view_b_path));
  bool ab = bgp_contains(a, b);
  bool ba = bgp_contains(b, a);
  if (ab && ba)
    std::cout << "equivalent\n";
  else if (ab)
    std::cout << "A ⊒ B\n";
  else if (ba)
    std::cout << "B ⊒ A\n";
  else
    std::cout << "incomparable\n";
  return kExitOk;
}

int cmd_validate(const std::string& federation_path) {
  CatalogLoadResult result = try_load_catalog(read_file(federation_path));
  if (result.catalog) {
    std::cout << "OK: " << result.catalog->endpoints.size() << " endpoints, "
              << result.catalog->origins.size() << " origins, "
              << result.catalog->replicas.size() << " replicas\n";
    return kExitOk;
  }
  for (const auto& issue : result.issues) std::cout << "violation: " << issue << "\n";
  return kExitUsage;
}

int cmd_gen_federation(const std::string& logs_dir, int endpoints, int fragments,
                       std::uint64_t seed, const std::string& out_path) {
  if (endpoints < 1) throw Error("--endpoints must be >= 1");
  if (fragments < 0) throw Error("--fragments must be >= 0");
  std::vector<UpdateLog> logs = load_logs_dir(logs_dir);
  GeneratorOptions opts;
  opts.consumer_endpoints = endpoints;
  opts.fragments = fragments;
  opts.seed = seed;
  FederationCatalog cat = generate_federation(logs, opts);
  write_output(out_path, serialize_catalog(cat));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fedra: replication-aware source selection for federated SPARQL"};
  app.require_subcommand(1);

  std::string federation, query, queries, logs, dt = "inf", emit = "map", out;
  std::int64_t now_flag = -1;
  std::uint64_t seed = 0;
  int endpoints = 10, fragments = 30;
  std::string view_a, view_b;

  auto* select = app.add_subcommand("select", "Compute a selection plan for one query");
  select->add_option("--federation", federation, "catalog file")->required();
  select->add_option("--query", query, "query file (.rq)")->required();
  select->add_option("--dt", dt, "age limit (integer or 'inf', default inf)");
  select->add_option("--now", now_flag, "override the catalog epoch");
  select->add_option("--emit", emit, "map | service-query")
      ->check(CLI::IsMember({"map", "service-query"}));

  auto* simulate = app.add_subcommand("simulate", "Run selection + execution, write CSV report");
  simulate->add_option("--federation", federation, "catalog file")->required();
  simulate->add_option("--logs", logs, "directory of <dataset>.log files")->required();
  simulate->add_option("--queries", queries, "directory of .rq files")->required();
  simulate->add_option("--dt", dt, "age limit(s); comma separated, e.g. 0,1,2");
  simulate->add_option("--now", now_flag, "override the catalog epoch");
  simulate->add_option("--out", out, "output CSV path ('-' for stdout)");
  simulate->add_option("--seed", seed, "accepted for reproducible scripts");

  auto* containment = app.add_subcommand("containment", "Compare two CONSTRUCT views");
  containment->add_option("view_a", view_a, "first view file")->required();
  containment->add_option("view_b", view_b, "second view file")->required();

  auto* validate = app.add_subcommand("validate", "Check a catalog file, reporting all violations");
  validate->add_option("--federation", federation, "catalog file")->required();

  auto* gen = app.add_subcommand("gen-federation", "Generate a synthetic federation catalog");
  gen->add_option("--logs", logs, "directory of base .log files")->required();
  gen->add_option("--endpoints", endpoints, "number of consumer endpoints");
  gen->add_option("--fragments", fragments, "number of fragments to generate");
  gen->add_option("--seed", seed, "RNG seed");
  gen->add_option("--out", out, "output catalog path ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  std::optional<std::int64_t> now_override;
  if (now_flag >= 0) now_override = now_flag;

  try {
    if (select->parsed()) return cmd_select(federation, query, dt, emit, now_override);
    if (simulate->parsed())
      return cmd_simulate(federation, logs, queries, dt, out, now_override);
    if (containment->parsed()) return cmd_containment(view_a, view_b);
    if (validate->parsed()) return cmd_validate(federation);
    if (gen->parsed()) return cmd_gen_federation(logs, endpoints, fragments, seed, out);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "validation error:\n";
    for (const auto& issue : e.issues) std::cerr << "  " << issue << "\n";
    return kExitUsage;
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
