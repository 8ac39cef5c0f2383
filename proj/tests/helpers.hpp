#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "fedra/rdf.hpp"
#include "fedra/sparql.hpp"

namespace testutil {

inline std::string fixture(const std::string& rel) {
  return std::string(FEDRA_FIXTURES_DIR) + "/" + rel;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Shorthand term: "?x" -> variable, "\"v\"" -> literal, else bare IRI.
inline fedra::Term T(const std::string& s) {
  return fedra::parse_term_token(s);
}

inline fedra::TriplePattern pat(const std::string& s, const std::string& p,
                                const std::string& o) {
  return {T(s), T(p), T(o)};
}

inline fedra::Triple triple(const std::string& s, const std::string& p,
                            const std::string& o) {
  return {T(s), T(p), T(o)};
}

inline fedra::ViewDefinition view(const std::string& body) {
  return fedra::parse_view("CONSTRUCT WHERE { " + body + " }");
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr interleaved
};

#ifdef FEDRA_CLI_PATH
inline CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(FEDRA_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  CliResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return result;
  while (fgets(buf.data(), buf.size(), pipe) != nullptr) result.output += buf.data();
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}
#endif

}  // namespace testutil
