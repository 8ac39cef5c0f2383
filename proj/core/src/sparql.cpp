#include "fedra/sparql.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "fedra/error.hpp"
#include "fedra/selection.hpp"

namespace fedra {

namespace {

struct Token {
  enum Type { Word, Var, Iri, PName, Literal, LBrace, RBrace, Dot, Star, End };
  Type type = End;
  std::string text;  // payload without sigils: var name, iri body, word, ...
  int line = 1, col = 1;
};

bool word_is(const Token& t, const char* kw) {
  if (t.type != Token::Word) return false;
  if (t.text.size() != std::char_traits<char>::length(kw)) return false;
  for (std::size_t i = 0; i < t.text.size(); ++i)
    if (std::toupper(static_cast<unsigned char>(t.text[i])) != kw[i]) return false;
  return true;
}

class Scanner {
 public:
  explicit Scanner(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }
  Token next() {
    Token t = current_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, current_.line, current_.col);
  }

  Token expect(Token::Type type, const char* what) {
    if (current_.type != type) fail(std::string("expected ") + what);
    return next();
  }

  // Raw capture of a balanced `( ... )` body, quotes respected. Used by FILTER.
  std::string capture_balanced_parens() {
    skip_trivia();
    if (pos_ >= src_.size() || src_[pos_] != '(')
      throw ParseError("expected '(' after FILTER", line_, col_);
    std::string out;
    int depth = 0;
    bool in_string = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      bump(c);
      out += c;
      if (in_string) {
        if (c == '\\' && pos_ < src_.size()) {
          out += src_[pos_];
          bump(src_[pos_]);
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') in_string = true;
      if (c == '(') ++depth;
      if (c == ')' && --depth == 0) {
        advance();
        return out;
      }
    }
    throw ParseError("unterminated FILTER expression", line_, col_);
  }

 private:
  void bump(char c) {
    ++pos_;
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump(src_[pos_]);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump(c);
      } else {
        break;
      }
    }
  }

  void advance() {
    skip_trivia();
    current_ = Token{};
    current_.line = line_;
    current_.col = col_;
    if (pos_ >= src_.size()) {
      current_.type = Token::End;
      return;
    }
    char c = src_[pos_];
    switch (c) {
      case '{': current_.type = Token::LBrace; bump(c); return;
      case '}': current_.type = Token::RBrace; bump(c); return;
      case '.': current_.type = Token::Dot; bump(c); return;
      case '*': current_.type = Token::Star; bump(c); return;
      default: break;
    }
    if (c == '?') {
      bump(c);
      std::string name;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '_')) {
        name += src_[pos_];
        bump(src_[pos_]);
      }
      if (name.empty()) throw ParseError("empty variable name", current_.line, current_.col);
      current_.type = Token::Var;
      current_.text = name;
      return;
    }
    if (c == '<') {
      bump(c);
      std::string body;
      while (pos_ < src_.size() && src_[pos_] != '>') {
        body += src_[pos_];
        bump(src_[pos_]);
      }
      if (pos_ >= src_.size()) throw ParseError("unterminated IRI", current_.line, current_.col);
      bump('>');
      current_.type = Token::Iri;
      current_.text = body;
      return;
    }
    if (c == '"') {
      bump(c);
      std::string body;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
          bump(src_[pos_]);
          body += src_[pos_];
          bump(src_[pos_]);
        } else {
          body += src_[pos_];
          bump(src_[pos_]);
        }
      }
      if (pos_ >= src_.size())
        throw ParseError("unterminated literal", current_.line, current_.col);
      bump('"');
      current_.type = Token::Literal;
      current_.text = body;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '_' || src_[pos_] == '-' ||
                                    src_[pos_] == '.' || src_[pos_] == ':')) {
        // A '.' ends the token unless it is inside a prefixed-name local part
        // followed by more name characters (q1.2 style names do not occur in
        // the subset; treat '.' as a separator).
        if (src_[pos_] == '.') break;
        word += src_[pos_];
        bump(src_[pos_]);
      }
      if (word.find(':') != std::string::npos)
        current_.type = Token::PName;
      else
        current_.type = Token::Word;
      current_.text = word;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", current_.line,
                     current_.col);
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token current_;
};

bool is_control_word(const Token& t) {
  return word_is(t, "OPTIONAL") || word_is(t, "UNION") || word_is(t, "FILTER") ||
         word_is(t, "SERVICE") || word_is(t, "SELECT") || word_is(t, "CONSTRUCT") ||
         word_is(t, "WHERE") || word_is(t, "PREFIX") || word_is(t, "DISTINCT");
}

class Parser {
 public:
  Parser(const std::string& text, const ParseOptions& opts) : sc_(text), opts_(opts) {}

  Query parse_query_text() {
    parse_prologue();
    Query q;
    const Token& head = sc_.peek();
    if (word_is(head, "SELECT")) {
      sc_.next();
      q.form = QueryForm::Select;
      if (word_is(sc_.peek(), "DISTINCT")) {
        sc_.next();
        q.distinct = true;
      }
      if (sc_.peek().type == Token::Star) {
        sc_.next();
        q.star = true;
      } else {
        while (sc_.peek().type == Token::Var) q.projection.push_back(sc_.next().text);
        if (q.projection.empty()) sc_.fail("expected projection variables or '*'");
      }
      if (!word_is(sc_.peek(), "WHERE")) sc_.fail("expected WHERE");
      sc_.next();
      parse_group(q);
    } else if (word_is(head, "CONSTRUCT")) {
      sc_.next();
      q.form = QueryForm::Construct;
      if (!word_is(sc_.peek(), "WHERE")) sc_.fail("expected WHERE after CONSTRUCT");
      sc_.next();
      sc_.expect(Token::LBrace, "'{'");
      PatternBlock block;
      parse_triples(block.patterns);
      sc_.expect(Token::RBrace, "'}'");
      q.blocks.push_back(std::move(block));
    } else {
      sc_.fail("expected SELECT or CONSTRUCT");
    }
    if (sc_.peek().type != Token::End) sc_.fail("trailing input after query");
    if (triple_patterns(q).empty()) sc_.fail("query has no triple patterns");
    return q;
  }

  ViewDefinition parse_view_text() {
    parse_prologue();
    if (word_is(sc_.peek(), "SELECT"))
      sc_.fail("views are CONSTRUCT WHERE queries, got SELECT");
    if (!word_is(sc_.peek(), "CONSTRUCT")) sc_.fail("expected CONSTRUCT");
    sc_.next();
    if (!word_is(sc_.peek(), "WHERE")) sc_.fail("expected WHERE after CONSTRUCT");
    sc_.next();
    sc_.expect(Token::LBrace, "'{'");
    ViewDefinition v;
    parse_triples(v.body);
    sc_.expect(Token::RBrace, "'}'");
    if (sc_.peek().type != Token::End) sc_.fail("trailing input after view");
    if (v.body.empty()) sc_.fail("view body is empty");
    return v;
  }

 private:
  void parse_prologue() {
    while (word_is(sc_.peek(), "PREFIX")) {
      sc_.next();
      Token name = sc_.peek();
      std::string prefix;
      if (name.type == Token::PName && name.text.back() == ':') {
        prefix = name.text.substr(0, name.text.size() - 1);
        sc_.next();
      } else {
        sc_.fail("expected 'name:' after PREFIX");
      }
      Token iri = sc_.expect(Token::Iri, "IRI");
      prefixes_[prefix] = iri.text;
    }
  }

  Term term_from(const Token& t) {
    switch (t.type) {
      case Token::Var: return Term::variable(t.text);
      case Token::Iri: return Term::iri(t.text);
      case Token::Literal: return Term::literal(t.text);
      case Token::Word: return Term::bare(t.text);
      case Token::PName: {
        auto colon = t.text.find(':');
        std::string prefix = t.text.substr(0, colon);
        std::string local = t.text.substr(colon + 1);
        auto it = prefixes_.find(prefix);
        if (it == prefixes_.end())
          throw ParseError("undeclared prefix '" + prefix + ":'", t.line, t.col);
        return Term::iri(it->second + local);
      }
      default:
        throw ParseError("expected a term", t.line, t.col);
    }
  }

  bool at_term() {
    const Token& t = sc_.peek();
    if (t.type == Token::Var || t.type == Token::Iri || t.type == Token::Literal ||
        t.type == Token::PName)
      return true;
    return t.type == Token::Word && !is_control_word(t);
  }

  void parse_triples(std::vector<TriplePattern>& out) {
    while (at_term()) {
      TriplePattern p;
      p.subject = term_from(sc_.next());
      if (!at_term()) sc_.fail("expected predicate term");
      p.predicate = term_from(sc_.next());
      if (!at_term()) sc_.fail("expected object term");
      p.object = term_from(sc_.next());
      out.push_back(std::move(p));
      if (sc_.peek().type == Token::Dot)
        sc_.next();
      else
        break;  // trailing '.' optional before '}' or a control keyword
    }
  }

  // SERVICE <iri> { Triples }; patterns flow into `sink`, annotation recorded.
  void parse_service(Query& q, std::vector<TriplePattern>& sink) {
    Token kw = sc_.next();  // SERVICE
    if (!opts_.allow_service)
      throw UnsupportedError("SERVICE clauses are not part of the core grammar (line " +
                             std::to_string(kw.line) + ")");
    Token url = sc_.expect(Token::Iri, "endpoint IRI after SERVICE");
    sc_.expect(Token::LBrace, "'{'");
    ServiceBlock sb;
    sb.endpoint_url = url.text;
    parse_triples(sb.patterns);
    sc_.expect(Token::RBrace, "'}'");
    sink.insert(sink.end(), sb.patterns.begin(), sb.patterns.end());
    q.services.push_back(std::move(sb));
  }

  // Inner group content: triples, SERVICE blocks and nested union chains; all
  // patterns collect into `sink`, filters into the query.
  void parse_inner_content(Query& q, std::vector<TriplePattern>& sink) {
    while (true) {
      const Token& t = sc_.peek();
      if (t.type == Token::RBrace) return;
      if (word_is(t, "FILTER")) {
        sc_.next();
        q.filters.push_back(sc_.capture_balanced_parens());
      } else if (word_is(t, "SERVICE")) {
        parse_service(q, sink);
      } else if (t.type == Token::LBrace) {
        parse_union_chain_into(q, sink);
      } else if (at_term()) {
        parse_triples(sink);
      } else {
        sc_.fail("unexpected token in group");
      }
    }
  }

  // '{' inner '}' UNION '{' inner '}' [UNION ...]; all branch patterns go to
  // one sink (used inside OPTIONAL and union branches of rendered queries).
  void parse_union_chain_into(Query& q, std::vector<TriplePattern>& sink) {
    sc_.expect(Token::LBrace, "'{'");
    parse_inner_content(q, sink);
    sc_.expect(Token::RBrace, "'}'");
    if (!word_is(sc_.peek(), "UNION")) sc_.fail("expected UNION after group");
    while (word_is(sc_.peek(), "UNION")) {
      sc_.next();
      sc_.expect(Token::LBrace, "'{'");
      parse_inner_content(q, sink);
      sc_.expect(Token::RBrace, "'}'");
    }
  }

  void parse_group(Query& q) {
    sc_.expect(Token::LBrace, "'{'");
    while (true) {
      const Token& t = sc_.peek();
      if (t.type == Token::RBrace) {
        sc_.next();
        return;
      }
      if (t.type == Token::End) sc_.fail("unterminated group");
      if (word_is(t, "OPTIONAL")) {
        sc_.next();
        sc_.expect(Token::LBrace, "'{'");
        PatternBlock block;
        block.kind = BlockKind::Optional;
        parse_inner_content(q, block.patterns);
        sc_.expect(Token::RBrace, "'}'");
        if (block.patterns.empty()) sc_.fail("empty OPTIONAL group");
        q.blocks.push_back(std::move(block));
      } else if (word_is(t, "FILTER")) {
        sc_.next();
        q.filters.push_back(sc_.capture_balanced_parens());
      } else if (word_is(t, "SERVICE")) {
        PatternBlock block;
        block.kind = BlockKind::Basic;
        parse_service(q, block.patterns);
        q.blocks.push_back(std::move(block));
      } else if (t.type == Token::LBrace) {
        parse_union_branches(q);
      } else if (at_term()) {
        PatternBlock block;
        block.kind = BlockKind::Basic;
        parse_triples(block.patterns);
        q.blocks.push_back(std::move(block));
      } else {
        sc_.fail("unexpected token in group");
      }
    }
  }

  // Top-level '{' ... '}' UNION '{' ... '}': one UnionBranch block per branch.
  void parse_union_branches(Query& q) {
    auto parse_branch = [&]() {
      sc_.expect(Token::LBrace, "'{'");
      PatternBlock block;
      block.kind = BlockKind::UnionBranch;
      parse_inner_content(q, block.patterns);
      sc_.expect(Token::RBrace, "'}'");
      if (block.patterns.empty()) sc_.fail("empty UNION branch");
      q.blocks.push_back(std::move(block));
    };
    parse_branch();
    if (!word_is(sc_.peek(), "UNION")) sc_.fail("expected UNION after group");
    while (word_is(sc_.peek(), "UNION")) {
      sc_.next();
      parse_branch();
    }
  }

  Scanner sc_;
  ParseOptions opts_;
  std::map<std::string, std::string> prefixes_;
};

}  // namespace

std::string pattern_to_string(const TriplePattern& p) {
  return term_to_string(p.subject) + " " + term_to_string(p.predicate) + " " +
         term_to_string(p.object);
}

Query parse_query(const std::string& text, const ParseOptions& opts) {
  return Parser(text, opts).parse_query_text();
}

ViewDefinition parse_view(const std::string& text) {
  return Parser(text, {}).parse_view_text();
}

std::vector<TriplePattern> triple_patterns(const Query& q) {
  std::vector<TriplePattern> out;
  for (const PatternBlock& b : q.blocks)
    out.insert(out.end(), b.patterns.begin(), b.patterns.end());
  return out;
}

namespace {

void print_patterns(std::ostringstream& out, const std::vector<TriplePattern>& pats,
                    const std::string& indent) {
  for (const TriplePattern& p : pats) out << indent << pattern_to_string(p) << " .\n";
}

}  // namespace

std::string print_query(const Query& q) {
  std::ostringstream out;
  if (q.form == QueryForm::Construct) {
    out << "CONSTRUCT WHERE {\n";
    for (const PatternBlock& b : q.blocks) print_patterns(out, b.patterns, "  ");
    out << "}\n";
    return out.str();
  }
  out << "SELECT";
  if (q.distinct) out << " DISTINCT";
  if (q.star) {
    out << " *";
  } else {
    for (const auto& v : q.projection) out << " ?" << v;
  }
  out << "\nWHERE {\n";
  for (std::size_t i = 0; i < q.blocks.size(); ++i) {
    const PatternBlock& b = q.blocks[i];
    switch (b.kind) {
      case BlockKind::Basic:
        print_patterns(out, b.patterns, "  ");
        break;
      case BlockKind::Optional:
        out << "  OPTIONAL {\n";
        print_patterns(out, b.patterns, "    ");
        out << "  }\n";
        break;
      case BlockKind::UnionBranch: {
        // merge the run of adjacent branches into one chain
        out << "  {\n";
        print_patterns(out, b.patterns, "    ");
        out << "  }";
        while (i + 1 < q.blocks.size() && q.blocks[i + 1].kind == BlockKind::UnionBranch) {
          ++i;
          out << " UNION {\n";
          print_patterns(out, q.blocks[i].patterns, "    ");
          out << "  }";
        }
        out << "\n";
        break;
      }
    }
  }
  for (const auto& f : q.filters) out << "  FILTER " << f << "\n";
  out << "}\n";
  return out.str();
}

std::string print_view(const ViewDefinition& v) {
  std::ostringstream out;
  out << "CONSTRUCT WHERE {";
  for (std::size_t i = 0; i < v.body.size(); ++i) {
    out << " " << pattern_to_string(v.body[i]);
    if (i + 1 < v.body.size()) out << " .";
  }
  out << " }";
  return out.str();
}

namespace {

class ServiceRenderer {
 public:
  ServiceRenderer(const SelectionPlan& plan, const std::map<std::string, std::string>& urls)
      : urls_(urls) {
    for (const Assignment& a : plan.assignments) by_index_[a.index] = &a;
  }

  void emit(std::ostringstream& out, const TriplePattern& p, const std::string& indent) {
    auto it = by_index_.find(next_index_++);
    if (it == by_index_.end())
      throw ValidationError("plan does not cover every triple pattern of the query");
    const Assignment& a = *it->second;
    if (a.endpoints.empty()) {
      out << indent << "# warning: no sources selected for this pattern\n";
      out << indent << pattern_to_string(p) << " .\n";
      return;
    }
    if (a.endpoints.size() == 1) {
      out << indent << service_clause(a.endpoints[0], p) << "\n";
      return;
    }
    for (std::size_t i = 0; i < a.endpoints.size(); ++i) {
      out << indent << (i == 0 ? "{ " : "UNION { ") << service_clause(a.endpoints[i], p)
          << " }\n";
    }
  }

 private:
  std::string service_clause(const std::string& endpoint, const TriplePattern& p) {
    auto it = urls_.find(endpoint);
    if (it == urls_.end() || it->second.empty())
      throw ValidationError("endpoint '" + endpoint + "' in the plan has no URL");
    return "SERVICE <" + it->second + "> { " + pattern_to_string(p) + " . }";
  }

  const std::map<std::string, std::string>& urls_;
  std::map<std::size_t, const Assignment*> by_index_;
  std::size_t next_index_ = 0;
};

}  // namespace

std::string render_service_query(const Query& q, const SelectionPlan& plan,
                                 const std::map<std::string, std::string>& endpoint_urls) {
  ServiceRenderer renderer(plan, endpoint_urls);
  std::ostringstream out;
  if (q.form == QueryForm::Construct) out << "CONSTRUCT";
  else {
    out << "SELECT";
    if (q.distinct) out << " DISTINCT";
    if (q.star) out << " *";
    else
      for (const auto& v : q.projection) out << " ?" << v;
  }
  out << "\nWHERE {\n";
  for (std::size_t i = 0; i < q.blocks.size(); ++i) {
    const PatternBlock& b = q.blocks[i];
    switch (b.kind) {
      case BlockKind::Basic:
        for (const TriplePattern& p : b.patterns) renderer.emit(out, p, "  ");
        break;
      case BlockKind::Optional:
        out << "  OPTIONAL {\n";
        for (const TriplePattern& p : b.patterns) renderer.emit(out, p, "    ");
        out << "  }\n";
        break;
      case BlockKind::UnionBranch: {
        out << "  {\n";
        for (const TriplePattern& p : b.patterns) renderer.emit(out, p, "    ");
        out << "  }";
        while (i + 1 < q.blocks.size() && q.blocks[i + 1].kind == BlockKind::UnionBranch) {
          ++i;
          out << " UNION {\n";
          for (const TriplePattern& p : q.blocks[i].patterns) renderer.emit(out, p, "    ");
          out << "  }";
        }
        out << "\n";
        break;
      }
    }
  }
  for (const auto& f : q.filters) out << "  FILTER " << f << "\n";
  out << "}\n";
  return out.str();
}

}  // namespace fedra
