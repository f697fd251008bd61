#include <algorithm>
#include <cctype>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <unordered_map>

#include "svcnet/io.hpp"
#include "svcnet/log.hpp"

namespace svcnet {

namespace {

using json = nlohmann::json;

struct PositionedEdge {
  InformationFlow flow;
  std::string where;
};

void add_warning(SdgDocument& doc, std::string message) {
  log::warn(message);
  doc.warnings.push_back(std::move(message));
}

// Self-loops and repeated edges are dropped with a warning or rejected.
void accept_edges(SdgDocument& doc, std::vector<PositionedEdge> edges, RepairPolicy policy) {
  std::set<std::pair<std::string, std::string>> seen;
  for (auto& e : edges) {
    const auto& [source, target] = e.flow;
    if (source == target) {
      const std::string message = e.where + ": self-loop on '" + source + "'";
      if (policy == RepairPolicy::Strict) throw ParseError(message);
      add_warning(doc, message + " dropped");
      continue;
    }
    if (!seen.emplace(source, target).second) {
      const std::string message = e.where + ": duplicate edge '" + source + "' -> '" + target + "'";
      if (policy == RepairPolicy::Strict) throw ParseError(message);
      add_warning(doc, message + " dropped");
      continue;
    }
    doc.edges.push_back(std::move(e.flow));
  }
}

std::string json_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path + ": expected a string");
  auto s = j.get<std::string>();
  if (s.empty()) throw ParseError(path + ": must not be empty");
  return s;
}

}  // namespace

ServiceDependencyGraph SdgDocument::to_graph() const {
  std::vector<ComponentNode> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back({n.name, n.kind.value_or(NodeKind::Service)});
  return ServiceDependencyGraph(std::move(out), edges);
}

SdgDocument SdgDocument::from_graph(const ServiceDependencyGraph& g) {
  SdgDocument doc;
  for (const auto& n : g.nodes()) doc.nodes.push_back({n.name, n.kind});
  doc.edges = g.edges();
  return doc;
}

SdgDocument parse_sdg_json(std::string_view text, RepairPolicy policy) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("$: expected an object");
  for (const auto& [key, value] : root.items())
    if (key != "nodes" && key != "edges" && key != "metadata")
      throw ParseError("$." + key + ": unknown key");
  if (!root.contains("nodes") || !root["nodes"].is_array())
    throw ParseError("$.nodes: expected an array");
  if (!root.contains("edges") || !root["edges"].is_array())
    throw ParseError("$.edges: expected an array");

  SdgDocument doc;
  if (root.contains("metadata")) {
    const auto& meta = root["metadata"];
    if (!meta.is_object()) throw ParseError("$.metadata: expected an object");
    for (const auto& [key, value] : meta.items()) {
      if (!value.is_string()) throw ParseError("$.metadata." + key + ": expected a string");
      doc.metadata[key] = value.get<std::string>();
    }
  }

  std::unordered_map<std::string, std::size_t> index;
  const auto& nodes = root["nodes"];
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "$.nodes[" + std::to_string(i) + "]";
    const auto& n = nodes[i];
    if (!n.is_object()) throw ParseError(path + ": expected an object");
    for (const auto& [key, value] : n.items())
      if (key != "name" && key != "kind") throw ParseError(path + "." + key + ": unknown key");
    if (!n.contains("name")) throw ParseError(path + ": missing 'name'");
    SdgNode node{json_string(n["name"], path + ".name"), std::nullopt};
    if (n.contains("kind")) {
      auto kind = parse_node_kind(json_string(n["kind"], path + ".kind"));
      if (!kind) throw ParseError(path + ".kind: unknown kind '" + n["kind"].get<std::string>() + "'");
      node.kind = kind;
    }
    if (auto [it, fresh] = index.emplace(node.name, i); !fresh)
      throw ParseError(path + ": duplicate node name '" + node.name + "' (first at $.nodes[" +
                       std::to_string(it->second) + "])");
    doc.nodes.push_back(std::move(node));
  }

  std::vector<PositionedEdge> edges;
  std::set<std::string> dropped_attributes;
  const auto& raw_edges = root["edges"];
  for (std::size_t i = 0; i < raw_edges.size(); ++i) {
    const std::string path = "$.edges[" + std::to_string(i) + "]";
    const auto& e = raw_edges[i];
    if (!e.is_object()) throw ParseError(path + ": expected an object");
    if (!e.contains("source")) throw ParseError(path + ": missing 'source'");
    if (!e.contains("target")) throw ParseError(path + ": missing 'target'");
    InformationFlow flow{json_string(e["source"], path + ".source"),
                         json_string(e["target"], path + ".target")};
    for (const auto* end : {&flow.source, &flow.target})
      if (!index.contains(*end))
        throw ParseError(path + ": edge endpoint '" + *end + "' is not a declared node");
    for (const auto& [key, value] : e.items())
      if (key != "source" && key != "target") dropped_attributes.insert(key);
    edges.push_back({std::move(flow), path});
  }
  if (!dropped_attributes.empty()) {
    std::string keys;
    for (const auto& k : dropped_attributes) keys += (keys.empty() ? "" : ", ") + k;
    add_warning(doc, "edge attributes dropped: " + keys);
  }
  accept_edges(doc, std::move(edges), policy);
  return doc;
}

std::string serialize_sdg_json(const SdgDocument& doc) {
  nlohmann::ordered_json root;
  if (!doc.metadata.empty()) {
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : doc.metadata) meta[k] = v;
    root["metadata"] = std::move(meta);
  }
  root["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : doc.nodes) {
    nlohmann::ordered_json j{{"name", n.name}};
    if (n.kind) j["kind"] = to_string(*n.kind);
    root["nodes"].push_back(std::move(j));
  }
  root["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : doc.edges) root["edges"].push_back({{"source", e.source}, {"target", e.target}});
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// DOT

namespace {

enum class Tok { Id, QuotedId, Arrow, UndirectedEdge, LBrace, RBrace, LBracket, RBracket, Equals, Comma, Semi, End };

struct Token {
  Tok type;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class DotLexer {
 public:
  explicit DotLexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space_and_comments();
    const std::size_t line = line_, col = col_;
    if (pos_ >= text_.size()) return {Tok::End, "", line, col};
    const char c = text_[pos_];
    auto single = [&](Tok t) {
      advance();
      return Token{t, std::string(1, c), line, col};
    };
    switch (c) {
      case '{': return single(Tok::LBrace);
      case '}': return single(Tok::RBrace);
      case '[': return single(Tok::LBracket);
      case ']': return single(Tok::RBracket);
      case '=': return single(Tok::Equals);
      case ',': return single(Tok::Comma);
      case ';': return single(Tok::Semi);
      case '"': return quoted(line, col);
      default: break;
    }
    if (c == '-' && pos_ + 1 < text_.size() && (text_[pos_ + 1] == '>' || text_[pos_ + 1] == '-')) {
      const bool directed = text_[pos_ + 1] == '>';
      advance();
      advance();
      return {directed ? Tok::Arrow : Tok::UndirectedEdge, directed ? "->" : "--", line, col};
    }
    if (is_id_char(c)) {
      std::string id;
      while (pos_ < text_.size() && is_id_char(text_[pos_])) {
        // "a->b" without spaces: stop before an edge operator
        if (text_[pos_] == '-' && pos_ + 1 < text_.size() &&
            (text_[pos_ + 1] == '>' || text_[pos_ + 1] == '-'))
          break;
        id += text_[pos_];
        advance();
      }
      return {Tok::Id, id, line, col};
    }
    throw error(line, col, std::string("unexpected character '") + c + "'");
  }

  static ParseError error(std::size_t line, std::size_t col, const std::string& what) {
    return ParseError(std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }

 private:
  static bool is_id_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' ||
           static_cast<unsigned char>(c) >= 0x80;
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  // Only blanks since the previous newline: '#' lines are discarded there.
  bool line_start() const {
    for (std::size_t i = pos_; i-- > 0;) {
      if (text_[i] == '\n') return true;
      if (text_[i] != ' ' && text_[i] != '\t') return false;
    }
    return true;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#' && line_start()) {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (text_.substr(pos_).starts_with("//")) {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (text_.substr(pos_).starts_with("/*")) {
        const std::size_t line = line_, col = col_;
        advance();
        advance();
        while (pos_ < text_.size() && !text_.substr(pos_).starts_with("*/")) advance();
        if (pos_ >= text_.size()) throw error(line, col, "unterminated comment");
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  Token quoted(std::size_t line, std::size_t col) {
    advance();
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
        advance();
        if (text_[pos_] != '"' && text_[pos_] != '\\') out += '\\';
      }
      out += text_[pos_];
      advance();
    }
    if (pos_ >= text_.size()) throw error(line, col, "unterminated string");
    advance();
    return {Tok::QuotedId, out, line, col};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

class DotParser {
 public:
  DotParser(std::string_view text, RepairPolicy policy) : lexer_(text), policy_(policy) {
    current_ = lexer_.next();
  }

  SdgDocument parse() {
    if (is_keyword("strict")) advance();
    if (is_keyword("graph"))
      throw DotLexer::error(current_.line, current_.column, "directed graph required");
    if (!is_keyword("digraph")) fail("expected 'digraph'");
    advance();
    if (is_id()) {
      doc_.metadata["name"] = current_.text;
      advance();
    }
    expect(Tok::LBrace, "'{'");
    while (current_.type != Tok::RBrace) {
      if (current_.type == Tok::End) fail("missing '}'");
      statement();
      if (current_.type == Tok::Semi || current_.type == Tok::Comma) advance();
    }
    advance();
    if (current_.type != Tok::End) fail("unexpected text after graph body");

    for (auto& name : order_) doc_.nodes.push_back({name, kinds_[name]});
    accept_edges(doc_, std::move(edges_), policy_);
    return std::move(doc_);
  }

 private:
  bool is_id() const { return current_.type == Tok::Id || current_.type == Tok::QuotedId; }
  bool is_keyword(std::string_view word) const {
    return current_.type == Tok::Id && lowercase(current_.text) == word;
  }
  void advance() { current_ = lexer_.next(); }
  [[noreturn]] void fail(const std::string& what) const {
    const std::string found = current_.type == Tok::End ? "end of input" : "'" + current_.text + "'";
    throw DotLexer::error(current_.line, current_.column, what + ", found " + found);
  }
  void expect(Tok t, const std::string& what) {
    if (current_.type != t) fail("expected " + what);
    advance();
  }

  void declare(const std::string& name) {
    if (kinds_.emplace(name, std::nullopt).second) order_.push_back(name);
  }

  std::vector<std::pair<std::string, std::string>> attributes() {
    std::vector<std::pair<std::string, std::string>> out;
    while (current_.type == Tok::LBracket) {
      advance();
      while (current_.type != Tok::RBracket) {
        if (!is_id()) fail("expected attribute name");
        std::string key = current_.text;
        advance();
        expect(Tok::Equals, "'='");
        if (!is_id()) fail("expected attribute value");
        out.emplace_back(std::move(key), current_.text);
        advance();
        if (current_.type == Tok::Comma || current_.type == Tok::Semi) advance();
      }
      advance();
    }
    return out;
  }

  void statement() {
    if (is_keyword("graph") || is_keyword("node") || is_keyword("edge")) {
      advance();
      if (current_.type != Tok::LBracket) fail("expected '['");
      attributes();
      return;
    }
    if (is_keyword("subgraph") || current_.type == Tok::LBrace) fail("subgraphs are not supported");
    if (!is_id()) fail("expected a node identifier");
    const Token first = current_;
    advance();
    if (current_.type == Tok::Equals) {  // graph attribute `id = id`
      advance();
      if (!is_id()) fail("expected attribute value");
      advance();
      return;
    }
    if (current_.type == Tok::UndirectedEdge)
      throw DotLexer::error(current_.line, current_.column, "directed graph required");

    std::vector<Token> chain{first};
    while (current_.type == Tok::Arrow) {
      advance();
      if (current_.type == Tok::UndirectedEdge)
        throw DotLexer::error(current_.line, current_.column, "directed graph required");
      if (!is_id()) fail("expected a node identifier after '->'");
      chain.push_back(current_);
      advance();
    }
    if (current_.type == Tok::UndirectedEdge)
      throw DotLexer::error(current_.line, current_.column, "directed graph required");
    const std::size_t attr_line = current_.line, attr_col = current_.column;
    auto attrs = attributes();

    for (const auto& t : chain) declare(t.text);
    if (chain.size() == 1) {
      for (const auto& [key, value] : attrs) {
        if (key != "kind") continue;
        auto kind = parse_node_kind(value);
        if (!kind) throw DotLexer::error(attr_line, attr_col, "unknown kind '" + value + "'");
        kinds_[first.text] = kind;
      }
      return;
    }
    if (!attrs.empty())
      add_warning(doc_, std::to_string(first.line) + ":" + std::to_string(first.column) +
                            ": edge attributes dropped");
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
      edges_.push_back({{chain[i].text, chain[i + 1].text},
                        std::to_string(chain[i].line) + ":" + std::to_string(chain[i].column)});
  }

  DotLexer lexer_;
  RepairPolicy policy_;
  Token current_{Tok::End, "", 0, 0};
  SdgDocument doc_;
  std::vector<std::string> order_;
  std::unordered_map<std::string, std::optional<NodeKind>> kinds_;
  std::vector<PositionedEdge> edges_;
};

}  // namespace

SdgDocument parse_sdg_dot(std::string_view text, RepairPolicy policy) {
  return DotParser(text, policy).parse();
}

SdgDocument load_sdg(const std::filesystem::path& path, RepairPolicy policy) {
  const auto ext = lowercase(path.extension().string());
  const std::string content = read_file(path);
  try {
    if (ext == ".json") return parse_sdg_json(content, policy);
    if (ext == ".dot" || ext == ".gv") return parse_sdg_dot(content, policy);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  throw ParseError(path.string() + ": unknown graph format (expected .json, .dot or .gv)");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace svcnet
