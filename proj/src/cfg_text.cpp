#include <cctype>
#include <charconv>
#include <sstream>

#include "persist/cfg.hpp"

namespace persist {
namespace {

struct Token {
  enum class Kind { Word, Arrow, LBrace, RBrace, Comma, Semi, At, Question, End };
  Kind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n; ++j, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t{Token::Kind::End, {}, line, col};
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      t.kind = Token::Kind::Arrow;
      t.text = "->";
      advance(2);
    } else if (is_word_char(c)) {
      std::size_t j = i;
      while (j < text.size() && is_word_char(text[j])) ++j;
      t.kind = Token::Kind::Word;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else {
      switch (c) {
        case '{': t.kind = Token::Kind::LBrace; break;
        case '}': t.kind = Token::Kind::RBrace; break;
        case ',': t.kind = Token::Kind::Comma; break;
        case ';': t.kind = Token::Kind::Semi; break;
        case '@': t.kind = Token::Kind::At; break;
        case '?': t.kind = Token::Kind::Question; break;
        default: throw ParseError(line, col, std::string("unexpected character '") + c + "'");
      }
      t.text = std::string(1, c);
      advance(1);
    }
    out.push_back(std::move(t));
  }
  out.push_back(Token{Token::Kind::End, "end of input", line, col});
  return out;
}

struct Located {
  std::string name;
  std::size_t line;
  std::size_t column;
};

struct EdgeStmt {
  Located source;
  Located target;
  AccessLabel::Kind kind = AccessLabel::Kind::Empty;
  std::vector<Located> blocks;
};

struct ScopeStmt {
  Located name;
  Located header;
  std::vector<Located> members;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  ControlFlowGraph run() {
    while (peek().kind != Token::Kind::End) statement();

    if (!entry_) throw ValidationError("missing entry declaration");
    if (!builder_.find_node(entry_->name)) builder_.add_node(entry_->name);
    builder_.set_entry(*builder_.find_node(entry_->name));

    for (auto& e : edges_) {
      NodeId s = node_ref(e.source, "edge endpoint undeclared");
      NodeId t = node_ref(e.target, "edge endpoint undeclared");
      AccessLabel label;
      if (e.kind == AccessLabel::Kind::Unknown) {
        label = AccessLabel::unknown();
      } else if (!e.blocks.empty()) {
        BlockSet set;
        for (const auto& b : e.blocks) set.insert(builder_.intern_block(b.name));
        label = AccessLabel::many(std::move(set));
      }
      builder_.add_edge(s, std::move(label), t);
    }
    for (auto& s : scopes_) {
      Scope scope;
      scope.name = s.name.name;
      scope.header = node_ref(s.header, "scope header undeclared");
      for (const auto& m : s.members) scope.members.push_back(node_ref(m, "scope member undeclared"));
      builder_.add_scope(std::move(scope));
    }
    return std::move(builder_).build();
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  Token next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const Token& t, const std::string& what) const {
    throw ParseError(t.line, t.column, what + " (found '" + t.text + "')");
  }

  Token expect(Token::Kind kind, const char* what) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + what);
    return next();
  }

  Located word(const char* what) {
    Token t = expect(Token::Kind::Word, what);
    return Located{t.text, t.line, t.column};
  }

  void keyword(const char* kw) {
    if (peek().kind != Token::Kind::Word || peek().text != kw) fail(peek(), std::string("expected '") + kw + "'");
    next();
  }

  std::optional<std::uint64_t> address() {
    if (peek().kind != Token::Kind::At) return std::nullopt;
    next();
    Token t = expect(Token::Kind::Word, "hex address");
    std::string_view digits = t.text;
    if (digits.starts_with("0x") || digits.starts_with("0X")) digits.remove_prefix(2);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value, 16);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size())
      throw ParseError(t.line, t.column, "invalid hex address '" + t.text + "'");
    return value;
  }

  NodeId node_ref(const Located& n, const char* what) {
    auto id = builder_.find_node(n.name);
    if (!id)
      throw ValidationError("line " + std::to_string(n.line) + ":" + std::to_string(n.column) + ": " + what +
                            ": '" + n.name + "'");
    return *id;
  }

  void statement() {
    Token head = peek();
    if (head.kind != Token::Kind::Word) fail(head, "expected a statement");
    next();
    if (head.text == "entry") {
      if (entry_) throw ParseError(head.line, head.column, "duplicate entry declaration");
      entry_ = word("node name");
    } else if (head.text == "node") {
      Located n = word("node name");
      auto addr = address();
      if (builder_.find_node(n.name))
        throw ValidationError("line " + std::to_string(n.line) + ":" + std::to_string(n.column) +
                              ": duplicate node declaration '" + n.name + "'");
      builder_.add_node(n.name, addr);
    } else if (head.text == "block") {
      Located b = word("block name");
      auto addr = address();
      if (builder_.find_block(b.name))
        throw ValidationError("line " + std::to_string(b.line) + ":" + std::to_string(b.column) +
                              ": duplicate block declaration '" + b.name + "'");
      builder_.add_block(b.name, addr);
    } else if (head.text == "edge") {
      EdgeStmt e;
      e.source = word("source node");
      expect(Token::Kind::Arrow, "'->'");
      e.target = word("target node");
      if (peek().kind == Token::Kind::Word && peek().text == "access") {
        next();
        label(e);
      }
      edges_.push_back(std::move(e));
    } else if (head.text == "scope") {
      ScopeStmt s;
      s.name = word("scope name");
      keyword("header");
      s.header = word("header node");
      keyword("members");
      s.members.push_back(word("member node"));
      while (peek().kind == Token::Kind::Comma) {
        next();
        s.members.push_back(word("member node"));
      }
      scopes_.push_back(std::move(s));
    } else {
      fail(head, "unknown statement");
    }
    expect(Token::Kind::Semi, "';'");
  }

  void label(EdgeStmt& e) {
    if (peek().kind == Token::Kind::Question) {
      next();
      e.kind = AccessLabel::Kind::Unknown;
    } else if (peek().kind == Token::Kind::LBrace) {
      next();
      e.kind = AccessLabel::Kind::Many;
      e.blocks.push_back(word("block name"));
      while (peek().kind == Token::Kind::Comma) {
        next();
        e.blocks.push_back(word("block name"));
      }
      expect(Token::Kind::RBrace, "'}'");
    } else {
      e.kind = AccessLabel::Kind::Single;
      e.blocks.push_back(word("access label"));
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  CfgBuilder builder_;
  std::optional<Located> entry_;
  std::vector<EdgeStmt> edges_;
  std::vector<ScopeStmt> scopes_;
};

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

}  // namespace

ControlFlowGraph parse_cfg(std::string_view text) { return Parser(text).run(); }

std::string print_cfg(const ControlFlowGraph& cfg) {
  std::ostringstream os;
  os << "entry " << cfg.node(cfg.entry()).name << ";\n";
  for (const auto& n : cfg.nodes()) {
    os << "node " << n.name;
    if (n.address) os << " @ " << hex(*n.address);
    os << ";\n";
  }
  for (const auto& b : cfg.blocks()) {
    os << "block " << b.name;
    if (b.address) os << " @ " << hex(*b.address);
    os << ";\n";
  }
  for (const auto& e : cfg.edges()) {
    os << "edge " << cfg.node(e.source).name << " -> " << cfg.node(e.target).name;
    switch (e.label.kind()) {
      case AccessLabel::Kind::Empty: break;
      case AccessLabel::Kind::Unknown: os << " access ?"; break;
      case AccessLabel::Kind::Single: os << " access " << cfg.block(e.label.block()).name; break;
      case AccessLabel::Kind::Many: {
        os << " access {";
        const char* sep = "";
        for (BlockId b : e.label.blocks()) {
          os << sep << cfg.block(b).name;
          sep = ",";
        }
        os << "}";
        break;
      }
    }
    os << ";\n";
  }
  for (const auto& s : cfg.scopes()) {
    os << "scope " << s.name << " header " << cfg.node(s.header).name << " members ";
    const char* sep = "";
    for (NodeId m : s.members) {
      os << sep << cfg.node(m).name;
      sep = ",";
    }
    os << ";\n";
  }
  return os.str();
}

}  // namespace persist
