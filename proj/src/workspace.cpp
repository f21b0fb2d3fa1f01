#include "workbench/workspace.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "workbench/error.hpp"

namespace wb {
namespace {

struct Token {
  enum class Kind { Ident, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t col = 1;
};

// Identifiers are [A-Za-z0-9_]+ (bare numbers serve as arities); symbols are
// the single characters {}();:,|=/ plus the two-character `<=`.
class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '\n') {
        ++pos_;
        ++line_;
        col_ = 1;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
        ++col_;
      } else {
        break;
      }
    }
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) {
      tok_ = {Token::Kind::End, "", line_, col_};
      return;
    }
    char c = text_[pos_];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        ++pos_;
      tok_.kind = Token::Kind::Ident;
      tok_.text = std::string(text_.substr(start, pos_ - start));
      col_ += pos_ - start;
      return;
    }
    if (c == '<' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
      tok_ = {Token::Kind::Symbol, "<=", line_, col_};
      pos_ += 2;
      col_ += 2;
      return;
    }
    if (std::string_view("{}();:,|=/").find(c) != std::string_view::npos) {
      tok_ = {Token::Kind::Symbol, std::string(1, c), line_, col_};
      ++pos_;
      ++col_;
      return;
    }
    throw ParseError(line_, col_, "unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  Token tok_;
};

[[noreturn]] void fail(const Token& at, const std::string& msg) {
  throw ParseError(at.line, at.col, msg);
}

class Parser {
 public:
  Parser(Workspace& ws, std::string_view text, LoadOptions opts)
      : ws_(ws), lex_(text), opts_(opts) {}

  void run() {
    while (lex_.peek().kind != Token::Kind::End) {
      Token head = expectIdent("'algebra', 'signature' or 'structure'");
      if (head.text == "algebra")
        parseAlgebra();
      else if (head.text == "signature")
        parseSignature();
      else if (head.text == "structure")
        parseStructure();
      else
        fail(head, "expected 'algebra', 'signature' or 'structure', got '" +
                       head.text + "'");
    }
  }

 private:
  Token expectIdent(const std::string& what) {
    Token t = lex_.next();
    if (t.kind != Token::Kind::Ident)
      fail(t, "expected " + what + ", got '" + (t.text.empty() ? "end of input" : t.text) + "'");
    return t;
  }

  Token expectSymbol(const std::string& sym) {
    Token t = lex_.next();
    if (t.kind != Token::Kind::Symbol || t.text != sym)
      fail(t, "expected '" + sym + "', got '" +
                  (t.text.empty() ? "end of input" : t.text) + "'");
    return t;
  }

  bool trySymbol(const std::string& sym) {
    if (lex_.peek().kind == Token::Kind::Symbol && lex_.peek().text == sym) {
      lex_.next();
      return true;
    }
    return false;
  }

  bool tryKeyword(const std::string& kw) {
    if (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == kw) {
      lex_.next();
      return true;
    }
    return false;
  }

  void expectKeyword(const std::string& kw) {
    Token t = lex_.next();
    if (t.kind != Token::Kind::Ident || t.text != kw)
      fail(t, "expected '" + kw + "', got '" +
                  (t.text.empty() ? "end of input" : t.text) + "'");
  }

  Elem resolveElem(const HeytingAlgebra& omega, const Token& tok) {
    auto e = omega.elem(tok.text);
    if (!e)
      fail(tok, "algebra " + omega.label() + " has no element named '" +
                    tok.text + "'");
    return *e;
  }

  void parseAlgebra() {
    Token name = expectIdent("an algebra name");
    if (ws_.algebras.count(name.text))
      fail(name, "algebra '" + name.text + "' is already defined");
    expectSymbol("{");
    expectKeyword("elements");
    expectSymbol(":");
    std::vector<std::string> elems;
    do {
      elems.push_back(expectIdent("an element name").text);
    } while (trySymbol(","));
    expectSymbol(";");
    std::vector<std::pair<std::string, std::string>> order;
    if (tryKeyword("order")) {
      expectSymbol(":");
      do {
        std::string a = expectIdent("an element name").text;
        expectSymbol("<=");
        std::string b = expectIdent("an element name").text;
        order.emplace_back(std::move(a), std::move(b));
      } while (trySymbol(","));
      expectSymbol(";");
    }
    expectSymbol("}");
    auto alg = std::make_shared<HeytingAlgebra>(
        HeytingAlgebra::fromOrderRelation(std::move(elems), order));
    alg->setLabel(name.text);
    ws_.algebras.emplace(name.text, std::move(alg));
  }

  void parseSignature() {
    Token name = expectIdent("a signature name");
    if (ws_.signatures.count(name.text))
      fail(name, "signature '" + name.text + "' is already defined");
    auto sig = std::make_shared<Signature>();
    sig->name = name.text;
    expectSymbol("{");
    auto checkFresh = [&](const Token& sym) {
      if (sig->rel(sym.text) || sig->fun(sym.text) || sig->cnst(sym.text))
        fail(sym, "symbol '" + sym.text + "' is declared twice in signature '" +
                      name.text + "'");
    };
    while (!trySymbol("}")) {
      Token kw = expectIdent("'rel', 'fun', 'const' or '}'");
      if (kw.text == "rel" || kw.text == "fun") {
        Token sym = expectIdent("a symbol name");
        checkFresh(sym);
        expectSymbol("/");
        Token ar = expectIdent("an arity");
        int arity = 0;
        for (char c : ar.text) {
          if (!std::isdigit(static_cast<unsigned char>(c)))
            fail(ar, "expected an arity, got '" + ar.text + "'");
          arity = arity * 10 + (c - '0');
        }
        if (arity < 1) fail(ar, "symbol arity must be at least 1");
        if (kw.text == "rel")
          sig->rels.push_back({sym.text, arity});
        else
          sig->funs.push_back({sym.text, arity});
      } else if (kw.text == "const") {
        Token sym = expectIdent("a constant name");
        checkFresh(sym);
        std::string extent;
        if (tryKeyword("extent")) extent = expectIdent("an element name").text;
        sig->consts.push_back({sym.text, std::move(extent)});
      } else {
        fail(kw, "expected 'rel', 'fun' or 'const', got '" + kw.text + "'");
      }
      expectSymbol(";");
    }
    ws_.signatures.emplace(name.text, std::move(sig));
  }

  // sexpr := NAME ('|' ELEM)?  rendered back to the builder's "gen|elem"
  // string form; bare names pass through unchanged.
  std::string parseSectionExpr(const HeytingAlgebra& omega) {
    std::string expr = expectIdent("a section name").text;
    if (trySymbol("|")) {
      Token e = expectIdent("an element name");
      resolveElem(omega, e);  // fail here, with a position, not in the builder
      expr += "|" + e.text;
    }
    return expr;
  }

  void parseStructure() {
    Token name = expectIdent("a structure name");
    if (ws_.structures.count(name.text))
      fail(name, "structure '" + name.text + "' is already defined");
    for (const auto& issue : ws_.issues)
      if (issue.name == name.text)
        fail(name, "structure '" + name.text + "' is already defined");
    expectKeyword("over");
    Token algName = expectIdent("an algebra name");
    auto algIt = ws_.algebras.find(algName.text);
    if (algIt == ws_.algebras.end())
      fail(algName, "unknown algebra '" + algName.text + "'");
    const HeytingAlgebra& omega = *algIt->second;
    expectKeyword("sig");
    Token sigName = expectIdent("a signature name");
    auto sigIt = ws_.signatures.find(sigName.text);
    if (sigIt == ws_.signatures.end())
      fail(sigName, "unknown signature '" + sigName.text + "'");
    const Signature& sig = *sigIt->second;

    StructureBuilder builder(omega, sig, name.text);
    Token open = expectSymbol("{");
    while (!trySymbol("}")) {
      Token kw = expectIdent("a structure declaration or '}'");
      try {
        if (kw.text == "section") {
          Token sec = expectIdent("a section name");
          Elem extent = omega.top();
          if (tryKeyword("extent"))
            extent = resolveElem(omega, expectIdent("an element name"));
          builder.addSection(sec.text, extent);
        } else if (kw.text == "identify") {
          auto [lhs, lp] = splitExpr(omega, parseSectionExpr(omega));
          expectSymbol("=");
          auto [rhs, rp] = splitExpr(omega, parseSectionExpr(omega));
          builder.identify(lhs, lp, rhs, rp);
        } else if (kw.text == "rel") {
          Token sym = expectIdent("a relation name");
          auto args = parseArgs(omega);
          expectSymbol("=");
          Elem value = resolveElem(omega, expectIdent("an element name"));
          builder.setRel(sym.text, args, value);
        } else if (kw.text == "fun") {
          Token sym = expectIdent("a function name");
          auto args = parseArgs(omega);
          expectSymbol("=");
          builder.setFun(sym.text, args, parseSectionExpr(omega));
        } else if (kw.text == "const") {
          Token sym = expectIdent("a constant name");
          expectSymbol("=");
          builder.setConst(sym.text, parseSectionExpr(omega));
        } else {
          fail(kw, "expected 'section', 'identify', 'rel', 'fun' or 'const', got '" +
                       kw.text + "'");
        }
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        // Unknown symbols and similar declaration mistakes surface from the
        // builder without positions; pin them to the declaration keyword.
        fail(kw, e.what());
      }
      expectSymbol(";");
    }

    try {
      auto [m, report] = builder.build(!opts_.laxConstants);
      if (report.ok())
        ws_.structures.emplace(name.text, std::move(m));
      else
        ws_.issues.push_back({name.text, std::move(report)});
    } catch (const Error& e) {
      fail(open, e.what());
    }
  }

  // "gen|elem" -> (gen, elem id); bare "gen" -> (gen, top).
  std::pair<std::string, Elem> splitExpr(const HeytingAlgebra& omega,
                                         const std::string& expr) {
    auto bar = expr.find('|');
    if (bar == std::string::npos) return {expr, omega.top()};
    return {expr.substr(0, bar), omega.elemOrThrow(expr.substr(bar + 1))};
  }

  std::vector<std::string> parseArgs(const HeytingAlgebra& omega) {
    expectSymbol("(");
    std::vector<std::string> args;
    if (!trySymbol(")")) {
      do {
        args.push_back(parseSectionExpr(omega));
      } while (trySymbol(","));
      expectSymbol(")");
    }
    return args;
  }

  Workspace& ws_;
  Lexer lex_;
  LoadOptions opts_;
};

}  // namespace

const HeytingAlgebra& Workspace::algebra(const std::string& name) const {
  auto it = algebras.find(name);
  if (it == algebras.end()) throw ConfigError("unknown algebra '" + name + "'");
  return *it->second;
}

const Signature& Workspace::signature(const std::string& name) const {
  auto it = signatures.find(name);
  if (it == signatures.end())
    throw ConfigError("unknown signature '" + name + "'");
  return *it->second;
}

const Structure& Workspace::structure(const std::string& name) const {
  return *structurePtr(name);
}

StructurePtr Workspace::structurePtr(const std::string& name) const {
  auto it = structures.find(name);
  if (it != structures.end()) return it->second;
  for (const auto& issue : issues)
    if (issue.name == name)
      throw ConfigError("structure '" + name + "' failed validation: " +
                        issue.report.summary());
  throw ConfigError("unknown structure '" + name + "'");
}

void loadWorkspaceText(Workspace& ws, std::string_view text, LoadOptions opts) {
  Parser(ws, text, opts).run();
}

Workspace loadWorkspace(std::string_view text, LoadOptions opts) {
  Workspace ws;
  loadWorkspaceText(ws, text, opts);
  return ws;
}

Workspace loadWorkspaceFiles(const std::vector<std::string>& paths,
                             LoadOptions opts) {
  Workspace ws;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read workspace file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    loadWorkspaceText(ws, buf.str(), opts);
  }
  return ws;
}

}  // namespace wb
