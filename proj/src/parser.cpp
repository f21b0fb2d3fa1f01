#include "workbench/parser.hpp"

#include <cctype>
#include <map>
#include <set>

#include "workbench/heyting.hpp"
#include "workbench/presheaf.hpp"

namespace wb {

namespace {

struct Token {
  enum class Kind { Ident, Punct, End };
  Kind kind;
  std::string text;
  std::size_t line, col;
};

class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(tok_.line, tok_.col, msg);
  }

private:
  void advance() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') { ++line_; col_ = 1; ++pos_; continue; }
      if (std::isspace(static_cast<unsigned char>(c))) { ++col_; ++pos_; continue; }
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
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
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      tok_ = {Token::Kind::Ident, std::string(text_.substr(start, pos_ - start)),
              line_, col_};
      col_ += pos_ - start;
      return;
    }
    // Multi-character punctuation: -> /\ \/
    for (std::string_view p : {"->", "/\\", "\\/"}) {
      if (text_.substr(pos_).starts_with(p)) {
        tok_ = {Token::Kind::Punct, std::string(p), line_, col_};
        pos_ += p.size();
        col_ += p.size();
        return;
      }
    }
    tok_ = {Token::Kind::Punct, std::string(1, c), line_, col_};
    ++pos_;
    ++col_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1, col_ = 1;
  Token tok_{Token::Kind::End, "", 1, 1};
};

// v<digits> tokens denote explicit variable indices.
bool explicitVar(const std::string& name, int& index) {
  if (name.size() < 2 || name.size() > 7 || name[0] != 'v') return false;
  for (std::size_t i = 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
  index = std::stoi(name.substr(1));
  return true;
}

class Parser {
public:
  Parser(std::string_view text, const Signature& sig, const HeytingAlgebra& omega,
         ParseOptions opts)
      : lex_(text), sig_(sig), omega_(omega), opts_(opts) {
    // Pre-scan for explicit v<k> so named binders never collide with them.
    Lexer scan(text);
    while (scan.peek().kind != Token::Kind::End) {
      Token t = scan.take();
      int idx;
      if (t.kind == Token::Kind::Ident && explicitVar(t.text, idx))
        usedIndices_.insert(idx);
    }
  }

  FormulaPtr parse() {
    auto f = formula();
    if (lex_.peek().kind != Token::Kind::End)
      lex_.fail("syntax error: unexpected '" + lex_.peek().text + "' after formula");
    std::set<int> distinct = usedIndices_;
    if (static_cast<int>(distinct.size()) > opts_.varCap)
      lex_.fail("formula mentions " + std::to_string(distinct.size()) +
                " distinct variables, above the cap of " + std::to_string(opts_.varCap));
    return f;
  }

private:
  bool isPunct(std::string_view p) const {
    return lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == p;
  }
  void expect(std::string_view p, const std::string& what) {
    if (!isPunct(p)) lex_.fail("syntax error: expected '" + std::string(p) + "' " + what);
    lex_.take();
  }

  Elem algebraElem(const std::string& name) {
    auto e = omega_.elem(name);
    if (!e)
      lex_.fail("unknown algebra element '" + name + "' in " + omega_.label());
    return *e;
  }

  FormulaPtr formula() {
    auto lhs = prefix();
    if (isPunct("->")) {
      lex_.take();
      return Formula::implies(std::move(lhs), formula());
    }
    return lhs;
  }

  FormulaPtr prefix() {
    if (isPunct("~")) {
      lex_.take();
      return Formula::not_(prefix());
    }
    if (isPunct("[")) {
      lex_.take();
      if (lex_.peek().kind != Token::Kind::Ident) lex_.fail("expected an algebra element after '['");
      std::string e = lex_.take().text;
      algebraElem(e);
      expect("]", "after the box subscript");
      return Formula::box(e, formula());
    }
    if (lex_.peek().kind == Token::Kind::Ident &&
        (lex_.peek().text == "forall" || lex_.peek().text == "exists")) {
      bool uni = lex_.take().text == "forall";
      auto vars = varSet();
      std::vector<int> indices;
      for (const auto& v : vars) indices.push_back(v);
      auto body = formula();
      for ([[maybe_unused]] const auto& v : vars) binders_.pop_back();
      return uni ? Formula::forall(std::move(indices), std::move(body))
                 : Formula::exists(std::move(indices), std::move(body));
    }
    return atom();
  }

  std::vector<int> varSet() {
    expect("{", "to open the quantifier variable set");
    std::vector<int> out;
    while (!isPunct("}")) {
      if (lex_.peek().kind != Token::Kind::Ident)
        lex_.fail("expected a variable name in the quantifier set");
      Token t = lex_.take();
      int idx;
      if (!explicitVar(t.text, idx)) {
        // Named binder: lowest index not used anywhere yet.
        idx = 0;
        while (usedIndices_.count(idx)) ++idx;
      }
      usedIndices_.insert(idx);
      binders_.push_back({t.text, idx});
      out.push_back(idx);
      if (isPunct(",")) lex_.take();
    }
    if (out.empty()) lex_.fail("quantifier variable sets are nonempty");
    lex_.take();  // '}'
    return out;
  }

  FormulaPtr atom() {
    if (isPunct("(")) {
      lex_.take();
      auto f = formula();
      expect(")", "to close the group");
      return f;
    }
    if (isPunct("/\\") || isPunct("\\/")) {
      bool conj = lex_.take().text == "/\\";
      expect("{", "to open the member list");
      std::vector<FormulaPtr> members;
      while (!isPunct("}")) {
        members.push_back(formula());
        if (isPunct(";")) lex_.take();
        else break;
      }
      expect("}", "to close the member list");
      return conj ? Formula::bigAnd(std::move(members))
                  : Formula::bigOr(std::move(members));
    }
    if (isPunct("<")) {
      lex_.take();
      if (lex_.peek().kind != Token::Kind::Ident) lex_.fail("expected an algebra element after '<'");
      std::string e = lex_.take().text;
      algebraElem(e);
      expect(">", "after the check subscript");
      return Formula::check(e);
    }
    // Relation atom or equation.
    if (lex_.peek().kind == Token::Kind::Ident && sig_.rel(lex_.peek().text)) {
      const auto* r = sig_.rel(lex_.take().text);
      auto args = termList();
      if (static_cast<int>(args.size()) != r->arity)
        lex_.fail("arity mismatch: relation " + r->name + " expects " +
                  std::to_string(r->arity) + " arguments, got " +
                  std::to_string(args.size()));
      return Formula::rel(r->name, std::move(args));
    }
    auto t0 = term();
    expect("=", "in an equation");
    return Formula::eq(std::move(t0), term());
  }

  std::vector<TermPtr> termList() {
    expect("(", "to open the argument list");
    std::vector<TermPtr> out;
    while (!isPunct(")")) {
      out.push_back(term());
      if (isPunct(",")) lex_.take();
      else break;
    }
    expect(")", "to close the argument list");
    return out;
  }

  TermPtr term() {
    if (lex_.peek().kind != Token::Kind::Ident)
      lex_.fail("syntax error: expected a term, found '" + lex_.peek().text + "'");
    Token t = lex_.take();
    int idx;
    if (explicitVar(t.text, idx)) {
      usedIndices_.insert(idx);
      return Term::var(idx);
    }
    // Innermost binder of this name wins.
    for (auto it = binders_.rbegin(); it != binders_.rend(); ++it)
      if (it->first == t.text) return Term::var(it->second);
    if (const auto* fn = sig_.fun(t.text)) {
      auto args = termList();
      if (static_cast<int>(args.size()) != fn->arity)
        lex_.fail("arity mismatch: function " + fn->name + " expects " +
                  std::to_string(fn->arity) + " arguments, got " +
                  std::to_string(args.size()));
      return Term::app(fn->name, std::move(args));
    }
    if (sig_.cnst(t.text)) return Term::cnst(t.text);
    lex_.fail("unknown symbol '" + t.text + "'");
  }

  Lexer lex_;
  const Signature& sig_;
  const HeytingAlgebra& omega_;
  ParseOptions opts_;
  std::set<int> usedIndices_;
  std::vector<std::pair<std::string, int>> binders_;  // name -> index, scoped
};

}  // namespace

FormulaPtr parseFormula(std::string_view text, const Signature& sig,
                        const HeytingAlgebra& omega, ParseOptions opts) {
  return Parser(text, sig, omega, opts).parse();
}

}  // namespace wb
