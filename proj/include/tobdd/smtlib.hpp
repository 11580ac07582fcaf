// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tobdd/atom_map.hpp"
#include "tobdd/errors.hpp"
#include "tobdd/formula.hpp"

namespace tobdd {

enum class Sort { Real, Bool };

struct SmtScript {
  TFormula formula = TFormula::constant(true);
  std::map<std::string, Sort> sorts;
};

namespace smt_detail {

struct Token {
  enum Type { LParen, RParen, Symbol, Numeral, Decimal, String, End };
  Type type = End;
  std::string text;
  int line = 1;
  int col = 1;
};

inline bool is_symbol_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  return std::string_view("~!@$%^&*_-+=<>.?/:").find(c) != std::string_view::npos;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space_and_comments();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= text_.size()) {
      t.type = Token::End;
      return t;
    }
    char c = text_[pos_];
    if (c == '(') {
      advance();
      t.type = Token::LParen;
      return t;
    }
    if (c == ')') {
      advance();
      t.type = Token::RParen;
      return t;
    }
    if (c == '"') {
      advance();
      while (pos_ < text_.size() && text_[pos_] != '"') {
        t.text += text_[pos_];
        advance();
      }
      if (pos_ >= text_.size()) throw parse_error("unterminated string", t.line, t.col);
      advance();
      t.type = Token::String;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      bool dot = false;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
              (!dot && text_[pos_] == '.'))) {
        if (text_[pos_] == '.') dot = true;
        t.text += text_[pos_];
        advance();
      }
      if (t.text.back() == '.')
        throw parse_error("malformed decimal '" + t.text + "'", t.line, t.col);
      t.type = dot ? Token::Decimal : Token::Numeral;
      return t;
    }
    if (is_symbol_char(c)) {
      while (pos_ < text_.size() && is_symbol_char(text_[pos_])) {
        t.text += text_[pos_];
        advance();
      }
      t.type = Token::Symbol;
      return t;
    }
    throw parse_error(std::string("unexpected character '") + c + "'", line_, col_);
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct Sexpr {
  bool is_list = false;
  Token leaf;                 // when !is_list
  std::vector<Sexpr> items;   // when is_list
  int line = 1;
  int col = 1;

  const std::string& head() const {
    static const std::string empty;
    if (!is_list || items.empty() || items[0].is_list) return empty;
    return items[0].leaf.text;
  }
};

class SexprReader {
 public:
  explicit SexprReader(std::string_view text) : lexer_(text) { look_ = lexer_.next(); }

  bool at_end() const { return look_.type == Token::End; }

  Sexpr read() {
    Token t = look_;
    look_ = lexer_.next();
    Sexpr e;
    e.line = t.line;
    e.col = t.col;
    switch (t.type) {
      case Token::LParen: {
        e.is_list = true;
        while (look_.type != Token::RParen) {
          if (look_.type == Token::End)
            throw parse_error("unbalanced '('", t.line, t.col);
          e.items.push_back(read());
        }
        look_ = lexer_.next();  // consume ')'
        return e;
      }
      case Token::RParen:
        throw parse_error("unbalanced ')'", t.line, t.col);
      case Token::End:
        throw parse_error("unexpected end of input", t.line, t.col);
      default:
        e.leaf = t;
        return e;
    }
  }

 private:
  Lexer lexer_;
  Token look_;
};

/// A linear term over real variables: sum of coeff*var plus a constant.
struct LinTerm {
  std::map<std::string, Rational> coeffs;
  Rational constant;

  bool is_constant() const { return coeffs.empty(); }
};

using TermValue = std::variant<TFormula, LinTerm>;

inline Rational parse_decimal(const std::string& text) {
  auto dot = text.find('.');
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  BigInt numv(digits);
  BigInt denv = 1;
  for (std::size_t i = dot + 1; i < text.size(); ++i) denv *= 10;
  return make_rational(numv, denv);
}

class TermParser {
 public:
  explicit TermParser(const std::map<std::string, Sort>& sorts) : sorts_(sorts) {}

  TFormula parse_formula(const Sexpr& e) {
    TermValue v = parse(e);
    if (auto* f = std::get_if<TFormula>(&v)) return *f;
    throw parse_error("expected a Boolean term", e.line, e.col);
  }

  TermValue parse(const Sexpr& e) {
    if (!e.is_list) return parse_leaf(e);
    if (e.items.empty()) throw parse_error("empty application", e.line, e.col);
    if (e.items[0].is_list)
      throw parse_error("expected an operator symbol", e.line, e.col);
    const std::string& op = e.items[0].leaf.text;
    std::vector<Sexpr> args(e.items.begin() + 1, e.items.end());

    if (op == "and" || op == "or") return parse_and_or(op, args, e);
    if (op == "not") {
      require_arity(op, args, 1, e);
      return TFormula::make_not(parse_formula(args[0]));
    }
    if (op == "=>") return parse_implies(args, e);
    if (op == "xor") return parse_xor(args, e);
    if (op == "=") return parse_eq(args, e);
    if (op == "<=" || op == "<" || op == ">=" || op == ">")
      return parse_inequality(op, args, e);
    if (op == "+" || op == "-" || op == "*" || op == "/")
      return parse_arith(op, args, e);
    if (op == "ite" || op == "let" || op == "forall" || op == "exists" ||
        op == "distinct" || op == "div" || op == "mod" || op == "abs")
      throw unsupported_error(op, e.line, e.col);
    throw parse_error("unknown operator '" + op + "'", e.line, e.col);
  }

 private:
  TermValue parse_leaf(const Sexpr& e) {
    const Token& t = e.leaf;
    switch (t.type) {
      case Token::Numeral: {
        LinTerm c;
        c.constant = Rational(BigInt(t.text));
        return c;
      }
      case Token::Decimal: {
        LinTerm c;
        c.constant = parse_decimal(t.text);
        return c;
      }
      case Token::Symbol: {
        if (t.text == "true") return TFormula::constant(true);
        if (t.text == "false") return TFormula::constant(false);
        auto it = sorts_.find(t.text);
        if (it == sorts_.end())
          throw parse_error("undeclared symbol '" + t.text + "'", t.line, t.col);
        if (it->second == Sort::Bool) return TFormula::prop(t.text);
        LinTerm v;
        v.coeffs.emplace(t.text, Rational(1));
        return v;
      }
      default:
        throw parse_error("unexpected token", t.line, t.col);
    }
  }

  LinTerm parse_lin(const Sexpr& e) {
    TermValue v = parse(e);
    if (auto* t = std::get_if<LinTerm>(&v)) return *t;
    throw parse_error("expected an arithmetic term", e.line, e.col);
  }

  static void require_arity(const std::string& op, const std::vector<Sexpr>& args,
                            std::size_t n, const Sexpr& e) {
    if (args.size() != n)
      throw parse_error("'" + op + "' expects " + std::to_string(n) + " argument(s)",
                        e.line, e.col);
  }

  TermValue parse_and_or(const std::string& op, const std::vector<Sexpr>& args,
                         const Sexpr& e) {
    if (args.empty())
      throw parse_error("'" + op + "' expects at least one argument", e.line, e.col);
    TFormula::List kids;
    for (const auto& a : args) kids.push_back(parse_formula(a));
    if (kids.size() == 1) return kids[0];
    return op == "and" ? TFormula::make_and(std::move(kids))
                       : TFormula::make_or(std::move(kids));
  }

  TermValue parse_implies(const std::vector<Sexpr>& args, const Sexpr& e) {
    if (args.size() < 2)
      throw parse_error("'=>' expects at least two arguments", e.line, e.col);
    std::vector<TFormula> kids;
    for (const auto& a : args) kids.push_back(parse_formula(a));
    TFormula out = kids.back();  // right-associative
    for (std::size_t i = kids.size() - 1; i-- > 0;)
      out = TFormula::make_implies(kids[i], out);
    return out;
  }

  TermValue parse_xor(const std::vector<Sexpr>& args, const Sexpr& e) {
    if (args.size() < 2)
      throw parse_error("'xor' expects at least two arguments", e.line, e.col);
    TFormula out = parse_formula(args[0]);  // left-associative
    for (std::size_t i = 1; i < args.size(); ++i)
      out = TFormula::make_xor(out, parse_formula(args[i]));
    return out;
  }

  TermValue parse_eq(const std::vector<Sexpr>& args, const Sexpr& e) {
    if (args.size() < 2)
      throw parse_error("'=' expects at least two arguments", e.line, e.col);
    std::vector<TermValue> values;
    for (const auto& a : args) values.push_back(parse(a));
    bool boolean = std::holds_alternative<TFormula>(values[0]);
    TFormula::List conj;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      if (std::holds_alternative<TFormula>(values[i]) != boolean ||
          std::holds_alternative<TFormula>(values[i + 1]) != boolean)
        throw parse_error("'=' applied to mixed sorts", e.line, e.col);
      if (boolean) {
        conj.push_back(TFormula::make_iff(std::get<TFormula>(values[i]),
                                          std::get<TFormula>(values[i + 1])));
      } else {
        conj.push_back(make_atom(std::get<LinTerm>(values[i]),
                                 std::get<LinTerm>(values[i + 1]), RawRelation::EQ));
      }
    }
    if (conj.size() == 1) return conj[0];
    return TFormula::make_and(std::move(conj));
  }

  TermValue parse_inequality(const std::string& op, const std::vector<Sexpr>& args,
                             const Sexpr& e) {
    if (args.size() < 2)
      throw parse_error("'" + op + "' expects at least two arguments", e.line, e.col);
    RawRelation rel = op == "<="   ? RawRelation::LE
                      : op == "<"  ? RawRelation::LT
                      : op == ">=" ? RawRelation::GE
                                   : RawRelation::GT;
    std::vector<LinTerm> terms;
    for (const auto& a : args) terms.push_back(parse_lin(a));
    TFormula::List conj;
    for (std::size_t i = 0; i + 1 < terms.size(); ++i)
      conj.push_back(make_atom(terms[i], terms[i + 1], rel));
    if (conj.size() == 1) return conj[0];
    return TFormula::make_and(std::move(conj));
  }

  static TFormula make_atom(const LinTerm& lhs, const LinTerm& rhs, RawRelation rel) {
    RawConstraint raw;
    raw.rel = rel;
    raw.coeffs = lhs.coeffs;
    for (const auto& [var, c] : rhs.coeffs) raw.coeffs[var] -= c;
    raw.rhs = rhs.constant - lhs.constant;
    NormalizedAtom n = normalize_atom(raw);
    if (n.is_constant()) return TFormula::constant(n.sign);
    TFormula atom = TFormula::theory(*n.atom);
    return n.sign ? atom : TFormula::make_not(atom);
  }

  TermValue parse_arith(const std::string& op, const std::vector<Sexpr>& args,
                        const Sexpr& e) {
    if (args.empty())
      throw parse_error("'" + op + "' expects arguments", e.line, e.col);
    std::vector<LinTerm> terms;
    for (const auto& a : args) terms.push_back(parse_lin(a));

    if (op == "+") {
      LinTerm out;
      for (const auto& t : terms) add_into(out, t, Rational(1));
      return out;
    }
    if (op == "-") {
      LinTerm out;
      if (terms.size() == 1) {
        add_into(out, terms[0], Rational(-1));
        return out;
      }
      add_into(out, terms[0], Rational(1));
      for (std::size_t i = 1; i < terms.size(); ++i) add_into(out, terms[i], Rational(-1));
      return out;
    }
    if (op == "*") {
      LinTerm out = terms[0];
      for (std::size_t i = 1; i < terms.size(); ++i) {
        const LinTerm& t = terms[i];
        if (out.is_constant()) {
          Rational f = out.constant;
          out = t;
          scale(out, f);
        } else if (t.is_constant()) {
          scale(out, t.constant);
        } else {
          throw unsupported_error("nonlinear multiplication", e.line, e.col);
        }
      }
      return out;
    }
    // division
    if (terms.size() != 2)
      throw parse_error("'/' expects two arguments", e.line, e.col);
    if (!terms[1].is_constant())
      throw unsupported_error("nonlinear division", e.line, e.col);
    if (terms[1].constant == 0)
      throw parse_error("division by zero", e.line, e.col);
    LinTerm out = terms[0];
    scale(out, Rational(1) / terms[1].constant);
    return out;
  }

  static void add_into(LinTerm& acc, const LinTerm& t, const Rational& factor) {
    for (const auto& [var, c] : t.coeffs) acc.coeffs[var] += c * factor;
    acc.constant += t.constant * factor;
  }
  static void scale(LinTerm& t, const Rational& factor) {
    for (auto& [var, c] : t.coeffs) c *= factor;
    t.constant *= factor;
  }

  const std::map<std::string, Sort>& sorts_;
};

}  // namespace smt_detail

/// Parses an SMT-LIB v2 script restricted to QF_LRA: set-logic,
/// declare-const / zero-arity declare-fun of sorts Real and Bool, assert,
/// optional check-sat. The result formula is the conjunction of all
/// asserted formulas with every arithmetic atom in normalized form.
inline SmtScript parse_script(std::string_view text) {
  smt_detail::SexprReader reader(text);
  SmtScript script;
  smt_detail::TermParser terms(script.sorts);
  std::vector<TFormula> asserts;

  while (!reader.at_end()) {
    smt_detail::Sexpr cmd = reader.read();
    if (!cmd.is_list)
      throw parse_error("expected a command", cmd.line, cmd.col);
    const std::string& head = cmd.head();
    if (head == "set-logic") {
      if (cmd.items.size() != 2 || cmd.items[1].is_list)
        throw parse_error("malformed set-logic", cmd.line, cmd.col);
      if (cmd.items[1].leaf.text != "QF_LRA")
        throw unsupported_error("logic " + cmd.items[1].leaf.text, cmd.line, cmd.col);
    } else if (head == "declare-const" || head == "declare-fun") {
      std::size_t sort_pos = head == "declare-const" ? 2 : 3;
      if (head == "declare-fun") {
        if (cmd.items.size() != 4 || !cmd.items[2].is_list)
          throw parse_error("malformed declare-fun", cmd.line, cmd.col);
        if (!cmd.items[2].items.empty())
          throw unsupported_error("function declaration with arguments", cmd.line,
                                  cmd.col);
      } else if (cmd.items.size() != 3) {
        throw parse_error("malformed declare-const", cmd.line, cmd.col);
      }
      if (cmd.items[1].is_list || cmd.items[sort_pos].is_list)
        throw parse_error("malformed declaration", cmd.line, cmd.col);
      const std::string& name = cmd.items[1].leaf.text;
      const std::string& sort_name = cmd.items[sort_pos].leaf.text;
      Sort sort;
      if (sort_name == "Real") {
        sort = Sort::Real;
      } else if (sort_name == "Bool") {
        sort = Sort::Bool;
      } else {
        throw unsupported_error("sort " + sort_name, cmd.line, cmd.col);
      }
      if (!script.sorts.emplace(name, sort).second)
        throw parse_error("redeclared symbol '" + name + "'", cmd.line, cmd.col);
    } else if (head == "assert") {
      if (cmd.items.size() != 2)
        throw parse_error("malformed assert", cmd.line, cmd.col);
      asserts.push_back(terms.parse_formula(cmd.items[1]));
    } else if (head == "check-sat" || head == "exit" || head == "set-info" ||
               head == "set-option") {
      // no-ops for a one-shot compiler
    } else {
      throw unsupported_error(head.empty() ? "command" : head, cmd.line, cmd.col);
    }
  }

  if (asserts.empty())
    script.formula = TFormula::constant(true);
  else if (asserts.size() == 1)
    script.formula = asserts[0];
  else
    script.formula = TFormula::make_and(std::move(asserts));
  return script;
}

inline TFormula parse_smtlib(std::string_view text) { return parse_script(text).formula; }

/// Parses a single term (e.g. "(<= x 0)") against known declarations, for
/// atom-order overrides. The term must denote an atom, possibly negated;
/// the canonical representative is returned.
inline AtomKey parse_atom_text(std::string_view text,
                               const std::map<std::string, Sort>& sorts) {
  smt_detail::SexprReader reader(text);
  if (reader.at_end()) throw parse_error("empty atom", 1, 1);
  smt_detail::Sexpr e = reader.read();
  if (!reader.at_end()) throw parse_error("trailing input after atom", 1, 1);
  smt_detail::TermParser terms(sorts);
  TFormula f = terms.parse_formula(e);
  while (f.kind() == Connective::Not) f = f.children()[0];
  if (f.kind() == Connective::TheoryAtom) return f.atom();
  if (f.kind() == Connective::BoolAtom) return f.prop_name();
  throw parse_error("expected an atom, got '" + f.to_string() + "'", e.line, e.col);
}

namespace smt_detail {

inline std::string rational_sexpr(const Rational& r) {
  BigInt n = num(r);
  BigInt d = den(r);
  bool neg = n < 0;
  if (neg) n = -n;
  std::string body = d == 1 ? n.str() : "(/ " + n.str() + " " + d.str() + ")";
  return neg ? "(- " + body + ")" : body;
}

inline std::string atom_sexpr(const LinearAtom& a) {
  std::vector<std::string> monomials;
  for (const auto& [var, c] : a.coeffs) {
    if (c == 1) {
      monomials.push_back(var);
    } else if (c == -1) {
      monomials.push_back("(- " + var + ")");
    } else if (c > 0) {
      monomials.push_back("(* " + c.str() + " " + var + ")");
    } else {
      monomials.push_back("(- (* " + BigInt(-c).str() + " " + var + "))");
    }
  }
  std::string lhs;
  if (monomials.size() == 1) {
    lhs = monomials[0];
  } else {
    lhs = "(+";
    for (const auto& m : monomials) lhs += " " + m;
    lhs += ")";
  }
  return "(" + relation_symbol(a.rel) + " " + lhs + " " + rational_sexpr(a.constant) +
         ")";
}

inline std::string formula_sexpr(const TFormula& f) {
  switch (f.kind()) {
    case Connective::True: return "true";
    case Connective::False: return "false";
    case Connective::TheoryAtom: return atom_sexpr(f.atom());
    case Connective::BoolAtom: return f.prop_name();
    default: break;
  }
  std::string op;
  switch (f.kind()) {
    case Connective::Not: op = "not"; break;
    case Connective::And: op = "and"; break;
    case Connective::Or: op = "or"; break;
    case Connective::Xor: op = "xor"; break;
    case Connective::Iff: op = "="; break;
    case Connective::Implies: op = "=>"; break;
    default: op = "?"; break;
  }
  std::string out = "(" + op;
  for (const auto& c : f.children()) out += " " + formula_sexpr(c);
  return out + ")";
}

}  // namespace smt_detail

/// Prints a formula back as an SMT-LIB script. Stable under round-trip:
/// parsing the output yields a structurally equal formula.
inline std::string print_smtlib(const TFormula& f) {
  std::set<std::string> reals;
  std::set<std::string> bools;
  std::vector<TFormula> work{f};
  while (!work.empty()) {
    TFormula cur = work.back();
    work.pop_back();
    if (cur.kind() == Connective::TheoryAtom) {
      for (const auto& [var, c] : cur.atom().coeffs) reals.insert(var);
    } else if (cur.kind() == Connective::BoolAtom) {
      bools.insert(cur.prop_name());
    } else {
      for (const auto& c : cur.children()) work.push_back(c);
    }
  }

  std::string out = "(set-logic QF_LRA)\n";
  for (const auto& v : reals) out += "(declare-const " + v + " Real)\n";
  for (const auto& p : bools) out += "(declare-const " + p + " Bool)\n";
  if (f.kind() == Connective::And) {
    for (const auto& c : f.children())
      out += "(assert " + smt_detail::formula_sexpr(c) + ")\n";
  } else {
    out += "(assert " + smt_detail::formula_sexpr(f) + ")\n";
  }
  return out;
}

}  // namespace tobdd
