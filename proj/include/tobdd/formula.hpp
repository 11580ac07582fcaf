// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tobdd/linear_atom.hpp"

namespace tobdd {

enum class Connective {
  True,
  False,
  TheoryAtom,
  BoolAtom,
  Not,
  And,
  Or,
  Xor,
  Iff,
  Implies,
};

/// Immutable AST of a quantifier-free T-formula over linear-rational atoms
/// and Boolean atoms. Value semantics with shared immutable payloads, so
/// copies are cheap and instances can be passed between threads freely.
class TFormula {
 public:
  using List = std::vector<TFormula>;

  static TFormula constant(bool v) {
    return TFormula(v ? Connective::True : Connective::False);
  }
  static TFormula theory(LinearAtom a) {
    TFormula f(Connective::TheoryAtom);
    f.atom_ = std::make_shared<const LinearAtom>(std::move(a));
    return f;
  }
  static TFormula prop(std::string name) {
    TFormula f(Connective::BoolAtom);
    f.name_ = std::move(name);
    return f;
  }
  static TFormula make_not(TFormula f) { return nary(Connective::Not, {std::move(f)}); }
  static TFormula make_and(List children) {
    if (children.size() < 2) throw std::invalid_argument("and needs >= 2 children");
    return nary(Connective::And, std::move(children));
  }
  static TFormula make_or(List children) {
    if (children.size() < 2) throw std::invalid_argument("or needs >= 2 children");
    return nary(Connective::Or, std::move(children));
  }
  static TFormula make_xor(TFormula a, TFormula b) {
    return nary(Connective::Xor, {std::move(a), std::move(b)});
  }
  static TFormula make_iff(TFormula a, TFormula b) {
    return nary(Connective::Iff, {std::move(a), std::move(b)});
  }
  static TFormula make_implies(TFormula a, TFormula b) {
    return nary(Connective::Implies, {std::move(a), std::move(b)});
  }

  Connective kind() const { return kind_; }
  const LinearAtom& atom() const {
    if (kind_ != Connective::TheoryAtom) throw std::logic_error("not a theory atom");
    return *atom_;
  }
  const std::string& prop_name() const {
    if (kind_ != Connective::BoolAtom) throw std::logic_error("not a Boolean atom");
    return name_;
  }
  const List& children() const {
    static const List empty;
    return children_ ? *children_ : empty;
  }

  bool operator==(const TFormula& o) const {
    if (kind_ != o.kind_) return false;
    switch (kind_) {
      case Connective::True:
      case Connective::False: return true;
      case Connective::TheoryAtom:
        return atom_ == o.atom_ || *atom_ == *o.atom_;
      case Connective::BoolAtom: return name_ == o.name_;
      default: break;
    }
    if (children_ == o.children_) return true;
    return children() == o.children();
  }
  bool operator!=(const TFormula& o) const { return !(*this == o); }

  std::string to_string() const {
    switch (kind_) {
      case Connective::True: return "true";
      case Connective::False: return "false";
      case Connective::TheoryAtom: return "(" + atom_->to_string() + ")";
      case Connective::BoolAtom: return name_;
      case Connective::Not: return "(not " + children()[0].to_string() + ")";
      default: break;
    }
    std::string op;
    switch (kind_) {
      case Connective::And: op = "and"; break;
      case Connective::Or: op = "or"; break;
      case Connective::Xor: op = "xor"; break;
      case Connective::Iff: op = "iff"; break;
      case Connective::Implies: op = "=>"; break;
      default: op = "?"; break;
    }
    std::string out = "(" + op;
    for (const auto& c : children()) out += " " + c.to_string();
    return out + ")";
  }

 private:
  explicit TFormula(Connective k) : kind_(k) {}
  static TFormula nary(Connective k, List children) {
    TFormula f(k);
    f.children_ = std::make_shared<const List>(std::move(children));
    return f;
  }

  Connective kind_;
  std::shared_ptr<const LinearAtom> atom_;
  std::string name_;
  std::shared_ptr<const List> children_;
};

enum class BoolKind { True, False, Var, Not, And, Or, Xor, Iff, Implies };

/// A Boolean formula over variable indices: the image of a TFormula under
/// the atom map's abstraction, and the input language of the BDD builder.
class BoolExpr {
 public:
  using List = std::vector<BoolExpr>;

  static BoolExpr constant(bool v) {
    return BoolExpr(v ? BoolKind::True : BoolKind::False);
  }
  static BoolExpr var(int index) {
    BoolExpr e(BoolKind::Var);
    e.var_ = index;
    return e;
  }
  static BoolExpr make_not(BoolExpr a) { return nary(BoolKind::Not, {std::move(a)}); }
  static BoolExpr make_and(List children) {
    if (children.size() < 2) throw std::invalid_argument("and needs >= 2 children");
    return nary(BoolKind::And, std::move(children));
  }
  static BoolExpr make_or(List children) {
    if (children.size() < 2) throw std::invalid_argument("or needs >= 2 children");
    return nary(BoolKind::Or, std::move(children));
  }
  static BoolExpr make_xor(BoolExpr a, BoolExpr b) {
    return nary(BoolKind::Xor, {std::move(a), std::move(b)});
  }
  static BoolExpr make_iff(BoolExpr a, BoolExpr b) {
    return nary(BoolKind::Iff, {std::move(a), std::move(b)});
  }
  static BoolExpr make_implies(BoolExpr a, BoolExpr b) {
    return nary(BoolKind::Implies, {std::move(a), std::move(b)});
  }

  BoolKind kind() const { return kind_; }
  int var_index() const {
    if (kind_ != BoolKind::Var) throw std::logic_error("not a variable");
    return var_;
  }
  const List& children() const {
    static const List empty;
    return children_ ? *children_ : empty;
  }

  /// Support of the expression.
  std::set<int> vars() const {
    std::set<int> out;
    collect_vars(out);
    return out;
  }

  template <typename Lookup>  // Lookup: int -> bool
  bool evaluate(const Lookup& value_of) const {
    switch (kind_) {
      case BoolKind::True: return true;
      case BoolKind::False: return false;
      case BoolKind::Var: return value_of(var_);
      case BoolKind::Not: return !children()[0].evaluate(value_of);
      case BoolKind::And:
        for (const auto& c : children())
          if (!c.evaluate(value_of)) return false;
        return true;
      case BoolKind::Or:
        for (const auto& c : children())
          if (c.evaluate(value_of)) return true;
        return false;
      case BoolKind::Xor:
        return children()[0].evaluate(value_of) != children()[1].evaluate(value_of);
      case BoolKind::Iff:
        return children()[0].evaluate(value_of) == children()[1].evaluate(value_of);
      case BoolKind::Implies:
        return !children()[0].evaluate(value_of) || children()[1].evaluate(value_of);
    }
    return false;
  }

 private:
  explicit BoolExpr(BoolKind k) : kind_(k) {}
  static BoolExpr nary(BoolKind k, List children) {
    BoolExpr e(k);
    e.children_ = std::make_shared<const List>(std::move(children));
    return e;
  }
  void collect_vars(std::set<int>& out) const {
    if (kind_ == BoolKind::Var) out.insert(var_);
    for (const auto& c : children()) c.collect_vars(out);
  }

  BoolKind kind_;
  int var_ = -1;
  std::shared_ptr<const List> children_;
};

/// A (total or partial) truth assignment over Boolean variable indices.
class Assignment {
 public:
  Assignment() = default;

  void set(int index, bool value) { values_[index] = value; }
  std::optional<bool> value(int index) const {
    auto it = values_.find(index);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }
  bool at(int index) const {
    auto it = values_.find(index);
    if (it == values_.end())
      throw std::out_of_range("unassigned variable " + std::to_string(index));
    return it->second;
  }
  bool defines(int index) const { return values_.count(index) != 0; }
  std::size_t size() const { return values_.size(); }

  template <typename Range>
  bool total_over(const Range& indices) const {
    for (int i : indices)
      if (!defines(i)) return false;
    return true;
  }

  const std::map<int, bool>& values() const { return values_; }

  bool operator==(const Assignment& o) const { return values_ == o.values_; }
  bool operator<(const Assignment& o) const { return values_ < o.values_; }

  std::string to_string() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [i, v] : values_) {
      if (!first) out += " ";
      out += (v ? "A" : "!A") + std::to_string(i);
      first = false;
    }
    return out + "}";
  }

 private:
  std::map<int, bool> values_;
};

}  // namespace tobdd
