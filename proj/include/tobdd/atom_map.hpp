// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "tobdd/errors.hpp"
#include "tobdd/formula.hpp"

namespace tobdd {

/// An atom is either a normalized linear constraint or a named Boolean atom.
using AtomKey = std::variant<LinearAtom, std::string>;

inline std::string atom_text(const AtomKey& key) {
  if (const auto* a = std::get_if<LinearAtom>(&key)) return a->to_string();
  return std::get<std::string>(key);
}

inline bool is_theory_atom(const AtomKey& key) {
  return std::holds_alternative<LinearAtom>(key);
}

/// The bijection between atoms and Boolean variable indices: the alpha
/// block holds the declared atom set of a compilation (indices
/// [0, alpha_size)), the beta block holds atoms introduced later by
/// equality elimination (indices [alpha_size, size)). Betas are appended
/// after all alphas so quantifying them away strips an index suffix.
class AtomMap {
 public:
  int add_alpha(const AtomKey& key) {
    if (beta_count() > 0)
      throw std::logic_error("alpha atoms must be registered before betas");
    return add(key, /*beta=*/false);
  }
  int add_beta(const AtomKey& key) { return add(key, /*beta=*/true); }

  bool contains(const AtomKey& key) const { return index_.count(key) != 0; }
  int index_of(const AtomKey& key) const {
    auto it = index_.find(key);
    if (it == index_.end())
      throw missing_atom_error("atom not in map: " + atom_text(key));
    return it->second;
  }
  const AtomKey& atom_at(int index) const {
    if (index < 0 || static_cast<std::size_t>(index) >= entries_.size())
      throw missing_atom_error("no atom with index " + std::to_string(index));
    return entries_[static_cast<std::size_t>(index)];
  }

  std::size_t size() const { return entries_.size(); }
  std::size_t alpha_size() const { return alpha_size_; }
  std::size_t beta_count() const { return entries_.size() - alpha_size_; }
  bool is_beta(int index) const {
    return static_cast<std::size_t>(index) >= alpha_size_;
  }

  std::vector<int> alpha_indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < alpha_size_; ++i) out.push_back(static_cast<int>(i));
    return out;
  }
  std::vector<int> beta_indices() const {
    std::vector<int> out;
    for (std::size_t i = alpha_size_; i < entries_.size(); ++i)
      out.push_back(static_cast<int>(i));
    return out;
  }

  /// Copy containing only the alpha block.
  AtomMap alpha_only() const {
    AtomMap out;
    for (std::size_t i = 0; i < alpha_size_; ++i) out.add_alpha(entries_[i]);
    return out;
  }

 private:
  int add(const AtomKey& key, bool beta) {
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int idx = static_cast<int>(entries_.size());
    entries_.push_back(key);
    index_.emplace(key, idx);
    if (!beta) alpha_size_ = entries_.size();
    return idx;
  }

  std::vector<AtomKey> entries_;
  std::map<AtomKey, int> index_;
  std::size_t alpha_size_ = 0;
};

/// Atoms of a formula in first-occurrence (DFS pre-order) order.
inline void collect_atoms(const TFormula& f, std::vector<AtomKey>& out,
                          std::map<AtomKey, bool>& seen) {
  switch (f.kind()) {
    case Connective::TheoryAtom: {
      AtomKey key = f.atom();
      if (!seen[key]) {
        seen[key] = true;
        out.push_back(key);
      }
      return;
    }
    case Connective::BoolAtom: {
      AtomKey key = f.prop_name();
      if (!seen[key]) {
        seen[key] = true;
        out.push_back(key);
      }
      return;
    }
    default:
      for (const auto& c : f.children()) collect_atoms(c, out, seen);
  }
}

inline std::vector<AtomKey> first_occurrence_atoms(const TFormula& f) {
  std::vector<AtomKey> out;
  std::map<AtomKey, bool> seen;
  collect_atoms(f, out, seen);
  return out;
}

/// Homomorphic replacement of every atom by its Boolean variable index.
/// Errors if an atom of the formula is missing from the map.
inline BoolExpr abstract(const TFormula& f, const AtomMap& map) {
  switch (f.kind()) {
    case Connective::True: return BoolExpr::constant(true);
    case Connective::False: return BoolExpr::constant(false);
    case Connective::TheoryAtom: return BoolExpr::var(map.index_of(f.atom()));
    case Connective::BoolAtom: return BoolExpr::var(map.index_of(f.prop_name()));
    case Connective::Not: return BoolExpr::make_not(abstract(f.children()[0], map));
    case Connective::And:
    case Connective::Or: {
      BoolExpr::List kids;
      kids.reserve(f.children().size());
      for (const auto& c : f.children()) kids.push_back(abstract(c, map));
      return f.kind() == Connective::And ? BoolExpr::make_and(std::move(kids))
                                         : BoolExpr::make_or(std::move(kids));
    }
    case Connective::Xor:
      return BoolExpr::make_xor(abstract(f.children()[0], map),
                                abstract(f.children()[1], map));
    case Connective::Iff:
      return BoolExpr::make_iff(abstract(f.children()[0], map),
                                abstract(f.children()[1], map));
    case Connective::Implies:
      return BoolExpr::make_implies(abstract(f.children()[0], map),
                                    abstract(f.children()[1], map));
  }
  throw std::logic_error("unhandled connective");
}

/// Inverse of abstract: refine(abstract(f, m), m) == f.
inline TFormula refine(const BoolExpr& e, const AtomMap& map) {
  switch (e.kind()) {
    case BoolKind::True: return TFormula::constant(true);
    case BoolKind::False: return TFormula::constant(false);
    case BoolKind::Var: {
      const AtomKey& key = map.atom_at(e.var_index());
      if (const auto* a = std::get_if<LinearAtom>(&key)) return TFormula::theory(*a);
      return TFormula::prop(std::get<std::string>(key));
    }
    case BoolKind::Not: return TFormula::make_not(refine(e.children()[0], map));
    case BoolKind::And:
    case BoolKind::Or: {
      TFormula::List kids;
      kids.reserve(e.children().size());
      for (const auto& c : e.children()) kids.push_back(refine(c, map));
      return e.kind() == BoolKind::And ? TFormula::make_and(std::move(kids))
                                       : TFormula::make_or(std::move(kids));
    }
    case BoolKind::Xor:
      return TFormula::make_xor(refine(e.children()[0], map),
                                refine(e.children()[1], map));
    case BoolKind::Iff:
      return TFormula::make_iff(refine(e.children()[0], map),
                                refine(e.children()[1], map));
    case BoolKind::Implies:
      return TFormula::make_implies(refine(e.children()[0], map),
                                    refine(e.children()[1], map));
  }
  throw std::logic_error("unhandled kind");
}

}  // namespace tobdd
