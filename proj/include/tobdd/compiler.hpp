// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tobdd/atom_map.hpp"
#include "tobdd/bdd.hpp"
#include "tobdd/enumerator.hpp"
#include "tobdd/formula.hpp"
#include "tobdd/theory_solver.hpp"

namespace tobdd {

struct CompileOptions {
  /// Atom order defining the canonicity condition. Empty means
  /// first-occurrence order in the formula. May be a superset of the
  /// formula's atoms; must not miss any of them.
  std::vector<AtomKey> order;
  Mode mode = Mode::Direct;
  /// Additional atoms to include in alpha beyond those in the formula
  /// (appended after `order` entries not already present).
  std::vector<AtomKey> extra_alpha;
  std::uint64_t max_assignments = std::uint64_t{1} << 20;
  std::ostream* trace = nullptr;
};

/// A compiled theory diagram: a BDD root whose refinement under the atom
/// map is T-equivalent to the source formula. The root's support lies in
/// the alpha block; extra atoms introduced during solving are quantified
/// away. Satisfying total assignments of the root over alpha are exactly
/// the T-consistent total assignments propositionally satisfying the source.
struct TDD {
  DdNode root;
  std::shared_ptr<DdManager> manager;
  AtomMap atom_map;  // alpha portion only
  TFormula source = TFormula::constant(true);

  bool is_false() const { return manager->is_false(root); }
  bool is_true() const { return manager->is_true(root); }

  std::set<int> alpha_set() const {
    std::set<int> out;
    for (int i : atom_map.alpha_indices()) out.insert(i);
    return out;
  }

  /// DOT text with decision nodes labeled by the refined atom text.
  std::string to_dot() const {
    return manager->to_dot(root, [this](int v) {
      return atom_text(atom_map.atom_at(v));
    });
  }
};

/// Everything observable about the last compile besides the diagram.
struct CompileInfo {
  SatStatus status = SatStatus::Unsat;
  Mode mode = Mode::Direct;
  EnumerationStats enum_stats;
  std::size_t alpha_count = 0;
  std::size_t beta_count = 0;
  std::vector<TLemma> lemmas;  // defining first (EqElim), then conflict lemmas
  DdNode pre_quant_root;       // equals root in Direct mode
  std::size_t node_count = 0;
  BigInt model_count;
  double wall_ms = 0.0;
};

/// One compilation pipeline: an atom map fixed over a declared alpha order
/// plus a BDD manager sharing that order. Compiling several formulas
/// through one instance makes their roots directly comparable as handles,
/// which is how T-equivalence is decided.
class TddCompiler {
 public:
  explicit TddCompiler(const std::vector<AtomKey>& alpha_order) {
    for (const AtomKey& key : alpha_order) map_.add_alpha(key);
    std::vector<int> order;
    for (std::size_t i = 0; i < map_.alpha_size(); ++i)
      order.push_back(static_cast<int>(i));
    manager_ = std::make_shared<DdManager>(order);
  }

  TDD compile(const TFormula& formula, Mode mode = Mode::Direct,
              std::uint64_t max_assignments = std::uint64_t{1} << 20,
              std::ostream* trace = nullptr) {
    auto t0 = std::chrono::steady_clock::now();

    for (const AtomKey& key : first_occurrence_atoms(formula))
      if (!map_.contains(key))
        throw missing_atom_error("atom not covered by the declared order: " +
                                 atom_text(key));

    EnumerateOptions opts;
    opts.max_assignments = max_assignments;
    opts.trace = trace;
    EnumerationResult enumeration = enumerate(formula, map_, mode, opts);

    // Betas discovered by equality elimination extend the manager order.
    for (std::size_t i = 0; i < map_.size(); ++i) {
      int v = static_cast<int>(i);
      if (!manager_->has_var(v)) manager_->add_var(v);
    }

    info_ = CompileInfo{};
    info_.status = enumeration.status;
    info_.mode = mode;
    info_.enum_stats = enumeration.stats;
    info_.alpha_count = map_.alpha_size();
    info_.beta_count = map_.beta_count();
    info_.lemmas = enumeration.lemmas;

    TDD out;
    out.manager = manager_;
    out.atom_map = map_.alpha_only();
    out.source = formula;

    if (enumeration.status == SatStatus::Unsat) {
      out.root = manager_->mk_false();
      info_.pre_quant_root = out.root;
    } else {
      DdNode f = manager_->build(abstract(formula, map_));
      for (const TLemma& lemma : enumeration.lemmas)
        f = manager_->apply(BoolOp::And, f, manager_->build(lemma.abstraction(map_)));
      info_.pre_quant_root = f;
      if (mode == Mode::EqElim) {
        std::set<int> betas;
        for (int b : map_.beta_indices()) betas.insert(b);
        f = manager_->exists(f, betas);
      }
      out.root = f;
    }

    info_.node_count = manager_->node_count(out.root);
    info_.model_count = manager_->model_count(out.root, out.alpha_set());
    info_.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    return out;
  }

  const CompileInfo& last_info() const { return info_; }
  AtomMap& map() { return map_; }
  const AtomMap& map() const { return map_; }
  DdManager& manager() { return *manager_; }
  std::shared_ptr<DdManager> manager_ptr() { return manager_; }

 private:
  AtomMap map_;
  std::shared_ptr<DdManager> manager_;
  CompileInfo info_;
};

inline std::vector<AtomKey> alpha_order_for(const TFormula& formula,
                                            const CompileOptions& opts) {
  std::vector<AtomKey> order = opts.order.empty() ? first_occurrence_atoms(formula)
                                                  : opts.order;
  std::set<AtomKey> present(order.begin(), order.end());
  for (const AtomKey& key : opts.extra_alpha)
    if (present.insert(key).second) order.push_back(key);
  return order;
}

/// Fig.-4 pipeline end to end: enumerate lemmas, conjoin their abstractions
/// with the formula's, quantify away extra atoms, wrap with the alpha map.
inline TDD compile(const TFormula& formula, const CompileOptions& opts = {}) {
  TddCompiler compiler(alpha_order_for(formula, opts));
  return compiler.compile(formula, opts.mode, opts.max_assignments, opts.trace);
}

inline TDD compile(const TFormula& formula, const CompileOptions& opts,
                   CompileInfo& info_out) {
  TddCompiler compiler(alpha_order_for(formula, opts));
  TDD out = compiler.compile(formula, opts.mode, opts.max_assignments, opts.trace);
  info_out = compiler.last_info();
  return out;
}

/// Options whose alpha is the union of both formulas' atom sets under one
/// deterministic (first-occurrence) order, so the two compiles share one
/// canonicity condition.
inline CompileOptions align_atoms(const TFormula& a, const TFormula& b,
                                  const CompileOptions& base = {}) {
  CompileOptions out = base;
  if (out.order.empty()) {
    out.order = first_occurrence_atoms(a);
    std::set<AtomKey> present(out.order.begin(), out.order.end());
    for (const AtomKey& key : first_occurrence_atoms(b))
      if (present.insert(key).second) out.order.push_back(key);
  }
  return out;
}

/// Decides T-equivalence: compile both formulas over the union atom order
/// in one pipeline and compare root handles.
inline bool equiv_check(const TFormula& a, const TFormula& b,
                        const CompileOptions& base = {}) {
  CompileOptions shared = align_atoms(a, b, base);
  TddCompiler compiler(alpha_order_for(a, shared));
  DdNode ra = compiler.compile(a, shared.mode, shared.max_assignments).root;
  DdNode rb = compiler.compile(b, shared.mode, shared.max_assignments).root;
  return ra == rb;
}

/// #SMT: the number of T-consistent total assignments over alpha
/// propositionally satisfying the source formula.
inline BigInt count_models(const TDD& t) {
  return t.manager->model_count(t.root, t.alpha_set());
}

/// A formula is T-inconsistent iff it compiles to the false node.
inline bool inconsistency_check(const TFormula& f, const CompileOptions& opts = {}) {
  return compile(f, opts).is_false();
}

/// A formula is T-valid iff its negation compiles to the false node.
inline bool validity_check(const TFormula& f, const CompileOptions& opts = {}) {
  return inconsistency_check(TFormula::make_not(f), opts);
}

}  // namespace tobdd
