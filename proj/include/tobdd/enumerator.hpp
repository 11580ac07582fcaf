// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tobdd/atom_map.hpp"
#include "tobdd/errors.hpp"
#include "tobdd/formula.hpp"
#include "tobdd/theory_solver.hpp"

namespace tobdd {

enum class Mode { Direct, EqElim };
enum class SatStatus { Sat, Unsat };

struct EnumerationStats {
  std::uint64_t assignments_explored = 0;  // total assignments theory-checked
  std::uint64_t theory_checks = 0;
  std::uint64_t lemmas_emitted = 0;   // theory-conflict lemmas
  std::uint64_t defining_lemmas = 0;  // equality-elimination axiom clauses
  std::uint64_t consistent_assignments = 0;
};

struct EnumerationResult {
  SatStatus status = SatStatus::Unsat;
  /// Defining lemmas (EqElim mode) followed by conflict lemmas in emission
  /// order. Together they rule out every T-inconsistent total assignment
  /// propositionally satisfying the input.
  std::vector<TLemma> lemmas;
  EnumerationStats stats;
};

struct EnumerateOptions {
  std::uint64_t max_assignments = std::uint64_t{1} << 20;
  std::ostream* trace = nullptr;
  bool stop_at_first_model = false;
  std::function<void(const Assignment&)> on_model;
};

namespace dpll_detail {

// Literal encoding: 2*var for the positive literal, 2*var+1 for the negation.
using Lit = std::uint32_t;
inline Lit mk_lit(int var, bool positive) {
  return (static_cast<Lit>(var) << 1) | (positive ? 0u : 1u);
}
inline int lit_var(Lit l) { return static_cast<int>(l >> 1); }
inline bool lit_positive(Lit l) { return (l & 1u) == 0; }
inline Lit lit_negate(Lit l) { return l ^ 1u; }

/// Chronological-backtracking DPLL over a fixed decision-variable prefix.
/// Unit propagation runs over two-watched-literal clauses; clauses learned
/// mid-search (theory lemmas, blocking clauses) are attached on the fly.
/// Decisions take ascending variable index, false first, so runs are
/// deterministic. Variables past the decision prefix (Tseitin gates) are
/// assigned by propagation only.
class Dpll {
 public:
  explicit Dpll(int num_decision) : num_decision_(num_decision) {
    grow(num_decision);
  }

  /// Adds a clause; tautologies are dropped, duplicate literals merged.
  /// The clause may be falsified by the current assignment; the caller is
  /// expected to continue via next_leaf(), which backtracks.
  void add_clause(std::vector<Lit> lits) {
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 0; i + 1 < lits.size(); ++i)
      if (lits[i + 1] == lit_negate(lits[i])) return;  // tautology
    for (Lit l : lits) grow(lit_var(l) + 1);
    if (lits.empty()) {
      contradiction_ = true;
      return;
    }
    if (lits.size() == 1) {
      units_.push_back(lits[0]);
      return;
    }
    // Watch the two best literals: unassigned/true first, else the most
    // recently assigned, so watches recover quickly after backtracking.
    auto quality = [&](Lit l) -> std::int64_t {
      if (!lit_false(l)) return INT64_MAX;
      return position_[static_cast<std::size_t>(lit_var(l))];
    };
    for (std::size_t slot = 0; slot < 2; ++slot) {
      std::size_t best = slot;
      for (std::size_t i = slot + 1; i < lits.size(); ++i)
        if (quality(lits[i]) > quality(lits[best])) best = i;
      std::swap(lits[slot], lits[best]);
    }
    std::size_t idx = clauses_.size();
    watches_[lits[0]].push_back(idx);
    watches_[lits[1]].push_back(idx);
    clauses_.push_back(std::move(lits));
  }

  bool value_of(int var) const { return value_[static_cast<std::size_t>(var)] == 1; }

  /// Advances to the next total assignment over the decision prefix that
  /// unit propagation does not refute. The first call starts the search;
  /// later calls treat the current leaf as a dead end and backtrack.
  /// Returns false once the space is exhausted.
  bool next_leaf() {
    if (contradiction_) return false;
    if (!started_) {
      started_ = true;
      if (!propagate()) return false;
      return descend();
    }
    if (!resolve_conflict()) return false;
    return descend();
  }

 private:
  static constexpr signed char UNSET = 0x7f;

  struct Decision {
    int var;
    std::size_t trail_mark;
    bool flipped;
  };

  void grow(int n) {
    if (static_cast<std::size_t>(n) <= value_.size()) return;
    value_.resize(static_cast<std::size_t>(n), UNSET);
    position_.resize(static_cast<std::size_t>(n), -1);
  }

  bool descend() {
    while (true) {
      int v = next_unassigned();
      if (v < 0) return true;  // leaf
      decisions_.push_back({v, trail_.size(), false});
      assign(v, false);
      if (!propagate() && !resolve_conflict()) return false;
    }
  }

  bool resolve_conflict() {
    while (!decisions_.empty()) {
      Decision d = decisions_.back();
      if (d.flipped) {
        decisions_.pop_back();
        undo_to(d.trail_mark);
        continue;
      }
      decisions_.back().flipped = true;
      undo_to(d.trail_mark);
      assign(d.var, true);
      if (propagate()) return true;
    }
    return false;
  }

  int next_unassigned() const {
    for (int v = 0; v < num_decision_; ++v)
      if (value_[static_cast<std::size_t>(v)] == UNSET) return v;
    return -1;
  }

  void assign(int var, bool val) {
    value_[static_cast<std::size_t>(var)] = val ? 1 : -1;
    position_[static_cast<std::size_t>(var)] =
        static_cast<std::int64_t>(trail_.size());
    trail_.push_back(var);
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      value_[static_cast<std::size_t>(trail_.back())] = UNSET;
      trail_.pop_back();
    }
    qhead_ = trail_.size();
  }

  bool lit_true(Lit l) const {
    signed char v = value_[static_cast<std::size_t>(lit_var(l))];
    return v != UNSET && ((v == 1) == lit_positive(l));
  }
  bool lit_false(Lit l) const {
    signed char v = value_[static_cast<std::size_t>(lit_var(l))];
    return v != UNSET && ((v == 1) != lit_positive(l));
  }

  bool propagate() {
    // Unit clauses cannot carry watches; recheck them on every pass.
    for (Lit u : units_) {
      if (lit_false(u)) return false;
      if (!lit_true(u)) assign(lit_var(u), lit_positive(u));
    }
    while (qhead_ < trail_.size()) {
      int var = trail_[qhead_++];
      Lit falsified = mk_lit(var, value_[static_cast<std::size_t>(var)] != 1);
      auto wit = watches_.find(falsified);
      if (wit == watches_.end()) continue;
      std::vector<std::size_t>& wl = wit->second;
      std::size_t keep = 0;
      for (std::size_t i = 0; i < wl.size(); ++i) {
        std::size_t ci = wl[i];
        std::vector<Lit>& c = clauses_[ci];
        if (c[0] == falsified) std::swap(c[0], c[1]);
        if (lit_true(c[0])) {  // satisfied through the other watch
          wl[keep++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (!lit_false(c[k])) {
            std::swap(c[1], c[k]);
            watches_[c[1]].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        wl[keep++] = ci;
        if (lit_false(c[0])) {  // conflict
          for (std::size_t j = i + 1; j < wl.size(); ++j) wl[keep++] = wl[j];
          wl.resize(keep);
          return false;
        }
        assign(lit_var(c[0]), lit_positive(c[0]));  // unit
      }
      wl.resize(keep);
    }
    return true;
  }

  int num_decision_;
  std::vector<signed char> value_;
  std::vector<std::int64_t> position_;
  std::vector<std::vector<Lit>> clauses_;
  std::unordered_map<Lit, std::vector<std::size_t>> watches_;
  std::vector<Lit> units_;
  std::vector<int> trail_;
  std::size_t qhead_ = 0;
  std::vector<Decision> decisions_;
  bool started_ = false;
  bool contradiction_ = false;
};

/// Plain Tseitin encoding. Gate outputs are fresh variables above the
/// decision prefix; once every input is assigned, unit propagation fixes
/// every gate output.
class Tseitin {
 public:
  Tseitin(Dpll& solver, int next_var) : solver_(solver), next_(next_var) {}

  void assert_root(const BoolExpr& e) { solver_.add_clause({encode(e)}); }

 private:
  Lit encode(const BoolExpr& e) {
    switch (e.kind()) {
      case BoolKind::True: return true_lit();
      case BoolKind::False: return lit_negate(true_lit());
      case BoolKind::Var: return mk_lit(e.var_index(), true);
      case BoolKind::Not: return lit_negate(encode(e.children()[0]));
      case BoolKind::And:
      case BoolKind::Or: {
        std::vector<Lit> ins;
        ins.reserve(e.children().size());
        for (const auto& c : e.children()) ins.push_back(encode(c));
        bool conj = e.kind() == BoolKind::And;
        Lit out = fresh();
        // out <-> AND(ins): (!out | in_i) each, (out | !in_1 | ... | !in_n);
        // OR is the dual.
        std::vector<Lit> big;
        big.reserve(ins.size() + 1);
        big.push_back(conj ? out : lit_negate(out));
        for (Lit in : ins) {
          if (conj)
            solver_.add_clause({lit_negate(out), in});
          else
            solver_.add_clause({out, lit_negate(in)});
          big.push_back(conj ? lit_negate(in) : in);
        }
        solver_.add_clause(std::move(big));
        return out;
      }
      case BoolKind::Xor:
      case BoolKind::Iff: {
        Lit a = encode(e.children()[0]);
        Lit b = encode(e.children()[1]);
        if (e.kind() == BoolKind::Iff) b = lit_negate(b);
        Lit out = fresh();  // out <-> a xor b
        solver_.add_clause({lit_negate(out), a, b});
        solver_.add_clause({lit_negate(out), lit_negate(a), lit_negate(b)});
        solver_.add_clause({out, lit_negate(a), b});
        solver_.add_clause({out, a, lit_negate(b)});
        return out;
      }
      case BoolKind::Implies: {
        Lit a = encode(e.children()[0]);
        Lit b = encode(e.children()[1]);
        Lit out = fresh();  // out <-> (!a | b)
        solver_.add_clause({lit_negate(out), lit_negate(a), b});
        solver_.add_clause({out, a});
        solver_.add_clause({out, lit_negate(b)});
        return out;
      }
    }
    throw std::logic_error("unhandled kind");
  }

  Lit true_lit() {
    if (true_var_ < 0) {
      true_var_ = next_++;
      solver_.add_clause({mk_lit(true_var_, true)});
    }
    return mk_lit(true_var_, true);
  }
  Lit fresh() { return mk_lit(next_++, true); }

  Dpll& solver_;
  int next_;
  int true_var_ = -1;
};

}  // namespace dpll_detail

/// Enumerates the total truth assignments over the decision atoms (alpha,
/// plus beta in EqElim mode) propositionally satisfying the formula,
/// classifies each with the theory solver, and accumulates lemmas ruling
/// out every T-inconsistent one. In EqElim mode the equality-elimination
/// axioms are registered on the map, seeded into the search, and included
/// in the returned lemma set. Blocking clauses are bookkeeping only and are
/// never reported as lemmas.
inline EnumerationResult enumerate(const TFormula& formula, AtomMap& map, Mode mode,
                                   const EnumerateOptions& opts = {}) {
  using namespace dpll_detail;

  EnumerationResult result;

  std::vector<TLemma> defining;
  if (mode == Mode::EqElim) {
    EqElimination elim = eliminate_equalities(formula, map);
    defining = std::move(elim.defining_lemmas);
    result.stats.defining_lemmas = defining.size();
  } else {
    for (const AtomKey& key : first_occurrence_atoms(formula))
      if (!map.contains(key))
        throw missing_atom_error("atom not registered: " + atom_text(key));
  }

  const int num_decision =
      static_cast<int>(mode == Mode::EqElim ? map.size() : map.alpha_size());
  const int num_alpha = static_cast<int>(map.alpha_size());

  BoolExpr phi = abstract(formula, map);

  Dpll solver(num_decision);
  Tseitin tseitin(solver, num_decision);

  // Clauses re-checked at every leaf, independently of the propagation
  // engine: lemma abstractions and blocking clauses. The abstraction of the
  // input is re-evaluated directly instead.
  std::vector<std::vector<Lit>> semantic;
  std::set<TLemma> known_lemmas;

  auto clause_of = [&](const TLemma& lemma) {
    std::vector<Lit> lits;
    for (const auto& l : lemma.literals)
      lits.push_back(mk_lit(map.index_of(AtomKey(l.atom)), l.phase));
    return lits;
  };
  auto add_semantic = [&](std::vector<Lit> lits) {
    semantic.push_back(lits);
    solver.add_clause(std::move(lits));
  };

  for (const TLemma& d : defining) {
    result.lemmas.push_back(d);
    known_lemmas.insert(d);
    add_semantic(clause_of(d));
  }

  if (phi.kind() == BoolKind::False) {
    result.status = SatStatus::Unsat;
    return result;
  }
  if (phi.kind() != BoolKind::True) tseitin.assert_root(phi);

  while (solver.next_leaf()) {
    // Leaf validity re-check keeps counting sound even if a lazily attached
    // clause was missed by the watch scheme.
    bool ok = phi.evaluate([&](int v) { return solver.value_of(v); });
    for (std::size_t ci = 0; ok && ci < semantic.size(); ++ci) {
      bool sat = false;
      for (Lit l : semantic[ci]) {
        if (solver.value_of(lit_var(l)) == lit_positive(l)) {
          sat = true;
          break;
        }
      }
      ok = sat;
    }
    if (!ok) continue;  // propositionally excluded; backtrack without counting

    result.stats.assignments_explored++;
    if (result.stats.assignments_explored > opts.max_assignments)
      throw resource_limit_error("assignment cap exceeded (" +
                                 std::to_string(opts.max_assignments) + ")");

    std::vector<TheoryLiteral> literals;
    for (int v = 0; v < num_decision; ++v) {
      const AtomKey& key = map.atom_at(v);
      if (const auto* atom = std::get_if<LinearAtom>(&key))
        literals.push_back({*atom, solver.value_of(v)});
    }
    result.stats.theory_checks++;
    ConsistencyVerdict verdict = check_conjunction(literals);

    if (verdict.consistent) {
      result.stats.consistent_assignments++;
      if (opts.on_model) {
        Assignment alpha;
        for (int v = 0; v < num_alpha; ++v) alpha.set(v, solver.value_of(v));
        opts.on_model(alpha);
      }
      if (opts.stop_at_first_model) break;
      if (num_alpha == 0) break;  // the one (empty) assignment is enumerated
      std::vector<Lit> blocking;
      for (int v = 0; v < num_alpha; ++v)
        blocking.push_back(mk_lit(v, !solver.value_of(v)));
      add_semantic(std::move(blocking));
    } else {
      std::vector<TheoryLiteral> core = minimize_core(verdict.core);
      std::vector<TheoryLiteral> negated;
      negated.reserve(core.size());
      for (const auto& l : core) negated.push_back({l.atom, !l.phase});
      TLemma lemma(std::move(negated));
      if (opts.trace) {
        *opts.trace << "theory conflict: core {";
        for (std::size_t i = 0; i < core.size(); ++i)
          *opts.trace << (i ? ", " : "") << core[i].to_string();
        *opts.trace << "} lemma: " << lemma.to_string() << "\n";
      }
      if (known_lemmas.insert(lemma).second) {
        result.lemmas.push_back(lemma);
        result.stats.lemmas_emitted++;
      }
      add_semantic(clause_of(lemma));
    }
  }

  result.status = result.stats.consistent_assignments > 0 ? SatStatus::Sat
                                                          : SatStatus::Unsat;
  return result;
}

/// Thin wrapper over enumerate that stops at the first T-consistent
/// satisfying assignment.
inline SatStatus check_sat(const TFormula& formula,
                           const EnumerateOptions& opts = {}) {
  AtomMap map;
  for (const AtomKey& key : first_occurrence_atoms(formula)) map.add_alpha(key);
  EnumerateOptions local = opts;
  local.stop_at_first_model = true;
  local.on_model = nullptr;
  return enumerate(formula, map, Mode::Direct, local).status;
}

}  // namespace tobdd
