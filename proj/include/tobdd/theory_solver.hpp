// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tobdd/atom_map.hpp"
#include "tobdd/formula.hpp"
#include "tobdd/linear_atom.hpp"

namespace tobdd {

/// A theory literal: an atom with a phase. Phase false stands for the
/// negation (a disequality for EQ, a strict > for <=, a >= for <).
struct TheoryLiteral {
  LinearAtom atom;
  bool phase = true;

  bool operator==(const TheoryLiteral& o) const {
    return phase == o.phase && atom == o.atom;
  }
  bool operator<(const TheoryLiteral& o) const {
    if (atom != o.atom) return atom < o.atom;
    return phase < o.phase;
  }

  bool evaluate(const std::map<std::string, Rational>& valuation) const {
    return atom.evaluate(valuation) == phase;
  }

  std::string to_string() const {
    std::string body = "(" + atom.to_string() + ")";
    return phase ? body : "!" + body;
  }
};

/// A T-valid clause over theory literals. Literals are kept sorted so that
/// two lemmas with the same literal set compare equal.
struct TLemma {
  std::vector<TheoryLiteral> literals;

  explicit TLemma(std::vector<TheoryLiteral> lits) : literals(std::move(lits)) {
    std::sort(literals.begin(), literals.end());
    literals.erase(std::unique(literals.begin(), literals.end()), literals.end());
  }

  bool operator==(const TLemma& o) const { return literals == o.literals; }
  bool operator<(const TLemma& o) const { return literals < o.literals; }

  /// The set of literals whose conjunction must be T-inconsistent for this
  /// clause to be T-valid.
  std::vector<TheoryLiteral> negated_literals() const {
    std::vector<TheoryLiteral> out;
    out.reserve(literals.size());
    for (const auto& l : literals) out.push_back({l.atom, !l.phase});
    return out;
  }

  /// Clause over Boolean variable indices.
  BoolExpr abstraction(const AtomMap& map) const {
    BoolExpr::List lits;
    for (const auto& l : literals) {
      BoolExpr v = BoolExpr::var(map.index_of(AtomKey(l.atom)));
      lits.push_back(l.phase ? v : BoolExpr::make_not(v));
    }
    if (lits.size() == 1) return lits[0];
    return BoolExpr::make_or(std::move(lits));
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < literals.size(); ++i) {
      if (i) out += " | ";
      const auto& l = literals[i];
      out += l.phase ? l.atom.to_string() : "!(" + l.atom.to_string() + ")";
    }
    return out;
  }
};

/// Outcome of a conjunction consistency check: a satisfying rational
/// witness, or an inconsistent subset of the input literals.
struct ConsistencyVerdict {
  bool consistent = false;
  std::map<std::string, Rational> witness;  // when consistent
  std::vector<TheoryLiteral> core;          // when inconsistent

  static ConsistencyVerdict sat(std::map<std::string, Rational> w) {
    return {true, std::move(w), {}};
  }
  static ConsistencyVerdict unsat(std::vector<TheoryLiteral> c) {
    return {false, {}, std::move(c)};
  }
};

namespace lra_detail {

/// coeffs . x  <=  bound  (or < when strict). `origins` tracks which input
/// literals the constraint descends from, for core extraction.
struct LinCon {
  std::map<std::string, Rational> coeffs;
  Rational bound;
  bool strict = false;
  std::set<std::size_t> origins;
};

struct Bound {
  Rational value;
  bool strict = false;
};

struct ElimStep {
  std::string var;
  std::vector<LinCon> uppers;  // positive coefficient on var
  std::vector<LinCon> lowers;  // negative coefficient on var
};

struct FmOutcome {
  bool feasible = false;
  std::map<std::string, Rational> witness;
  std::set<std::size_t> conflict_origins;
};

inline Rational eval_rest(const LinCon& c, const std::string& skip,
                          const std::map<std::string, Rational>& values) {
  Rational acc = 0;
  for (const auto& [var, coef] : c.coeffs) {
    if (var == skip) continue;
    acc += coef * values.at(var);
  }
  return acc;
}

/// Exact Fourier-Motzkin elimination with strict-bound bookkeeping.
/// On success the witness assigns every variable that occurs in the input.
inline FmOutcome fourier_motzkin(std::vector<LinCon> work) {
  std::vector<ElimStep> steps;

  while (true) {
    // Ground constraints decide feasibility directly.
    std::vector<LinCon> pending;
    for (auto& c : work) {
      if (!c.coeffs.empty()) {
        pending.push_back(std::move(c));
        continue;
      }
      if (c.bound < 0 || (c.strict && c.bound == 0)) {
        FmOutcome out;
        out.feasible = false;
        out.conflict_origins = c.origins;
        return out;
      }
    }
    work = std::move(pending);
    if (work.empty()) break;

    // Pick the variable minimizing the number of generated combinations.
    std::map<std::string, std::pair<std::size_t, std::size_t>> occurrence;
    for (const auto& c : work)
      for (const auto& [var, coef] : c.coeffs)
        (coef > 0 ? occurrence[var].first : occurrence[var].second)++;
    std::string best;
    std::size_t best_cost = SIZE_MAX;
    for (const auto& [var, pn] : occurrence) {
      std::size_t cost = pn.first * pn.second;
      if (cost < best_cost) {
        best_cost = cost;
        best = var;
      }
    }

    ElimStep step;
    step.var = best;
    std::vector<LinCon> rest;
    for (auto& c : work) {
      auto it = c.coeffs.find(best);
      if (it == c.coeffs.end()) {
        rest.push_back(std::move(c));
      } else if (it->second > 0) {
        step.uppers.push_back(std::move(c));
      } else {
        step.lowers.push_back(std::move(c));
      }
    }
    for (const auto& u : step.uppers) {
      Rational cu = u.coeffs.at(best);
      for (const auto& l : step.lowers) {
        Rational cl = l.coeffs.at(best);
        LinCon combined;
        combined.strict = u.strict || l.strict;
        // (-cl) * u + cu * l cancels `best`; both multipliers are positive.
        for (const auto& [var, coef] : u.coeffs)
          if (var != best) combined.coeffs[var] += -cl * coef;
        for (const auto& [var, coef] : l.coeffs)
          if (var != best) combined.coeffs[var] += cu * coef;
        std::erase_if(combined.coeffs, [](const auto& kv) { return kv.second == 0; });
        combined.bound = -cl * u.bound + cu * l.bound;
        combined.origins = u.origins;
        combined.origins.insert(l.origins.begin(), l.origins.end());
        rest.push_back(std::move(combined));
      }
    }
    steps.push_back(std::move(step));
    work = std::move(rest);
  }

  // Back-substitute in reverse elimination order. Variables that vanished
  // into a step without being eliminated themselves are unconstrained in
  // the projected system; they default to 0 before their step is evaluated.
  FmOutcome out;
  out.feasible = true;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    for (const auto* group : {&it->uppers, &it->lowers})
      for (const LinCon& c : *group)
        for (const auto& [var, coef] : c.coeffs)
          if (var != it->var) out.witness.try_emplace(var, Rational(0));
    std::optional<Bound> upper;
    std::optional<Bound> lower;
    for (const auto& u : it->uppers) {
      Rational cu = u.coeffs.at(it->var);
      Bound b{(u.bound - eval_rest(u, it->var, out.witness)) / cu, u.strict};
      if (!upper || b.value < upper->value ||
          (b.value == upper->value && b.strict && !upper->strict))
        upper = b;
    }
    for (const auto& l : it->lowers) {
      Rational cl = l.coeffs.at(it->var);  // negative
      Bound b{(l.bound - eval_rest(l, it->var, out.witness)) / cl, l.strict};
      if (!lower || b.value > lower->value ||
          (b.value == lower->value && b.strict && !lower->strict))
        lower = b;
    }
    Rational value;
    if (!lower && !upper) {
      value = 0;
    } else if (!lower) {
      value = upper->strict ? upper->value - 1 : upper->value;
    } else if (!upper) {
      value = lower->strict ? lower->value + 1 : lower->value;
    } else if (lower->value < upper->value) {
      value = (lower->value + upper->value) / 2;
    } else {
      // Feasibility guarantees the closed interval is nonempty.
      value = lower->value;
    }
    out.witness[it->var] = value;
  }
  return out;
}

/// Constraints contributed by one literal (without disequality splitting).
inline void append_constraints(const TheoryLiteral& lit, std::size_t origin,
                               std::vector<LinCon>& out) {
  LinCon base;
  for (const auto& [var, c] : lit.atom.coeffs) base.coeffs.emplace(var, Rational(c));
  base.bound = lit.atom.constant;
  base.origins = {origin};

  auto negated = [&]() {
    LinCon n = base;
    for (auto& [var, c] : n.coeffs) c = -c;
    n.bound = -base.bound;
    return n;
  };

  switch (lit.atom.rel) {
    case Relation::LE:
      if (lit.phase) {
        base.strict = false;
        out.push_back(std::move(base));
      } else {  // t > k
        LinCon n = negated();
        n.strict = true;
        out.push_back(std::move(n));
      }
      return;
    case Relation::LT:
      if (lit.phase) {
        base.strict = true;
        out.push_back(std::move(base));
      } else {  // t >= k
        LinCon n = negated();
        n.strict = false;
        out.push_back(std::move(n));
      }
      return;
    case Relation::EQ: {
      // Positive EQ contributes both bounds; negative EQ is handled by the
      // caller's case split.
      LinCon le = base;
      le.strict = false;
      LinCon ge = negated();
      ge.strict = false;
      out.push_back(std::move(le));
      out.push_back(std::move(ge));
      return;
    }
  }
}

}  // namespace lra_detail

/// Decides T-consistency of a conjunction of theory literals by exact
/// Fourier-Motzkin elimination. Negated equalities are case-split into a
/// < and a > branch, depth-first; the conjunction is consistent iff some
/// branch is. Returns a satisfying witness or an inconsistent subset of
/// the input (the union of per-branch conflict origins).
inline ConsistencyVerdict check_conjunction(const std::vector<TheoryLiteral>& lits) {
  using namespace lra_detail;

  std::vector<LinCon> base;
  std::vector<std::size_t> disequalities;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (lits[i].atom.rel == Relation::EQ && !lits[i].phase)
      disequalities.push_back(i);
    else
      append_constraints(lits[i], i, base);
  }

  std::set<std::size_t> all_conflicts;
  std::optional<FmOutcome> sat_outcome;

  // DFS over the 2^d sides of the disequalities.
  std::vector<bool> side(disequalities.size(), false);  // false: <, true: >
  std::size_t branch_count = std::size_t{1} << disequalities.size();
  for (std::size_t b = 0; b < branch_count && !sat_outcome; ++b) {
    std::vector<LinCon> work = base;
    for (std::size_t d = 0; d < disequalities.size(); ++d) {
      const TheoryLiteral& lit = lits[disequalities[d]];
      LinCon c;
      for (const auto& [var, k] : lit.atom.coeffs) c.coeffs.emplace(var, Rational(k));
      c.bound = lit.atom.constant;
      c.strict = true;
      c.origins = {disequalities[d]};
      bool greater = (b >> d) & 1;
      if (greater) {
        for (auto& [var, k] : c.coeffs) k = -k;
        c.bound = -c.bound;
      }
      work.push_back(std::move(c));
    }
    FmOutcome r = fourier_motzkin(std::move(work));
    if (r.feasible)
      sat_outcome = std::move(r);
    else
      all_conflicts.insert(r.conflict_origins.begin(), r.conflict_origins.end());
  }

  if (sat_outcome) {
    // Every variable of the input appears in the witness.
    auto& w = sat_outcome->witness;
    for (const auto& l : lits)
      for (const auto& [var, c] : l.atom.coeffs)
        w.try_emplace(var, Rational(0));
    for (const auto& l : lits)
      if (!l.evaluate(w))
        throw std::logic_error("internal: witness fails literal " + l.to_string());
    return ConsistencyVerdict::sat(std::move(w));
  }

  std::vector<TheoryLiteral> core;
  for (std::size_t i : all_conflicts) core.push_back(lits[i]);
  return ConsistencyVerdict::unsat(std::move(core));
}

/// Deletion-based core minimization: removal is attempted literal by
/// literal in input order, so results are deterministic. The output is
/// inconsistent and minimal under single-literal deletion.
inline std::vector<TheoryLiteral> minimize_core(std::vector<TheoryLiteral> lits) {
  if (check_conjunction(lits).consistent)
    throw std::invalid_argument("minimize_core: input conjunction is consistent");
  std::size_t i = 0;
  while (i < lits.size()) {
    std::vector<TheoryLiteral> trial = lits;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    if (!check_conjunction(trial).consistent)
      lits = std::move(trial);
    else
      ++i;
  }
  return lits;
}

/// Result of equality elimination: the atoms added to the beta block plus
/// the defining lemmas tying each equality to its bound pair.
struct EqElimination {
  std::vector<LinearAtom> extra_atoms;
  std::vector<TLemma> defining_lemmas;
};

/// For each equality atom (t = b) in the alpha block, registers (t <= b)
/// and the canonical form of (t >= b) as extra atoms (skipping ones already
/// present) and emits the three clauses of
///   (t = b)  <->  (t <= b) and (t >= b).
/// Idempotent: repeated calls register nothing new and return the same
/// lemma set.
inline EqElimination eliminate_equalities(const TFormula& formula, AtomMap& map) {
  for (const AtomKey& key : first_occurrence_atoms(formula)) {
    if (!map.contains(key))
      throw missing_atom_error("atom not registered: " + atom_text(key));
  }

  EqElimination out;
  std::size_t alpha = map.alpha_size();
  for (std::size_t i = 0; i < alpha; ++i) {
    // Copy: add_beta below may invalidate references into the map.
    AtomKey key = map.atom_at(static_cast<int>(i));
    const auto* eq_ptr = std::get_if<LinearAtom>(&key);
    if (!eq_ptr || eq_ptr->rel != Relation::EQ) continue;
    const LinearAtom eq = *eq_ptr;

    LinearAtom le = eq;  // t <= b: already canonical (leading coeff positive)
    le.rel = Relation::LE;
    LinearAtom lt = eq;  // (t >= b) is stored as the negation of (t < b)
    lt.rel = Relation::LT;

    for (const LinearAtom& extra : {le, lt}) {
      if (!map.contains(AtomKey(extra))) {
        map.add_beta(AtomKey(extra));
        out.extra_atoms.push_back(extra);
      }
    }

    // (t=b) -> (t<=b);  (t=b) -> (t>=b);  (t<=b) & (t>=b) -> (t=b).
    out.defining_lemmas.push_back(TLemma({{eq, false}, {le, true}}));
    out.defining_lemmas.push_back(TLemma({{eq, false}, {lt, false}}));
    out.defining_lemmas.push_back(TLemma({{eq, true}, {le, false}, {lt, true}}));
  }
  return out;
}

}  // namespace tobdd
