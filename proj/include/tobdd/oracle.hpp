// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tobdd/atom_map.hpp"
#include "tobdd/compiler.hpp"
#include "tobdd/errors.hpp"
#include "tobdd/formula.hpp"
#include "tobdd/theory_solver.hpp"

// Brute-force ground truth for small instances. The oracle shares the
// theory solver with the pipeline (one exact decision procedure) but
// nothing of the enumerator or the BDD engine, so enumeration and
// compilation bugs cannot confirm themselves here.

namespace tobdd {

/// The four assignment classes of a formula over alpha: T-consistent and
/// T-inconsistent total assignments propositionally satisfying it, and the
/// same for its negation. The four lists are pairwise disjoint and
/// partition all 2^|alpha| assignments.
struct AssignmentSets {
  std::vector<Assignment> ctta, itta, ctta_neg, itta_neg;

  std::size_t total() const {
    return ctta.size() + itta.size() + ctta_neg.size() + itta_neg.size();
  }
};

/// Exhaustively classifies every total assignment over the map's alpha
/// block: evaluates the formula's abstraction and checks the refined
/// literal set for T-consistency. Assignments appear in lexicographic
/// order by variable index, false before true.
inline AssignmentSets brute_ctta(const TFormula& formula, const AtomMap& map,
                                 std::size_t max_atoms = 20) {
  const std::size_t n = map.alpha_size();
  if (n > max_atoms)
    throw resource_limit_error("brute_ctta: alpha has " + std::to_string(n) +
                               " atoms, cap is " + std::to_string(max_atoms));
  BoolExpr phi = abstract(formula, map);

  AssignmentSets sets;
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t bits = 0; bits < limit; ++bits) {
    Assignment a;
    for (std::size_t i = 0; i < n; ++i) {
      bool value = (bits >> (n - 1 - i)) & 1;  // index 0 most significant
      a.set(static_cast<int>(i), value);
    }
    bool sat = phi.evaluate([&](int v) { return a.at(v); });
    std::vector<TheoryLiteral> literals;
    for (std::size_t i = 0; i < n; ++i) {
      const AtomKey& key = map.atom_at(static_cast<int>(i));
      if (const auto* atom = std::get_if<LinearAtom>(&key))
        literals.push_back({*atom, a.at(static_cast<int>(i))});
    }
    bool consistent = check_conjunction(literals).consistent;
    (sat ? (consistent ? sets.ctta : sets.itta)
         : (consistent ? sets.ctta_neg : sets.itta_neg))
        .push_back(a);
  }
  return sets;
}

/// Checks the rule-out property of a lemma set against the inconsistent
/// assignments. Without extra atoms: every rho must propositionally falsify
/// some lemma. With extra atoms: rho conjoined with all lemma abstractions
/// must be propositionally unsatisfiable over alpha and beta, checked by
/// exhaustive beta extension.
inline bool verify_ruleout(const std::vector<TLemma>& lemmas,
                           const AssignmentSets& sets, const AtomMap& map) {
  auto lemma_satisfied = [&](const TLemma& lemma, const Assignment& a) {
    for (const auto& lit : lemma.literals) {
      int idx = map.index_of(AtomKey(lit.atom));
      if (a.at(idx) == lit.phase) return true;
    }
    return false;
  };

  const std::vector<int> betas = map.beta_indices();
  for (const Assignment& rho : sets.itta) {
    if (betas.empty()) {
      bool falsifies_some = false;
      for (const TLemma& lemma : lemmas)
        if (!lemma_satisfied(lemma, rho)) {
          falsifies_some = true;
          break;
        }
      if (!falsifies_some) return false;
    } else {
      const std::uint64_t limit = std::uint64_t{1} << betas.size();
      for (std::uint64_t bits = 0; bits < limit; ++bits) {
        Assignment ext = rho;
        for (std::size_t i = 0; i < betas.size(); ++i)
          ext.set(betas[i], (bits >> i) & 1);
        bool all_satisfied = true;
        for (const TLemma& lemma : lemmas)
          if (!lemma_satisfied(lemma, ext)) {
            all_satisfied = false;
            break;
          }
        if (all_satisfied) return false;  // some extension survives all lemmas
      }
    }
  }
  return true;
}

/// True iff the compiled root's satisfying assignments over alpha are
/// exactly the oracle's CTTA.
inline bool verify_compiled(const TDD& t, const AssignmentSets& sets) {
  std::vector<Assignment> got = t.manager->sat_assignments(t.root, t.alpha_set());
  std::vector<Assignment> want = sets.ctta;
  std::sort(want.begin(), want.end());
  return got == want;
}

struct RandomFormulaOptions {
  int n_vars = 4;    // <= 4
  int n_atoms = 6;   // <= 6
  int depth = 5;     // <= 5
  double eq_probability = 0.3;
};

/// Deterministic small-formula generator: atoms are small-coefficient
/// constraints over at most four variables, equalities appearing with the
/// configured probability so the extra-atom path gets exercised.
inline TFormula random_formula(std::uint64_t seed,
                               const RandomFormulaOptions& opts = {}) {
  std::mt19937_64 rng(seed);
  static const char* kVars[] = {"x", "y", "z", "w"};
  const int n_vars = std::min(opts.n_vars, 4);

  std::uniform_int_distribution<int> coeff_dist(-3, 3);
  std::uniform_int_distribution<int> const_dist(-5, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<TFormula> leaves;
  std::set<LinearAtom> pool;
  int attempts = 0;
  while (static_cast<int>(leaves.size()) < opts.n_atoms && attempts < 200) {
    ++attempts;
    RawConstraint raw;
    std::uniform_int_distribution<int> width_dist(1, n_vars);
    int width = width_dist(rng);
    std::vector<int> indices(static_cast<std::size_t>(n_vars));
    for (int i = 0; i < n_vars; ++i) indices[static_cast<std::size_t>(i)] = i;
    std::shuffle(indices.begin(), indices.end(), rng);
    for (int i = 0; i < width; ++i) {
      int c = coeff_dist(rng);
      if (c == 0) c = 1;
      raw.coeffs[kVars[indices[static_cast<std::size_t>(i)]]] = Rational(c);
    }
    raw.rhs = Rational(const_dist(rng));
    double roll = unit(rng);
    raw.rel = roll < opts.eq_probability ? RawRelation::EQ
              : roll < 0.5 + opts.eq_probability / 2 ? RawRelation::LE
              : roll < 0.75 + opts.eq_probability / 4 ? RawRelation::LT
                                                      : RawRelation::GE;
    NormalizedAtom norm = normalize_atom(raw);
    if (norm.is_constant()) continue;
    if (!pool.insert(*norm.atom).second) continue;
    TFormula leaf = TFormula::theory(*norm.atom);
    leaves.push_back(norm.sign ? leaf : TFormula::make_not(leaf));
  }
  if (leaves.empty()) {
    LinearAtom fallback;
    fallback.coeffs.emplace("x", BigInt(1));
    fallback.constant = 0;
    fallback.rel = Relation::LE;
    leaves.push_back(TFormula::theory(fallback));
  }

  std::uniform_int_distribution<std::size_t> leaf_pick(0, leaves.size() - 1);
  std::function<TFormula(int)> gen = [&](int depth) -> TFormula {
    // The root is always a connective so single-atom formulas stay rare.
    if (depth >= opts.depth || (depth > 0 && unit(rng) < 0.3))
      return leaves[leaf_pick(rng)];
    double roll = unit(rng);
    if (roll < 0.30) {
      return TFormula::make_and({gen(depth + 1), gen(depth + 1)});
    } else if (roll < 0.60) {
      return TFormula::make_or({gen(depth + 1), gen(depth + 1)});
    } else if (roll < 0.75) {
      return TFormula::make_not(gen(depth + 1));
    } else if (roll < 0.85) {
      return TFormula::make_iff(gen(depth + 1), gen(depth + 1));
    } else if (roll < 0.95) {
      return TFormula::make_xor(gen(depth + 1), gen(depth + 1));
    }
    return TFormula::make_implies(gen(depth + 1), gen(depth + 1));
  };
  return gen(0);
}

}  // namespace tobdd
