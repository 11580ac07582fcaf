// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "test_helpers.hpp"

using namespace tobdd;
using test_helpers::atom;
using test_helpers::formula;
using test_helpers::map_of;

TEST_CASE("atom normalization folds relations into canonical form") {
  SECTION("x >= 1 becomes the negation of x < 1") {
    NormalizedAtom n = normalize_atom({{{"x", Rational(1)}}, Rational(1), RawRelation::GE});
    REQUIRE_FALSE(n.is_constant());
    CHECK(n.atom->rel == Relation::LT);
    CHECK(n.atom->constant == Rational(1));
    CHECK_FALSE(n.sign);
  }
  SECTION("gcd scaling: 2x - 2y <= 6 becomes x - y <= 3") {
    NormalizedAtom n = normalize_atom(
        {{{"x", Rational(2)}, {"y", Rational(-2)}}, Rational(6), RawRelation::LE});
    REQUIRE_FALSE(n.is_constant());
    CHECK(n.sign);
    CHECK(n.atom->coeffs.at("x") == 1);
    CHECK(n.atom->coeffs.at("y") == -1);
    CHECK(n.atom->constant == Rational(3));
    CHECK(n.atom->rel == Relation::LE);
  }
  SECTION("variable-free atoms fold to constants") {
    NormalizedAtom n = normalize_atom({{}, Rational(2) - Rational(3), RawRelation::GE});
    // 0 >= -1 is true; 3 <= 2 rewritten as 0 <= -1 is false
    REQUIRE(n.is_constant());
    CHECK(n.sign);
    NormalizedAtom f = normalize_atom({{}, Rational(-1), RawRelation::LE});
    REQUIRE(f.is_constant());
    CHECK_FALSE(f.sign);
  }
  SECTION("negative leading coefficient flips the constraint") {
    // -x + y >= 1, i.e. y - x >= 1, canonicalizes to x - y <= -1
    NormalizedAtom n = normalize_atom(
        {{{"x", Rational(-1)}, {"y", Rational(1)}}, Rational(1), RawRelation::GE});
    REQUIRE_FALSE(n.is_constant());
    CHECK(n.sign);
    CHECK(n.atom->rel == Relation::LE);
    CHECK(n.atom->coeffs.at("x") == 1);
    CHECK(n.atom->coeffs.at("y") == -1);
    CHECK(n.atom->constant == Rational(-1));
  }
  SECTION("rational coefficients scale to integers with gcd 1") {
    NormalizedAtom n = normalize_atom(
        {{{"x", make_rational(1, 2)}, {"y", make_rational(3, 4)}}, Rational(1),
         RawRelation::LT});
    CHECK(n.atom->coeffs.at("x") == 2);
    CHECK(n.atom->coeffs.at("y") == 3);
    CHECK(n.atom->constant == Rational(4));
  }
  SECTION("equalities keep relation EQ and are not pre-split") {
    LinearAtom a = atom("(= x 1)");
    CHECK(a.rel == Relation::EQ);
  }
}

TEST_CASE("normalized atom evaluation agrees with the raw constraint") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coeff(-4, 4);
  std::uniform_int_distribution<int> rel_pick(0, 4);
  std::uniform_int_distribution<int> value_num(-20, 20);
  std::uniform_int_distribution<int> value_den(1, 5);
  const char* vars[] = {"x", "y", "z"};

  for (int round = 0; round < 200; ++round) {
    RawConstraint raw;
    for (const char* v : vars) raw.coeffs[v] = Rational(coeff(rng));
    raw.rhs = Rational(coeff(rng));
    raw.rel = static_cast<RawRelation>(rel_pick(rng));
    NormalizedAtom n = normalize_atom(raw);

    std::map<std::string, Rational> valuation;
    for (const char* v : vars)
      valuation[v] = make_rational(value_num(rng), value_den(rng));

    bool raw_value = raw.evaluate(valuation);
    bool normalized_value =
        n.is_constant() ? n.sign : (n.atom->evaluate(valuation) == n.sign);
    REQUIRE(raw_value == normalized_value);
  }
}

TEST_CASE("abstraction and refinement are inverse") {
  TFormula phi1 = formula("(or (<= x 0) (= x 1))");
  AtomMap map = map_of(phi1);

  SECTION("abstraction replaces atoms homomorphically") {
    BoolExpr e = abstract(phi1, map);
    REQUIRE(e.kind() == BoolKind::Or);
    CHECK(e.children()[0].var_index() == 0);
    CHECK(e.children()[1].var_index() == 1);
  }
  SECTION("Boolean atoms map to their own index") {
    TFormula f = formula("(or p (<= x 0))");
    AtomMap m = map_of(f);
    BoolExpr e = abstract(f, m);
    CHECK(e.children()[0].var_index() == m.index_of(AtomKey(std::string("p"))));
  }
  SECTION("refine inverts abstract") {
    CHECK(refine(abstract(phi1, map), map) == phi1);
  }
  SECTION("refine of a constant") {
    CHECK(refine(BoolExpr::constant(false), map) == TFormula::constant(false));
  }
  SECTION("refinement of the section-2 literal pair") {
    TFormula f = formula("(or (<= (- x y) 3) (= x z))");
    AtomMap m = map_of(f);
    TFormula back = refine(
        BoolExpr::make_and({BoolExpr::make_not(BoolExpr::var(0)), BoolExpr::var(1)}),
        m);
    CHECK(back == TFormula::make_and(
                      {TFormula::make_not(TFormula::theory(atom("(<= (- x y) 3)"))),
                       TFormula::theory(atom("(= x z)"))}));
  }
  SECTION("missing atom reports the atom") {
    AtomMap empty;
    REQUIRE_THROWS_AS(abstract(phi1, empty), missing_atom_error);
  }
  SECTION("unknown index reported") {
    REQUIRE_THROWS_AS(refine(BoolExpr::var(99), map), missing_atom_error);
  }
}

TEST_CASE("round-trip holds for random formulas") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    TFormula f = random_formula(seed);
    AtomMap map = map_of(f);
    REQUIRE(refine(abstract(f, map), map) == f);
  }
}

TEST_CASE("atom interning gives one index per semantic atom") {
  SECTION("two spellings of one constraint") {
    CHECK(atom("(<= x 0)") == atom("(>= 0 x)"));
  }
  SECTION("interned index is shared") {
    TFormula f = formula("(and (<= x 0) (>= 0 x))");
    AtomMap map = map_of(f);
    CHECK(map.size() == 1);
  }
  SECTION("scaled twin shares the atom") {
    CHECK(atom("(<= (* 2 x) 0)") == atom("(<= x 0)"));
  }
}

TEST_CASE("atom map enforces its bijection") {
  AtomMap map;
  int a = map.add_alpha(AtomKey(atom("(<= x 0)")));
  int b = map.add_alpha(AtomKey(atom("(= x 1)")));
  CHECK(a == 0);
  CHECK(b == 1);
  CHECK(map.add_alpha(AtomKey(atom("(<= x 0)"))) == a);  // no duplicates
  CHECK(map.alpha_size() == 2);
  int c = map.add_beta(AtomKey(atom("(<= x 1)")));
  CHECK(c == 2);
  CHECK(map.is_beta(c));
  CHECK_FALSE(map.is_beta(a));
  CHECK_THROWS_AS(map.add_alpha(AtomKey(atom("(<= y 0)"))), std::logic_error);
  AtomMap alpha = map.alpha_only();
  CHECK(alpha.size() == 2);
  CHECK(alpha.beta_count() == 0);
}

TEST_CASE("assignments order deterministically") {
  Assignment a;
  a.set(0, false);
  a.set(1, true);
  Assignment b;
  b.set(0, true);
  b.set(1, false);
  CHECK(a < b);
  CHECK(a.total_over(std::vector<int>{0, 1}));
  CHECK_FALSE(a.total_over(std::vector<int>{0, 1, 2}));
  CHECK_THROWS_AS(a.at(5), std::out_of_range);
}
