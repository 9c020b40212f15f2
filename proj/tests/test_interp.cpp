#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "insep/interp.hpp"
#include "insep/syntax.hpp"
#include "testutil.hpp"

using namespace insep;
using namespace insep::interp;
namespace tu = testutil;

TEST_CASE("interp::ext follows the constructor semantics") {
  FiniteInterpretation I;
  for (const char* e : {"d0", "d1", "d2"}) I.add_elem(e);
  I.set_concept("A", "d0");
  I.set_concept("A", "d1");
  I.set_concept("B", "d1");
  I.add_edge("r", "d0", "d1");
  I.add_edge("r", "d1", "d2");
  I.add_edge("s", "d2", "d0");

  auto ids = [&](const std::set<int>& s) {
    std::set<std::string> out;
    for (int e : s) out.insert(I.elems[e]);
    return out;
  };
  REQUIRE(ids(ext(I, tu::con("(and A B)"))) == std::set<std::string>{"d1"});
  REQUIRE(ids(ext(I, tu::con("(or B (some s Top))"))) ==
          std::set<std::string>{"d1", "d2"});
  REQUIRE(ids(ext(I, tu::con("(not A)"))) == std::set<std::string>{"d2"});
  REQUIRE(ids(ext(I, tu::con("(some r B)"))) == std::set<std::string>{"d0"});
  REQUIRE(ids(ext(I, tu::con("(some (inv r) A)"))) ==
          std::set<std::string>{"d1", "d2"});
  // d0's only r-successor is d1, which is in A; d2 has no r-successor
  REQUIRE(ids(ext(I, tu::con("(all r A)"))) == std::set<std::string>{"d0", "d2"});
  REQUIRE(ids(ext(I, tu::con("Top"))) == std::set<std::string>{"d0", "d1", "d2"});
  REQUIRE(ext(I, tu::con("Bot")).empty());

  REQUIRE(satisfies(I, "d0", tu::con("(some r (some r Top))")));
  REQUIRE(!satisfies(I, "d1", tu::con("(some r (some r Top))")));
}

TEST_CASE("interp::satisfies_axiom covers all three axiom kinds") {
  FiniteInterpretation I;
  I.add_elem("x");
  I.add_elem("y");
  I.set_concept("A", "x");
  I.set_concept("B", "x");
  I.add_edge("r", "x", "y");
  I.add_edge("s", "x", "y");
  I.add_edge("q", "y", "x");

  REQUIRE(satisfies_axiom(I, tu::doc("(sub A B)").tbox.axioms[0]));
  REQUIRE(!satisfies_axiom(I, tu::doc("(sub A (some r A))").tbox.axioms[0]));
  REQUIRE(satisfies_axiom(I, tu::doc("(equiv A B)").tbox.axioms[0]));
  REQUIRE(!satisfies_axiom(I, tu::doc("(equiv A Top)").tbox.axioms[0]));
  REQUIRE(satisfies_axiom(I, tu::doc("(rsub r s)").tbox.axioms[0]));
  REQUIRE(satisfies_axiom(I, tu::doc("(rsub r (inv q))").tbox.axioms[0]));
  REQUIRE(!satisfies_axiom(I, tu::doc("(rsub r q)").tbox.axioms[0]));
  REQUIRE(satisfies_axiom(I, tu::doc("(rsub (inv r) q)").tbox.axioms[0]));

  I.set_individual("x", "x");
  I.set_individual("y", "y");
  syntax::Document d = tu::doc("(sub A B) (ca A x) (ra r x y)");
  REQUIRE(satisfies_kb(I, {d.tbox, d.abox}));
  syntax::Document d2 = tu::doc("(ca A y)");
  REQUIRE(!satisfies_abox(I, d2.abox));
  // assertions about unmapped individuals are unsatisfied
  syntax::Document d3 = tu::doc("(ca A z)");
  REQUIRE(!satisfies_abox(I, d3.abox));
}

TEST_CASE("interp::to_sexpr round-trips interpretations") {
  tu::Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    tu::SymbolPool pool = tu::SymbolPool::make(3, 2);
    FiniteInterpretation I =
        tu::random_interp(rng, pool, 1 + tu::pick(rng, 5), 0.4, tu::pick(rng, 3));
    FiniteInterpretation J = interpretation_from_sexpr(to_sexpr(I));
    REQUIRE(I.elems == J.elems);
    REQUIRE(I.concept_ext == J.concept_ext);
    REQUIRE(I.role_ext == J.role_ext);
    REQUIRE(I.individuals == J.individuals);
  }

  FiniteInterpretation I;
  I.add_elem("d0");
  I.add_elem("d1");
  I.set_individual("a", "d0");
  REQUIRE_THROWS_AS(I.set_individual("b", "d0"), std::invalid_argument);
  REQUIRE_THROWS_AS(I.at("missing"), std::invalid_argument);
}

TEST_CASE("interp::SimTable matches brute-force relation enumeration") {
  tu::Rng rng(17);
  for (int iter = 0; iter < 250; ++iter) {
    tu::SymbolPool pool = tu::SymbolPool::make(2, 2);
    FiniteInterpretation I1 =
        tu::random_interp(rng, pool, 1 + tu::pick(rng, 4), 0.45);
    FiniteInterpretation I2 =
        tu::random_interp(rng, pool, 1 + tu::pick(rng, 4), 0.45);
    syntax::Signature sg;
    for (const auto& c : pool.concepts)
      if (tu::coin(rng, 0.8)) sg.concepts.insert(c);
    for (const auto& r : pool.roles)
      if (tu::coin(rng, 0.8)) sg.roles.insert(r);
    for (bool bisim : {false, true}) {
      SimTable st(I1, I2, sg, bisim);
      std::set<std::pair<int, int>> got;
      for (auto p : st.alive_pairs()) got.insert(p);
      REQUIRE(got == tu::brute_greatest_sim(I1, I2, sg, bisim));
    }
  }
}

TEST_CASE("interp::SimTable why-certificates justify every dead pair") {
  tu::Rng rng(19);
  for (int iter = 0; iter < 60; ++iter) {
    tu::SymbolPool pool = tu::SymbolPool::make(2, 2);
    FiniteInterpretation I1 = tu::random_interp(rng, pool, 2 + tu::pick(rng, 3), 0.5);
    FiniteInterpretation I2 = tu::random_interp(rng, pool, 2 + tu::pick(rng, 3), 0.5);
    syntax::Signature sg = pool.signature();
    SimTable st(I1, I2, sg, false);
    for (std::size_t i = 0; i < I1.size(); ++i)
      for (std::size_t j = 0; j < I2.size(); ++j) {
        int x = static_cast<int>(i), y = static_cast<int>(j);
        if (st.holds(x, y)) continue;
        SimWitness w = st.why(x, y);
        if (w.kind == SimWitness::Base) {
          REQUIRE(I1.in_concept(w.concept_name, x));
          REQUIRE(!I2.in_concept(w.concept_name, y));
        } else {
          REQUIRE(w.kind == SimWitness::Zig);
          // the cited successor defeats every response, strictly earlier
          REQUIRE(I1.has_edge(w.role, x, w.succ));
          for (int y2 : st.succ2(w.role, y)) {
            REQUIRE(!st.holds(w.succ, y2));
            REQUIRE(st.removal_time(w.succ, y2) < st.removal_time(x, y));
          }
        }
      }
  }
}

TEST_CASE("interp::check_bisimulation implies simulation both ways") {
  tu::Rng rng(31);
  int bisimilar_seen = 0;
  for (int iter = 0; iter < 200; ++iter) {
    tu::SymbolPool pool = tu::SymbolPool::make(2, 1);
    FiniteInterpretation I1 = tu::random_interp(rng, pool, 1 + tu::pick(rng, 3), 0.5);
    FiniteInterpretation I2 = tu::random_interp(rng, pool, 1 + tu::pick(rng, 3), 0.5);
    syntax::Signature sg = pool.signature();
    const std::string& d1 = I1.elems[tu::pick(rng, static_cast<int>(I1.size()))];
    const std::string& d2 = I2.elems[tu::pick(rng, static_cast<int>(I2.size()))];
    if (check_bisimulation(I1, d1, I2, d2, sg).holds) {
      ++bisimilar_seen;
      REQUIRE(check_simulation(I1, d1, I2, d2, sg).holds);
      REQUIRE(check_simulation(I2, d2, I1, d1, sg).holds);
    }
  }
  REQUIRE(bisimilar_seen > 0);
}

TEST_CASE("interp: equisimilarity does not imply bisimilarity") {
  // two pointed interpretations that simulate each other but are not
  // bisimilar: the second point has an extra unlabeled successor
  FiniteInterpretation I1;
  I1.add_elem("d1");
  I1.add_elem("e1");
  I1.set_concept("A", "e1");
  I1.add_edge("r", "d1", "e1");

  FiniteInterpretation I2;
  I2.add_elem("d2");
  I2.add_elem("e2");
  I2.add_elem("e3");
  I2.set_concept("A", "e2");
  I2.add_edge("r", "d2", "e2");
  I2.add_edge("r", "d2", "e3");

  syntax::Signature sg = tu::sig("concept:A;role:r");
  RelationResult fwd = check_simulation(I1, "d1", I2, "d2", sg);
  RelationResult bwd = check_simulation(I2, "d2", I1, "d1", sg);
  REQUIRE(fwd.holds);
  REQUIRE(bwd.holds);
  REQUIRE(!check_bisimulation(I1, "d1", I2, "d2", sg).holds);
  REQUIRE(!check_bisimulation(I2, "d2", I1, "d1", sg).holds);

  // returned witness relations check out by hand
  for (const auto& [x, y] : fwd.witness) {
    if (x == "e1") REQUIRE(y == "e2");
    if (x == "d1") REQUIRE(y == "d2");
  }
}

TEST_CASE("interp: simulation preserves EL concept membership") {
  tu::Rng rng(37);
  int transfers = 0;
  for (int iter = 0; iter < 150; ++iter) {
    tu::SymbolPool pool = tu::SymbolPool::make(2, 2);
    FiniteInterpretation I1 = tu::random_interp(rng, pool, 1 + tu::pick(rng, 3), 0.5);
    FiniteInterpretation I2 = tu::random_interp(rng, pool, 1 + tu::pick(rng, 4), 0.5);
    syntax::Signature sg = pool.signature();
    const std::string& d1 = I1.elems[tu::pick(rng, static_cast<int>(I1.size()))];
    const std::string& d2 = I2.elems[tu::pick(rng, static_cast<int>(I2.size()))];
    if (!check_simulation(I1, d1, I2, d2, sg).holds) continue;
    for (int k = 0; k < 10; ++k) {
      syntax::ConceptPtr c = tu::random_el_concept(rng, pool, 3);
      if (satisfies(I1, d1, c)) {
        REQUIRE(satisfies(I2, d2, c));
        ++transfers;
      }
    }
  }
  REQUIRE(transfers > 0);
}

TEST_CASE("interp::check_simulation witnesses re-validate in one pass") {
  tu::Rng rng(41);
  int nonempty = 0;
  for (int iter = 0; iter < 100; ++iter) {
    tu::SymbolPool pool = tu::SymbolPool::make(2, 2);
    FiniteInterpretation I1 = tu::random_interp(rng, pool, 1 + tu::pick(rng, 3), 0.5);
    FiniteInterpretation I2 = tu::random_interp(rng, pool, 1 + tu::pick(rng, 3), 0.5);
    syntax::Signature sg = pool.signature();
    RelationResult res =
        check_simulation(I1, I1.elems[0], I2, I2.elems[0], sg);
    if (!res.holds) continue;
    ++nonempty;
    std::set<std::pair<std::string, std::string>> rel(res.witness.begin(),
                                                      res.witness.end());
    REQUIRE(rel.count({I1.elems[0], I2.elems[0]}) == 1);
    for (const auto& [x, y] : rel) {
      for (const auto& a : sg.concepts)
        if (I1.in_concept(a, I1.at(x))) REQUIRE(I2.in_concept(a, I2.at(y)));
      for (const auto& r : sg.roles) {
        auto it = I1.role_ext.find(r);
        if (it == I1.role_ext.end()) continue;
        for (auto [f, t] : it->second) {
          if (f != I1.at(x)) continue;
          bool matched = false;
          auto jt = I2.role_ext.find(r);
          if (jt != I2.role_ext.end())
            for (auto [f2, t2] : jt->second)
              if (f2 == I2.at(y) && rel.count({I1.elems[t], I2.elems[t2]})) {
                matched = true;
                break;
              }
          REQUIRE(matched);
        }
      }
    }
  }
  REQUIRE(nonempty > 0);
}

TEST_CASE("interp::check_homomorphism matches exhaustive map search") {
  tu::Rng rng(43);
  for (int iter = 0; iter < 250; ++iter) {
    tu::SymbolPool pool = tu::SymbolPool::make(2, 2);
    FiniteInterpretation src =
        tu::random_interp(rng, pool, 1 + tu::pick(rng, 3), 0.5, tu::pick(rng, 2));
    FiniteInterpretation dst =
        tu::random_interp(rng, pool, 1 + tu::pick(rng, 4), 0.5, tu::pick(rng, 3));
    syntax::Signature sg = pool.signature();
    for (bool anchored : {false, true}) {
      HomResult got = check_homomorphism(src, dst, sg, anchored);
      REQUIRE(got.exists == tu::brute_hom_exists(src, dst, sg, anchored));
      if (!got.exists) continue;
      // the returned mapping is a real homomorphism
      for (const auto& a : sg.concepts)
        for (std::size_t e = 0; e < src.size(); ++e)
          if (src.in_concept(a, static_cast<int>(e)))
            REQUIRE(dst.in_concept(a, dst.at(got.mapping.at(src.elems[e]))));
      for (const auto& r : sg.roles) {
        auto it = src.role_ext.find(r);
        if (it == src.role_ext.end()) continue;
        for (auto [x, y] : it->second)
          REQUIRE(dst.has_edge(r, dst.at(got.mapping.at(src.elems[x])),
                               dst.at(got.mapping.at(src.elems[y]))));
      }
      if (anchored)
        for (const auto& [name, e] : src.individuals)
          REQUIRE(dst.at(got.mapping.at(src.elems[e])) ==
                  dst.individuals.at(name));
    }
  }
}

TEST_CASE("interp::check_homomorphism handles reflexive edges") {
  FiniteInterpretation src;
  src.add_elem("x");
  src.add_edge("r", "x", "x");
  FiniteInterpretation dst;
  dst.add_elem("u");
  dst.add_elem("v");
  dst.add_edge("r", "u", "v");
  dst.add_edge("r", "v", "u");
  syntax::Signature sg = tu::sig("role:r");
  REQUIRE(!check_homomorphism(src, dst, sg, false).exists);
  dst.add_edge("r", "v", "v");
  HomResult res = check_homomorphism(src, dst, sg, false);
  REQUIRE(res.exists);
  REQUIRE(res.mapping.at("x") == "v");
}
