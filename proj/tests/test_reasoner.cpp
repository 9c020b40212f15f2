#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "insep/interp.hpp"
#include "insep/reasoner.hpp"
#include "insep/syntax.hpp"
#include "testutil.hpp"

using namespace insep;
using namespace insep::reasoner;
namespace tu = testutil;
using syntax::Role;

TEST_CASE("reasoner::RoleHierarchy closes chains and inverses") {
  RoleHierarchy h(tu::tbox("(rsub r s) (rsub s t) (rsub (inv q) t)"));
  REQUIRE(h.subsumes(Role{"r", false}, Role{"r", false}));
  REQUIRE(h.subsumes(Role{"r", false}, Role{"s", false}));
  REQUIRE(h.subsumes(Role{"r", false}, Role{"t", false}));
  REQUIRE(!h.subsumes(Role{"t", false}, Role{"r", false}));
  // r <= s entails r- <= s-
  REQUIRE(h.subsumes(Role{"r", true}, Role{"t", true}));
  REQUIRE(h.subsumes(Role{"q", true}, Role{"t", false}));
  REQUIRE(h.subsumes(Role{"q", false}, Role{"t", true}));

  std::vector<Role> sup = h.supers(Role{"r", false});
  std::set<std::string> reprs;
  for (const auto& s : sup) reprs.insert(s.str());
  REQUIRE(reprs == std::set<std::string>{"r", "s", "t"});
  REQUIRE(h.role_names() == std::set<std::string>{"q", "r", "s", "t"});

  // brute-force reflexive-transitive closure agrees on random hierarchies
  tu::Rng rng(5);
  for (int iter = 0; iter < 50; ++iter) {
    tu::SymbolPool pool = tu::SymbolPool::make(1, 4);
    syntax::TBox t;
    int n_ax = 1 + tu::pick(rng, 4);
    for (int i = 0; i < n_ax; ++i)
      t.axioms.push_back(syntax::Axiom::rsub(
          Role{tu::choice(rng, pool.roles), tu::coin(rng, 0.3)},
          Role{tu::choice(rng, pool.roles), tu::coin(rng, 0.3)}));
    RoleHierarchy rh(t);
    // closure by iteration over the axiom list
    std::set<std::pair<std::string, std::string>> closed;
    auto key = [](const Role& r) { return r.str(); };
    for (const auto& rn : rh.role_names())
      for (bool inv : {false, true}) {
        Role r{rn, inv};
        closed.insert({key(r), key(r)});
      }
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& ax : t.axioms)
        for (bool flip : {false, true}) {
          Role from = flip ? ax.r1.inverse() : ax.r1;
          Role to = flip ? ax.r2.inverse() : ax.r2;
          std::vector<std::pair<std::string, std::string>> add;
          for (const auto& [a, b] : closed)
            if (b == key(from)) add.push_back({a, key(to)});
          for (const auto& p : add)
            if (closed.insert(p).second) grew = true;
        }
    }
    for (const auto& a : rh.role_names())
      for (bool ia : {false, true})
        for (const auto& b : rh.role_names())
          for (bool ib : {false, true}) {
            Role ra{a, ia}, rb{b, ib};
            REQUIRE(rh.subsumes(ra, rb) ==
                    (closed.count({key(ra), key(rb)}) > 0));
          }
  }
}

TEST_CASE("reasoner::el_subsumes decides hand-checked subsumptions") {
  syntax::TBox t = tu::tbox("(sub A (some r B)) (sub B E)");
  REQUIRE(el_subsumes(t, tu::con("A"), tu::con("(some r E)")));
  REQUIRE(el_subsumes(t, tu::con("A"), tu::con("(some r Top)")));
  REQUIRE(!el_subsumes(t, tu::con("A"), tu::con("(some r A)")));
  REQUIRE(!el_subsumes(t, tu::con("A"), tu::con("E")));
  REQUIRE(el_subsumes(t, tu::con("(and A B)"), tu::con("(and E (some r B))")));

  // cycles are fine for subsumption
  syntax::TBox cyc = tu::tbox("(sub A (some r A))");
  REQUIRE(el_subsumes(cyc, tu::con("A"), tu::con("(some r (some r A))")));
  REQUIRE(!el_subsumes(cyc, tu::con("(some r A)"), tu::con("A")));

  syntax::TBox conj = tu::tbox("(equiv A (and B E)) (sub (and B E) F)");
  REQUIRE(el_subsumes(conj, tu::con("A"), tu::con("F")));
  REQUIRE(el_subsumes(conj, tu::con("(and E B)"), tu::con("A")));
  REQUIRE(!el_subsumes(conj, tu::con("B"), tu::con("A")));

  // literals
  REQUIRE(el_subsumes(t, tu::con("Bot"), tu::con("A")));
  REQUIRE(el_subsumes(t, tu::con("A"), tu::con("Top")));
  REQUIRE(!el_subsumes(t, tu::con("A"), tu::con("Bot")));
  REQUIRE(!el_subsumes(t, tu::con("Top"), tu::con("A")));

  REQUIRE_THROWS_AS(el_subsumes(tu::tbox("(sub A (not B))"), tu::con("A"),
                                tu::con("B")),
                    UnsupportedFragment);
}

TEST_CASE("reasoner::el_subsumes agrees with small-model search") {
  tu::Rng rng(13);
  int confirmed_false = 0, confirmed_true = 0;
  for (int iter = 0; iter < 120; ++iter) {
    tu::SymbolPool pool = tu::SymbolPool::make(3, 1);
    syntax::TBox t = tu::random_el_tbox(rng, pool, 2 + tu::pick(rng, 3), 2);
    syntax::ConceptPtr c = tu::random_el_concept(rng, pool, 2);
    syntax::ConceptPtr d = tu::random_el_concept(rng, pool, 2);
    bool subsumed = el_subsumes(t, c, d);
    if (subsumed) {
      // sound: no small countermodel can exist
      REQUIRE(!tu::small_countermodel(t, c, d, 2));
      ++confirmed_true;
    } else {
      // complete: the canonical model is itself a countermodel
      ELCanonical can = el_canonical(t, c);
      REQUIRE(interp::satisfies_tbox(can.model, t));
      REQUIRE(interp::satisfies(can.model, can.root, c));
      REQUIRE(!interp::satisfies(can.model, can.root, d));
      ++confirmed_false;
    }
  }
  REQUIRE(confirmed_false > 0);
  REQUIRE(confirmed_true > 0);

  // one deeper exhaustive check over three-element domains
  syntax::TBox t = tu::tbox("(sub A (some r B)) (sub B E)");
  REQUIRE(!tu::small_countermodel(t, tu::con("A"), tu::con("(some r E)"), 3));
  REQUIRE(tu::small_countermodel(t, tu::con("A"), tu::con("(some r A)"), 3));
}

TEST_CASE("reasoner::el_classify is reflexive, transitive, order-stable") {
  tu::Rng rng(59);
  for (int iter = 0; iter < 30; ++iter) {
    tu::SymbolPool pool = tu::SymbolPool::make(4, 2);
    syntax::TBox t = tu::random_el_tbox(rng, pool, 3 + tu::pick(rng, 5), 2);
    SubsumptionMap m = el_classify(t);
    syntax::Signature sg = syntax::sig(t);
    for (const auto& a : sg.concepts) {
      REQUIRE(m.at(a).count(a) == 1);
      for (const auto& b : m.at(a))
        for (const auto& c : m.at(b)) REQUIRE(m.at(a).count(c) == 1);
    }
    // classification is insensitive to axiom order
    syntax::TBox shuffled = t;
    std::shuffle(shuffled.axioms.begin(), shuffled.axioms.end(), rng);
    REQUIRE(el_classify(shuffled) == m);
    // and agrees with one-at-a-time subsumption checks
    for (const auto& a : sg.concepts)
      for (const auto& b : sg.concepts)
        REQUIRE((m.at(a).count(b) == 1) ==
                el_subsumes(t, syntax::name(a), syntax::name(b)));
  }
}

TEST_CASE("reasoner::ELCore derives instance facts over an ABox") {
  syntax::Document d =
      tu::doc("(sub (some r B) C) (sub C (some s E)) (ca B b) (ra r a b)");
  ELCore core(d.tbox, {"B", "C", "E"}, &d.abox, kDefaultBudget);
  auto name_id = [&](const std::string& n) {
    const auto& names = core.names();
    return static_cast<int>(
        std::find(names.begin(), names.end(), n) - names.begin());
  };
  REQUIRE(core.has(core.elem_of_ind("a"), name_id("C")));
  REQUIRE(!core.has(core.elem_of_ind("b"), name_id("C")));
  REQUIRE(core.has(core.elem_of_ind("b"), name_id("B")));
  // the derived existential is satisfied through the canonical edges
  bool found = false;
  auto it = core.R().find("s");
  REQUIRE(it != core.R().end());
  for (auto [x, y] : it->second)
    if (x == core.elem_of_ind("a")) found = true;
  REQUIRE(found);
}

TEST_CASE("reasoner::HornSaturation finds hand-checked clashes") {
  auto consistent = [](const char* text) {
    syntax::Document d = tu::doc(text);
    return HornSaturation(d.tbox, d.abox).consistent();
  };
  REQUIRE(!consistent("(sub (and A B) Bot) (ca A a) (ca B a)"));
  REQUIRE(consistent("(sub (and A B) Bot) (ca A a) (ca B b)"));
  // value restriction pushes B along the edge into a clash
  REQUIRE(!consistent(
      "(sub A (all r B)) (sub (and B E) Bot) (ca A a) (ca E b) (ra r a b)"));
  REQUIRE(consistent(
      "(sub A (all r B)) (sub (and B E) Bot) (ca A a) (ca E b)"));
  // an unsatisfiable witness propagates back to its creator
  REQUIRE(!consistent("(sub A (some r B)) (sub B Bot) (ca A a)"));
  REQUIRE(consistent("(sub A (some r B)) (ca A a)"));
  // existential guard on the left fires across asserted edges
  REQUIRE(!consistent(
      "(sub (some r B) E) (sub (and A E) Bot) (ca A a) (ca B b) (ra r a b)"));
}

TEST_CASE("reasoner::HornSaturation never contradicts an explicit model") {
  tu::Rng rng(61);
  auto random_horn_tbox = [&](const tu::SymbolPool& pool, int n_axioms) {
    syntax::TBox t;
    for (int i = 0; i < n_axioms; ++i) {
      syntax::ConceptPtr body =
          tu::coin(rng) ? syntax::name(tu::choice(rng, pool.concepts))
                        : syntax::conj(
                              {syntax::name(tu::choice(rng, pool.concepts)),
                               syntax::name(tu::choice(rng, pool.concepts))});
      syntax::ConceptPtr head;
      switch (tu::pick(rng, 5)) {
        case 0:
          head = syntax::bot();
          break;
        case 1:
          head = syntax::exists(Role{tu::choice(rng, pool.roles), false},
                                syntax::name(tu::choice(rng, pool.concepts)));
          break;
        case 2:
          head = syntax::forall(Role{tu::choice(rng, pool.roles), false},
                                syntax::name(tu::choice(rng, pool.concepts)));
          break;
        default:
          head = syntax::name(tu::choice(rng, pool.concepts));
      }
      t.axioms.push_back(syntax::Axiom::sub(body, head));
    }
    return t;
  };
  int inconsistent_seen = 0, model_backed = 0;
  for (int iter = 0; iter < 150; ++iter) {
    tu::SymbolPool pool = tu::SymbolPool::make(3, 1, 2);
    syntax::TBox t = random_horn_tbox(pool, 2 + tu::pick(rng, 3));
    syntax::KB k{t, tu::random_abox(rng, pool, 1 + tu::pick(rng, 3))};
    bool engine = HornSaturation(k.tbox, k.abox).consistent();
    bool small_model = false;
    for (int n = static_cast<int>(k.abox.individuals().size());
         n <= 2 && !small_model; ++n) {
      if (n == 0) continue;
      std::vector<std::string> cs(pool.concepts.begin(), pool.concepts.end());
      std::vector<std::string> rs(pool.roles.begin(), pool.roles.end());
      small_model = tu::for_each_interp(cs, rs, n, [&](auto I) {
        std::vector<std::string> inds(k.abox.individuals().begin(),
                                      k.abox.individuals().end());
        // try every assignment of individuals to elements
        std::vector<int> h(inds.size(), 0);
        for (;;) {
          interp::FiniteInterpretation J = I;
          bool ok = true;
          std::set<int> used;
          for (std::size_t i = 0; i < inds.size() && ok; ++i) {
            if (!used.insert(h[i]).second) ok = false;  // injective naming
            else J.set_individual(inds[i], J.elems[h[i]]);
          }
          if (ok && interp::satisfies_kb(J, k)) return true;
          std::size_t c = 0;
          while (c < h.size() && ++h[c] == static_cast<int>(I.size()))
            h[c++] = 0;
          if (c == h.size()) return false;
        }
      });
    }
    if (small_model) {
      REQUIRE(engine);  // a model exists, so no clash may be reported
      ++model_backed;
    }
    if (!engine) ++inconsistent_seen;
  }
  REQUIRE(inconsistent_seen > 0);
  REQUIRE(model_backed > 0);
}

TEST_CASE("reasoner::DLLiteEngine closure and role analysis") {
  DLLiteEngine eng(tu::tbox(
      "(sub A (some r Top)) (sub (some (inv r) Top) B) (rsub r s)"));
  std::set<Basic> cl = eng.closure({Basic::concept_name("A")});
  REQUIRE(cl.count(Basic::some(Role{"r", false})) == 1);
  REQUIRE(cl.count(Basic::some(Role{"s", false})) == 1);
  REQUIRE(cl.count(Basic::concept_name("B")) == 0);
  std::set<Basic> wt = eng.witness_type(Role{"r", false});
  REQUIRE(wt.count(Basic::some(Role{"r", true})) == 1);
  REQUIRE(wt.count(Basic::concept_name("B")) == 1);
  REQUIRE(!eng.bad_role(Role{"r", false}));

  DLLiteEngine bad(tu::tbox(
      "(sub (some (inv r) Top) B) (sub (and B (some (inv r) Top)) Bot)"));
  REQUIRE(bad.bad_role(Role{"r", false}));
  REQUIRE(!bad.bad_role(Role{"r", true}));

  REQUIRE_THROWS_AS(DLLiteEngine(tu::tbox("(sub A (some r B))")),
                    UnsupportedFragment);
}

TEST_CASE("reasoner::kb_consistent covers all supported fragments") {
  auto consistent = [](const char* text) {
    return kb_consistent(tu::kb(text));
  };
  // EL KBs are always consistent
  REQUIRE(consistent("(sub A (some r B)) (ca A a)"));
  // DL-Lite: individual type clash
  REQUIRE(!consistent("(sub (and A B) Bot) (ca A a) (ca B a)"));
  REQUIRE(consistent("(sub (and A B) Bot) (ca A a)"));
  // DL-Lite: a required role whose witness type clashes
  REQUIRE(!consistent(
      "(sub A (some r Top)) (sub (some (inv r) Top) B) "
      "(sub (and B (some (inv r) Top)) Bot) (ca A a)"));
  // the same requirement discharged by an edge still clashes at the tail
  REQUIRE(!consistent(
      "(sub A (some r Top)) (sub (some (inv r) Top) B) "
      "(sub (and B (some (inv r) Top)) Bot) (ca A a) (ra r a b)"));
  // Horn
  REQUIRE(!consistent("(sub A (all r Bot)) (ca A a) (ra r a b)"));
  REQUIRE(consistent("(sub A (all r Bot)) (ca A a)"));
  REQUIRE_THROWS_AS(kb_consistent(tu::kb("(sub A (or B E)) (ca A a)")),
                    UnsupportedFragment);
}

TEST_CASE("reasoner: resource limits raise ResourceError") {
  syntax::TBox t = tu::tbox(
      "(sub A (some r B)) (sub B (some r E)) (sub E (some r F)) (sub F G)");
  REQUIRE_THROWS_AS(el_classify(t, /*budget=*/3), ResourceError);
  REQUIRE_THROWS_AS(
      el_subsumes(t, tu::con("A"), tu::con("G"), /*budget=*/2), ResourceError);

  // two witness types are needed; a cap of one trips
  syntax::Document d = tu::doc(
      "(sub A (and (some r B) (all r D))) (sub B (some r E)) (ca A a)");
  REQUIRE_THROWS_AS(HornSaturation(d.tbox, d.abox, /*witness_cap=*/1),
                    ResourceError);
  REQUIRE_NOTHROW(HornSaturation(d.tbox, d.abox, /*witness_cap=*/8));
}
