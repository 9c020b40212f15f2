#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "insep/reasoner.hpp"
#include "insep/syntax.hpp"
#include "testutil.hpp"

using namespace insep::syntax;
namespace tu = testutil;

TEST_CASE("syntax::concept constructors canonicalize conjunctions") {
  ConceptPtr a = name("A"), b = name("B");
  REQUIRE(conj({b, a})->repr == "(and A B)");
  REQUIRE(conj({a, b, a})->repr == "(and A B)");
  REQUIRE(conj({a, a})->repr == "A");        // single survivor collapses
  REQUIRE(conj({})->repr == "Top");          // empty conjunction is the unit
  REQUIRE(disj({})->repr == "Bot");
  REQUIRE(disj({b, a, b})->repr == "(or A B)");
  std::vector<ConceptPtr> flat = flatten_and(conj({a, conj({b, a})}));
  REQUIRE(flat.size() == 3);  // flattening recurses, dedup is per level
  for (const auto& k : flat) REQUIRE(k->ctor == Ctor::Name);
  REQUIRE(exists(Role{"r", true}, a)->repr == "(some (inv r) A)");
  REQUIRE(forall(Role{"r", false}, bot())->repr == "(all r Bot)");
  REQUIRE(Role{"r", true}.inverse().str() == "r");
}

TEST_CASE("syntax::parse_concept_text round-trips printed concepts") {
  std::vector<std::string> texts = {
      "Top",
      "Bot",
      "A",
      "(some r (and A B))",
      "(all (inv r) (or A (not B)))",
      "(and A (some r Top) (some r (some s E)))",
  };
  for (const auto& t : texts) {
    ConceptPtr c = parse_concept_text(t);
    REQUIRE(equal(parse_concept_text(c->repr), c));
  }
  tu::Rng rng(11);
  tu::SymbolPool pool = tu::SymbolPool::make(4, 2);
  for (int i = 0; i < 200; ++i) {
    ConceptPtr c = tu::random_el_concept(rng, pool, 3);
    REQUIRE(equal(parse_concept_text(c->repr), c));
  }
}

TEST_CASE("syntax::parse_document round-trips axioms and assertions") {
  const char* text = R"(
    ; a comment
    (sub A (some r B))
    (equiv E (and A (some s Top)))
    (rsub (inv r) s)
    (ca A ind1)
    (ra r ind1 ind2)
  )";
  Document d = parse_document(text);
  REQUIRE(d.tbox.axioms.size() == 3);
  REQUIRE(d.tbox.axioms[0].str() == "(sub A (some r B))");
  // conjuncts print in canonical (repr-sorted) order
  REQUIRE(d.tbox.axioms[1].str() == "(equiv E (and (some s Top) A))");
  REQUIRE(d.tbox.axioms[2].str() == "(rsub (inv r) s)");
  REQUIRE(d.abox.concept_assertions ==
          std::vector<std::pair<std::string, std::string>>{{"A", "ind1"}});
  REQUIRE(d.abox.role_assertions.size() == 1);
  REQUIRE(d.abox.individuals() == std::set<std::string>{"ind1", "ind2"});

  std::string printed;
  for (const auto& ax : d.tbox.axioms) printed += ax.str() + "\n";
  printed += "(ca A ind1)\n(ra r ind1 ind2)\n";
  Document d2 = parse_document(printed);
  REQUIRE(d2.tbox.axioms == d.tbox.axioms);
  REQUIRE(d2.abox.concept_assertions == d.abox.concept_assertions);
  REQUIRE(d2.abox.role_assertions == d.abox.role_assertions);
}

TEST_CASE("syntax::parse_document rejects malformed input") {
  REQUIRE_THROWS_AS(parse_document("(sub A"), ParseError);
  REQUIRE_THROWS_AS(parse_document("(sub A B))"), ParseError);
  REQUIRE_THROWS_AS(parse_document("(frob A B)"), ParseError);
  REQUIRE_THROWS_AS(parse_document("(sub A)"), ParseError);
  REQUIRE_THROWS_AS(parse_document("(some r A)"), ParseError);
  REQUIRE_THROWS_AS(parse_document("(ca (and A B) x)"), ParseError);
  REQUIRE_THROWS_AS(parse_concept_text("(and A)"), ParseError);
  REQUIRE_THROWS_AS(parse_concept_text("(inv r)"), ParseError);
  // one name cannot be both a concept and a role
  REQUIRE_THROWS_AS(parse_document("(sub A B) (rsub A s)"), ParseError);
  REQUIRE_THROWS_AS(parse_document("(sub A B) (ca B A)"), ParseError);
  try {
    parse_document("(sub A B)\n(sub A (and))");
    REQUIRE(false);
  } catch (const ParseError& e) {
    REQUIRE(e.line == 2);
    REQUIRE(e.col > 0);
  }
}

TEST_CASE("syntax::parse_signature accepts both layouts") {
  Signature inl = parse_signature("concept:A,B;role:r");
  REQUIRE(inl.concepts == std::set<std::string>{"A", "B"});
  REQUIRE(inl.roles == std::set<std::string>{"r"});
  Signature lines = parse_signature("concept A ; trailing comment\nconcept B\nrole r\n");
  REQUIRE(lines == inl);
  REQUIRE(parse_signature("").empty());
  REQUIRE_THROWS_AS(parse_signature("concept A\nrole A"), ParseError);

  Signature s = sig(parse_concept_text("(and A (some r (not B)))"));
  REQUIRE(s.concepts == std::set<std::string>{"A", "B"});
  REQUIRE(s.roles == std::set<std::string>{"r"});
  Document d = parse_document("(rsub (inv r) s) (ca A x) (ra t x y)");
  Signature ks = sig(insep::syntax::KB{d.tbox, d.abox});
  REQUIRE(ks.concepts == std::set<std::string>{"A"});
  REQUIRE(ks.roles == std::set<std::string>{"r", "s", "t"});
}

TEST_CASE("syntax::validate_fragment separates the supported fragments") {
  TBox el = tu::tbox("(sub (and A (some r B)) (some s Top))");
  REQUIRE(validate_fragment(el, FragmentTag::EL).ok);
  REQUIRE(!validate_fragment(tu::tbox("(sub A (some (inv r) B))"),
                             FragmentTag::EL).ok);
  REQUIRE(!validate_fragment(tu::tbox("(sub A (not B))"), FragmentTag::EL).ok);
  REQUIRE(!validate_fragment(tu::tbox("(rsub r s)"), FragmentTag::EL).ok);

  // acyclic EL: unique definitions for concept names, no cycles
  REQUIRE(validate_fragment(tu::tbox("(equiv A (some r B)) (sub B E)"),
                            FragmentTag::AcyclicEL).ok);
  REQUIRE(!validate_fragment(tu::tbox("(sub A B) (sub A E)"),
                             FragmentTag::AcyclicEL).ok);
  REQUIRE(!validate_fragment(tu::tbox("(equiv A (some r A))"),
                             FragmentTag::AcyclicEL).ok);
  REQUIRE(!validate_fragment(tu::tbox("(sub (some r A) B)"),
                             FragmentTag::AcyclicEL).ok);

  TBox dl = tu::tbox("(sub A (some r Top)) (sub (some (inv r) Top) B) "
                     "(sub (and A B) Bot)");
  REQUIRE(validate_fragment(dl, FragmentTag::DLLiteCore).ok);
  TBox dlh = tu::tbox("(rsub r s) (sub (some (inv s) Top) A)");
  REQUIRE(!validate_fragment(dlh, FragmentTag::DLLiteCore).ok);
  REQUIRE(validate_fragment(dlh, FragmentTag::DLLiteCoreH).ok);
  REQUIRE(!validate_fragment(tu::tbox("(sub A (some r B))"),
                             FragmentTag::DLLiteCore).ok);

  REQUIRE(validate_fragment(tu::tbox("(sub A (all r B)) (sub (or A B) E)"),
                            FragmentTag::HornALC).ok);
  REQUIRE(!validate_fragment(tu::tbox("(sub A (or B E))"),
                             FragmentTag::HornALC).ok);
  REQUIRE(!validate_fragment(tu::tbox("(sub (all r A) B)"),
                             FragmentTag::HornALC).ok);
  REQUIRE(validate_fragment(tu::tbox("(sub A (or B E))"),
                            FragmentTag::ALCHI).ok);
}

TEST_CASE("syntax::detect_fragment picks the most specific tag") {
  REQUIRE(detect_fragment(tu::tbox("(equiv A (some r B))")) ==
          FragmentTag::AcyclicEL);
  REQUIRE(detect_fragment(tu::tbox("(sub A (some r A))")) == FragmentTag::EL);
  REQUIRE(detect_fragment(tu::tbox("(sub A (some (inv r) Top))")) ==
          FragmentTag::DLLiteCore);
  REQUIRE(detect_fragment(tu::tbox("(rsub r s) (sub A (some (inv r) Top))")) ==
          FragmentTag::DLLiteCoreH);
  REQUIRE(detect_fragment(tu::tbox("(sub A (all r B))")) ==
          FragmentTag::HornALC);
  REQUIRE(detect_fragment(tu::tbox("(sub A (or B E))")) == FragmentTag::ALCHI);
  for (FragmentTag tag :
       {FragmentTag::EL, FragmentTag::AcyclicEL, FragmentTag::DLLiteCore,
        FragmentTag::DLLiteCoreH, FragmentTag::HornALC, FragmentTag::ALCHI})
    REQUIRE(fragment_from_name(fragment_name(tag)) == tag);
}

TEST_CASE("syntax::dependencies follows definitions transitively") {
  TBox t = tu::tbox(
      "(equiv A (and B1 B2)) (sub A1 (some r B1)) (sub A2 (some r B2))");
  Signature all = dependencies(t, "A", DepMode::All);
  REQUIRE(all.concepts == std::set<std::string>{"B1", "B2"});
  REQUIRE(all.roles.empty());
  Signature a1 = dependencies(t, "A1", DepMode::All);
  REQUIRE(a1.concepts == std::set<std::string>{"B1"});
  REQUIRE(a1.roles == std::set<std::string>{"r"});
  // definitional mode ignores mere inclusions
  REQUIRE(dependencies(t, "A1", DepMode::Definitional).empty());

  // growing the TBox only grows dependency sets
  TBox t2 = t;
  t2.axioms.push_back(Axiom::equiv(name("B1"), parse_concept_text("(some s E)")));
  Signature grown = dependencies(t2, "A", DepMode::All);
  for (const auto& c : all.concepts) REQUIRE(grown.has_concept(c));
  REQUIRE(grown.has_concept("E"));
  REQUIRE(grown.has_role("s"));
  Signature defn = dependencies(t2, "A", DepMode::Definitional);
  for (const auto& c : defn.concepts) REQUIRE(grown.has_concept(c));
  for (const auto& r : defn.roles) REQUIRE(grown.has_role(r));

  REQUIRE_THROWS_AS(dependencies(tu::tbox("(equiv A (some r A))"), "A",
                                 DepMode::All),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(dependencies(tu::tbox("(sub (some r A) B)"), "B",
                                 DepMode::All),
                    std::invalid_argument);
}

TEST_CASE("syntax::terminological_shape inspects left-hand sides") {
  std::string why;
  REQUIRE(terminological_shape(tu::tbox("(sub A B) (equiv E (some r A))"),
                               &why));
  REQUIRE(!terminological_shape(tu::tbox("(sub (some r A) B)"), &why));
  REQUIRE(!why.empty());
  REQUIRE(!terminological_shape(tu::tbox("(sub A B) (sub A E)"), nullptr));
}

TEST_CASE("syntax::normalize_el emits only normal-form axioms") {
  auto atomic = [](const ConceptPtr& c) {
    return c->ctor == Ctor::Name || c->ctor == Ctor::Top;
  };
  tu::Rng rng(23);
  tu::SymbolPool pool = tu::SymbolPool::make(4, 2);
  for (int i = 0; i < 40; ++i) {
    TBox t = tu::random_el_tbox(rng, pool, 3 + tu::pick(rng, 5), 2);
    NormalizedEL norm = normalize_el(t);
    for (const auto& ax : norm.tbox.axioms) {
      REQUIRE(ax.kind == AxKind::Sub);
      bool lhs_ok = atomic(ax.lhs) ||
                    (ax.lhs->ctor == Ctor::And && ax.lhs->kids.size() == 2 &&
                     atomic(ax.lhs->kids[0]) && atomic(ax.lhs->kids[1])) ||
                    (ax.lhs->ctor == Ctor::Exists && !ax.lhs->role.inverted &&
                     atomic(ax.lhs->kids[0]));
      bool rhs_ok = atomic(ax.rhs) ||
                    (ax.rhs->ctor == Ctor::Exists && !ax.rhs->role.inverted &&
                     atomic(ax.rhs->kids[0]));
      REQUIRE(lhs_ok);
      REQUIRE(rhs_ok);
    }
    for (const auto& [fresh, origin] : norm.origin)
      REQUIRE(origin != nullptr);
  }
  REQUIRE_THROWS_AS(normalize_el(tu::tbox("(sub A (not B))")),
                    std::invalid_argument);
}

TEST_CASE("syntax::normalize_el is a conservative extension") {
  // subsumption between original names is unchanged by normalization
  tu::Rng rng(29);
  tu::SymbolPool pool = tu::SymbolPool::make(5, 2);
  for (int i = 0; i < 25; ++i) {
    TBox t = tu::random_el_tbox(rng, pool, 4 + tu::pick(rng, 8), 2);
    NormalizedEL norm = normalize_el(t);
    insep::reasoner::SubsumptionMap before = insep::reasoner::el_classify(t);
    insep::reasoner::SubsumptionMap after =
        insep::reasoner::el_classify(norm.tbox);
    for (const auto& a : pool.concepts)
      for (const auto& b : pool.concepts) {
        bool was = before.count(a) && before.at(a).count(b);
        bool now = after.count(a) && after.at(a).count(b);
        REQUIRE(was == now);
      }
  }
}
