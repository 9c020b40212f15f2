#pragma once
// Generating structures (chase graphs) for EL, DL-Lite and Horn KBs: a base
// interpretation over the ABox individuals plus generating edges into a
// finite set of witnesses.  Unraveling a generating structure to depth k
// yields a finite prefix of the canonical model; certain answers to
// conjunctive queries are decided by homomorphism into such a prefix.

#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "insep/interp.hpp"
#include "insep/reasoner.hpp"
#include "insep/syntax.hpp"

namespace insep::chase {

struct InconsistentKB : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenTriple {
  std::string from;
  syntax::Role role;  // creating role, with polarity
  std::string to;     // always a witness element
};

struct GeneratingStructure {
  // individuals and witnesses with their concept labels; role edges are the
  // hierarchy-closed asserted edges between individuals only
  interp::FiniteInterpretation base;
  std::vector<GenTriple> gens;
  std::set<std::string> abox_elements;
  reasoner::RoleHierarchy hier;
  syntax::FragmentTag fragment = syntax::FragmentTag::EL;
  std::map<std::string, std::vector<int>> gens_from;

  bool is_individual(const std::string& id) const {
    return abox_elements.count(id) > 0;
  }

  // base plus all generating edges, expanded through the role hierarchy
  interp::FiniteInterpretation materialized() const {
    interp::FiniteInterpretation out = base;
    for (const auto& g : gens)
      for (const auto& s : hier.supers(g.role)) {
        if (s.inverted) out.add_edge(s.name, g.to, g.from);
        else out.add_edge(s.name, g.from, g.to);
      }
    return out;
  }
};

namespace detail {

inline std::string claim_id(interp::FiniteInterpretation& base,
                            std::string want) {
  while (base.has_elem(want)) want += "_";
  base.add_elem(want);
  return want;
}

inline void add_closed_abox_edges(GeneratingStructure& g,
                                  const syntax::ABox& abox) {
  for (const auto& [r, a, b] : abox.role_assertions)
    for (const auto& s : g.hier.supers(syntax::Role{r, false})) {
      if (s.inverted) g.base.add_edge(s.name, b, a);
      else g.base.add_edge(s.name, a, b);
    }
}

inline void index_gens(GeneratingStructure& g) {
  for (std::size_t i = 0; i < g.gens.size(); ++i)
    g.gens_from[g.gens[i].from].push_back(static_cast<int>(i));
}

// --- EL: witnesses are the canonical name elements reachable from the ABox
inline GeneratingStructure build_el(const syntax::KB& kb, std::size_t budget) {
  GeneratingStructure g;
  g.fragment = syntax::FragmentTag::EL;
  syntax::Signature sg = syntax::sig(kb);
  reasoner::ELCore core(kb.tbox, sg.concepts, &kb.abox, budget);

  auto labels_of = [&](int elem) {
    std::vector<std::string> out;
    for (int n : core.S(elem))
      if (sg.concepts.count(core.names()[n])) out.push_back(core.names()[n]);
    return out;
  };

  for (const auto& ind : core.individuals()) {
    g.base.add_elem(ind);
    g.base.set_individual(ind, ind);
    g.abox_elements.insert(ind);
    for (const auto& c : labels_of(core.elem_of_ind(ind)))
      g.base.set_concept(c, ind);
  }
  add_closed_abox_edges(g, kb.abox);

  // derived successor edges per element (asserted individual-individual
  // edges are excluded: derived edges always target name elements)
  std::map<int, std::vector<std::pair<std::string, int>>> succ;
  for (const auto& [role, pairs] : core.R())
    for (auto [x, y] : pairs)
      if (y < core.n_name_elems()) succ[x].push_back({role, y});

  std::map<int, std::string> wit_id;
  std::vector<int> work;
  auto witness = [&](int name_elem) {
    auto it = wit_id.find(name_elem);
    if (it != wit_id.end()) return it->second;
    std::string id = claim_id(g.base, "w_" + core.names()[name_elem]);
    for (const auto& c : labels_of(name_elem)) g.base.set_concept(c, id);
    wit_id.emplace(name_elem, id);
    work.push_back(name_elem);
    return id;
  };

  for (const auto& ind : core.individuals())
    for (const auto& [role, y] : succ[core.elem_of_ind(ind)])
      g.gens.push_back({ind, syntax::Role{role, false}, witness(y)});
  while (!work.empty()) {
    int e = work.back();
    work.pop_back();
    std::string from = wit_id.at(e);
    for (const auto& [role, y] : succ[e])
      g.gens.push_back({from, syntax::Role{role, false}, witness(y)});
  }
  index_gens(g);
  return g;
}

// --- DL-Lite: one witness per required role atom
inline GeneratingStructure build_dllite(const syntax::KB& kb) {
  GeneratingStructure g;
  g.fragment = kb.tbox.fragment ? *kb.tbox.fragment
                                : syntax::detect_fragment(kb.tbox);
  reasoner::DLLiteEngine eng(kb.tbox);
  g.hier = eng.hierarchy();

  auto label_all = [&](const std::string& id,
                       const std::set<reasoner::Basic>& type) {
    for (const auto& b : type)
      if (b.kind == reasoner::Basic::Name) g.base.set_concept(b.name, id);
  };

  std::set<std::string> inds = kb.abox.individuals();
  for (const auto& ind : inds) {
    g.base.add_elem(ind);
    g.base.set_individual(ind, ind);
    g.abox_elements.insert(ind);
  }
  add_closed_abox_edges(g, kb.abox);

  std::map<std::string, std::string> wit_id;  // role atom key -> element id
  std::vector<syntax::Role> work;
  auto witness = [&](const syntax::Role& r) {
    std::string key = r.name + (r.inverted ? "-" : "+");
    auto it = wit_id.find(key);
    if (it != wit_id.end()) return it->second;
    std::string id = claim_id(g.base, "w_" + r.name + (r.inverted ? "-" : ""));
    label_all(id, eng.witness_type(r));
    wit_id.emplace(key, id);
    work.push_back(r);
    return id;
  };

  for (const auto& ind : inds) {
    std::set<reasoner::Basic> type =
        reasoner::dllite_ind_type(eng, kb.abox, ind);
    label_all(ind, type);
    for (const auto& b : type) {
      if (b.kind != reasoner::Basic::Some) continue;
      if (reasoner::dllite_discharged(eng, kb.abox, ind, b.role)) continue;
      g.gens.push_back({ind, b.role, witness(b.role)});
    }
  }
  while (!work.empty()) {
    syntax::Role r = work.back();
    work.pop_back();
    std::string from = wit_id.at(r.name + (r.inverted ? "-" : "+"));
    for (const auto& b : eng.witness_type(r)) {
      if (b.kind != reasoner::Basic::Some) continue;
      if (g.hier.subsumes(r.inverse(), b.role)) continue;  // via parent edge
      g.gens.push_back({from, b.role, witness(b.role)});
    }
  }
  index_gens(g);
  return g;
}

// --- Horn-ALC: witnesses from the saturation table, keyed by saturated type
inline GeneratingStructure build_horn(const syntax::KB& kb,
                                      std::size_t witness_cap,
                                      std::size_t budget) {
  GeneratingStructure g;
  g.fragment = syntax::FragmentTag::HornALC;
  reasoner::HornSaturation hs(kb.tbox, kb.abox, witness_cap, budget);
  syntax::Signature sg = syntax::sig(kb);

  auto label_all = [&](const std::string& id, const std::set<int>& type) {
    for (int n : type) {
      const std::string& nm = hs.nf().names[n];
      if (sg.concepts.count(nm)) g.base.set_concept(nm, id);
    }
  };

  for (const auto& ind : hs.individuals()) {
    g.base.add_elem(ind);
    g.base.set_individual(ind, ind);
    g.abox_elements.insert(ind);
    label_all(ind, hs.ind_node(ind).type);
  }
  add_closed_abox_edges(g, kb.abox);

  std::vector<std::string> wit_ids(hs.witnesses().size());
  for (std::size_t i = 0; i < hs.witnesses().size(); ++i) {
    wit_ids[i] = claim_id(g.base, "wt" + std::to_string(i));
    label_all(wit_ids[i], hs.witnesses()[i].type);
  }
  for (const auto& e : hs.gen_edges()) {
    std::string from =
        e.from_ind >= 0 ? hs.individuals()[e.from_ind] : wit_ids[e.from_wit];
    g.gens.push_back({from, syntax::Role{e.role, false}, wit_ids[e.to_wit]});
  }
  index_gens(g);
  return g;
}

}  // namespace detail

inline GeneratingStructure build_generating_structure(
    const syntax::KB& kb,
    std::size_t witness_cap = reasoner::kDefaultWitnessCap,
    std::size_t budget = reasoner::kDefaultBudget) {
  syntax::FragmentTag tag =
      kb.tbox.fragment ? *kb.tbox.fragment : syntax::detect_fragment(kb.tbox);
  switch (tag) {
    case syntax::FragmentTag::EL:
    case syntax::FragmentTag::AcyclicEL:
      return detail::build_el(kb, budget);
    case syntax::FragmentTag::DLLiteCore:
    case syntax::FragmentTag::DLLiteCoreH:
      if (!reasoner::kb_consistent(kb, witness_cap, budget))
        throw InconsistentKB("KB is inconsistent: no generating structure");
      return detail::build_dllite(kb);
    case syntax::FragmentTag::HornALC:
      if (!reasoner::kb_consistent(kb, witness_cap, budget))
        throw InconsistentKB("KB is inconsistent: no generating structure");
      return detail::build_horn(kb, witness_cap, budget);
    default:
      throw reasoner::UnsupportedFragment(
          "build_generating_structure: fragment " +
          syntax::fragment_name(tag) + " is not supported");
  }
}

// Canonical model of a single EL concept w.r.t. an EL TBox.
inline reasoner::ELCanonical canonical_for_concept(
    const syntax::TBox& t, const syntax::ConceptPtr& c) {
  return reasoner::el_canonical(t, c);
}

// ------------------------------------------------------------- unraveling

struct CanonicalPrefix {
  interp::FiniteInterpretation interpretation;
  int depth = 0;
};

namespace detail {

inline void copy_labels(const GeneratingStructure& g,
                        interp::FiniteInterpretation& I,
                        const std::string& base_id, const std::string& to) {
  int src = g.base.at(base_id);
  for (const auto& [c, ext] : g.base.concept_ext)
    if (ext.count(src)) I.set_concept(c, to);
}

inline void copy_abox_part(const GeneratingStructure& g,
                           interp::FiniteInterpretation& I) {
  for (const auto& ind : g.abox_elements) {
    I.add_elem(ind);
    I.set_individual(ind, ind);
    copy_labels(g, I, ind, ind);
  }
  for (const auto& [role, pairs] : g.base.role_ext)
    for (auto [x, y] : pairs)
      I.add_edge(role, g.base.elems[x], g.base.elems[y]);
}

inline std::string materialize_child(const GeneratingStructure& g,
                                     interp::FiniteInterpretation& I,
                                     const std::string& parent_id, int gi) {
  const GenTriple& gen = g.gens[gi];
  std::string child = parent_id + "." + std::to_string(gi);
  if (!I.has_elem(child)) {
    I.add_elem(child);
    copy_labels(g, I, gen.to, child);
    for (const auto& s : g.hier.supers(gen.role)) {
      if (s.inverted) I.add_edge(s.name, child, parent_id);
      else I.add_edge(s.name, parent_id, child);
    }
  }
  return child;
}

}  // namespace detail

// Full unraveling to the given depth: the ABox part plus every witness path
// of at most `depth` generating steps.  Tree node ids extend their parent's
// id with "." and the index of the generating edge taken.
inline CanonicalPrefix unravel(const GeneratingStructure& g, int depth) {
  CanonicalPrefix out;
  out.depth = depth;
  interp::FiniteInterpretation& I = out.interpretation;
  detail::copy_abox_part(g, I);

  std::vector<std::tuple<std::string, std::string, int>> frontier;
  for (const auto& ind : g.abox_elements) frontier.emplace_back(ind, ind, 0);
  while (!frontier.empty()) {
    auto [id, base_id, d] = frontier.back();
    frontier.pop_back();
    if (d >= depth) continue;
    auto it = g.gens_from.find(base_id);
    if (it == g.gens_from.end()) continue;
    for (int gi : it->second)
      frontier.emplace_back(detail::materialize_child(g, I, id, gi),
                            g.gens[gi].to, d + 1);
  }
  return out;
}

namespace detail {

// Prefix that is homomorphism-equivalent to arbitrarily deep unravelings for
// queries with at most q_atoms atoms: expand q_atoms levels below every
// individual, and below the shallowest copy of every witness (reached along
// a shortest generating path).  Any match in the infinite canonical model
// relocates into this prefix: a component touching the ABox stays within
// q_atoms steps of it, and a floating component sits below some witness
// copy, whose subtree is isomorphic to the shallowest one.
inline interp::FiniteInterpretation query_prefix(const GeneratingStructure& g,
                                                 int q_atoms) {
  interp::FiniteInterpretation I;
  copy_abox_part(g, I);

  std::map<std::string, int> expanded;  // node id -> levels expanded below it
  std::function<void(const std::string&, const std::string&, int)> ensure =
      [&](const std::string& id, const std::string& base_id, int levels) {
        auto [it, fresh] = expanded.try_emplace(id, levels);
        if (!fresh) {
          if (it->second >= levels) return;
          it->second = levels;
        }
        if (levels == 0) return;
        auto gi_it = g.gens_from.find(base_id);
        if (gi_it == g.gens_from.end()) return;
        for (int gi : gi_it->second)
          ensure(materialize_child(g, I, id, gi), g.gens[gi].to, levels - 1);
      };

  for (const auto& ind : g.abox_elements) ensure(ind, ind, q_atoms);

  // shortest generating path to each witness (BFS over base elements)
  std::map<std::string, std::pair<std::string, int>> parent;  // elem -> (pred elem, gen)
  std::vector<std::string> queue(g.abox_elements.begin(), g.abox_elements.end());
  std::set<std::string> seen(queue.begin(), queue.end());
  for (std::size_t h = 0; h < queue.size(); ++h) {
    std::string e = queue[h];
    auto it = g.gens_from.find(e);
    if (it == g.gens_from.end()) continue;
    for (int gi : it->second)
      if (seen.insert(g.gens[gi].to).second) {
        parent[g.gens[gi].to] = {e, gi};
        queue.push_back(g.gens[gi].to);
      }
  }
  for (const auto& [wit, _] : parent) {
    std::vector<int> path;
    std::string e = wit;
    while (parent.count(e)) {
      path.push_back(parent.at(e).second);
      e = parent.at(e).first;
    }
    std::string id = e;  // an individual
    for (auto gi = path.rbegin(); gi != path.rend(); ++gi)
      id = materialize_child(g, I, id, *gi);
    ensure(id, wit, q_atoms);
  }
  return I;
}

}  // namespace detail

// ------------------------------------------------------ conjunctive queries

// Query atoms are kept as a finite interpretation over the variables and
// constants; elements registered as individuals are constants that must map
// to the equally named KB individual.
struct ConjunctiveQuery {
  interp::FiniteInterpretation pattern;
  std::vector<std::string> answer_vars;

  std::size_t size() const {  // number of atoms
    std::size_t n = 0;
    for (const auto& [c, ext] : pattern.concept_ext) n += ext.size();
    for (const auto& [r, ext] : pattern.role_ext) n += ext.size();
    return n;
  }
};

// (query (var x) ... (ca A TERM) (ra r TERM TERM) ...); undeclared terms are
// constants naming KB individuals.
inline ConjunctiveQuery parse_query(const std::string& text) {
  syntax::detail::Reader rd(text);
  syntax::detail::Sexp s = rd.read();
  if (!rd.at_end())
    throw syntax::ParseError(0, 0, "trailing input after query");
  if (s.is_atom || s.list.empty() || !s.list[0].is_atom ||
      s.list[0].atom != "query")
    throw syntax::ParseError(s.line, s.col, "expected (query ...)");
  ConjunctiveQuery q;
  std::set<std::string> vars;
  for (std::size_t i = 1; i < s.list.size(); ++i) {
    const auto& it = s.list[i];
    if (it.is_atom || it.list.empty() || !it.list[0].is_atom)
      throw syntax::ParseError(it.line, it.col, "expected (var|ca|ra ...)");
    const std::string& hd = it.list[0].atom;
    auto atom_at = [&](std::size_t k) -> const std::string& {
      if (k >= it.list.size() || !it.list[k].is_atom)
        throw syntax::ParseError(it.line, it.col,
                                 "(" + hd + " ...) expects atoms");
      return it.list[k].atom;
    };
    if (hd == "var") {
      if (it.list.size() != 2)
        throw syntax::ParseError(it.line, it.col, "(var NAME)");
      vars.insert(atom_at(1));
      q.pattern.add_elem(atom_at(1));
    } else if (hd == "ca") {
      if (it.list.size() != 3)
        throw syntax::ParseError(it.line, it.col, "(ca NAME TERM)");
      q.pattern.set_concept(atom_at(1), atom_at(2));
    } else if (hd == "ra") {
      if (it.list.size() != 4)
        throw syntax::ParseError(it.line, it.col, "(ra NAME TERM TERM)");
      q.pattern.add_edge(atom_at(1), atom_at(2), atom_at(3));
    } else {
      throw syntax::ParseError(it.line, it.col,
                               "unknown query form '" + hd + "'");
    }
  }
  for (const auto& e : q.pattern.elems)
    if (!vars.count(e)) q.pattern.set_individual(e, e);
  return q;
}

inline std::string to_sexpr(const ConjunctiveQuery& q) {
  std::string out = "(query";
  std::set<int> consts;
  for (const auto& [name, e] : q.pattern.individuals) consts.insert(e);
  for (std::size_t e = 0; e < q.pattern.elems.size(); ++e)
    if (!consts.count(static_cast<int>(e)))
      out += " (var " + q.pattern.elems[e] + ")";
  for (const auto& [c, ext] : q.pattern.concept_ext)
    for (int e : ext) out += " (ca " + c + " " + q.pattern.elems[e] + ")";
  for (const auto& [r, ext] : q.pattern.role_ext)
    for (auto [x, y] : ext)
      out += " (ra " + r + " " + q.pattern.elems[x] + " " +
             q.pattern.elems[y] + ")";
  return out + ")";
}

// --------------------------------------------------------- certain answers

struct CertainAnswer {
  bool certain = false;
  bool inconsistent = false;  // inconsistent KBs certainly answer everything
};

namespace detail {

inline interp::FiniteInterpretation bind_answers(
    const ConjunctiveQuery& q, const std::vector<std::string>& tuple) {
  if (tuple.size() != q.answer_vars.size())
    throw std::invalid_argument("certain_answer: tuple arity mismatch");
  std::map<std::string, std::string> rename;  // element id -> merged id
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    const std::string& v = q.answer_vars[i];
    if (!q.pattern.has_elem(v))
      throw std::invalid_argument("certain_answer: unknown answer variable " +
                                  v);
    rename[v] = "_ind:" + tuple[i];
  }
  for (const auto& [name, e] : q.pattern.individuals)
    rename[q.pattern.elems[e]] = "_ind:" + name;

  interp::FiniteInterpretation out;
  auto target = [&](int e) -> std::string {
    const std::string& id = q.pattern.elems[e];
    auto it = rename.find(id);
    std::string tid = it == rename.end() ? id : it->second;
    out.add_elem(tid);
    return tid;
  };
  for (std::size_t e = 0; e < q.pattern.elems.size(); ++e)
    target(static_cast<int>(e));
  for (const auto& [c, ext] : q.pattern.concept_ext)
    for (int e : ext) out.set_concept(c, target(e));
  for (const auto& [r, ext] : q.pattern.role_ext)
    for (auto [x, y] : ext) out.add_edge(r, target(x), target(y));
  for (const auto& id : out.elems)
    if (id.rfind("_ind:", 0) == 0) out.set_individual(id.substr(5), id);
  return out;
}

// drop isolated unanchored variables: over nonempty domains they are
// vacuously satisfiable
inline interp::FiniteInterpretation trim_isolated(
    const interp::FiniteInterpretation& pat) {
  std::set<int> used;
  for (const auto& [c, ext] : pat.concept_ext)
    used.insert(ext.begin(), ext.end());
  for (const auto& [r, ext] : pat.role_ext)
    for (auto [x, y] : ext) {
      used.insert(x);
      used.insert(y);
    }
  for (const auto& [name, e] : pat.individuals) used.insert(e);
  if (used.size() == pat.size()) return pat;
  interp::FiniteInterpretation out;
  for (int e : used) out.add_elem(pat.elems[e]);
  for (const auto& [c, ext] : pat.concept_ext)
    for (int e : ext) out.set_concept(c, pat.elems[e]);
  for (const auto& [r, ext] : pat.role_ext)
    for (auto [x, y] : ext) out.add_edge(r, pat.elems[x], pat.elems[y]);
  for (const auto& [name, e] : pat.individuals)
    out.set_individual(name, pat.elems[e]);
  return out;
}

}  // namespace detail

inline CertainAnswer certain_answer(
    const syntax::KB& kb, const ConjunctiveQuery& q,
    const std::vector<std::string>& tuple = {},
    std::size_t witness_cap = reasoner::kDefaultWitnessCap,
    std::size_t budget = reasoner::kDefaultBudget) {
  CertainAnswer out;
  if (!reasoner::kb_consistent(kb, witness_cap, budget)) {
    out.certain = true;
    out.inconsistent = true;
    return out;
  }
  interp::FiniteInterpretation pat =
      detail::trim_isolated(detail::bind_answers(q, tuple));
  if (pat.size() == 0) {
    out.certain = true;  // empty query
    return out;
  }

  GeneratingStructure g = build_generating_structure(kb, witness_cap, budget);
  interp::FiniteInterpretation prefix =
      detail::query_prefix(g, static_cast<int>(q.size()));

  syntax::Signature qsig;
  for (const auto& [c, ext] : pat.concept_ext)
    if (!ext.empty()) qsig.concepts.insert(c);
  for (const auto& [r, ext] : pat.role_ext)
    if (!ext.empty()) qsig.roles.insert(r);
  interp::HomResult hom =
      interp::check_homomorphism(pat, prefix, qsig, /*anchored=*/true);
  out.certain = hom.exists;
  return out;
}

}  // namespace insep::chase
