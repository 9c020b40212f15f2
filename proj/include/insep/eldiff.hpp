#pragma once
// EL concept inseparability: the logical-diff witness sets cwtn_lhs (new
// left-hand consequences, decided by canonical-model simulations) and
// cwtn_rhs (new right-hand consequences, decided by an omitted-conjunct
// encoding over the acyclic definition tree), plus example inclusions.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "insep/interp.hpp"
#include "insep/reasoner.hpp"
#include "insep/syntax.hpp"

namespace insep::eldiff {

struct DiffExample {
  syntax::Axiom axiom;
  std::string side;  // "lhs" or "rhs"
};

struct DiffReport {
  std::vector<std::string> lhs_witnesses;
  std::vector<std::string> rhs_witnesses;
  bool inseparable = false;  // all computed witness sets empty
  std::vector<DiffExample> examples;
  bool truncated = false;  // some example exceeded the size cap and was dropped
  bool lhs_only = false;   // rhs direction skipped (t1 not acyclic)
};

constexpr int kExampleNodeCap = 200;
constexpr int kUnfoldDepthCap = 16;

namespace detail {

inline int count_nodes(const syntax::ConceptPtr& c) {
  int n = 1;
  for (const auto& k : c->kids) n += count_nodes(k);
  return n;
}

// Distinguishing EL concept for a dead simulation pair (x, y): satisfied at
// x in the left model but not at y in the right model.  Recursion follows
// the removal certificates, whose kill times strictly decrease.
inline syntax::ConceptPtr dist_concept(const interp::SimTable& st, int x,
                                       int y, int& budget) {
  if (--budget < 0) return syntax::top();
  interp::SimWitness w = st.why(x, y);
  if (w.kind == interp::SimWitness::Base) return syntax::name(w.concept_name);
  // Zig: x has an r-successor x' no r-successor of y simulates
  std::vector<syntax::ConceptPtr> parts;
  for (int y2 : st.succ2(w.role, y))
    parts.push_back(dist_concept(st, w.succ, y2, budget));
  return syntax::exists(syntax::Role{w.role, false}, syntax::conj(parts));
}

// ------------------------------------------------ omitted-conjunct encoding
//
// For a target name A, the maximal sigma-concepts that do not t1-imply A are
// described as fresh names over an avoid-state graph.  A state is a set of
// names and concepts to avoid at one element; each branch of a state picks
// one conjunct to omit per violated definition and per avoided concept,
// keeps every harmless sigma-name, and saturates unconstrained successors
// with the all-sigma concept X_sigma.  States can reach themselves (like
// X_sigma itself), so names are allocated before axioms are emitted.
class AvoidBuilder {
 public:
  AvoidBuilder(const syntax::TBox& t1, const syntax::Signature& sigma,
               const syntax::Signature& reserved, std::size_t cap = 20000)
      : sigma_(sigma), cap_(cap) {
    subs_ = reasoner::el_classify(t1);
    for (const auto& ax : t1.axioms)
      if (ax.kind == syntax::AxKind::Equiv) eqdef_[ax.lhs->name] = ax.rhs;
    used_ = syntax::sig(t1);
    used_.merge(reserved);
    for (const auto& c : sigma_.concepts) used_.concepts.insert(c);
    for (const auto& r : sigma_.roles) used_.roles.insert(r);
    x_sigma_ = fresh("_xs");
    std::vector<syntax::ConceptPtr> parts;
    for (const auto& b : sigma_.concepts) parts.push_back(syntax::name(b));
    for (const auto& r : sigma_.roles)
      parts.push_back(
          syntax::exists(syntax::Role{r, false}, syntax::name(x_sigma_)));
    define(x_sigma_, syntax::conj(parts));
  }

  // frontier of maximal avoiders of one concept name
  const std::vector<std::string>& frontier(const std::string& target) {
    State s;
    s.names.insert(target);
    return state(s);
  }

  const syntax::TBox& encoding() const { return enc_; }
  const std::string& x_sigma() const { return x_sigma_; }

  // expand fresh names `depth` times; remaining occurrences become Top
  syntax::ConceptPtr unfold(const syntax::ConceptPtr& c, int depth) const {
    switch (c->ctor) {
      case syntax::Ctor::Name: {
        auto it = def_.find(c->name);
        if (it == def_.end()) return c;
        if (depth <= 0) return syntax::top();
        return unfold(it->second, depth - 1);
      }
      case syntax::Ctor::And: {
        std::vector<syntax::ConceptPtr> kids;
        for (const auto& k : c->kids) kids.push_back(unfold(k, depth));
        return syntax::conj(kids);
      }
      case syntax::Ctor::Exists:
        return syntax::exists(c->role, unfold(c->kids[0], depth));
      default:
        return c;
    }
  }

 private:
  struct State {
    std::set<std::string> names;     // concept names to avoid
    std::set<std::string> concepts;  // reprs of concepts to avoid
    std::map<std::string, syntax::ConceptPtr> by_repr;
    bool unsat = false;  // must avoid Top: no avoider exists

    void add_concept(const syntax::ConceptPtr& c) {
      if (c->ctor == syntax::Ctor::Top) {
        unsat = true;
        return;
      }
      if (c->ctor == syntax::Ctor::Name) {
        names.insert(c->name);
        return;
      }
      if (concepts.insert(c->repr).second) by_repr.emplace(c->repr, c);
    }
    std::string key() const {
      std::string k;
      for (const auto& n : names) k += n + ",";
      k += "|";
      for (const auto& r : concepts) k += r + ",";
      return k;
    }
  };

  struct Branch {
    std::set<std::string> avoided;                           // final name set
    std::map<std::string, std::vector<syntax::ConceptPtr>> succ_avoid;
  };

  std::string fresh(const std::string& base) {
    std::string cand = base;
    int i = 0;
    while (used_.has_concept(cand) || used_.has_role(cand))
      cand = base + std::to_string(++i);
    used_.concepts.insert(cand);
    return cand;
  }

  void define(const std::string& name, const syntax::ConceptPtr& rhs) {
    if (++work_ > cap_)
      throw reasoner::ResourceError(
          "witness encoding exceeded its state cap (" + std::to_string(cap_) +
          ")");
    enc_.axioms.push_back(syntax::Axiom::sub(syntax::name(name), rhs));
    def_[name] = rhs;
  }

  bool implies_any(const std::string& b, const std::set<std::string>& names) {
    auto it = subs_.find(b);
    if (it != subs_.end()) {
      for (const auto& n : names)
        if (it->second.count(n)) return true;
    }
    return names.count(b) > 0;  // names outside t1 only imply themselves
  }

  // enumerate the local branches of a state (no recursion into successors)
  void enumerate(std::set<std::string> avoided,
                 std::vector<syntax::ConceptPtr> todo,
                 std::set<std::string> processed_defs,
                 std::map<std::string, std::vector<syntax::ConceptPtr>> succ,
                 std::vector<Branch>& out, std::set<std::string>& seen) {
    if (++work_ > cap_)
      throw reasoner::ResourceError(
          "witness encoding exceeded its state cap (" + std::to_string(cap_) +
          ")");
    if (!todo.empty()) {
      syntax::ConceptPtr e = todo.back();
      todo.pop_back();
      std::vector<syntax::ConceptPtr> parts = syntax::flatten_and(e);
      std::sort(parts.begin(), parts.end(), syntax::ConceptLess{});
      parts.erase(std::unique(parts.begin(), parts.end(),
                              [](const auto& a, const auto& b) {
                                return syntax::equal(a, b);
                              }),
                  parts.end());
      for (const auto& p : parts) {
        if (p->ctor == syntax::Ctor::Name) {
          auto next = avoided;
          next.insert(p->name);
          enumerate(std::move(next), todo, processed_defs, succ, out, seen);
        } else if (p->ctor == syntax::Ctor::Exists) {
          if (sigma_.has_role(p->role.name) && !p->role.inverted) {
            auto next = succ;
            next[p->role.name].push_back(p->kids[0]);
            enumerate(avoided, todo, processed_defs, std::move(next), out,
                      seen);
          } else {
            // a sigma-concept provides no such successor structurally;
            // the non-implication guard re-checks this choice
            enumerate(avoided, todo, processed_defs, succ, out, seen);
          }
        }
        // Top conjuncts cannot be omitted: no branch
      }
      return;
    }
    // all concept obligations resolved; break every violated definition
    for (const auto& [dname, drhs] : eqdef_) {
      if (processed_defs.count(dname)) continue;
      if (!implies_any(dname, avoided)) continue;
      processed_defs.insert(dname);
      todo.push_back(drhs);
      enumerate(std::move(avoided), std::move(todo),
                std::move(processed_defs), std::move(succ), out, seen);
      return;
    }
    // complete branch
    std::string key;
    for (const auto& n : avoided) key += n + ",";
    for (const auto& [r, cs] : succ) {
      key += "|" + r + ":";
      std::vector<std::string> reprs;
      for (const auto& c : cs) reprs.push_back(c->repr);
      std::sort(reprs.begin(), reprs.end());
      reprs.erase(std::unique(reprs.begin(), reprs.end()), reprs.end());
      for (const auto& rp : reprs) key += rp + ",";
    }
    if (!seen.insert(key).second) return;
    out.push_back({std::move(avoided), std::move(succ)});
  }

  const std::vector<std::string>& state(const State& s) {
    std::string key = s.key();
    auto it = states_.find(key);
    if (it != states_.end()) return it->second;
    std::vector<std::string>& result = states_[key];  // registered up front
    if (s.unsat) return result;                       // nothing avoids Top

    std::vector<Branch> branches;
    std::set<std::string> seen;
    std::vector<syntax::ConceptPtr> todo;
    for (const auto& [repr, c] : s.by_repr) todo.push_back(c);
    enumerate(s.names, std::move(todo), {}, {}, branches, seen);

    for (std::size_t b = 0; b < branches.size(); ++b)
      result.push_back(fresh("_x"));
    std::vector<std::string> names = result;  // states_ may rehash below

    for (std::size_t b = 0; b < branches.size(); ++b) {
      const Branch& br = branches[b];
      std::vector<syntax::ConceptPtr> parts;
      for (const auto& c : sigma_.concepts)
        if (!implies_any(c, br.avoided)) parts.push_back(syntax::name(c));
      for (const auto& r : sigma_.roles) {
        auto ob = br.succ_avoid.find(r);
        if (ob == br.succ_avoid.end() || ob->second.empty()) {
          parts.push_back(
              syntax::exists(syntax::Role{r, false}, syntax::name(x_sigma_)));
          continue;
        }
        State succ_state;
        for (const auto& c : ob->second) succ_state.add_concept(c);
        for (const auto& y : state(succ_state))
          parts.push_back(
              syntax::exists(syntax::Role{r, false}, syntax::name(y)));
        // empty successor frontier: the role is omitted entirely
      }
      define(names[b], syntax::conj(parts));
    }
    return states_.at(key);
  }

  syntax::Signature sigma_, used_;
  reasoner::SubsumptionMap subs_;
  std::map<std::string, syntax::ConceptPtr> eqdef_;
  std::map<std::string, std::vector<std::string>> states_;
  std::map<std::string, syntax::ConceptPtr> def_;
  syntax::TBox enc_;
  std::string x_sigma_;
  std::size_t cap_, work_ = 0;
};

inline void require_acyclic(const syntax::TBox& t1, const char* who) {
  syntax::FragmentReport rep =
      syntax::validate_fragment(t1, syntax::FragmentTag::AcyclicEL);
  if (!rep.ok)
    throw reasoner::UnsupportedFragment(
        std::string(who) + ": left TBox must be acyclic EL (axiom " +
        std::to_string(rep.offending[0].first) + ": " +
        rep.offending[0].second + ")");
}

inline syntax::TBox merge(const syntax::TBox& a, const syntax::TBox& b) {
  syntax::TBox out = a;
  out.axioms.insert(out.axioms.end(), b.axioms.begin(), b.axioms.end());
  out.fragment.reset();
  return out;
}

}  // namespace detail

// A in cwtn_lhs iff some sigma-inclusion A <= C holds under t2 but not t1;
// decided by simulation between the canonical models.
inline std::vector<std::string> cwtn_lhs(const syntax::TBox& t1,
                                         const syntax::TBox& t2,
                                         const syntax::Signature& sigma) {
  reasoner::require_el(t1, "cwtn_lhs");
  reasoner::require_el(t2, "cwtn_lhs");
  interp::FiniteInterpretation left =
      reasoner::el_canonical_tbox(t2, sigma.concepts);
  interp::FiniteInterpretation right =
      reasoner::el_canonical_tbox(t1, sigma.concepts);
  interp::SimTable st(left, right, sigma, /*bisim=*/false);
  std::vector<std::string> out;
  for (const auto& a : sigma.concepts)
    if (!st.holds(left.at(a), right.at(a))) out.push_back(a);
  return out;
}

// A in cwtn_rhs iff some sigma-inclusion C <= A holds under t2 but not t1;
// decided against the omitted-conjunct candidates.
inline std::vector<std::string> cwtn_rhs(const syntax::TBox& t1,
                                         const syntax::TBox& t2,
                                         const syntax::Signature& sigma) {
  detail::require_acyclic(t1, "cwtn_rhs");
  reasoner::require_el(t2, "cwtn_rhs");
  detail::AvoidBuilder ab(t1, sigma, syntax::sig(t2));
  std::map<std::string, std::vector<std::string>> cands;
  for (const auto& a : sigma.concepts) cands[a] = ab.frontier(a);

  reasoner::ELCore core2(detail::merge(t2, ab.encoding()), sigma.concepts,
                         nullptr);
  reasoner::ELCore core1(detail::merge(t1, ab.encoding()), sigma.concepts,
                         nullptr);
  std::vector<std::string> out;
  for (const auto& a : sigma.concepts) {
    int a2 = core2.elem_of_name(a), a1 = core1.elem_of_name(a);
    for (const auto& x : cands[a]) {
      if (!core2.has(core2.elem_of_name(x), a2)) continue;
      if (core1.has(core1.elem_of_name(x), a1)) continue;  // guard
      out.push_back(a);
      break;
    }
  }
  return out;
}

// Directed sigma-concept diff of t2 against t1 with example inclusions.
inline DiffReport el_diff(const syntax::TBox& t1, const syntax::TBox& t2,
                          const syntax::Signature& sigma,
                          std::size_t max_examples = 1,
                          bool lhs_only = false) {
  reasoner::require_el(t1, "el_diff");
  reasoner::require_el(t2, "el_diff");
  DiffReport rep;
  rep.lhs_only = lhs_only;

  // lhs witnesses with distinguishing concepts off the simulation table
  interp::FiniteInterpretation left =
      reasoner::el_canonical_tbox(t2, sigma.concepts);
  interp::FiniteInterpretation right =
      reasoner::el_canonical_tbox(t1, sigma.concepts);
  interp::SimTable st(left, right, sigma, /*bisim=*/false);
  for (const auto& a : sigma.concepts) {
    int x = left.at(a), y = right.at(a);
    if (st.holds(x, y)) continue;
    rep.lhs_witnesses.push_back(a);
    if (max_examples == 0) continue;
    int budget = kExampleNodeCap;
    syntax::ConceptPtr c = detail::dist_concept(st, x, y, budget);
    if (budget < 0) {
      rep.truncated = true;
      continue;
    }
    syntax::Axiom ax = syntax::Axiom::sub(syntax::name(a), c);
    if (reasoner::el_subsumes(t2, ax.lhs, ax.rhs) &&
        !reasoner::el_subsumes(t1, ax.lhs, ax.rhs))
      rep.examples.push_back({ax, "lhs"});
    else
      rep.truncated = true;
  }

  if (!lhs_only) {
    detail::require_acyclic(t1, "el_diff");
    detail::AvoidBuilder ab(t1, sigma, syntax::sig(t2));
    std::map<std::string, std::vector<std::string>> cands;
    for (const auto& a : sigma.concepts) cands[a] = ab.frontier(a);
    reasoner::ELCore core2(detail::merge(t2, ab.encoding()), sigma.concepts,
                           nullptr);
    reasoner::ELCore core1(detail::merge(t1, ab.encoding()), sigma.concepts,
                           nullptr);
    for (const auto& a : sigma.concepts) {
      int a2 = core2.elem_of_name(a), a1 = core1.elem_of_name(a);
      bool witness = false;
      std::size_t emitted = 0;
      for (const auto& x : cands[a]) {
        if (!core2.has(core2.elem_of_name(x), a2)) continue;
        if (core1.has(core1.elem_of_name(x), a1)) continue;
        if (!witness) {
          witness = true;
          rep.rhs_witnesses.push_back(a);
        }
        if (emitted >= max_examples) break;
        // minimal unfolding depth at which t2 alone proves the inclusion
        bool found = false;
        for (int d = 1; d <= kUnfoldDepthCap && !found; ++d) {
          syntax::ConceptPtr c = ab.unfold(syntax::name(x), d);
          if (detail::count_nodes(c) > kExampleNodeCap) break;
          if (!reasoner::el_subsumes(t2, c, syntax::name(a))) continue;
          if (reasoner::el_subsumes(t1, c, syntax::name(a))) break;
          rep.examples.push_back(
              {syntax::Axiom::sub(c, syntax::name(a)), "rhs"});
          ++emitted;
          found = true;
        }
        if (!found) rep.truncated = true;
      }
    }
  }

  rep.inseparable = rep.lhs_witnesses.empty() && rep.rhs_witnesses.empty();
  return rep;
}

// t1 entails t2 on sigma for right-anchored concept inclusions iff the
// directed diff is empty.
inline bool tbox_rcq_entails_el(const syntax::TBox& t1, const syntax::TBox& t2,
                                const syntax::Signature& sigma) {
  return cwtn_lhs(t1, t2, sigma).empty() && cwtn_rhs(t1, t2, sigma).empty();
}

}  // namespace insep::eldiff
