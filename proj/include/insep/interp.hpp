#pragma once
// Finite interpretations: model checking, signature-restricted simulations
// and bisimulations, homomorphisms, S-expression (de)serialization.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "insep/syntax.hpp"

namespace insep::interp {

using syntax::ConceptPtr;
using syntax::Signature;

struct FiniteInterpretation {
  std::vector<std::string> elems;                     // index -> id
  std::map<std::string, int> index;                   // id -> index
  std::map<std::string, std::set<int>> concept_ext;   // name -> extension
  std::map<std::string, std::set<std::pair<int, int>>> role_ext;
  std::map<std::string, int> individuals;             // injective

  int add_elem(const std::string& id) {
    auto it = index.find(id);
    if (it != index.end()) return it->second;
    int i = static_cast<int>(elems.size());
    elems.push_back(id);
    index.emplace(id, i);
    return i;
  }

  bool has_elem(const std::string& id) const { return index.count(id) > 0; }

  int at(const std::string& id) const {
    auto it = index.find(id);
    if (it == index.end())
      throw std::invalid_argument("no element '" + id + "'");
    return it->second;
  }

  void set_concept(const std::string& name, const std::string& id) {
    concept_ext[name].insert(add_elem(id));
  }

  void add_edge(const std::string& role, const std::string& from,
                const std::string& to) {
    role_ext[role].emplace(add_elem(from), add_elem(to));
  }

  void set_individual(const std::string& name, const std::string& id) {
    int e = add_elem(id);
    for (const auto& [n, i] : individuals)
      if (i == e && n != name)
        throw std::invalid_argument(
            "individuals must be injective: '" + n + "' and '" + name +
            "' both name element '" + id + "'");
    individuals[name] = e;
  }

  bool in_concept(const std::string& name, int e) const {
    auto it = concept_ext.find(name);
    return it != concept_ext.end() && it->second.count(e) > 0;
  }

  bool has_edge(const std::string& role, int a, int b) const {
    auto it = role_ext.find(role);
    return it != role_ext.end() && it->second.count({a, b}) > 0;
  }

  std::size_t size() const { return elems.size(); }
};

// ------------------------------------------------------------- evaluation

namespace detail {
inline std::vector<char> ext_mask(const FiniteInterpretation& I,
                                  const ConceptPtr& c,
                                  std::map<std::string, std::vector<char>>& memo) {
  auto hit = memo.find(c->repr);
  if (hit != memo.end()) return hit->second;
  const int n = static_cast<int>(I.size());
  std::vector<char> out(n, 0);
  using syntax::Ctor;
  switch (c->ctor) {
    case Ctor::Top:
      out.assign(n, 1);
      break;
    case Ctor::Bot:
      break;
    case Ctor::Name: {
      auto it = I.concept_ext.find(c->name);
      if (it != I.concept_ext.end())
        for (int e : it->second) out[e] = 1;
      break;
    }
    case Ctor::Not: {
      auto k = ext_mask(I, c->kids[0], memo);
      for (int i = 0; i < n; ++i) out[i] = !k[i];
      break;
    }
    case Ctor::And: {
      out.assign(n, 1);
      for (const auto& kid : c->kids) {
        auto k = ext_mask(I, kid, memo);
        for (int i = 0; i < n; ++i) out[i] = out[i] && k[i];
      }
      break;
    }
    case Ctor::Or: {
      for (const auto& kid : c->kids) {
        auto k = ext_mask(I, kid, memo);
        for (int i = 0; i < n; ++i) out[i] = out[i] || k[i];
      }
      break;
    }
    case Ctor::Exists:
    case Ctor::Forall: {
      auto k = ext_mask(I, c->kids[0], memo);
      std::vector<char> has_witness(n, 0), has_counter(n, 0);
      auto it = I.role_ext.find(c->role.name);
      if (it != I.role_ext.end()) {
        for (const auto& [a, b] : it->second) {
          int src = c->role.inverted ? b : a;
          int dst = c->role.inverted ? a : b;
          if (k[dst]) has_witness[src] = 1;
          else has_counter[src] = 1;
        }
      }
      for (int i = 0; i < n; ++i)
        out[i] = c->ctor == Ctor::Exists ? has_witness[i] : !has_counter[i];
      break;
    }
  }
  memo.emplace(c->repr, out);
  return out;
}
}  // namespace detail

inline std::set<int> ext(const FiniteInterpretation& I, const ConceptPtr& c) {
  std::map<std::string, std::vector<char>> memo;
  auto mask = detail::ext_mask(I, c, memo);
  std::set<int> out;
  for (int i = 0; i < static_cast<int>(mask.size()); ++i)
    if (mask[i]) out.insert(i);
  return out;
}

inline bool satisfies(const FiniteInterpretation& I, const std::string& id,
                      const ConceptPtr& c) {
  std::map<std::string, std::vector<char>> memo;
  return detail::ext_mask(I, c, memo)[I.at(id)] != 0;
}

inline bool satisfies_axiom(const FiniteInterpretation& I,
                            const syntax::Axiom& ax) {
  using syntax::AxKind;
  if (ax.kind == AxKind::RSub) {
    auto pairs_of = [&](const syntax::Role& r) {
      std::set<std::pair<int, int>> out;
      auto it = I.role_ext.find(r.name);
      if (it != I.role_ext.end())
        for (auto [a, b] : it->second)
          out.emplace(r.inverted ? b : a, r.inverted ? a : b);
      return out;
    };
    auto sub = pairs_of(ax.r1), sup = pairs_of(ax.r2);
    for (const auto& p : sub)
      if (!sup.count(p)) return false;
    return true;
  }
  std::map<std::string, std::vector<char>> memo;
  auto l = detail::ext_mask(I, ax.lhs, memo);
  auto r = detail::ext_mask(I, ax.rhs, memo);
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (l[i] && !r[i]) return false;
    if (ax.kind == AxKind::Equiv && r[i] && !l[i]) return false;
  }
  return true;
}

inline bool satisfies_tbox(const FiniteInterpretation& I,
                           const syntax::TBox& t) {
  for (const auto& ax : t.axioms)
    if (!satisfies_axiom(I, ax)) return false;
  return true;
}

inline bool satisfies_abox(const FiniteInterpretation& I,
                           const syntax::ABox& a) {
  for (const auto& [c, ind] : a.concept_assertions) {
    auto it = I.individuals.find(ind);
    if (it == I.individuals.end() || !I.in_concept(c, it->second)) return false;
  }
  for (const auto& [r, x, y] : a.role_assertions) {
    auto ix = I.individuals.find(x), iy = I.individuals.find(y);
    if (ix == I.individuals.end() || iy == I.individuals.end() ||
        !I.has_edge(r, ix->second, iy->second))
      return false;
  }
  return true;
}

inline bool satisfies_kb(const FiniteInterpretation& I, const syntax::KB& k) {
  return satisfies_tbox(I, k.tbox) && satisfies_abox(I, k.abox);
}

// ------------------------------------------------- simulation machinery

struct SimWitness {
  enum Kind { Alive, Base, Zig } kind = Alive;
  std::string concept_name;  // Base: name holding on the left, not the right
  std::string role;          // Zig: role of the unmatched edge
  int succ = -1;             // Zig: target element (index in the left model)
};

// Greatest signature-restricted (bi)simulation between two interpretations,
// with a well-founded removal certificate per dead pair (used to read off
// distinguishing concepts).
class SimTable {
 public:
  SimTable(const FiniteInterpretation& I1, const FiniteInterpretation& I2,
           const Signature& sigma, bool bisim)
      : n1_(static_cast<int>(I1.size())), n2_(static_cast<int>(I2.size())) {
    build(I1, I2, sigma, bisim);
  }

  bool holds(int d1, int d2) const { return alive_[idx(d1, d2)] != 0; }
  int removal_time(int d1, int d2) const { return time_[idx(d1, d2)]; }

  SimWitness why(int d1, int d2) const {
    std::size_t p = idx(d1, d2);
    SimWitness w;
    if (alive_[p]) return w;
    if (wit_role_[p] < 0) {
      w.kind = SimWitness::Base;
      w.concept_name = concept_names_[wit_name_[p]];
    } else {
      w.kind = SimWitness::Zig;
      w.role = role_names_[wit_role_[p]];
      w.succ = wit_succ_[p];
    }
    return w;
  }

  // r-successors of an element of the right model, for zig repairs
  const std::vector<int>& succ2(const std::string& role, int e) const {
    static const std::vector<int> none;
    for (std::size_t r = 0; r < role_names_.size(); ++r)
      if (role_names_[r] == role) return succ2_[r][e];
    return none;
  }

  std::vector<std::pair<int, int>> alive_pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n1_; ++i)
      for (int j = 0; j < n2_; ++j)
        if (alive_[idx(i, j)]) out.emplace_back(i, j);
    return out;
  }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * n2_ + j;
  }

  void build(const FiniteInterpretation& I1, const FiniteInterpretation& I2,
             const Signature& sigma, bool bisim) {
    concept_names_.assign(sigma.concepts.begin(), sigma.concepts.end());
    role_names_.assign(sigma.roles.begin(), sigma.roles.end());
    const int nc = static_cast<int>(concept_names_.size());
    const int nr = static_cast<int>(role_names_.size());

    auto labels_of = [&](const FiniteInterpretation& I, int n) {
      std::vector<std::vector<int>> lab(n);
      for (int a = 0; a < nc; ++a) {
        auto it = I.concept_ext.find(concept_names_[a]);
        if (it != I.concept_ext.end())
          for (int e : it->second) lab[e].push_back(a);
      }
      return lab;
    };
    auto adj_of = [&](const FiniteInterpretation& I, int n, bool forward) {
      std::vector<std::vector<std::vector<int>>> adj(
          nr, std::vector<std::vector<int>>(n));
      for (int r = 0; r < nr; ++r) {
        auto it = I.role_ext.find(role_names_[r]);
        if (it != I.role_ext.end())
          for (auto [a, b] : it->second)
            adj[r][forward ? a : b].push_back(forward ? b : a);
      }
      return adj;
    };

    auto lab1 = labels_of(I1, n1_), lab2 = labels_of(I2, n2_);
    succ1_ = adj_of(I1, n1_, true);
    succ2_ = adj_of(I2, n2_, true);
    auto pred1 = adj_of(I1, n1_, false);
    auto pred2 = adj_of(I2, n2_, false);

    const std::size_t total = static_cast<std::size_t>(n1_) * n2_;
    alive_.assign(total, 1);
    time_.assign(total, -1);
    wit_role_.assign(total, -1);
    wit_name_.assign(total, -1);
    wit_succ_.assign(total, -1);
    int clock = 0;

    std::vector<std::pair<int, int>> queue;
    auto kill = [&](int i, int j, int role, int name, int succ) {
      std::size_t p = idx(i, j);
      alive_[p] = 0;
      time_[p] = clock++;
      wit_role_[p] = role;
      wit_name_[p] = name;
      wit_succ_[p] = succ;
      for (int r = 0; r < nr; ++r)
        for (int x : pred1[r][i])
          for (int y : pred2[r][j]) queue.emplace_back(x, y);
    };

    // base condition
    for (int i = 0; i < n1_; ++i)
      for (int j = 0; j < n2_; ++j) {
        int missing = -1;
        {
          std::size_t a = 0, b = 0;
          const auto &L = lab1[i], &R = lab2[j];
          while (a < L.size()) {
            while (b < R.size() && R[b] < L[a]) ++b;
            if (b == R.size() || R[b] != L[a]) {
              missing = L[a];
              break;
            }
            ++a;
          }
        }
        if (missing < 0 && bisim) {
          for (int a : lab2[j]) {
            if (!std::binary_search(lab1[i].begin(), lab1[i].end(), a)) {
              missing = a;
              break;
            }
          }
        }
        if (missing >= 0) {
          std::size_t p = idx(i, j);
          alive_[p] = 0;
          time_[p] = clock++;
          wit_name_[p] = missing;
        } else {
          queue.emplace_back(i, j);
        }
      }

    // local conditions to a fixpoint
    auto zig_fails = [&](int i, int j, int* role, int* succ) {
      for (int r = 0; r < nr; ++r)
        for (int x : succ1_[r][i]) {
          bool matched = false;
          for (int y : succ2_[r][j])
            if (alive_[idx(x, y)]) {
              matched = true;
              break;
            }
          if (!matched) {
            *role = r;
            *succ = x;
            return true;
          }
        }
      return false;
    };
    auto zag_fails = [&](int i, int j, int* role, int* succ) {
      for (int r = 0; r < nr; ++r)
        for (int y : succ2_[r][j]) {
          bool matched = false;
          for (int x : succ1_[r][i])
            if (alive_[idx(x, y)]) {
              matched = true;
              break;
            }
          if (!matched) {
            *role = r;
            *succ = y;
            return true;
          }
        }
      return false;
    };

    while (!queue.empty()) {
      auto [i, j] = queue.back();
      queue.pop_back();
      if (!alive_[idx(i, j)]) continue;
      int role = -1, succ = -1;
      if (zig_fails(i, j, &role, &succ) ||
          (bisim && zag_fails(i, j, &role, &succ)))
        kill(i, j, role, -1, succ);
    }
  }

  int n1_, n2_;
  std::vector<std::string> concept_names_, role_names_;
  std::vector<std::vector<std::vector<int>>> succ1_, succ2_;
  std::vector<std::uint8_t> alive_;
  std::vector<int> time_;
  std::vector<int> wit_role_, wit_name_, wit_succ_;
};

inline SimTable simulation_table(const FiniteInterpretation& I1,
                                 const FiniteInterpretation& I2,
                                 const Signature& sigma) {
  return SimTable(I1, I2, sigma, false);
}

struct RelationResult {
  bool holds = false;
  std::vector<std::pair<std::string, std::string>> witness;  // greatest relation
};

namespace detail {
inline RelationResult relation_check(const FiniteInterpretation& I1,
                                     const std::string& d1,
                                     const FiniteInterpretation& I2,
                                     const std::string& d2,
                                     const Signature& sigma, bool bisim) {
  SimTable t(I1, I2, sigma, bisim);
  RelationResult out;
  out.holds = t.holds(I1.at(d1), I2.at(d2));
  for (auto [i, j] : t.alive_pairs())
    out.witness.emplace_back(I1.elems[i], I2.elems[j]);
  return out;
}
}  // namespace detail

// Greatest sigma-simulation of I1 inside I2; holds iff (d1,d2) is in it.
inline RelationResult check_simulation(const FiniteInterpretation& I1,
                                       const std::string& d1,
                                       const FiniteInterpretation& I2,
                                       const std::string& d2,
                                       const Signature& sigma) {
  return detail::relation_check(I1, d1, I2, d2, sigma, false);
}

inline RelationResult check_bisimulation(const FiniteInterpretation& I1,
                                         const std::string& d1,
                                         const FiniteInterpretation& I2,
                                         const std::string& d2,
                                         const Signature& sigma) {
  return detail::relation_check(I1, d1, I2, d2, sigma, true);
}

// ---------------------------------------------------------- homomorphism

struct HomResult {
  bool exists = false;
  std::map<std::string, std::string> mapping;  // src elem id -> dst elem id
};

// Sigma-homomorphism from src into dst.  With `anchored`, every individual
// named in src must be mapped to the identically named individual of dst.
inline HomResult check_homomorphism(const FiniteInterpretation& src,
                                    const FiniteInterpretation& dst,
                                    const Signature& sigma, bool anchored) {
  const int n = static_cast<int>(src.size());
  const int m = static_cast<int>(dst.size());
  HomResult out;
  if (n == 0) {
    out.exists = true;
    return out;
  }

  // candidate sets filtered by concept labels
  std::vector<std::vector<int>> cand(n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < m; ++c) {
      bool ok = true;
      for (const auto& a : sigma.concepts)
        if (src.in_concept(a, i) && !dst.in_concept(a, c)) {
          ok = false;
          break;
        }
      if (ok) cand[i].push_back(c);
    }
  }
  if (anchored) {
    for (const auto& [name, e] : src.individuals) {
      auto it = dst.individuals.find(name);
      if (it == dst.individuals.end()) return out;
      std::vector<int>& cs = cand[e];
      if (std::find(cs.begin(), cs.end(), it->second) == cs.end()) return out;
      cs.assign(1, it->second);
    }
  }

  // sigma edges of src
  struct Edge { int from, to; std::string role; };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> out_edges(n), in_edges(n);
  for (const auto& r : sigma.roles) {
    auto it = src.role_ext.find(r);
    if (it == src.role_ext.end()) continue;
    for (auto [a, b] : it->second) {
      out_edges[a].push_back(static_cast<int>(edges.size()));
      in_edges[b].push_back(static_cast<int>(edges.size()));
      edges.push_back({a, b, r});
    }
  }

  auto dst_has = [&](const std::string& r, int a, int b) {
    return dst.has_edge(r, a, b);
  };

  // arc consistency to a fixpoint
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : edges) {
      auto filter = [&](int var, bool forward) {
        std::vector<int>& cs = cand[var];
        std::size_t kept = 0;
        for (int c : cs) {
          bool supported = false;
          for (int c2 : cand[forward ? e.to : e.from]) {
            if (forward ? dst_has(e.role, c, c2) : dst_has(e.role, c2, c)) {
              supported = true;
              break;
            }
          }
          if (supported) cs[kept++] = c;
        }
        if (kept != cs.size()) {
          cs.resize(kept);
          changed = true;
        }
      };
      filter(e.from, true);
      filter(e.to, false);
    }
  }
  for (int i = 0; i < n; ++i)
    if (cand[i].empty()) return out;

  // assign in descending sigma-degree order
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    std::size_t da = out_edges[a].size() + in_edges[a].size();
    std::size_t db = out_edges[b].size() + in_edges[b].size();
    if (da != db) return da > db;
    return a < b;
  });

  std::vector<int> assign(n, -1);
  auto consistent = [&](int var, int val) {
    for (int ei : out_edges[var]) {
      // self-loops constrain the value being tried, not a prior assignment
      int other = edges[ei].to == var ? val : assign[edges[ei].to];
      if (other >= 0 && !dst_has(edges[ei].role, val, other)) return false;
    }
    for (int ei : in_edges[var]) {
      int other = edges[ei].from == var ? val : assign[edges[ei].from];
      if (other >= 0 && !dst_has(edges[ei].role, other, val)) return false;
    }
    return true;
  };
  std::vector<std::size_t> pos(n, 0);
  int depth = 0;
  while (depth >= 0 && depth < n) {
    int var = order[depth];
    bool advanced = false;
    while (pos[depth] < cand[var].size()) {
      int val = cand[var][pos[depth]++];
      if (consistent(var, val)) {
        assign[var] = val;
        ++depth;
        if (depth < n) pos[depth] = 0;
        advanced = true;
        break;
      }
    }
    if (!advanced) {
      assign[var] = -1;
      --depth;
      if (depth >= 0) assign[order[depth]] = -1;
    }
  }
  if (depth < 0) return out;

  out.exists = true;
  for (int i = 0; i < n; ++i) out.mapping[src.elems[i]] = dst.elems[assign[i]];
  return out;
}

// ----------------------------------------------------------- serialization

inline std::string to_sexpr(const FiniteInterpretation& I) {
  std::string out;
  for (const auto& e : I.elems) out += "(elem " + e + ")\n";
  for (std::size_t i = 0; i < I.elems.size(); ++i) {
    std::vector<std::string> names;
    for (const auto& [name, ext] : I.concept_ext)
      if (ext.count(static_cast<int>(i))) names.push_back(name);
    for (const auto& n : names) out += "(in " + I.elems[i] + " " + n + ")\n";
  }
  for (const auto& [role, pairs] : I.role_ext)
    for (const auto& [a, b] : pairs)
      out += "(edge " + role + " " + I.elems[a] + " " + I.elems[b] + ")\n";
  for (const auto& [name, e] : I.individuals)
    out += "(ind " + name + " " + I.elems[e] + ")\n";
  return out;
}

inline FiniteInterpretation interpretation_from_sexpr(const std::string& text) {
  syntax::detail::Reader rd(text);
  FiniteInterpretation I;
  auto want_atom = [](const syntax::detail::Sexp& s,
                      const char* what) -> const std::string& {
    if (!s.is_atom) throw syntax::ParseError(s.line, s.col, std::string("expected ") + what);
    return s.atom;
  };
  while (!rd.at_end()) {
    auto s = rd.read();
    if (s.is_atom || s.list.empty() || !s.list[0].is_atom)
      throw syntax::ParseError(s.line, s.col, "expected (elem|in|edge|ind ...)");
    const std::string& hd = s.list[0].atom;
    if (hd == "elem" && s.list.size() == 2) {
      I.add_elem(want_atom(s.list[1], "element id"));
    } else if (hd == "in" && s.list.size() == 3) {
      I.set_concept(want_atom(s.list[2], "concept name"),
                    want_atom(s.list[1], "element id"));
    } else if (hd == "edge" && s.list.size() == 4) {
      I.add_edge(want_atom(s.list[1], "role name"),
                 want_atom(s.list[2], "element id"),
                 want_atom(s.list[3], "element id"));
    } else if (hd == "ind" && s.list.size() == 3) {
      I.set_individual(want_atom(s.list[1], "individual name"),
                       want_atom(s.list[2], "element id"));
    } else {
      throw syntax::ParseError(s.line, s.col, "unknown interpretation form");
    }
  }
  return I;
}

}  // namespace insep::interp
