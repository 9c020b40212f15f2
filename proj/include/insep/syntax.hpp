#pragma once
// Core syntax: concepts, axioms, S-expression documents, signatures,
// fragment validation, EL normalization and dependency closures.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace insep::syntax {

// ---------------------------------------------------------------- errors

struct ParseError : std::runtime_error {
  int line = 0;
  int col = 0;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(l) + ":" +
                           std::to_string(c) + ": " + msg),
        line(l),
        col(c) {}
};

// ----------------------------------------------------------------- roles

struct Role {
  std::string name;
  bool inverted = false;

  Role() = default;
  Role(std::string n, bool inv = false) : name(std::move(n)), inverted(inv) {}

  Role inverse() const { return Role{name, !inverted}; }

  std::string str() const {
    return inverted ? "(inv " + name + ")" : name;
  }

  friend bool operator==(const Role& a, const Role& b) {
    return a.name == b.name && a.inverted == b.inverted;
  }
  friend bool operator!=(const Role& a, const Role& b) { return !(a == b); }
  friend bool operator<(const Role& a, const Role& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.inverted < b.inverted;
  }
};

// -------------------------------------------------------------- concepts

enum class Ctor { Top, Bot, Name, Not, And, Or, Exists, Forall };

struct Concept;
using ConceptPtr = std::shared_ptr<const Concept>;

struct Concept {
  Ctor ctor = Ctor::Top;
  std::string name;              // Ctor::Name
  Role role;                     // Exists / Forall
  std::vector<ConceptPtr> kids;  // Not: 1, And/Or: >= 2, Exists/Forall: 1
  std::string repr;              // canonical printed form, fixed at build time
};

inline const std::string& str(const ConceptPtr& c) { return c->repr; }

namespace detail {
inline ConceptPtr mk(Concept c) {
  return std::make_shared<const Concept>(std::move(c));
}
}  // namespace detail

inline ConceptPtr top() {
  static ConceptPtr t = detail::mk({Ctor::Top, "", {}, {}, "Top"});
  return t;
}

inline ConceptPtr bot() {
  static ConceptPtr b = detail::mk({Ctor::Bot, "", {}, {}, "Bot"});
  return b;
}

inline ConceptPtr name(const std::string& n) {
  return detail::mk({Ctor::Name, n, {}, {}, n});
}

inline ConceptPtr neg(ConceptPtr c) {
  std::string r = "(not " + c->repr + ")";
  return detail::mk({Ctor::Not, "", {}, {std::move(c)}, std::move(r)});
}

namespace detail {
// And/Or children are kept sorted by printed form with duplicates removed;
// a single survivor collapses to itself.
inline ConceptPtr nary(Ctor ct, std::vector<ConceptPtr> kids,
                       const char* tag, ConceptPtr unit) {
  std::sort(kids.begin(), kids.end(),
            [](const ConceptPtr& a, const ConceptPtr& b) {
              return a->repr < b->repr;
            });
  kids.erase(std::unique(kids.begin(), kids.end(),
                         [](const ConceptPtr& a, const ConceptPtr& b) {
                           return a->repr == b->repr;
                         }),
             kids.end());
  if (kids.empty()) return unit;
  if (kids.size() == 1) return kids.front();
  std::string r = std::string("(") + tag;
  for (const auto& k : kids) r += " " + k->repr;
  r += ")";
  return mk({ct, "", {}, std::move(kids), std::move(r)});
}
}  // namespace detail

inline ConceptPtr conj(std::vector<ConceptPtr> kids) {
  return detail::nary(Ctor::And, std::move(kids), "and", top());
}

inline ConceptPtr disj(std::vector<ConceptPtr> kids) {
  return detail::nary(Ctor::Or, std::move(kids), "or", bot());
}

inline ConceptPtr exists(Role r, ConceptPtr c) {
  std::string s = "(some " + r.str() + " " + c->repr + ")";
  return detail::mk({Ctor::Exists, "", std::move(r), {std::move(c)}, std::move(s)});
}

inline ConceptPtr forall(Role r, ConceptPtr c) {
  std::string s = "(all " + r.str() + " " + c->repr + ")";
  return detail::mk({Ctor::Forall, "", std::move(r), {std::move(c)}, std::move(s)});
}

inline bool equal(const ConceptPtr& a, const ConceptPtr& b) {
  return a == b || a->repr == b->repr;
}

struct ConceptLess {
  bool operator()(const ConceptPtr& a, const ConceptPtr& b) const {
    return a->repr < b->repr;
  }
};

// Flattens nested conjunctions into a list of non-And conjuncts.
inline void flatten_and(const ConceptPtr& c, std::vector<ConceptPtr>& out) {
  if (c->ctor == Ctor::And) {
    for (const auto& k : c->kids) flatten_and(k, out);
  } else {
    out.push_back(c);
  }
}

inline std::vector<ConceptPtr> flatten_and(const ConceptPtr& c) {
  std::vector<ConceptPtr> out;
  flatten_and(c, out);
  return out;
}

// ---------------------------------------------------------------- axioms

enum class AxKind { Sub, Equiv, RSub };

struct Axiom {
  AxKind kind = AxKind::Sub;
  ConceptPtr lhs, rhs;  // Sub / Equiv
  Role r1, r2;          // RSub

  static Axiom sub(ConceptPtr l, ConceptPtr r) {
    Axiom a;
    a.kind = AxKind::Sub;
    a.lhs = std::move(l);
    a.rhs = std::move(r);
    return a;
  }
  static Axiom equiv(ConceptPtr l, ConceptPtr r) {
    Axiom a;
    a.kind = AxKind::Equiv;
    a.lhs = std::move(l);
    a.rhs = std::move(r);
    return a;
  }
  static Axiom rsub(Role a1, Role a2) {
    Axiom a;
    a.kind = AxKind::RSub;
    a.r1 = std::move(a1);
    a.r2 = std::move(a2);
    return a;
  }

  std::string str() const {
    switch (kind) {
      case AxKind::Sub:
        return "(sub " + lhs->repr + " " + rhs->repr + ")";
      case AxKind::Equiv:
        return "(equiv " + lhs->repr + " " + rhs->repr + ")";
      case AxKind::RSub:
        return "(rsub " + r1.str() + " " + r2.str() + ")";
    }
    return "";
  }

  friend bool operator==(const Axiom& a, const Axiom& b) {
    return a.str() == b.str();
  }
};

// -------------------------------------------------------------- fragments

enum class FragmentTag { EL, AcyclicEL, DLLiteCore, DLLiteCoreH, HornALC, ALCHI };

inline std::string fragment_name(FragmentTag t) {
  switch (t) {
    case FragmentTag::EL: return "EL";
    case FragmentTag::AcyclicEL: return "AcyclicEL";
    case FragmentTag::DLLiteCore: return "DLLiteCore";
    case FragmentTag::DLLiteCoreH: return "DLLiteCoreH";
    case FragmentTag::HornALC: return "HornALC";
    case FragmentTag::ALCHI: return "ALCHI";
  }
  return "?";
}

inline std::optional<FragmentTag> fragment_from_name(const std::string& s) {
  for (FragmentTag t : {FragmentTag::EL, FragmentTag::AcyclicEL,
                        FragmentTag::DLLiteCore, FragmentTag::DLLiteCoreH,
                        FragmentTag::HornALC, FragmentTag::ALCHI})
    if (fragment_name(t) == s) return t;
  return std::nullopt;
}

// --------------------------------------------------------- tbox/abox/kb

struct TBox {
  std::vector<Axiom> axioms;
  std::optional<FragmentTag> fragment;
};

struct ABox {
  // Concept assertions use concept names only; role assertions role names.
  std::vector<std::pair<std::string, std::string>> concept_assertions;
  std::vector<std::tuple<std::string, std::string, std::string>> role_assertions;

  std::set<std::string> individuals() const {
    std::set<std::string> out;
    for (const auto& [c, a] : concept_assertions) out.insert(a);
    for (const auto& [r, a, b] : role_assertions) out.insert(a), out.insert(b);
    return out;
  }
  bool empty() const {
    return concept_assertions.empty() && role_assertions.empty();
  }
};

struct KB {
  TBox tbox;
  ABox abox;
};

// -------------------------------------------------------------- signature

struct Signature {
  std::set<std::string> concepts;
  std::set<std::string> roles;

  bool has_concept(const std::string& n) const { return concepts.count(n) > 0; }
  bool has_role(const std::string& n) const { return roles.count(n) > 0; }
  bool empty() const { return concepts.empty() && roles.empty(); }

  Signature& merge(const Signature& o) {
    concepts.insert(o.concepts.begin(), o.concepts.end());
    roles.insert(o.roles.begin(), o.roles.end());
    return *this;
  }

  friend bool operator==(const Signature& a, const Signature& b) {
    return a.concepts == b.concepts && a.roles == b.roles;
  }
};

inline void collect_sig(const ConceptPtr& c, Signature& s) {
  switch (c->ctor) {
    case Ctor::Top:
    case Ctor::Bot:
      break;
    case Ctor::Name:
      s.concepts.insert(c->name);
      break;
    case Ctor::Exists:
    case Ctor::Forall:
      s.roles.insert(c->role.name);
      collect_sig(c->kids[0], s);
      break;
    default:
      for (const auto& k : c->kids) collect_sig(k, s);
  }
}

inline Signature sig(const ConceptPtr& c) {
  Signature s;
  collect_sig(c, s);
  return s;
}

inline Signature sig(const Axiom& a) {
  Signature s;
  if (a.kind == AxKind::RSub) {
    s.roles.insert(a.r1.name);
    s.roles.insert(a.r2.name);
  } else {
    collect_sig(a.lhs, s);
    collect_sig(a.rhs, s);
  }
  return s;
}

inline Signature sig(const TBox& t) {
  Signature s;
  for (const auto& a : t.axioms) s.merge(sig(a));
  return s;
}

inline Signature sig(const ABox& a) {
  Signature s;
  for (const auto& [c, i] : a.concept_assertions) s.concepts.insert(c);
  for (const auto& [r, i, j] : a.role_assertions) s.roles.insert(r);
  return s;
}

inline Signature sig(const KB& k) { return sig(k.tbox).merge(sig(k.abox)); }

// ------------------------------------------------------------- tokenizer

namespace detail {

struct Tok {
  enum Kind { LP, RP, Atom, End } kind = End;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Tok next() {
    skip_ws();
    Tok t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = src_[pos_];
    if (c == '(') {
      advance();
      t.kind = Tok::LP;
      return t;
    }
    if (c == ')') {
      advance();
      t.kind = Tok::RP;
      return t;
    }
    t.kind = Tok::Atom;
    while (pos_ < src_.size() && !is_delim(src_[pos_])) {
      t.text += src_[pos_];
      advance();
    }
    return t;
  }

 private:
  static bool is_delim(char c) {
    return c == '(' || c == ')' || c == ';' || std::isspace(
               static_cast<unsigned char>(c));
  }
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }
  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

// Generic S-expression node used only while parsing.
struct Sexp {
  bool is_atom = false;
  std::string atom;
  std::vector<Sexp> list;
  int line = 1, col = 1;
};

class Reader {
 public:
  explicit Reader(const std::string& src) : lex_(src) { tok_ = lex_.next(); }

  bool at_end() const { return tok_.kind == Tok::End; }

  Sexp read() {
    if (tok_.kind == Tok::End)
      throw ParseError(tok_.line, tok_.col, "unexpected end of input");
    if (tok_.kind == Tok::RP)
      throw ParseError(tok_.line, tok_.col, "unexpected ')'");
    if (tok_.kind == Tok::Atom) {
      Sexp s;
      s.is_atom = true;
      s.atom = tok_.text;
      s.line = tok_.line;
      s.col = tok_.col;
      tok_ = lex_.next();
      return s;
    }
    // LP
    Sexp s;
    s.line = tok_.line;
    s.col = tok_.col;
    tok_ = lex_.next();
    while (tok_.kind != Tok::RP) {
      if (tok_.kind == Tok::End)
        throw ParseError(tok_.line, tok_.col, "missing ')'");
      s.list.push_back(read());
    }
    tok_ = lex_.next();
    return s;
  }

 private:
  Lexer lex_;
  Tok tok_;
};

}  // namespace detail

// ------------------------------------------------------ document parsing

struct Document {
  TBox tbox;
  ABox abox;
};

namespace detail {

enum class NameKind { ConceptName, RoleName, Individual };

inline const char* kind_word(NameKind k) {
  switch (k) {
    case NameKind::ConceptName: return "concept";
    case NameKind::RoleName: return "role";
    case NameKind::Individual: return "individual";
  }
  return "?";
}

class Binder {
 public:
  void bind(const std::string& n, NameKind k, int line, int col) {
    auto it = kinds_.find(n);
    if (it == kinds_.end()) {
      kinds_.emplace(n, k);
      return;
    }
    if (it->second != k)
      throw ParseError(line, col,
                       "duplicate signature binding: '" + n + "' already used as " +
                           kind_word(it->second) + ", now used as " + kind_word(k));
  }

 private:
  std::map<std::string, NameKind> kinds_;
};

inline Role parse_role(const Sexp& s, Binder& b) {
  if (s.is_atom) {
    if (s.atom == "Top" || s.atom == "Bot")
      throw ParseError(s.line, s.col, "expected role name");
    b.bind(s.atom, NameKind::RoleName, s.line, s.col);
    return Role{s.atom, false};
  }
  if (s.list.size() == 2 && s.list[0].is_atom && s.list[0].atom == "inv" &&
      s.list[1].is_atom) {
    b.bind(s.list[1].atom, NameKind::RoleName, s.list[1].line, s.list[1].col);
    return Role{s.list[1].atom, true};
  }
  throw ParseError(s.line, s.col, "expected role: NAME or (inv NAME)");
}

inline ConceptPtr parse_concept(const Sexp& s, Binder& b) {
  if (s.is_atom) {
    if (s.atom == "Top") return top();
    if (s.atom == "Bot") return bot();
    b.bind(s.atom, NameKind::ConceptName, s.line, s.col);
    return name(s.atom);
  }
  if (s.list.empty() || !s.list[0].is_atom)
    throw ParseError(s.line, s.col, "expected concept");
  const std::string& hd = s.list[0].atom;
  auto arity_err = [&](const std::string& what) {
    throw ParseError(s.line, s.col, what);
  };
  if (hd == "and" || hd == "or") {
    if (s.list.size() < 3)
      arity_err("(" + hd + " ...) needs at least two arguments");
    std::vector<ConceptPtr> kids;
    for (std::size_t i = 1; i < s.list.size(); ++i)
      kids.push_back(parse_concept(s.list[i], b));
    return hd == "and" ? conj(std::move(kids)) : disj(std::move(kids));
  }
  if (hd == "not") {
    if (s.list.size() != 2) arity_err("(not ...) takes one argument");
    return neg(parse_concept(s.list[1], b));
  }
  if (hd == "some" || hd == "all") {
    if (s.list.size() != 3) arity_err("(" + hd + " R C) takes two arguments");
    Role r = parse_role(s.list[1], b);
    ConceptPtr c = parse_concept(s.list[2], b);
    return hd == "some" ? exists(std::move(r), std::move(c))
                        : forall(std::move(r), std::move(c));
  }
  throw ParseError(s.list[0].line, s.list[0].col,
                   "unknown concept constructor '" + hd + "'");
}

inline std::string parse_plain_name(const Sexp& s, const char* what) {
  if (!s.is_atom || s.atom == "Top" || s.atom == "Bot")
    throw ParseError(s.line, s.col, std::string("expected ") + what);
  return s.atom;
}

}  // namespace detail

inline Document parse_document(const std::string& text) {
  detail::Reader rd(text);
  detail::Binder binder;
  Document doc;
  while (!rd.at_end()) {
    detail::Sexp s = rd.read();
    if (s.is_atom || s.list.empty() || !s.list[0].is_atom)
      throw ParseError(s.line, s.col, "expected (sub|equiv|rsub|ca|ra ...)");
    const std::string& hd = s.list[0].atom;
    if (hd == "sub" || hd == "equiv") {
      if (s.list.size() != 3)
        throw ParseError(s.line, s.col, "(" + hd + " C C) takes two arguments");
      ConceptPtr l = detail::parse_concept(s.list[1], binder);
      ConceptPtr r = detail::parse_concept(s.list[2], binder);
      doc.tbox.axioms.push_back(hd == "sub" ? Axiom::sub(l, r)
                                            : Axiom::equiv(l, r));
    } else if (hd == "rsub") {
      if (s.list.size() != 3)
        throw ParseError(s.line, s.col, "(rsub R R) takes two arguments");
      Role a = detail::parse_role(s.list[1], binder);
      Role b = detail::parse_role(s.list[2], binder);
      doc.tbox.axioms.push_back(Axiom::rsub(a, b));
    } else if (hd == "ca") {
      if (s.list.size() != 3)
        throw ParseError(s.line, s.col, "(ca NAME IND) takes two arguments");
      std::string c = detail::parse_plain_name(s.list[1], "concept name");
      binder.bind(c, detail::NameKind::ConceptName, s.list[1].line, s.list[1].col);
      std::string a = detail::parse_plain_name(s.list[2], "individual name");
      binder.bind(a, detail::NameKind::Individual, s.list[2].line, s.list[2].col);
      doc.abox.concept_assertions.emplace_back(c, a);
    } else if (hd == "ra") {
      if (s.list.size() != 4)
        throw ParseError(s.line, s.col, "(ra NAME IND IND) takes three arguments");
      std::string r = detail::parse_plain_name(s.list[1], "role name");
      binder.bind(r, detail::NameKind::RoleName, s.list[1].line, s.list[1].col);
      std::string a = detail::parse_plain_name(s.list[2], "individual name");
      std::string b = detail::parse_plain_name(s.list[3], "individual name");
      binder.bind(a, detail::NameKind::Individual, s.list[2].line, s.list[2].col);
      binder.bind(b, detail::NameKind::Individual, s.list[3].line, s.list[3].col);
      doc.abox.role_assertions.emplace_back(r, a, b);
    } else {
      throw ParseError(s.list[0].line, s.list[0].col,
                       "unknown form '" + hd + "'");
    }
  }
  return doc;
}

inline ConceptPtr parse_concept_text(const std::string& text) {
  detail::Reader rd(text);
  detail::Binder binder;
  detail::Sexp s = rd.read();
  ConceptPtr c = detail::parse_concept(s, binder);
  if (!rd.at_end()) throw ParseError(0, 0, "trailing input after concept");
  return c;
}

// ----------------------------------------------------- signature parsing

namespace detail {
inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline void sig_insert(Signature& sig, const std::string& kind,
                       const std::string& name, int line) {
  if (name.empty()) return;
  if (kind == "concept") {
    if (sig.has_role(name))
      throw ParseError(line, 1, "duplicate signature binding: '" + name +
                                    "' declared as both concept and role");
    sig.concepts.insert(name);
  } else if (kind == "role") {
    if (sig.has_concept(name))
      throw ParseError(line, 1, "duplicate signature binding: '" + name +
                                    "' declared as both concept and role");
    sig.roles.insert(name);
  } else {
    throw ParseError(line, 1, "expected 'concept' or 'role', got '" + kind + "'");
  }
}
}  // namespace detail

// Accepts either the line form ("concept NAME" / "role NAME" per line, ';'
// comments) or the inline form "concept:A,B;role:r".
inline Signature parse_signature(const std::string& text) {
  Signature out;
  std::string body = detail::trim(text);
  if (body.find(':') != std::string::npos) {
    int group_no = 1;
    for (const std::string& raw : detail::split(body, ';')) {
      std::string group = detail::trim(raw);
      if (group.empty()) continue;
      auto colon = group.find(':');
      if (colon == std::string::npos)
        throw ParseError(group_no, 1, "expected kind:NAME,... in '" + group + "'");
      std::string kind = detail::trim(group.substr(0, colon));
      for (const std::string& n : detail::split(group.substr(colon + 1), ','))
        detail::sig_insert(out, kind, detail::trim(n), group_no);
      ++group_no;
    }
    return out;
  }
  int line_no = 0;
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    auto semi = line.find(';');
    if (semi != std::string::npos) line = line.substr(0, semi);
    line = detail::trim(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind, name, extra;
    ls >> kind >> name;
    if (name.empty() || (ls >> extra))
      throw ParseError(line_no, 1, "expected 'concept NAME' or 'role NAME'");
    detail::sig_insert(out, kind, name, line_no);
  }
  return out;
}

// ---------------------------------------------------- fragment validation

struct FragmentReport {
  bool ok = true;
  std::vector<std::pair<std::size_t, std::string>> offending;  // index, reason

  void flag(std::size_t i, std::string why) {
    ok = false;
    offending.emplace_back(i, std::move(why));
  }
};

namespace detail {

inline bool is_el_concept(const ConceptPtr& c, std::string* why) {
  switch (c->ctor) {
    case Ctor::Top:
    case Ctor::Name:
      return true;
    case Ctor::And:
      for (const auto& k : c->kids)
        if (!is_el_concept(k, why)) return false;
      return true;
    case Ctor::Exists:
      if (c->role.inverted) {
        if (why) *why = "inverse role " + c->role.str() + " is not EL";
        return false;
      }
      return is_el_concept(c->kids[0], why);
    default:
      if (why) *why = "constructor in " + c->repr + " is not EL";
      return false;
  }
}

inline bool is_dllite_basic(const ConceptPtr& c) {
  if (c->ctor == Ctor::Top || c->ctor == Ctor::Bot || c->ctor == Ctor::Name)
    return true;
  return c->ctor == Ctor::Exists && c->kids[0]->ctor == Ctor::Top;
}

// Polarity walk for the Horn check: disjunction may not occur positively,
// negation and value restrictions may not occur negatively.
inline bool horn_ok(const ConceptPtr& c, bool positive, std::string* why) {
  switch (c->ctor) {
    case Ctor::Top:
    case Ctor::Bot:
    case Ctor::Name:
      return true;
    case Ctor::Or:
      if (positive) {
        if (why) *why = "disjunction occurs positively in " + c->repr;
        return false;
      }
      break;
    case Ctor::Not:
      if (!positive) {
        if (why) *why = "negation occurs negatively in " + c->repr;
        return false;
      }
      return horn_ok(c->kids[0], !positive, why);
    case Ctor::Forall:
      if (!positive) {
        if (why) *why = "value restriction occurs negatively in " + c->repr;
        return false;
      }
      break;
    default:
      break;
  }
  for (const auto& k : c->kids)
    if (!horn_ok(k, positive, why)) return false;
  return true;
}

inline bool uses_inverse(const ConceptPtr& c) {
  if ((c->ctor == Ctor::Exists || c->ctor == Ctor::Forall) && c->role.inverted)
    return true;
  for (const auto& k : c->kids)
    if (uses_inverse(k)) return true;
  return false;
}

}  // namespace detail

// Shape of a terminological TBox: every axiom is A <= C or A == C with a
// concept name on the left, and no name is defined twice.
inline bool terminological_shape(const TBox& t, std::string* why = nullptr) {
  std::set<std::string> lhs_names;
  for (std::size_t i = 0; i < t.axioms.size(); ++i) {
    const Axiom& a = t.axioms[i];
    if (a.kind == AxKind::RSub) {
      if (why) *why = "axiom " + std::to_string(i) + " is a role inclusion";
      return false;
    }
    if (a.lhs->ctor != Ctor::Name) {
      if (why)
        *why = "axiom " + std::to_string(i) + " does not have a concept name on the left";
      return false;
    }
    if (!lhs_names.insert(a.lhs->name).second) {
      if (why) *why = "concept name " + a.lhs->name + " is defined twice";
      return false;
    }
  }
  return true;
}

enum class DepMode { All, Definitional };

namespace detail {
// Dependency closure through concept-name definitions.  Returns everything
// reachable from `start`'s definition; `cyclic` is set if `start` reaches
// itself.
inline Signature dep_closure(const TBox& t, const std::string& start,
                             DepMode mode, bool* cyclic) {
  std::map<std::string, const Axiom*> defs;
  for (const auto& a : t.axioms)
    if (a.kind != AxKind::RSub && a.lhs->ctor == Ctor::Name)
      defs.emplace(a.lhs->name, &a);
  Signature out;
  if (cyclic) *cyclic = false;
  std::vector<std::string> work{start};
  std::set<std::string> expanded;
  while (!work.empty()) {
    std::string n = work.back();
    work.pop_back();
    if (!expanded.insert(n).second) continue;
    auto it = defs.find(n);
    if (it == defs.end()) continue;
    if (mode == DepMode::Definitional && it->second->kind != AxKind::Equiv)
      continue;
    Signature ds = sig(it->second->rhs);
    for (const auto& r : ds.roles) out.roles.insert(r);
    for (const auto& c : ds.concepts) {
      if (c == start && cyclic) *cyclic = true;
      out.concepts.insert(c);
      work.push_back(c);
    }
  }
  return out;
}
}  // namespace detail

// Dependency set of `name` in a terminological TBox; the closure follows
// concept-name definitions transitively (definitional mode follows == only).
inline Signature dependencies(const TBox& t, const std::string& name,
                              DepMode mode = DepMode::All) {
  std::string why;
  if (!terminological_shape(t, &why))
    throw std::invalid_argument("dependencies: " + why);
  bool cyclic = false;
  Signature out = detail::dep_closure(t, name, mode, &cyclic);
  if (cyclic)
    throw std::invalid_argument("dependencies: cyclic dependency through " + name);
  return out;
}

inline FragmentReport validate_fragment(const TBox& t, FragmentTag tag) {
  FragmentReport rep;
  std::string why;
  switch (tag) {
    case FragmentTag::EL:
    case FragmentTag::AcyclicEL: {
      for (std::size_t i = 0; i < t.axioms.size(); ++i) {
        const Axiom& a = t.axioms[i];
        if (a.kind == AxKind::RSub) {
          rep.flag(i, "role inclusions are not EL");
          continue;
        }
        if (!detail::is_el_concept(a.lhs, &why) ||
            !detail::is_el_concept(a.rhs, &why))
          rep.flag(i, why);
      }
      if (tag == FragmentTag::EL || !rep.ok) break;
      // Acyclic shape: name on the left, unique definitions, no cycles.
      std::set<std::string> lhs_names;
      for (std::size_t i = 0; i < t.axioms.size(); ++i) {
        const Axiom& a = t.axioms[i];
        if (a.lhs->ctor != Ctor::Name) {
          rep.flag(i, "left-hand side must be a concept name");
          continue;
        }
        if (!lhs_names.insert(a.lhs->name).second)
          rep.flag(i, "concept name " + a.lhs->name + " is defined twice");
      }
      if (!rep.ok) break;
      for (std::size_t i = 0; i < t.axioms.size(); ++i) {
        bool cyclic = false;
        detail::dep_closure(t, t.axioms[i].lhs->name, DepMode::All, &cyclic);
        if (cyclic)
          rep.flag(i, "concept name " + t.axioms[i].lhs->name +
                          " depends on itself");
      }
      break;
    }
    case FragmentTag::DLLiteCore:
    case FragmentTag::DLLiteCoreH: {
      for (std::size_t i = 0; i < t.axioms.size(); ++i) {
        const Axiom& a = t.axioms[i];
        if (a.kind == AxKind::RSub) {
          if (tag == FragmentTag::DLLiteCore)
            rep.flag(i, "role inclusions need the role hierarchy dialect");
          continue;
        }
        if (a.kind == AxKind::Equiv) {
          rep.flag(i, "equivalences are not in the dialect");
          continue;
        }
        bool ok = false;
        if (detail::is_dllite_basic(a.lhs) && detail::is_dllite_basic(a.rhs))
          ok = true;
        else if (a.rhs->ctor == Ctor::Bot && a.lhs->ctor == Ctor::And &&
                 a.lhs->kids.size() == 2 &&
                 detail::is_dllite_basic(a.lhs->kids[0]) &&
                 detail::is_dllite_basic(a.lhs->kids[1]))
          ok = true;
        if (!ok)
          rep.flag(i, "axiom is not of the form B1 <= B2 or B1 and B2 <= Bot");
      }
      break;
    }
    case FragmentTag::HornALC: {
      for (std::size_t i = 0; i < t.axioms.size(); ++i) {
        const Axiom& a = t.axioms[i];
        if (a.kind == AxKind::RSub) {
          rep.flag(i, "role inclusions are not in the dialect");
          continue;
        }
        if (detail::uses_inverse(a.lhs) || detail::uses_inverse(a.rhs)) {
          rep.flag(i, "inverse roles are not in the dialect");
          continue;
        }
        bool ok = detail::horn_ok(a.lhs, false, &why) &&
                  detail::horn_ok(a.rhs, true, &why);
        if (ok && a.kind == AxKind::Equiv)
          ok = detail::horn_ok(a.rhs, false, &why) &&
               detail::horn_ok(a.lhs, true, &why);
        if (!ok) rep.flag(i, why);
      }
      break;
    }
    case FragmentTag::ALCHI:
      break;  // the grammar is exactly this fragment
  }
  return rep;
}

// Most specific fragment the TBox fits in.
inline FragmentTag detect_fragment(const TBox& t) {
  for (FragmentTag tag : {FragmentTag::AcyclicEL, FragmentTag::EL,
                          FragmentTag::DLLiteCore, FragmentTag::DLLiteCoreH,
                          FragmentTag::HornALC})
    if (validate_fragment(t, tag).ok) return tag;
  return FragmentTag::ALCHI;
}

// -------------------------------------------------------- EL normalization

struct NormalizedEL {
  TBox tbox;
  // fresh concept name -> the subconcept it abbreviates
  std::map<std::string, ConceptPtr> origin;
};

namespace detail {

class FreshNames {
 public:
  explicit FreshNames(Signature used) : used_(std::move(used)) {}
  std::string next() {
    for (;;) {
      std::string cand = "_n" + std::to_string(++k_);
      if (!used_.has_concept(cand) && !used_.has_role(cand)) {
        used_.concepts.insert(cand);
        return cand;
      }
    }
  }

 private:
  Signature used_;
  int k_ = 0;
};

inline bool el_atomic(const ConceptPtr& c) {
  return c->ctor == Ctor::Name || c->ctor == Ctor::Top;
}

}  // namespace detail

// Rewrites an EL TBox into the normal forms
//   A <= B,  A1 and A2 <= B,  A <= some r B,  some r A <= B
// with A, B concept names or Top.  The result is a conservative extension;
// fresh names are reported in `origin`.
inline NormalizedEL normalize_el(const TBox& t) {
  {
    FragmentReport rep = validate_fragment(t, FragmentTag::EL);
    if (!rep.ok)
      throw std::invalid_argument("normalize_el: input is not EL (axiom " +
                                  std::to_string(rep.offending[0].first) +
                                  ": " + rep.offending[0].second + ")");
  }
  detail::FreshNames fresh(sig(t));
  NormalizedEL out;
  std::vector<std::pair<ConceptPtr, ConceptPtr>> work;
  for (const auto& a : t.axioms) {
    work.emplace_back(a.lhs, a.rhs);
    if (a.kind == AxKind::Equiv) work.emplace_back(a.rhs, a.lhs);
  }
  auto abbreviate = [&](const ConceptPtr& c) {
    std::string n = fresh.next();
    out.origin.emplace(n, c);
    return name(n);
  };
  std::size_t head = 0;
  auto push = [&](ConceptPtr l, ConceptPtr r) {
    work.emplace_back(std::move(l), std::move(r));
  };
  while (head < work.size()) {
    auto [lhs, rhs] = work[head++];
    // right side first: split conjunctions, name complex fillers
    if (rhs->ctor == Ctor::And) {
      for (const auto& k : rhs->kids) push(lhs, k);
      continue;
    }
    if (rhs->ctor == Ctor::Exists && !detail::el_atomic(rhs->kids[0])) {
      ConceptPtr a = abbreviate(rhs->kids[0]);
      push(lhs, exists(rhs->role, a));
      push(a, rhs->kids[0]);
      continue;
    }
    // left side
    if (lhs->ctor == Ctor::And) {
      std::vector<ConceptPtr> parts = flatten_and(lhs);
      std::sort(parts.begin(), parts.end(), ConceptLess{});
      parts.erase(std::unique(parts.begin(), parts.end(),
                              [](const ConceptPtr& a, const ConceptPtr& b) {
                                return a->repr == b->repr;
                              }),
                  parts.end());
      // Top conjuncts are redundant on the left
      std::erase_if(parts,
                    [](const ConceptPtr& p) { return p->ctor == Ctor::Top; });
      if (parts.empty()) {
        push(top(), rhs);
        continue;
      }
      if (parts.size() == 1) {
        push(parts[0], rhs);
        continue;
      }
      bool changed = false;
      for (auto& p : parts) {
        if (!detail::el_atomic(p)) {
          ConceptPtr a = abbreviate(p);
          push(p, a);
          p = a;
          changed = true;
        }
      }
      if (changed) {
        push(conj(parts), rhs);
        continue;
      }
      if (parts.size() > 2) {
        // binarize left to right
        ConceptPtr acc = parts[0];
        for (std::size_t i = 1; i + 1 < parts.size(); ++i) {
          ConceptPtr step = conj({acc, parts[i]});
          ConceptPtr a = abbreviate(step);
          out.tbox.axioms.push_back(Axiom::sub(step, a));
          acc = a;
        }
        push(conj({acc, parts.back()}), rhs);
        continue;
      }
      if (!detail::el_atomic(rhs)) {
        ConceptPtr a = abbreviate(lhs);
        push(lhs, a);
        push(a, rhs);
        continue;
      }
      out.tbox.axioms.push_back(Axiom::sub(conj(parts), rhs));
      continue;
    }
    if (lhs->ctor == Ctor::Exists) {
      if (!detail::el_atomic(lhs->kids[0])) {
        ConceptPtr a = abbreviate(lhs->kids[0]);
        push(lhs->kids[0], a);
        push(exists(lhs->role, a), rhs);
        continue;
      }
      if (!detail::el_atomic(rhs)) {
        ConceptPtr a = abbreviate(lhs);
        push(lhs, a);
        push(a, rhs);
        continue;
      }
      out.tbox.axioms.push_back(Axiom::sub(lhs, rhs));
      continue;
    }
    // lhs atomic
    out.tbox.axioms.push_back(Axiom::sub(lhs, rhs));
  }
  out.tbox.fragment = FragmentTag::EL;
  return out;
}

}  // namespace insep::syntax
