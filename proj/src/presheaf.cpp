#include "workbench/presheaf.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <numeric>
#include <sstream>

namespace wb {

namespace {

std::uint64_t nextStructureId() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

// Union-find over dense indices.
struct Uf {
  std::vector<int> parent;
  explicit Uf(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a); b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);  // keep smallest index as representative
    parent[b] = a;
    return true;
  }
};

}  // namespace

const Signature::Rel* Signature::rel(std::string_view n) const {
  for (const auto& r : rels) if (r.name == n) return &r;
  return nullptr;
}
const Signature::Fun* Signature::fun(std::string_view n) const {
  for (const auto& f : funs) if (f.name == n) return &f;
  return nullptr;
}
const Signature::Const* Signature::cnst(std::string_view n) const {
  for (const auto& c : consts) if (c.name == n) return &c;
  return nullptr;
}
bool Signature::lax() const {
  for (const auto& c : consts)
    if (!c.extentName.empty() && c.extentName != "top") return true;
  return false;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& v : violations)
    out << "violated law: " << v.law << "\n  " << v.detail << "\n";
  return out.str();
}

Elem Structure::tupleExtent(const std::vector<Sec>& t) const {
  Elem acc = omega_->top();
  for (Sec a : t) acc = omega_->meet(acc, extent_[a]);
  return acc;
}

std::vector<Sec> Structure::restrictTuple(const std::vector<Sec>& t, Elem p) const {
  std::vector<Sec> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = restrict(t[i], p);
  return out;
}

Elem Structure::tupleEq(const std::vector<Sec>& a, const std::vector<Sec>& b) const {
  assert(a.size() == b.size());
  Elem acc = omega_->top();
  for (std::size_t i = 0; i < a.size(); ++i) acc = omega_->meet(acc, eqValue(a[i], b[i]));
  return acc;
}

std::size_t Structure::tupleCode(const std::vector<Sec>& t) const {
  std::size_t code = 0;
  for (std::size_t i = t.size(); i-- > 0;) code = code * carrierSize() + t[i];
  return code;
}

Elem Structure::relValue(int relIdx, const std::vector<Sec>& args) const {
  assert(static_cast<int>(args.size()) == sig_->rels[relIdx].arity);
  return rel_[relIdx][tupleCode(args)];
}

Sec Structure::funValue(int funIdx, const std::vector<Sec>& args) const {
  assert(static_cast<int>(args.size()) == sig_->funs[funIdx].arity);
  return fun_[funIdx][tupleCode(args)];
}

Sec Structure::constValue(int constIdx) const { return const_[constIdx]; }

std::optional<Sec> Structure::findSection(std::string_view name) const {
  for (Sec a = 0; a < secName_.size(); ++a)
    if (secName_[a] == name) return a;
  return std::nullopt;
}

Sec Structure::sectionExpr(std::string_view expr) const {
  auto bar = expr.find('|');
  std::string_view base = expr.substr(0, bar);
  auto sec = findSection(base);
  if (!sec)
    throw ConfigError("structure " + name_ + " has no section named '" +
                      std::string(base) + "'");
  if (bar == std::string_view::npos) return *sec;
  Elem p = omega_->elemOrThrow(expr.substr(bar + 1));
  return restrict(*sec, p);
}

std::vector<Sec> Structure::parseTuple(std::string_view text) const {
  std::vector<Sec> out;
  if (text.empty() || text == "-" || text == "()") return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto piece = text.substr(start, comma == std::string_view::npos
                                        ? std::string_view::npos
                                        : comma - start);
    // trim blanks
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    if (piece.empty())
      throw ConfigError("empty item in section tuple '" + std::string(text) + "'");
    out.push_back(sectionExpr(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

StructurePtr Structure::clone(const std::string& newName) const {
  auto copy = std::shared_ptr<Structure>(new Structure(*this));
  copy->name_ = newName;
  copy->id_ = nextStructureId();
  return copy;
}

std::string tupleToString(const Structure& m, const std::vector<Sec>& t) {
  if (t.empty()) return "()";
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ",";
    out += m.secName(t[i]);
  }
  return out;
}

StructureBuilder::StructureBuilder(const HeytingAlgebra& omega,
                                   const Signature& sig, std::string name)
    : omega_(omega), sig_(sig), name_(std::move(name)) {}

void StructureBuilder::addSection(const std::string& name, Elem extent) {
  for (const auto& g : gens_)
    if (g.name == name)
      throw ConfigError("duplicate section name '" + name + "'");
  gens_.push_back({name, extent});
}

void StructureBuilder::identify(const std::string& lhs, Elem lp,
                                const std::string& rhs, Elem rp) {
  idents_.push_back({lhs, lp, rhs, rp});
}

void StructureBuilder::setRel(const std::string& rel,
                              const std::vector<std::string>& args, Elem value) {
  const auto* r = sig_.rel(rel);
  if (!r) throw ConfigError("signature " + sig_.name + " has no relation '" + rel + "'");
  if (static_cast<int>(args.size()) != r->arity)
    throw ConfigError("relation " + rel + " expects " + std::to_string(r->arity) +
                      " arguments, got " + std::to_string(args.size()));
  relDecls_.push_back({rel, args, value});
}

void StructureBuilder::setFun(const std::string& fun,
                              const std::vector<std::string>& args,
                              const std::string& value) {
  const auto* f = sig_.fun(fun);
  if (!f) throw ConfigError("signature " + sig_.name + " has no function '" + fun + "'");
  if (static_cast<int>(args.size()) != f->arity)
    throw ConfigError("function " + fun + " expects " + std::to_string(f->arity) +
                      " arguments, got " + std::to_string(args.size()));
  funDecls_.push_back({fun, args, value});
}

void StructureBuilder::setConst(const std::string& cname, const std::string& value) {
  if (!sig_.cnst(cname))
    throw ConfigError("signature " + sig_.name + " has no constant '" + cname + "'");
  constDecls_.push_back({cname, value});
}

std::pair<StructurePtr, ValidationReport> StructureBuilder::build(bool strict) {
  ValidationReport report;
  const std::size_t no = omega_.size();
  const std::size_t ng = gens_.size();

  // Pair space: (generator g, element p <= E g) stands for g|p.  Canonical
  // code for (g, p) meets p down to the generator's extent first.
  auto code = [&](std::size_t g, Elem p) {
    return static_cast<int>(g * no + omega_.meet(gens_[g].extent, p));
  };
  Uf uf(static_cast<int>(ng * no));

  for (const auto& id : idents_) {
    auto findGen = [&](const std::string& n) -> std::size_t {
      for (std::size_t g = 0; g < ng; ++g)
        if (gens_[g].name == n) return g;
      throw ConfigError("identification names unknown section '" + n + "'");
    };
    uf.unite(code(findGen(id.lhs), id.lp), code(findGen(id.rhs), id.rp));
  }

  // Close under the congruence x = y  =>  x|q = y|q, then quotient by
  // extensionality (equal extents and agreement strictly below force
  // equality), iterating both to a fixpoint.
  auto congruence = [&]() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t g = 0; g < ng; ++g)
        for (Elem p = 0; p < no; ++p) {
          if (code(g, p) != static_cast<int>(g * no + p)) continue;  // canonical only
          int cls = uf.find(code(g, p));
          if (cls == code(g, p)) continue;
          auto g2 = static_cast<std::size_t>(cls) / no;
          Elem p2 = static_cast<Elem>(cls % no);
          for (Elem q = 0; q < no; ++q)
            changed |= uf.unite(code(g, omega_.meet(p, q)),
                                code(g2, omega_.meet(p2, q)));
        }
    }
  };
  congruence();

  // Extent consistency inside classes (identifications cannot change extents).
  for (std::size_t g = 0; g < ng; ++g)
    for (Elem p = 0; p < no; ++p) {
      if (code(g, p) != static_cast<int>(g * no + p)) continue;
      int cls = uf.find(code(g, p));
      auto g2 = static_cast<std::size_t>(cls) / no;
      Elem p2 = static_cast<Elem>(cls % no);
      Elem e1 = omega_.meet(gens_[g].extent, p);
      Elem e2 = omega_.meet(gens_[g2].extent, p2);
      if (e1 != e2) {
        report.violations.push_back(
            {"E(a|p) = E(a) /\\ p",
             "identification makes " + gens_[g].name + "|" + omega_.name(p) +
                 " (extent " + omega_.name(e1) + ") equal to " + gens_[g2].name +
                 "|" + omega_.name(p2) + " (extent " + omega_.name(e2) +
                 "), but equal sections must have equal extents"});
        return {nullptr, report};
      }
    }

  // Extensionality quotient.
  for (bool merged = true; merged;) {
    merged = false;
    std::vector<int> classes;
    for (std::size_t g = 0; g < ng; ++g)
      for (Elem p = 0; p < no; ++p)
        if (code(g, p) == static_cast<int>(g * no + p) &&
            uf.find(code(g, p)) == code(g, p))
          classes.push_back(code(g, p));
    auto extentOf = [&](int cls) {
      return omega_.meet(gens_[static_cast<std::size_t>(cls) / no].extent,
                         static_cast<Elem>(cls % no));
    };
    auto restrictCls = [&](int cls, Elem q) {
      auto g = static_cast<std::size_t>(cls) / no;
      Elem p = static_cast<Elem>(cls % no);
      return uf.find(code(g, omega_.meet(p, q)));
    };
    for (std::size_t i = 0; i < classes.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < classes.size() && !merged; ++j) {
        int u = uf.find(classes[i]), v = uf.find(classes[j]);
        if (u == v) continue;
        Elem e = extentOf(u);
        if (e != extentOf(v)) continue;
        Elem agree = omega_.bot();
        for (Elem q = 0; q < no; ++q)
          if (omega_.leq(q, e) && restrictCls(u, q) == restrictCls(v, q))
            agree = omega_.join(agree, q);
        if (agree == e) {
          uf.unite(u, v);
          congruence();
          merged = true;
        }
      }
  }

  // Carrier: one section per class, ordered by smallest member code so the
  // numbering is deterministic.
  std::vector<int> reps;
  for (std::size_t g = 0; g < ng; ++g)
    for (Elem p = 0; p < no; ++p) {
      int c = code(g, p);
      if (c == static_cast<int>(g * no + p) && uf.find(c) == c) reps.push_back(c);
    }
  std::sort(reps.begin(), reps.end());
  std::vector<Sec> classToSec(ng * no, 0);
  for (std::size_t s = 0; s < reps.size(); ++s)
    classToSec[static_cast<std::size_t>(reps[s])] = static_cast<Sec>(s);
  auto secOf = [&](std::size_t g, Elem p) {
    return classToSec[static_cast<std::size_t>(uf.find(code(g, p)))];
  };

  auto st = std::shared_ptr<Structure>(new Structure());
  st->omega_ = &omega_;
  st->sig_ = &sig_;
  st->name_ = name_;
  st->id_ = nextStructureId();
  const std::size_t n = reps.size();
  st->extent_.resize(n);
  st->secName_.resize(n);
  st->restrict_.resize(n * no);
  for (std::size_t s = 0; s < n; ++s) {
    auto g = static_cast<std::size_t>(reps[s]) / no;
    Elem p = static_cast<Elem>(reps[s] % no);
    st->extent_[s] = omega_.meet(gens_[g].extent, p);
    st->secName_[s] = st->extent_[s] == gens_[g].extent
                          ? gens_[g].name
                          : gens_[g].name + "|" + omega_.name(st->extent_[s]);
    for (Elem q = 0; q < no; ++q)
      st->restrict_[s * no + q] = secOf(g, omega_.meet(p, q));
  }

  // Omega-valued equality from the finished restriction tables.
  st->eq_.assign(n * n, 0);
  for (Sec a = 0; a < n; ++a)
    for (Sec b = 0; b < n; ++b) {
      Elem acc = omega_.bot();
      Elem cap = omega_.meet(st->extent_[a], st->extent_[b]);
      for (Elem q = 0; q < no; ++q)
        if (omega_.leq(q, cap) && st->restrict_[a * no + q] == st->restrict_[b * no + q])
          acc = omega_.join(acc, q);
      st->eq_[a * n + b] = acc;
    }

  // --- Relations: forced closure from the declarations, then verify that
  // every declaration is achieved exactly.
  auto allTuples = [&](int arity) {
    std::size_t count = 1;
    for (int i = 0; i < arity; ++i) {
      count *= n;
      if (count > (1u << 22))
        throw CapExceeded("interpretation table for arity " +
                          std::to_string(arity) + " over a carrier of " +
                          std::to_string(n) + " sections is too large");
    }
    return count;
  };
  auto decodeTuple = [&](std::size_t codeVal, int arity) {
    std::vector<Sec> t(static_cast<std::size_t>(arity));
    for (int i = 0; i < arity; ++i) { t[static_cast<std::size_t>(i)] = static_cast<Sec>(codeVal % n); codeVal /= n; }
    return t;
  };

  st->rel_.resize(sig_.rels.size());
  for (std::size_t r = 0; r < sig_.rels.size(); ++r) {
    int arity = sig_.rels[r].arity;
    std::size_t count = allTuples(arity);
    std::vector<std::pair<std::vector<Sec>, Elem>> decls;
    for (const auto& d : relDecls_)
      if (d.rel == sig_.rels[r].name) {
        std::vector<Sec> args;
        for (const auto& a : d.args) args.push_back(st->sectionExpr(a));
        decls.push_back({args, d.value});
      }
    auto& table = st->rel_[r];
    table.assign(count, omega_.bot());
    for (std::size_t t = 0; t < count; ++t) {
      auto tup = decodeTuple(t, arity);
      Elem acc = omega_.bot();
      for (const auto& [args, v] : decls)
        acc = omega_.join(acc, omega_.meet(v, st->tupleEq(tup, args)));
      table[t] = acc;
    }
    for (const auto& [args, v] : decls) {
      Elem got = table[st->tupleCode(args)];
      if (got == v) continue;
      const std::string rn = sig_.rels[r].name;
      Elem eb = st->tupleExtent(args);
      if (!omega_.leq(v, eb)) {
        report.violations.push_back(
            {"R(a-bar) <= E(a-bar)",
             rn + "(" + tupleToString(*st, args) + ") declared " + omega_.name(v) +
                 " but the tuple extent is only " + omega_.name(eb)});
        continue;
      }
      // Find the declaration forcing the larger value.
      for (const auto& [args2, v2] : decls) {
        Elem push = omega_.meet(v2, st->tupleEq(args, args2));
        if (omega_.leq(push, v)) continue;
        bool uniformRestr = false;
        for (Elem p = 0; p < no && !uniformRestr; ++p)
          if (st->restrictTuple(args2, p) == args) uniformRestr = true;
        if (uniformRestr)
          report.violations.push_back(
              {"R(a-bar|p) = R(a-bar) /\\ p",
               rn + "(" + tupleToString(*st, args) + ") declared " + omega_.name(v) +
                   " but " + rn + "(" + tupleToString(*st, args2) + ") = " +
                   omega_.name(v2) + " forces " + omega_.name(got)});
        else
          report.violations.push_back(
              {"eq(a-bar, b-bar) /\\ R(a-bar) <= R(b-bar)",
               rn + "(" + tupleToString(*st, args) + ") declared " + omega_.name(v) +
                   " but " + rn + "(" + tupleToString(*st, args2) + ") = " +
                   omega_.name(v2) + " forces at least " + omega_.name(push)});
        break;
      }
    }
  }

  // --- Functions: declarations must cover the carrier (componentwise
  // restriction of a declared tuple); the extension is f(a-bar)|E(x-bar).
  st->fun_.resize(sig_.funs.size());
  for (std::size_t f = 0; f < sig_.funs.size(); ++f) {
    int arity = sig_.funs[f].arity;
    std::size_t count = allTuples(arity);
    const std::string fn = sig_.funs[f].name;
    std::vector<std::pair<std::vector<Sec>, Sec>> decls;
    for (const auto& d : funDecls_)
      if (d.fun == fn) {
        std::vector<Sec> args;
        for (const auto& a : d.args) args.push_back(st->sectionExpr(a));
        decls.push_back({args, st->sectionExpr(d.value)});
      }
    for (const auto& [args, img] : decls)
      if (st->extent_[img] != st->tupleExtent(args))
        report.violations.push_back(
            {"E f(a-bar) = E(a-bar)",
             fn + "(" + tupleToString(*st, args) + ") = " + st->secName_[img] +
                 " has image extent " + omega_.name(st->extent_[img]) +
                 " but argument extent " + omega_.name(st->tupleExtent(args))});
    for (std::size_t i = 0; i < decls.size(); ++i)
      for (std::size_t j = i + 1; j < decls.size(); ++j) {
        Elem close = omega_.meet(st->tupleEq(decls[i].first, decls[j].first),
                                 omega_.meet(st->tupleExtent(decls[i].first),
                                             st->tupleExtent(decls[j].first)));
        if (!omega_.leq(close, st->eqValue(decls[i].second, decls[j].second)))
          report.violations.push_back(
              {"eq(a-bar, b-bar) /\\ E f(a-bar) <= eq(f(a-bar), f(b-bar))",
               fn + "(" + tupleToString(*st, decls[i].first) + ") = " +
                   st->secName_[decls[i].second] + " and " + fn + "(" +
                   tupleToString(*st, decls[j].first) + ") = " +
                   st->secName_[decls[j].second] + " disagree below " +
                   omega_.name(close)});
      }
    auto& table = st->fun_[f];
    table.assign(count, 0);
    for (std::size_t t = 0; t < count; ++t) {
      auto tup = decodeTuple(t, arity);
      Elem et = st->tupleExtent(tup);
      bool found = false;
      for (const auto& [args, img] : decls) {
        if (st->restrictTuple(args, et) != st->restrictTuple(tup, et)) continue;
        bool below = true;
        for (std::size_t i = 0; i < tup.size() && below; ++i)
          below = st->restrict_[args[i] * no + st->extent_[tup[i]]] == tup[i];
        if (!below) continue;
        table[t] = st->restrict_[img * no + et];
        found = true;
        break;
      }
      if (!found) {
        report.violations.push_back(
            {"function interpretations are total",
             fn + " has no declared value covering (" + tupleToString(*st, tup) +
                 ")"});
        break;
      }
    }
  }

  // --- Constants.
  st->const_.resize(sig_.consts.size(), 0);
  for (std::size_t c = 0; c < sig_.consts.size(); ++c) {
    const auto& cd = sig_.consts[c];
    const ConstDecl* decl = nullptr;
    for (const auto& d : constDecls_)
      if (d.cname == cd.name) decl = &d;
    if (!decl) {
      report.violations.push_back({"constant interpretations are total",
                                   "no interpretation declared for constant " + cd.name});
      continue;
    }
    Sec s = st->sectionExpr(decl->value);
    st->const_[c] = s;
    Elem want = cd.extentName.empty() ? omega_.top()
                                      : omega_.elemOrThrow(cd.extentName);
    if (strict && want != omega_.top()) {
      report.violations.push_back(
          {"E c = top (strict constants)",
           "constant " + cd.name + " declares extent " + omega_.name(want) +
               "; lax extents need lax mode"});
      continue;
    }
    if (st->extent_[s] != want)
      report.violations.push_back(
          {"E c matches the declared constant extent",
           "constant " + cd.name + " = " + st->secName_[s] + " has extent " +
               omega_.name(st->extent_[s]) + " but declares " + omega_.name(want)});
  }

  return {st, report};
}

ValidationReport validateStructure(const Structure& m) {
  ValidationReport report;
  const auto& o = m.omega();
  const std::size_t n = m.carrierSize();
  auto add = [&](const std::string& law, const std::string& detail) {
    report.violations.push_back({law, detail});
  };

  for (Sec a = 0; a < n; ++a) {
    for (Elem p = 0; p < o.size(); ++p) {
      Sec ap = m.restrict(a, p);
      if (m.extent(ap) != o.meet(m.extent(a), p))
        add("E(a|p) = E(a) /\\ p", m.secName(a) + "|" + o.name(p));
      for (Elem q = 0; q < o.size(); ++q)
        if (m.restrict(ap, q) != m.restrict(a, o.meet(p, q)))
          add("(a|p)|q = a|(p /\\ q)",
              m.secName(a) + " with p=" + o.name(p) + " q=" + o.name(q));
    }
    if (m.restrict(a, m.extent(a)) != a)
      add("a|E(a) = a", m.secName(a));
  }

  // Extensionality and the equality table itself.
  for (Sec a = 0; a < n; ++a)
    for (Sec b = 0; b < n; ++b) {
      Elem acc = o.bot();
      for (Elem q = 0; q < o.size(); ++q)
        if (o.leq(q, o.meet(m.extent(a), m.extent(b))) &&
            m.restrict(a, q) == m.restrict(b, q))
          acc = o.join(acc, q);
      if (acc != m.eqValue(a, b))
        add("eq(a, b) = join of agreement levels", m.secName(a) + ", " + m.secName(b));
      if (a != b && m.eqValue(a, b) == m.extent(a) && m.extent(a) == m.extent(b))
        add("carrier is extensional", m.secName(a) + " = " + m.secName(b) +
                                          " at their full shared extent");
    }

  // Characteristic-function laws for relations.
  for (std::size_t r = 0; r < m.sig().rels.size(); ++r) {
    int arity = m.sig().rels[r].arity;
    std::vector<Sec> t(static_cast<std::size_t>(arity), 0);
    auto walk = [&](auto&& self, std::size_t pos) -> void {
      if (pos == t.size()) {
        Elem v = m.relValue(static_cast<int>(r), t);
        if (!o.leq(v, m.tupleExtent(t)))
          add("R(a-bar) <= E(a-bar)",
              m.sig().rels[r].name + "(" + tupleToString(m, t) + ")");
        for (Elem p = 0; p < o.size(); ++p)
          if (m.relValue(static_cast<int>(r), m.restrictTuple(t, p)) != o.meet(v, p))
            add("R(a-bar|p) = R(a-bar) /\\ p",
                m.sig().rels[r].name + "(" + tupleToString(m, t) + ") with p=" + o.name(p));
        std::vector<Sec> u(t.size(), 0);
        auto walk2 = [&](auto&& self2, std::size_t pos2) -> void {
          if (pos2 == u.size()) {
            Elem lhs = o.meet(m.tupleEq(t, u), v);
            if (!o.leq(lhs, m.relValue(static_cast<int>(r), u)))
              add("eq(a-bar, b-bar) /\\ R(a-bar) <= R(b-bar)",
                  m.sig().rels[r].name + " on " + tupleToString(m, t) + " vs " +
                      tupleToString(m, u));
            return;
          }
          for (Sec s = 0; s < n; ++s) { u[pos2] = s; self2(self2, pos2 + 1); }
        };
        walk2(walk2, 0);
        return;
      }
      for (Sec s = 0; s < n; ++s) { t[pos] = s; self(self, pos + 1); }
    };
    walk(walk, 0);
  }

  // Function laws.
  for (std::size_t f = 0; f < m.sig().funs.size(); ++f) {
    int arity = m.sig().funs[f].arity;
    std::vector<Sec> t(static_cast<std::size_t>(arity), 0);
    auto walk = [&](auto&& self, std::size_t pos) -> void {
      if (pos == t.size()) {
        Sec img = m.funValue(static_cast<int>(f), t);
        if (m.extent(img) != m.tupleExtent(t))
          add("E f(a-bar) = E(a-bar)",
              m.sig().funs[f].name + "(" + tupleToString(m, t) + ")");
        for (Elem p = 0; p < o.size(); ++p)
          if (m.funValue(static_cast<int>(f), m.restrictTuple(t, p)) != m.restrict(img, p))
            add("f(a-bar|p) = f(a-bar)|p",
                m.sig().funs[f].name + "(" + tupleToString(m, t) + ") with p=" + o.name(p));
        return;
      }
      for (Sec s = 0; s < n; ++s) { t[pos] = s; self(self, pos + 1); }
    };
    walk(walk, 0);
  }

  for (std::size_t c = 0; c < m.sig().consts.size(); ++c) {
    Elem want = m.sig().consts[c].extentName.empty()
                    ? o.top()
                    : o.elemOrThrow(m.sig().consts[c].extentName);
    if (m.extent(m.constValue(static_cast<int>(c))) != want)
      add("E c matches the declared constant extent", m.sig().consts[c].name);
  }

  return report;
}

}  // namespace wb
