#include <algorithm>
#include <sstream>

#include "solver_core.hpp"

namespace ple {
namespace solver {

std::string LinForm::key() const {
  std::ostringstream os;
  os << k.str();
  for (const auto& [n, c] : terms) os << "|" << n << "*" << c.str();
  return os.str();
}

LinForm lin_scale(const LinForm& a, const Rat& c) {
  LinForm r;
  if (c == 0) return r;
  r.k = a.k * c;
  r.terms.reserve(a.terms.size());
  for (const auto& [n, q] : a.terms) r.terms.emplace_back(n, q * c);
  return r;
}

LinForm lin_add(const LinForm& a, const LinForm& b) {
  LinForm r;
  r.k = a.k + b.k;
  size_t i = 0, j = 0;
  while (i < a.terms.size() || j < b.terms.size()) {
    if (j == b.terms.size() ||
        (i < a.terms.size() && a.terms[i].first < b.terms[j].first)) {
      r.terms.push_back(a.terms[i++]);
    } else if (i == a.terms.size() || b.terms[j].first < a.terms[i].first) {
      r.terms.push_back(b.terms[j++]);
    } else {
      Rat c = a.terms[i].second + b.terms[j].second;
      if (c != 0) r.terms.emplace_back(a.terms[i].first, c);
      i++, j++;
    }
  }
  return r;
}

LinForm lin_sub(const LinForm& a, const LinForm& b) {
  return lin_add(a, lin_scale(b, Rat(-1)));
}

Context::Context(const DefEnv& e) : env(e) {
  Node t;
  t.kind = NodeKind::True;
  t.sort = Sort::bool_();
  intern(std::move(t));
  Node f;
  f.kind = NodeKind::False;
  f.sort = Sort::bool_();
  intern(std::move(f));
}

std::string Context::node_key(const Node& n) const {
  std::ostringstream os;
  os << (int)n.kind << "#" << n.name << "#" << n.binder << "#";
  for (int a : n.args) os << a << ",";
  if (n.kind == NodeKind::Lin) os << "L" << n.lin.key();
  os << "#" << n.sort.str();
  return os.str();
}

int Context::intern(Node n) {
  std::string key = node_key(n);
  auto it = table_.find(key);
  if (it != table_.end()) return it->second;
  int id = (int)nodes.size();
  nodes.push_back(std::move(n));
  parents_.emplace_back();
  table_.emplace(std::move(key), id);
  add_parent_edges(id);
  return id;
}

void Context::add_parent_edges(int n) {
  for (int a : nodes[n].args) parents_[a].push_back(n);
}

int Context::mk_var(const std::string& name, Sort s) {
  Node n;
  n.kind = NodeKind::Var;
  n.sort = s;
  n.name = name;
  return intern(std::move(n));
}

int Context::mk_con(const std::string& name, std::vector<int> args) {
  Node n;
  n.kind = NodeKind::Con;
  n.sort = Sort::univ();
  n.name = name;
  n.args = std::move(args);
  return intern(std::move(n));
}

int Context::mk_fun(const std::string& name, std::vector<int> args, Sort s) {
  Node n;
  n.kind = NodeKind::Fun;
  n.sort = s;
  n.name = name;
  n.args = std::move(args);
  return intern(std::move(n));
}

int Context::mk_ulam(int binder, int body, Sort s) {
  Node n;
  n.kind = NodeKind::ULam;
  n.sort = s;
  n.binder = binder;
  n.args = {body};
  return intern(std::move(n));
}

int Context::mk_uapp(int f, int a, Sort s) {
  Node n;
  n.kind = NodeKind::UApp;
  n.sort = s;
  n.args = {f, a};
  return intern(std::move(n));
}

int Context::mk_lin(const LinForm& f) {
  if (f.k == 0 && f.terms.size() == 1 && f.terms[0].second == 1)
    return f.terms[0].first;
  Node n;
  n.kind = NodeKind::Lin;
  n.sort = Sort::int_();
  n.lin = f;
  for (const auto& [a, c] : f.terms) {
    (void)c;
    n.args.push_back(a);
  }
  return intern(std::move(n));
}

LinForm Context::lin_of(int id) const {
  const Node& n = nodes[id];
  if (n.kind == NodeKind::Lin) return n.lin;
  LinForm f;
  f.terms.emplace_back(id, Rat(1));
  return f;
}

bool Context::is_int_atom(int id) const {
  const Node& n = nodes[id];
  return n.sort.is_int() && n.kind != NodeKind::Lin;
}

const std::vector<int>& Context::parents(int n) const { return parents_[n]; }

std::string Context::node_str(int id) const {
  const Node& n = nodes[id];
  std::ostringstream os;
  switch (n.kind) {
    case NodeKind::True: return "true";
    case NodeKind::False: return "false";
    case NodeKind::Var: return n.name;
    case NodeKind::Con:
    case NodeKind::Fun: {
      os << n.name;
      if (!n.args.empty()) {
        os << "(";
        for (size_t i = 0; i < n.args.size(); i++)
          os << (i ? ", " : "") << node_str(n.args[i]);
        os << ")";
      }
      return os.str();
    }
    case NodeKind::ULam:
      os << "(lam %" << n.binder << ". " << node_str(n.args[0]) << ")";
      return os.str();
    case NodeKind::UApp:
      os << "app(" << node_str(n.args[0]) << ", " << node_str(n.args[1]) << ")";
      return os.str();
    case NodeKind::Lin: {
      os << n.lin.k.str();
      for (const auto& [a, c] : n.lin.terms)
        os << " + " << c.str() << "*" << node_str(a);
      return os.str();
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------

CC::CC(Context& c) : ctx(c) { grow(); }

void CC::grow() {
  while (uf_.size() < ctx.nodes.size()) {
    int id = (int)uf_.size();
    uf_.push_back(id);
    members_.push_back({id});
  }
}

int CC::find_(int a) {
  while (uf_[a] != a) {
    uf_[a] = uf_[uf_[a]];
    a = uf_[a];
  }
  return a;
}

int CC::find(int a) {
  grow();
  return find_(a);
}

void CC::merge(int a, int b) {
  grow();
  pending_.emplace_back(a, b);
}

void CC::add_diseq(int a, int b) {
  grow();
  diseqs_.emplace_back(a, b);
}

int CC::con_member(int rep) {
  for (int m : members_[rep])
    if (ctx.nodes[m].kind == NodeKind::Con) return m;
  return -1;
}

const std::vector<int>& CC::members(int rep) { return members_[rep]; }

bool CC::merge_roots(int ra, int rb) {
  if (ra == rb) return true;
  // Bool constant clash.
  auto is_t = [&](int r) { return find_(ctx.true_node()) == r; };
  auto is_f = [&](int r) { return find_(ctx.false_node()) == r; };
  if ((is_t(ra) && is_f(rb)) || (is_f(ra) && is_t(rb))) {
    conflict = true;
    conflict_why = "true = false";
    return false;
  }
  int ca = con_member(ra), cb = con_member(rb);
  if (ca >= 0 && cb >= 0) {
    const Node& na = ctx.nodes[ca];
    const Node& nb = ctx.nodes[cb];
    if (na.name != nb.name) {
      conflict = true;
      conflict_why = "distinct constructors " + na.name + " / " + nb.name;
      return false;
    }
    for (size_t i = 0; i < na.args.size(); i++)
      pending_.emplace_back(na.args[i], nb.args[i]);  // injectivity
  }
  if (members_[ra].size() < members_[rb].size()) std::swap(ra, rb);
  for (int m : members_[rb]) {
    uf_[m] = ra;
    members_[ra].push_back(m);
  }
  members_[rb].clear();
  return true;
}

namespace {

std::string sig_of(Context& ctx, CC& cc, int id) {
  const Node& n = ctx.nodes[id];
  std::ostringstream os;
  switch (n.kind) {
    case NodeKind::Con: os << "C#" << n.name; break;
    case NodeKind::Fun: os << "F#" << n.name; break;
    case NodeKind::UApp: os << "A#"; break;
    case NodeKind::ULam: os << "L#" << n.binder << "#" << n.sort.str(); break;
    case NodeKind::Lin: {
      // Combine coefficients over representatives.
      std::map<int, Rat> combined;
      for (const auto& [a, c] : n.lin.terms) combined[cc.find(a)] += c;
      os << "N#" << n.lin.k.str();
      for (const auto& [r, c] : combined)
        if (c != 0) os << "|" << r << "*" << c.str();
      return os.str();
    }
    default:
      return "";
  }
  for (int a : n.args) os << "#" << cc.find(a);
  return os.str();
}

}  // namespace

bool CC::propagate() {
  grow();
  while (true) {
    // Congruence fixpoint over the pending merges.
    while (!pending_.empty()) {
      auto [a, b] = pending_.front();
      pending_.pop_front();
      int ra = find_(a), rb = find_(b);
      if (ra == rb) continue;
      if (!merge_roots(ra, rb)) return false;
    }
    // Recompute all composite signatures; enqueue newly congruent pairs.
    // (Rebuild-style: simple and adequate at this scale.)
    std::unordered_map<std::string, int> sigtab;
    bool enqueued = false;
    for (int id = 0; id < (int)ctx.nodes.size(); id++) {
      NodeKind k = ctx.nodes[id].kind;
      if (k == NodeKind::True || k == NodeKind::False || k == NodeKind::Var)
        continue;
      std::string sig = sig_of(ctx, *this, id);
      // A linear form that collapses onto a single atom merges with it.
      if (k == NodeKind::Lin) {
        const Node& n = ctx.nodes[id];
        std::map<int, Rat> combined;
        for (const auto& [a, c] : n.lin.terms) combined[find_(a)] += c;
        if (n.lin.k == 0 && combined.size() == 1 &&
            combined.begin()->second == 1 &&
            find_(combined.begin()->first) != find_(id)) {
          pending_.emplace_back(id, combined.begin()->first);
          enqueued = true;
        }
      }
      auto [it, fresh] = sigtab.emplace(sig, id);
      if (!fresh && find_(it->second) != find_(id)) {
        pending_.emplace_back(it->second, id);
        enqueued = true;
      }
    }
    if (enqueued) continue;
    if (!sweep_rules()) return false;
    if (pending_.empty()) break;
  }
  for (auto& [a, b] : diseqs_) {
    if (find_(a) == find_(b)) {
      conflict = true;
      conflict_why = "disequality violated: " + ctx.node_str(a) +
                     " = " + ctx.node_str(b);
      return false;
    }
  }
  return true;
}

// Checker/selector semantics; checker-true instantiation.
bool CC::sweep_rules() {
  size_t n = ctx.nodes.size();
  for (size_t id = 0; id < n; id++) {
    const Node& node = ctx.nodes[id];
    if (node.kind != NodeKind::Fun) continue;
    if (const Constructor* c = ctx.env.checker_of(node.name)) {
      int rt = find_((int)node.args[0]);
      int cm = con_member(rt);
      if (cm >= 0) {
        bool holds = ctx.nodes[cm].name == c->name;
        int target = holds ? ctx.true_node() : ctx.false_node();
        if (find_((int)id) != find_(target)) pending_.emplace_back((int)id, target);
      } else if (find_((int)id) == find_(ctx.true_node())) {
        // is_C(t) asserted with no constructor in t's class: materialize
        // t = C(sel_C_1(t), ..., sel_C_k(t)). mk_fun/mk_con may reallocate
        // ctx.nodes, so copy what we need out of `node` first.
        int subject = node.args[0];
        std::string key = std::to_string(subject) + "#" + c->name;
        if (instantiated_.insert(key).second) {
          std::vector<int> sels;
          for (size_t j = 0; j < c->fields.size(); j++)
            sels.push_back(
                ctx.mk_fun(c->selectors[j], {subject}, c->fields[j].sort));
          int con = ctx.mk_con(c->name, sels);
          grow();
          pending_.emplace_back(con, subject);
        }
      }
      continue;
    }
    if (auto sel = ctx.env.selector_of(node.name)) {
      int rt = find_((int)node.args[0]);
      int cm = con_member(rt);
      if (cm >= 0 && ctx.nodes[cm].name == sel->first->name) {
        int want = ctx.nodes[cm].args[sel->second];
        if (find_((int)id) != find_(want)) pending_.emplace_back((int)id, want);
      }
    }
  }
  return true;
}

std::vector<std::pair<int, int>> CC::int_class_pairs() {
  grow();
  std::unordered_map<int, int> first_int;
  std::vector<std::pair<int, int>> out;
  for (int id = 0; id < (int)ctx.nodes.size(); id++) {
    if (!ctx.nodes[id].sort.is_int()) continue;
    int r = find_(id);
    auto [it, fresh] = first_int.emplace(r, id);
    if (!fresh) out.emplace_back(it->second, id);
  }
  return out;
}

bool CC::acyclic() {
  grow();
  // Colors: 0 unvisited, 1 on stack, 2 done. Edges: class -> arg classes of
  // its constructor member.
  std::unordered_map<int, int> color;
  std::vector<std::pair<int, size_t>> stack;
  for (int id = 0; id < (int)ctx.nodes.size(); id++) {
    int r = find_(id);
    if (color.count(r) || con_member(r) < 0) continue;
    stack.push_back({r, 0});
    color[r] = 1;
    while (!stack.empty()) {
      auto& [cls, idx] = stack.back();
      int cm = con_member(cls);
      const auto& args = ctx.nodes[cm].args;
      bool advanced = false;
      while (idx < args.size()) {
        int child = find_(args[idx]);
        idx++;
        if (!ctx.nodes[child].sort.is_univ() && con_member(child) < 0) continue;
        if (con_member(child) < 0) continue;
        auto it = color.find(child);
        if (it == color.end()) {
          color[child] = 1;
          stack.push_back({child, 0});
          advanced = true;
          break;
        }
        if (it->second == 1) {
          conflict = true;
          conflict_why = "cyclic constructor value";
          return false;
        }
      }
      if (!advanced && idx >= args.size()) {
        color[cls] = 2;
        stack.pop_back();
      }
    }
  }
  return true;
}

}  // namespace solver
}  // namespace ple
